#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "strata/models/model.hpp"

namespace strata {

/// Closed-form multi-output linear model with L2 penalty on everything but
/// the intercept. All output columns share one factorization.
class RidgeModel : public TrainedModel {
public:
  RidgeModel(Matrix weights, double lambda) : weights_(std::move(weights)), lambda_(lambda) {
    report_.stopped_at = -1;
  }

  ModelKind kind() const override { return ModelKind::Ridge; }
  std::size_t n_features() const override { return weights_.rows - 1; }
  std::size_t n_outputs() const override { return weights_.cols; }

  /// Coefficient matrix, (F+1) x M; the last row is the intercept.
  const Matrix& weights() const { return weights_; }
  double lambda() const { return lambda_; }

  Matrix predict(const Matrix& X) const override {
    check_features(X);
    Matrix out(X.rows, weights_.cols);
    for (std::size_t r = 0; r < X.rows; ++r) {
      for (std::size_t j = 0; j < weights_.cols; ++j) {
        double acc = weights_.at(weights_.rows - 1, j);  // intercept
        for (std::size_t f = 0; f < X.cols; ++f) acc += X.at(r, f) * weights_.at(f, j);
        out.at(r, j) = acc;
      }
    }
    return out;
  }

  nlohmann::json to_json() const override {
    nlohmann::json j;
    j["kind"] = "ridge";
    j["lambda"] = lambda_;
    j["n_features"] = n_features();
    j["n_outputs"] = n_outputs();
    j["weights"] = weights_.data;
    return j;
  }

  static ModelPtr from_json(const nlohmann::json& j) {
    Matrix w(j.at("n_features").get<std::size_t>() + 1, j.at("n_outputs").get<std::size_t>());
    w.data = j.at("weights").get<std::vector<double>>();
    require(w.data.size() == w.rows * w.cols, ErrCode::ParseError,
            "ridge weight payload has wrong size");
    return std::make_unique<RidgeModel>(std::move(w), j.at("lambda").get<double>());
  }

private:
  Matrix weights_;
  double lambda_;
};

/// Minimizes ||XW - Y||^2 + lambda ||W||^2 per output column (intercept
/// unpenalized) via the regularized normal equations. With lambda = 0 the
/// system must be full rank; rank deficiency is an error rather than an
/// arbitrary solution.
inline ModelPtr fit_ridge(const Matrix& X, const Matrix& Y, double lambda) {
  require(lambda >= 0.0, ErrCode::ConstraintError, "ridge lambda must be >= 0");
  require(X.rows >= 1, ErrCode::TooFewSamples, "ridge needs >= 1 training row");
  require(X.rows == Y.rows, ErrCode::DimensionMismatch,
          "X has " + std::to_string(X.rows) + " rows, Y has " + std::to_string(Y.rows));
  require(Y.cols >= 1, ErrCode::DimensionMismatch, "ridge needs >= 1 target column");

  const Eigen::Index n = static_cast<Eigen::Index>(X.rows);
  const Eigen::Index f = static_cast<Eigen::Index>(X.cols);
  const Eigen::Index m = static_cast<Eigen::Index>(Y.cols);

  Eigen::MatrixXd Xt(n, f + 1);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < f; ++c) {
      Xt(r, c) = X.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    }
    Xt(r, f) = 1.0;
  }
  Eigen::MatrixXd Ym(n, m);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < m; ++c) {
      Ym(r, c) = Y.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    }
  }

  Eigen::MatrixXd A = Xt.transpose() * Xt;
  A.diagonal().head(f).array() += lambda;  // intercept entry stays unpenalized
  const Eigen::MatrixXd rhs = Xt.transpose() * Ym;

  Eigen::MatrixXd W;
  if (lambda > 0.0) {
    W = A.ldlt().solve(rhs);
  } else {
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < f + 1) {
      raise(ErrCode::SingularSystem,
            "normal equations are rank-deficient with lambda = 0; set lambda > 0");
    }
    W = qr.solve(rhs);
  }

  Matrix weights(static_cast<std::size_t>(f) + 1, static_cast<std::size_t>(m));
  for (Eigen::Index r = 0; r < f + 1; ++r) {
    for (Eigen::Index c = 0; c < m; ++c) {
      weights.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = W(r, c);
    }
  }
  return std::make_unique<RidgeModel>(std::move(weights), lambda);
}

}  // namespace strata
