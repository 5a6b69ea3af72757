#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "strata/core/error.hpp"
#include "strata/core/matrix.hpp"
#include "strata/models/spec.hpp"

namespace strata {

/// Loss trajectory of one fit. Closed-form models record a single entry;
/// boosting records one entry per round. stopped_at is the number of rounds
/// kept in the final ensemble (-1 when not applicable).
struct TrainingReport {
  std::vector<double> train_loss;
  std::vector<double> valid_loss;
  int stopped_at = -1;
};

/// A fitted regression model: immutable, deterministic, pure predict.
class TrainedModel {
public:
  virtual ~TrainedModel() = default;

  virtual ModelKind kind() const = 0;
  virtual std::size_t n_features() const = 0;
  virtual std::size_t n_outputs() const = 0;
  virtual Matrix predict(const Matrix& X) const = 0;
  virtual nlohmann::json to_json() const = 0;

  const TrainingReport& report() const { return report_; }

protected:
  void check_features(const Matrix& X) const {
    require(X.cols == n_features(), ErrCode::DimensionMismatch,
            "model expects " + std::to_string(n_features()) + " features, got " +
                std::to_string(X.cols));
  }

  TrainingReport report_;
};

using ModelPtr = std::unique_ptr<TrainedModel>;

/// Stacks independent single-output models into one multi-output model
/// (used for boosting, which trains one ensemble per target column).
class ColumnStackModel : public TrainedModel {
public:
  ColumnStackModel(ModelKind kind, std::vector<ModelPtr> columns)
      : kind_(kind), columns_(std::move(columns)) {
    require(!columns_.empty(), ErrCode::ConstraintError, "column stack needs >= 1 model");
    // Aggregate report: mean loss across outputs per round, padded with each
    // ensemble's final loss where rounds differ; stopped_at = max kept rounds.
    std::size_t rounds = 0;
    for (const auto& m : columns_) {
      rounds = std::max(rounds, m->report().train_loss.size());
      report_.stopped_at = std::max(report_.stopped_at, m->report().stopped_at);
    }
    for (std::size_t r = 0; r < rounds; ++r) {
      double train = 0.0;
      double valid = 0.0;
      bool has_valid = true;
      for (const auto& m : columns_) {
        const auto& rep = m->report();
        train += rep.train_loss.empty()
                     ? 0.0
                     : rep.train_loss[std::min(r, rep.train_loss.size() - 1)];
        if (rep.valid_loss.empty()) {
          has_valid = false;
        } else {
          valid += rep.valid_loss[std::min(r, rep.valid_loss.size() - 1)];
        }
      }
      report_.train_loss.push_back(train / static_cast<double>(columns_.size()));
      if (has_valid) report_.valid_loss.push_back(valid / static_cast<double>(columns_.size()));
    }
  }

  ModelKind kind() const override { return kind_; }
  std::size_t n_features() const override { return columns_.front()->n_features(); }
  std::size_t n_outputs() const override { return columns_.size(); }

  Matrix predict(const Matrix& X) const override {
    check_features(X);
    Matrix out(X.rows, columns_.size());
    for (std::size_t j = 0; j < columns_.size(); ++j) {
      const Matrix col = columns_[j]->predict(X);
      for (std::size_t r = 0; r < X.rows; ++r) out.at(r, j) = col.at(r, 0);
    }
    return out;
  }

  nlohmann::json to_json() const override {
    nlohmann::json j;
    j["kind"] = "column_stack";
    j["base_kind"] = to_string(kind_);
    j["columns"] = nlohmann::json::array();
    for (const auto& m : columns_) j["columns"].push_back(m->to_json());
    return j;
  }

  const std::vector<ModelPtr>& columns() const { return columns_; }

private:
  ModelKind kind_;
  std::vector<ModelPtr> columns_;
};

}  // namespace strata
