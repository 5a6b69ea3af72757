#pragma once

#include <string>
#include <vector>

#include "strata/core/schema.hpp"
#include "strata/models/model.hpp"

namespace strata {

/// Baselines that copy lag features forward. Persistence repeats the lag-0
/// value; the seasonal variant continues the last observed period: output
/// for absolute horizon step s (1-based) reads the feature at lag
/// ((period - s) mod period), so the cycle repeats beyond one period.
/// Flattened layouts (scalar targets + horizon-index feature) are supported
/// by resolving the lag per row from the horizon index.
class LagLookupModel : public TrainedModel {
public:
  struct Output {
    int fixed_column = -1;                 // resolved at fit time when step is static
    int block = 0;
    std::vector<std::size_t> lag_columns;  // flattened layouts: lag -> column
  };

  LagLookupModel(ModelKind kind, int period, std::size_t n_features, std::vector<Output> outputs,
                 int horizon_column, std::vector<std::size_t> horizon_onehot)
      : kind_(kind), period_(period), n_features_(n_features), outputs_(std::move(outputs)),
        horizon_column_(horizon_column), horizon_onehot_(std::move(horizon_onehot)) {
    report_.stopped_at = -1;
  }

  ModelKind kind() const override { return kind_; }
  std::size_t n_features() const override { return n_features_; }
  std::size_t n_outputs() const override { return outputs_.size(); }
  int period() const { return period_; }

  Matrix predict(const Matrix& X) const override {
    check_features(X);
    Matrix out(X.rows, outputs_.size());
    for (std::size_t r = 0; r < X.rows; ++r) {
      for (std::size_t j = 0; j < outputs_.size(); ++j) {
        const Output& o = outputs_[j];
        if (o.fixed_column >= 0) {
          out.at(r, j) = X.at(r, static_cast<std::size_t>(o.fixed_column));
          continue;
        }
        const int step = read_horizon(X, r);
        const int lag = positive_mod(period_ - step, period_);
        out.at(r, j) = X.at(r, o.lag_columns[static_cast<std::size_t>(lag)]);
      }
    }
    return out;
  }

  nlohmann::json to_json() const override {
    nlohmann::json j;
    j["kind"] = to_string(kind_);
    j["period"] = period_;
    j["n_features"] = n_features_;
    j["horizon_column"] = horizon_column_;
    j["horizon_onehot"] = horizon_onehot_;
    j["outputs"] = nlohmann::json::array();
    for (const auto& o : outputs_) {
      j["outputs"].push_back({{"fixed_column", o.fixed_column},
                              {"block", o.block},
                              {"lag_columns", o.lag_columns}});
    }
    return j;
  }

  static ModelPtr from_json(const nlohmann::json& j) {
    std::vector<Output> outputs;
    for (const auto& o : j.at("outputs")) {
      Output out;
      out.fixed_column = o.at("fixed_column").get<int>();
      out.block = o.at("block").get<int>();
      out.lag_columns = o.at("lag_columns").get<std::vector<std::size_t>>();
      outputs.push_back(std::move(out));
    }
    const ModelKind kind = j.at("kind").get<std::string>() == "persistence"
                               ? ModelKind::Persistence
                               : ModelKind::SeasonalNaive;
    return std::make_unique<LagLookupModel>(
        kind, j.at("period").get<int>(), j.at("n_features").get<std::size_t>(),
        std::move(outputs), j.at("horizon_column").get<int>(),
        j.at("horizon_onehot").get<std::vector<std::size_t>>());
  }

private:
  static int positive_mod(int x, int p) { return ((x % p) + p) % p; }

  int read_horizon(const Matrix& X, std::size_t r) const {
    if (horizon_column_ >= 0) {
      return static_cast<int>(X.at(r, static_cast<std::size_t>(horizon_column_)));
    }
    for (std::size_t k = 0; k < horizon_onehot_.size(); ++k) {
      if (X.at(r, horizon_onehot_[k]) > 0.5) return static_cast<int>(k) + 1;
    }
    raise(ErrCode::ConstraintError, "flattened row carries no horizon index");
  }

  ModelKind kind_;
  int period_;
  std::size_t n_features_;
  std::vector<Output> outputs_;
  int horizon_column_;
  std::vector<std::size_t> horizon_onehot_;
};

/// Resolves the lag column each output must copy, given the matrix layout.
inline ModelPtr fit_naive(const FeatureSchema& schema, ModelKind kind, int period = 1) {
  require(kind == ModelKind::Persistence || kind == ModelKind::SeasonalNaive,
          ErrCode::ConstraintError, "fit_naive handles persistence and seasonal_naive");
  if (kind == ModelKind::Persistence) period = 1;
  require(period >= 1, ErrCode::ConstraintError, "seasonal_naive period must be >= 1");
  require(schema.n_targets() >= 1, ErrCode::ConstraintError,
          "naive models need a target layout to resolve lag columns");

  auto lag_or_throw = [&](int block, int lag) {
    const int col = schema.find_target_lag(block, lag);
    if (col < 0) {
      raise(ErrCode::InsufficientLags,
            "period " + std::to_string(period) + " needs the lag-" + std::to_string(lag) +
                " feature; increase history to >= " + std::to_string(period));
    }
    return col;
  };

  int horizon_column = -1;
  std::vector<std::size_t> horizon_onehot;
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    if (schema.columns[c].role != ColumnRole::HorizonIndex) continue;
    if (schema.columns[c].source == "horizon") {
      horizon_column = static_cast<int>(c);
    } else {
      horizon_onehot.push_back(c);
    }
  }

  std::vector<LagLookupModel::Output> outputs;
  for (const TargetInfo& t : schema.targets) {
    LagLookupModel::Output o;
    o.block = t.block;
    if (t.step > 0) {
      const int lag = ((period - t.step) % period + period) % period;
      o.fixed_column = lag_or_throw(t.block, lag);
    } else {
      require(horizon_column >= 0 || !horizon_onehot.empty(), ErrCode::ConstraintError,
              "flattened layout lacks a horizon-index column");
      for (int lag = 0; lag < period; ++lag) {
        o.lag_columns.push_back(static_cast<std::size_t>(lag_or_throw(t.block, lag)));
      }
    }
    outputs.push_back(std::move(o));
  }

  return std::make_unique<LagLookupModel>(kind, period, schema.n_features(), std::move(outputs),
                                          horizon_column, std::move(horizon_onehot));
}

}  // namespace strata
