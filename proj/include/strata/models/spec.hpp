#pragma once

#include <cstdint>
#include <string>

#include "strata/core/error.hpp"

namespace strata {

enum class ModelKind { Persistence, SeasonalNaive, Ridge, Gbdt };

inline const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Persistence: return "persistence";
    case ModelKind::SeasonalNaive: return "seasonal_naive";
    case ModelKind::Ridge: return "ridge";
    case ModelKind::Gbdt: return "gbdt";
  }
  return "?";
}

/// Hyperparameters for one model; fields beyond `kind` apply to the kinds
/// noted. Every built-in fit is deterministic, so `seed` exists for interface
/// stability (and run manifests) rather than for any internal RNG.
struct ModelSpec {
  ModelKind kind = ModelKind::Ridge;
  double lambda = 1.0;             // ridge
  int period = 1;                  // seasonal_naive
  int n_trees = 100;               // gbdt
  int max_depth = 3;               // gbdt
  double learning_rate = 0.1;      // gbdt
  int min_samples_leaf = 1;        // gbdt
  int early_stopping_rounds = 0;   // gbdt; 0 disables early stopping
  std::uint64_t seed = 0;

  void validate() const {
    require(lambda >= 0.0, ErrCode::ConstraintError, "ridge lambda must be >= 0");
    require(period >= 1, ErrCode::ConstraintError, "seasonal_naive period must be >= 1");
    require(n_trees >= 1, ErrCode::ConstraintError, "gbdt n_trees must be >= 1");
    require(max_depth >= 1, ErrCode::ConstraintError, "gbdt max_depth must be >= 1");
    require(learning_rate > 0.0 && learning_rate <= 1.0, ErrCode::ConstraintError,
            "gbdt learning_rate must be in (0, 1]");
    require(min_samples_leaf >= 1, ErrCode::ConstraintError,
            "gbdt min_samples_leaf must be >= 1");
    require(early_stopping_rounds >= 0, ErrCode::ConstraintError,
            "gbdt early_stopping_rounds must be >= 0");
  }

  static ModelSpec persistence() {
    ModelSpec s;
    s.kind = ModelKind::Persistence;
    return s;
  }
  static ModelSpec seasonal_naive(int period) {
    ModelSpec s;
    s.kind = ModelKind::SeasonalNaive;
    s.period = period;
    return s;
  }
  static ModelSpec ridge(double lambda) {
    ModelSpec s;
    s.kind = ModelKind::Ridge;
    s.lambda = lambda;
    return s;
  }
  static ModelSpec gbdt(int n_trees, int max_depth, double learning_rate,
                        int min_samples_leaf = 1, int early_stopping_rounds = 0) {
    ModelSpec s;
    s.kind = ModelKind::Gbdt;
    s.n_trees = n_trees;
    s.max_depth = max_depth;
    s.learning_rate = learning_rate;
    s.min_samples_leaf = min_samples_leaf;
    s.early_stopping_rounds = early_stopping_rounds;
    return s;
  }
};

}  // namespace strata
