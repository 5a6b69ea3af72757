#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "strata/core/hash.hpp"
#include "strata/data/load_csv.hpp"
#include "strata/models/spec.hpp"
#include "strata/strategies/spec.hpp"
#include "strata/transforms/spec.hpp"
#include "strata/validation/splits.hpp"

namespace strata {

struct DatasetConfig {
  std::string path;
  RoleMap roles;
  FrequencySpec freq = FrequencySpec::integer();
};

struct ValidationConfig {
  CvScheme scheme = CvScheme::Expanding;
  std::size_t folds = 3;
  std::size_t window = 0;            // rolling scheme only
  std::size_t backtest_windows = 3;
  std::size_t backtest_stride = 0;   // 0 = horizon
};

/// A full experiment description: the dataset, the fixed pipeline settings,
/// and the grids swept by `sweep`. `run` and `backtest` require each grid to
/// hold exactly one entry.
struct RunConfig {
  DatasetConfig dataset;
  std::size_t history = 96;
  std::size_t horizon = 24;
  std::vector<std::string> preprocessing = {"none"};       // "+"-joined tokens
  std::vector<std::string> datetime_features = {"none"};   // "none" or "+"-joined parts
  std::vector<std::string> id_features = {"none"};         // none | label | onehot
  std::vector<StrategySpec> strategies;
  std::vector<ModeSpec> modes;
  std::vector<ModelSpec> models;
  ValidationConfig validation;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
};

namespace cfg {

/// Strict-key guard: every present key must be expected; the error names the
/// offending key with its path so typos surface immediately.
inline void check_keys(const nlohmann::json& obj, const std::string& path,
                       const std::set<std::string>& allowed) {
  if (!obj.is_object()) {
    raise(ErrCode::SchemaError, "'" + path + "' must be a JSON object");
  }
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (allowed.count(key) == 0) {
      raise(ErrCode::SchemaError,
            "unknown key '" + (path.empty() ? key : path + "." + key) + "'");
    }
  }
}

template <typename T>
T get_as(const nlohmann::json& obj, const std::string& path, const std::string& key,
         const T& fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    raise(ErrCode::SchemaError, "'" + path + "." + key + "' has the wrong type");
  }
}

/// Non-negative count with a sanity ceiling; rejects negatives and absurd
/// magnitudes that would otherwise wrap through unsigned conversions.
inline std::size_t get_count(const nlohmann::json& obj, const std::string& path,
                             const std::string& key, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  std::int64_t v = 0;
  try {
    v = obj.at(key).get<std::int64_t>();
  } catch (const nlohmann::json::exception&) {
    raise(ErrCode::SchemaError, "'" + path + (path.empty() ? "" : ".") + key +
                                    "' must be an integer");
  }
  if (v < 0 || v > 100000000) {
    raise(ErrCode::ConstraintError, "'" + path + (path.empty() ? "" : ".") + key +
                                        "' is out of range: " + std::to_string(v));
  }
  return static_cast<std::size_t>(v);
}

inline std::vector<std::string> split_tokens(const std::string& text, char sep = '+') {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

}  // namespace cfg

/// Expands a preprocessing token string into the ordered pipeline transforms.
/// Point transforms keep their written order and precede the lag step; the
/// window normalizer follows it. Examples: "none", "ss", "ss+dn_delta",
/// "ss+lkn_ratio".
inline PipelineConfig make_pipeline(const std::string& preprocessing,
                                    const std::string& datetime_features,
                                    const std::string& id_features, std::size_t history) {
  std::vector<TransformSpec> steps;
  if (preprocessing != "none") {
    for (const std::string& token : cfg::split_tokens(preprocessing)) {
      if (token == "ss") {
        steps.push_back(TransformSpec::scaler(ApplyTo::Both));
      } else if (token == "dn_delta") {
        steps.push_back(TransformSpec::difference(NormalizerMode::Delta));
      } else if (token == "dn_ratio") {
        steps.push_back(TransformSpec::difference(NormalizerMode::Ratio));
      } else if (token == "lkn_delta" || token == "lkn_ratio") {
        continue;  // window normalizer; appended after the lag step below
      } else {
        raise(ErrCode::SchemaError, "unknown preprocessing token '" + token + "' in '" +
                                        preprocessing + "'; expected ss, dn_delta, dn_ratio, "
                                        "lkn_delta or lkn_ratio");
      }
    }
  }
  steps.push_back(TransformSpec::lag(history));
  if (preprocessing != "none") {
    for (const std::string& token : cfg::split_tokens(preprocessing)) {
      if (token == "lkn_delta") {
        steps.push_back(TransformSpec::last_known(NormalizerMode::Delta));
      } else if (token == "lkn_ratio") {
        steps.push_back(TransformSpec::last_known(NormalizerMode::Ratio));
      }
    }
  }

  if (datetime_features != "none") {
    std::vector<DatetimePart> parts;
    for (const std::string& token : cfg::split_tokens(datetime_features)) {
      if (token == "year") {
        parts.push_back(DatetimePart::Year);
      } else if (token == "month") {
        parts.push_back(DatetimePart::Month);
      } else if (token == "week") {
        parts.push_back(DatetimePart::Week);
      } else if (token == "day") {
        parts.push_back(DatetimePart::Day);
      } else if (token == "weekday") {
        parts.push_back(DatetimePart::Weekday);
      } else {
        raise(ErrCode::SchemaError, "unknown datetime feature '" + token +
                                        "'; expected year, month, week, day or weekday");
      }
    }
    steps.push_back(TransformSpec::datetime(std::move(parts)));
  }

  if (id_features == "label") {
    steps.push_back(TransformSpec::id_encoding(IdEncoding::Label));
  } else if (id_features == "onehot") {
    steps.push_back(TransformSpec::id_encoding(IdEncoding::OneHot));
  } else if (id_features != "none") {
    raise(ErrCode::SchemaError,
          "unknown id_features value '" + id_features + "'; expected none, label or onehot");
  }

  return PipelineConfig(std::move(steps));
}

namespace cfg {

inline FrequencySpec parse_frequency(const nlohmann::json& obj, const std::string& path) {
  const std::string name = get_as<std::string>(obj, path, "frequency", "integer");
  if (name == "daily") return FrequencySpec::daily();
  if (name == "weekly") return FrequencySpec::weekly();
  if (name == "monthly") return FrequencySpec::monthly();
  if (name == "yearly") return FrequencySpec::yearly();
  if (name == "integer") {
    const std::int64_t step = get_as<std::int64_t>(obj, path, "frequency_step", 1);
    if (step < 1) raise(ErrCode::ConstraintError, "'" + path + ".frequency_step' must be >= 1");
    return FrequencySpec::integer(step);
  }
  raise(ErrCode::SchemaError, "'" + path + ".frequency' must be one of integer, daily, "
                              "weekly, monthly, yearly (got '" + name + "')");
}

inline DatasetConfig parse_dataset(const nlohmann::json& obj) {
  check_keys(obj, "dataset",
             {"path", "id_column", "datetime_column", "target_column", "exog_columns",
              "frequency", "frequency_step"});
  DatasetConfig d;
  if (!obj.contains("path")) raise(ErrCode::SchemaError, "'dataset.path' is required");
  d.path = get_as<std::string>(obj, "dataset", "path", "");
  d.roles.id_column = get_as<std::string>(obj, "dataset", "id_column", "series_id");
  d.roles.datetime_column = get_as<std::string>(obj, "dataset", "datetime_column", "timestamp");
  d.roles.target_column = get_as<std::string>(obj, "dataset", "target_column", "value");
  if (obj.contains("exog_columns")) {
    d.roles.exog_columns = get_as<std::vector<std::string>>(obj, "dataset", "exog_columns", {});
    d.roles.explicit_exog = true;
  }
  d.freq = parse_frequency(obj, "dataset");
  return d;
}

inline StrategySpec parse_strategy(const nlohmann::json& obj, std::size_t horizon,
                                   const std::string& path) {
  check_keys(obj, path, {"kind", "model_horizon", "onehot_horizon"});
  const std::string kind = get_as<std::string>(obj, path, "kind", "");
  StrategySpec s;
  s.horizon = horizon;
  if (kind == "recursive") {
    s.kind = StrategyKind::Recursive;
    s.model_horizon = get_count(obj, path, "model_horizon", 1);
  } else if (kind == "direct") {
    s.kind = StrategyKind::Direct;
    if (!obj.contains("model_horizon")) {
      raise(ErrCode::SchemaError, "'" + path + "' direct strategy needs model_horizon");
    }
    s.model_horizon = get_count(obj, path, "model_horizon", 1);
  } else if (kind == "mimo") {
    s.kind = StrategyKind::Mimo;
    s.model_horizon = get_count(obj, path, "model_horizon", horizon);
  } else if (kind == "flat_wide_mimo") {
    s.kind = StrategyKind::FlatWideMimo;
    s.model_horizon = get_count(obj, path, "model_horizon", horizon);
    s.onehot_horizon = get_as<bool>(obj, path, "onehot_horizon", false);
  } else {
    raise(ErrCode::SchemaError, "'" + path + ".kind' must be one of recursive, direct, mimo, "
                                "flat_wide_mimo (got '" + kind + "')");
  }
  try {
    s.validate();
  } catch (const Error& e) {
    raise(ErrCode::ConstraintError, "'" + path + "': " + e.what());
  }
  return s;
}

inline ModeSpec parse_mode(const std::string& name, const std::string& path) {
  if (name == "global") return ModeSpec::global();
  if (name == "multivariate" || name == "multivariate_cm") return ModeSpec::multivariate();
  if (name == "multivariate_ci") return ModeSpec::multivariate_ci();
  raise(ErrCode::SchemaError, "'" + path + "' must be one of global, multivariate_cm, "
                              "multivariate_ci (got '" + name + "')");
}

inline ModelSpec parse_model(const nlohmann::json& obj, const std::string& path) {
  check_keys(obj, path,
             {"kind", "lambda", "period", "n_trees", "max_depth", "learning_rate",
              "min_samples_leaf", "early_stopping_rounds"});
  const std::string kind = get_as<std::string>(obj, path, "kind", "");
  ModelSpec m;
  if (kind == "persistence") {
    m = ModelSpec::persistence();
  } else if (kind == "seasonal_naive") {
    m = ModelSpec::seasonal_naive(get_as<int>(obj, path, "period", 1));
  } else if (kind == "ridge") {
    m = ModelSpec::ridge(get_as<double>(obj, path, "lambda", 1.0));
  } else if (kind == "gbdt") {
    m = ModelSpec::gbdt(get_as<int>(obj, path, "n_trees", 100),
                        get_as<int>(obj, path, "max_depth", 3),
                        get_as<double>(obj, path, "learning_rate", 0.1),
                        get_as<int>(obj, path, "min_samples_leaf", 1),
                        get_as<int>(obj, path, "early_stopping_rounds", 0));
  } else {
    raise(ErrCode::SchemaError, "'" + path + ".kind' must be one of persistence, "
                                "seasonal_naive, ridge, gbdt (got '" + kind + "')");
  }
  try {
    m.validate();
  } catch (const Error& e) {
    raise(ErrCode::ConstraintError, "'" + path + "': " + e.what());
  }
  return m;
}

inline ValidationConfig parse_validation(const nlohmann::json& obj) {
  check_keys(obj, "validation",
             {"scheme", "folds", "window", "backtest_windows", "backtest_stride"});
  ValidationConfig v;
  const std::string scheme = get_as<std::string>(obj, "validation", "scheme", "expanding");
  if (scheme == "expanding") {
    v.scheme = CvScheme::Expanding;
  } else if (scheme == "rolling") {
    v.scheme = CvScheme::Rolling;
  } else {
    raise(ErrCode::SchemaError,
          "'validation.scheme' must be expanding or rolling (got '" + scheme + "')");
  }
  v.folds = get_count(obj, "validation", "folds", 3);
  v.window = get_count(obj, "validation", "window", 0);
  v.backtest_windows = get_count(obj, "validation", "backtest_windows", 3);
  v.backtest_stride = get_count(obj, "validation", "backtest_stride", 0);
  require(v.folds >= 1, ErrCode::ConstraintError, "'validation.folds' must be >= 1");
  if (v.scheme == CvScheme::Rolling) {
    require(v.window >= 1, ErrCode::ConstraintError,
            "'validation.window' is required for the rolling scheme");
  }
  return v;
}

}  // namespace cfg

/// Builds a validated RunConfig from parsed JSON, applying defaults
/// (history 96, horizon 24, ridge lambda 1.0, expanding 3-fold CV) and
/// rejecting unknown keys with their path.
inline RunConfig config_from_json(const nlohmann::json& j) {
  cfg::check_keys(j, "",
                  {"dataset", "history", "horizon", "preprocessing", "datetime_features",
                   "id_features", "strategies", "modes", "models", "validation", "seed",
                   "output_dir"});
  if (!j.contains("dataset")) raise(ErrCode::SchemaError, "'dataset' section is required");

  RunConfig c;
  c.dataset = cfg::parse_dataset(j.at("dataset"));
  c.history = cfg::get_count(j, "", "history", 96);
  c.horizon = cfg::get_count(j, "", "horizon", 24);
  require(c.history >= 1, ErrCode::ConstraintError, "'history' must be >= 1");
  require(c.horizon >= 1, ErrCode::ConstraintError, "'horizon' must be >= 1");

  c.preprocessing =
      cfg::get_as<std::vector<std::string>>(j, "", "preprocessing", {"none"});
  c.datetime_features =
      cfg::get_as<std::vector<std::string>>(j, "", "datetime_features", {"none"});
  c.id_features = cfg::get_as<std::vector<std::string>>(j, "", "id_features", {"none"});
  require(!c.preprocessing.empty(), ErrCode::ConstraintError, "'preprocessing' grid is empty");
  require(!c.datetime_features.empty(), ErrCode::ConstraintError,
          "'datetime_features' grid is empty");
  require(!c.id_features.empty(), ErrCode::ConstraintError, "'id_features' grid is empty");

  if (j.contains("strategies")) {
    const auto& arr = j.at("strategies");
    if (!arr.is_array() || arr.empty()) {
      raise(ErrCode::ConstraintError, "'strategies' must be a non-empty array");
    }
    for (std::size_t i = 0; i < arr.size(); ++i) {
      c.strategies.push_back(
          cfg::parse_strategy(arr[i], c.horizon, "strategies[" + std::to_string(i) + "]"));
    }
  } else {
    c.strategies.push_back(StrategySpec::recursive(c.horizon));
  }

  if (j.contains("modes")) {
    const auto& arr = j.at("modes");
    if (!arr.is_array() || arr.empty()) {
      raise(ErrCode::ConstraintError, "'modes' must be a non-empty array");
    }
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_string()) {
        raise(ErrCode::SchemaError, "'modes[" + std::to_string(i) + "]' must be a string");
      }
      c.modes.push_back(
          cfg::parse_mode(arr[i].get<std::string>(), "modes[" + std::to_string(i) + "]"));
    }
  } else {
    c.modes.push_back(ModeSpec::global());
  }

  if (j.contains("models")) {
    const auto& arr = j.at("models");
    if (!arr.is_array() || arr.empty()) {
      raise(ErrCode::ConstraintError, "'models' must be a non-empty array");
    }
    for (std::size_t i = 0; i < arr.size(); ++i) {
      c.models.push_back(cfg::parse_model(arr[i], "models[" + std::to_string(i) + "]"));
    }
  } else {
    c.models.push_back(ModelSpec::ridge(1.0));
  }

  if (j.contains("validation")) c.validation = cfg::parse_validation(j.at("validation"));
  if (j.contains("seed")) {
    const nlohmann::json& s = j.at("seed");
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0)) {
      raise(ErrCode::SchemaError, "'seed' must be a non-negative integer");
    }
    c.seed = s.get<std::uint64_t>();
  }
  c.output_dir = cfg::get_as<std::string>(j, "", "output_dir", "out");

  // Probe every pipeline token combination now so bad grids fail at parse
  // time, not mid-sweep.
  for (const auto& pp : c.preprocessing) {
    for (const auto& dt : c.datetime_features) {
      for (const auto& idf : c.id_features) {
        (void)make_pipeline(pp, dt, idf, c.history);
      }
    }
  }
  return c;
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  // An unreadable config is a configuration error (exit 2), unlike a missing
  // dataset file which is a data error.
  if (!in) raise(ErrCode::SchemaError, "cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrCode::SchemaError, "config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

namespace cfg {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline nlohmann::json strategy_to_json(const StrategySpec& s) {
  nlohmann::json j;
  j["kind"] = to_string(s.kind);
  j["model_horizon"] = s.model_horizon;
  if (s.kind == StrategyKind::FlatWideMimo) j["onehot_horizon"] = s.onehot_horizon;
  return j;
}

inline nlohmann::json model_to_json(const ModelSpec& m) {
  nlohmann::json j;
  j["kind"] = to_string(m.kind);
  switch (m.kind) {
    case ModelKind::Persistence: break;
    case ModelKind::SeasonalNaive: j["period"] = m.period; break;
    case ModelKind::Ridge: j["lambda"] = m.lambda; break;
    case ModelKind::Gbdt:
      j["n_trees"] = m.n_trees;
      j["max_depth"] = m.max_depth;
      j["learning_rate"] = m.learning_rate;
      j["min_samples_leaf"] = m.min_samples_leaf;
      j["early_stopping_rounds"] = m.early_stopping_rounds;
      break;
  }
  return j;
}

}  // namespace cfg

/// Canonical form of the config: every effective setting except the output
/// directory, with keys in a fixed order (nlohmann objects sort keys on
/// serialization). Feeding the dump through FNV-1a yields the run hash.
inline nlohmann::json canonical_config(const RunConfig& c) {
  nlohmann::json j;
  j["dataset"]["path"] = c.dataset.path;
  j["dataset"]["id_column"] = c.dataset.roles.id_column;
  j["dataset"]["datetime_column"] = c.dataset.roles.datetime_column;
  j["dataset"]["target_column"] = c.dataset.roles.target_column;
  if (c.dataset.roles.explicit_exog) {
    j["dataset"]["exog_columns"] = c.dataset.roles.exog_columns;
  }
  j["dataset"]["frequency_unit"] = static_cast<int>(c.dataset.freq.unit);
  j["dataset"]["frequency_step"] = c.dataset.freq.step;
  j["history"] = c.history;
  j["horizon"] = c.horizon;
  j["preprocessing"] = c.preprocessing;
  j["datetime_features"] = c.datetime_features;
  j["id_features"] = c.id_features;
  for (const auto& s : c.strategies) j["strategies"].push_back(cfg::strategy_to_json(s));
  for (const auto& m : c.modes) j["modes"].push_back(m.label);
  for (const auto& m : c.models) j["models"].push_back(cfg::model_to_json(m));
  j["validation"]["scheme"] = to_string(c.validation.scheme);
  j["validation"]["folds"] = c.validation.folds;
  j["validation"]["window"] = c.validation.window;
  j["validation"]["backtest_windows"] = c.validation.backtest_windows;
  j["validation"]["backtest_stride"] = c.validation.backtest_stride;
  j["seed"] = c.seed;
  return j;
}

inline std::string config_hash(const RunConfig& c) {
  return hex64(fnv1a64(canonical_config(c).dump()));
}

}  // namespace strata
