#pragma once

#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "strata/models/gbdt.hpp"
#include "strata/models/naive.hpp"
#include "strata/models/ridge.hpp"

namespace strata {

/// Single fit entry point: dispatches on the spec and wires the optional
/// validation split through to models that can use it (boosting only).
inline ModelPtr fit_model(const ModelSpec& spec, const FeatureSchema& schema, const Matrix& X,
                          const Matrix& Y, const Matrix* Xv = nullptr,
                          const Matrix* Yv = nullptr) {
  spec.validate();
  switch (spec.kind) {
    case ModelKind::Persistence:
    case ModelKind::SeasonalNaive:
      return fit_naive(schema, spec.kind, spec.period);
    case ModelKind::Ridge:
      return fit_ridge(X, Y, spec.lambda);
    case ModelKind::Gbdt:
      return fit_gbdt_multi(X, Y, spec, Xv, Yv);
  }
  raise(ErrCode::ConstraintError, "unknown model kind");
}

inline nlohmann::json model_to_json(const TrainedModel& model) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["model"] = model.to_json();
  return j;
}

inline ModelPtr model_from_payload(const nlohmann::json& payload) {
  const std::string kind = payload.at("kind").get<std::string>();
  if (kind == "ridge") return RidgeModel::from_json(payload);
  if (kind == "gbdt") return GbdtModel::from_json(payload);
  if (kind == "persistence" || kind == "seasonal_naive") {
    return LagLookupModel::from_json(payload);
  }
  if (kind == "column_stack") {
    std::vector<ModelPtr> columns;
    for (const auto& c : payload.at("columns")) columns.push_back(model_from_payload(c));
    const ModelKind base =
        payload.at("base_kind").get<std::string>() == "gbdt" ? ModelKind::Gbdt : ModelKind::Ridge;
    return std::make_unique<ColumnStackModel>(base, std::move(columns));
  }
  raise(ErrCode::ParseError, "unknown model kind '" + kind + "' in model file");
}

inline ModelPtr model_from_json(const nlohmann::json& j) {
  const int version = j.at("format_version").get<int>();
  require(version == 1, ErrCode::ParseError,
          "unsupported model format version " + std::to_string(version));
  return model_from_payload(j.at("model"));
}

inline void save_model(const TrainedModel& model, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), ErrCode::IoError, "cannot open '" + path + "' for writing");
  out << model_to_json(model).dump(2) << "\n";
  require(out.good(), ErrCode::IoError, "failed writing model to '" + path + "'");
}

inline ModelPtr load_model(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrCode::IoError, "cannot open model file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrCode::ParseError, "model file '" + path + "' is not valid JSON: " + e.what());
  }
  return model_from_json(j);
}

}  // namespace strata
