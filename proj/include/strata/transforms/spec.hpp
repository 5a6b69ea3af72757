#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "strata/core/error.hpp"

namespace strata {

/// The three transform categories plus feature generators:
///  - series-to-series: StandardScaler, DifferenceNormalizer (before Lag)
///  - series-to-features: Lag (exactly one per pipeline)
///  - features-to-features: LastKnownNormalizer (after Lag)
///  - feature generators: DatetimeFeatures, IdFeatures (position-free)
enum class TransformKind {
  StandardScaler,
  DifferenceNormalizer,
  LastKnownNormalizer,
  DatetimeFeatures,
  IdFeatures,
  Lag,
};

enum class NormalizerMode { Delta, Ratio };
enum class ApplyTo { Features, Target, Both };
enum class IdEncoding { Label, OneHot };
enum class DatetimePart { Year, Month, Week, Day, Weekday };

inline const char* to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::StandardScaler: return "standard_scaler";
    case TransformKind::DifferenceNormalizer: return "difference_normalizer";
    case TransformKind::LastKnownNormalizer: return "last_known_normalizer";
    case TransformKind::DatetimeFeatures: return "datetime_features";
    case TransformKind::IdFeatures: return "id_features";
    case TransformKind::Lag: return "lag";
  }
  return "?";
}

inline const char* to_string(NormalizerMode mode) {
  return mode == NormalizerMode::Delta ? "delta" : "ratio";
}

inline const char* to_string(DatetimePart part) {
  switch (part) {
    case DatetimePart::Year: return "year";
    case DatetimePart::Month: return "month";
    case DatetimePart::Week: return "week";
    case DatetimePart::Day: return "day";
    case DatetimePart::Weekday: return "weekday";
  }
  return "?";
}

/// One pipeline step. Fields beyond `kind` apply only to the kinds noted.
struct TransformSpec {
  TransformKind kind = TransformKind::Lag;
  NormalizerMode mode = NormalizerMode::Delta;  // normalizers
  ApplyTo apply_to = ApplyTo::Both;             // series-to-series + LKN
  std::size_t history = 0;                      // lag: window length
  std::vector<DatetimePart> parts;              // datetime_features
  IdEncoding encoding = IdEncoding::Label;      // id_features
  bool pooled = false;           // scaler: one mean/std across series
  bool normalize_exog = false;   // LKN: also rescale exogenous lag columns

  static TransformSpec scaler(ApplyTo apply_to = ApplyTo::Both, bool pooled = false) {
    TransformSpec s;
    s.kind = TransformKind::StandardScaler;
    s.apply_to = apply_to;
    s.pooled = pooled;
    return s;
  }
  static TransformSpec difference(NormalizerMode mode, ApplyTo apply_to = ApplyTo::Both) {
    TransformSpec s;
    s.kind = TransformKind::DifferenceNormalizer;
    s.mode = mode;
    s.apply_to = apply_to;
    return s;
  }
  static TransformSpec last_known(NormalizerMode mode, ApplyTo apply_to = ApplyTo::Both,
                                  bool normalize_exog = false) {
    TransformSpec s;
    s.kind = TransformKind::LastKnownNormalizer;
    s.mode = mode;
    s.apply_to = apply_to;
    s.normalize_exog = normalize_exog;
    return s;
  }
  static TransformSpec lag(std::size_t history) {
    TransformSpec s;
    s.kind = TransformKind::Lag;
    s.history = history;
    return s;
  }
  static TransformSpec datetime(std::vector<DatetimePart> parts) {
    TransformSpec s;
    s.kind = TransformKind::DatetimeFeatures;
    s.parts = std::move(parts);
    return s;
  }
  static TransformSpec id_encoding(IdEncoding encoding) {
    TransformSpec s;
    s.kind = TransformKind::IdFeatures;
    s.encoding = encoding;
    return s;
  }
};

/// Ordered, validated transform list. Construction enforces the structural
/// rules: exactly one lag step, series-to-series steps before it, the
/// last-known normalizer after it. Violations are configuration errors.
class PipelineConfig {
public:
  PipelineConfig() : PipelineConfig({TransformSpec::lag(1)}) {}

  explicit PipelineConfig(std::vector<TransformSpec> transforms)
      : transforms_(std::move(transforms)) {
    int lag_position = -1;
    for (std::size_t i = 0; i < transforms_.size(); ++i) {
      const TransformSpec& t = transforms_[i];
      if (t.kind == TransformKind::Lag) {
        require(lag_position < 0, ErrCode::ConstraintError,
                "pipeline must contain exactly one lag transform, found a second");
        require(t.history >= 1, ErrCode::ConstraintError, "lag history must be >= 1");
        lag_position = static_cast<int>(i);
      }
    }
    require(lag_position >= 0, ErrCode::ConstraintError,
            "pipeline must contain exactly one lag transform, found none");
    for (std::size_t i = 0; i < transforms_.size(); ++i) {
      const TransformSpec& t = transforms_[i];
      const bool before_lag = static_cast<int>(i) < lag_position;
      if (t.kind == TransformKind::StandardScaler ||
          t.kind == TransformKind::DifferenceNormalizer) {
        require(before_lag, ErrCode::ConstraintError,
                std::string(to_string(t.kind)) + " must appear before the lag transform");
      }
      if (t.kind == TransformKind::LastKnownNormalizer) {
        require(!before_lag, ErrCode::ConstraintError,
                "last_known_normalizer must appear after the lag transform");
      }
    }
    lag_position_ = static_cast<std::size_t>(lag_position);
  }

  static PipelineConfig lag_only(std::size_t history) {
    return PipelineConfig({TransformSpec::lag(history)});
  }

  const std::vector<TransformSpec>& transforms() const { return transforms_; }
  std::size_t history() const { return transforms_[lag_position_].history; }

  const TransformSpec* find(TransformKind kind) const {
    for (const auto& t : transforms_) {
      if (t.kind == kind) return &t;
    }
    return nullptr;
  }
  bool has(TransformKind kind) const { return find(kind) != nullptr; }

  /// Series-to-series steps (scaler / difference) in pipeline order,
  /// filtered to those participating in the given view.
  std::vector<TransformSpec> series_steps(bool target_view) const {
    std::vector<TransformSpec> out;
    for (const auto& t : transforms_) {
      if (t.kind != TransformKind::StandardScaler &&
          t.kind != TransformKind::DifferenceNormalizer) {
        continue;
      }
      const bool applies = t.apply_to == ApplyTo::Both ||
                           (target_view ? t.apply_to == ApplyTo::Target
                                        : t.apply_to == ApplyTo::Features);
      if (applies) out.push_back(t);
    }
    return out;
  }

private:
  std::vector<TransformSpec> transforms_;
  std::size_t lag_position_ = 0;
};

}  // namespace strata
