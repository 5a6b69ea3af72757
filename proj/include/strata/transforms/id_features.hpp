#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "strata/data/frame.hpp"
#include "strata/transforms/spec.hpp"

namespace strata {

/// Encodes series identity as numeric feature columns: a single integer
/// column (label, stable sorted-vocabulary order) or one 0/1 column per id.
class IdEncoder {
public:
  IdEncoder() = default;

  static IdEncoder fit(const LongFrame& frame, IdEncoding encoding) {
    IdEncoder enc;
    enc.encoding_ = encoding;
    enc.vocabulary_ = frame.series_ids();  // LongFrame keeps series sorted by id
    return enc;
  }

  IdEncoding encoding() const { return encoding_; }
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }

  std::size_t n_columns() const {
    return encoding_ == IdEncoding::Label ? 1 : vocabulary_.size();
  }

  std::vector<std::string> column_names() const {
    if (encoding_ == IdEncoding::Label) return {"series_id"};
    std::vector<std::string> names;
    names.reserve(vocabulary_.size());
    for (const auto& id : vocabulary_) names.push_back("series_id=" + id);
    return names;
  }

  std::size_t code(const std::string& id) const {
    auto it = std::lower_bound(vocabulary_.begin(), vocabulary_.end(), id);
    if (it == vocabulary_.end() || *it != id) {
      raise(ErrCode::UnknownSeries, "series id '" + id + "' was not seen at fit time");
    }
    return static_cast<std::size_t>(it - vocabulary_.begin());
  }

  /// Feature values for one series id, length n_columns().
  std::vector<double> encode(const std::string& id) const {
    const std::size_t c = code(id);
    if (encoding_ == IdEncoding::Label) return {static_cast<double>(c)};
    std::vector<double> out(vocabulary_.size(), 0.0);
    out[c] = 1.0;
    return out;
  }

private:
  IdEncoding encoding_ = IdEncoding::Label;
  std::vector<std::string> vocabulary_;
};

}  // namespace strata
