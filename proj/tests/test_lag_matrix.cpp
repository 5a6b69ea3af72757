// Long-to-wide lag featurization: window enumeration, pooled vs
// channel-mixing assembly, schema metadata, and horizon flattening.
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "strata/transforms/lag_matrix.hpp"
#include "support/fixtures.hpp"

using namespace strata;
using fixtures::make_frame;
using fixtures::make_series;

namespace {

std::vector<PreparedSeries> prepare(const LongFrame& frame) {
  std::vector<PreparedSeries> out;
  for (const auto& s : frame.all_series()) out.push_back(PreparedSeries::raw(s, frame.exog_columns()));
  return out;
}

}  // namespace

TEST_CASE("lag matrix enumerates sliding windows", "[lag_matrix]") {
  SECTION("five points, history 3, one-step target") {
    const LongFrame frame = make_frame({make_series("a", fixtures::iota_values(5))});
    const FeatureMatrix m = make_lag_matrix(frame, 3, 1);

    REQUIRE(m.n_rows() == 2);
    REQUIRE(m.schema.n_features() == 3);
    REQUIRE(m.schema.n_targets() == 1);
    CHECK(m.X.at(0, 0) == 1.0);
    CHECK(m.X.at(0, 1) == 2.0);
    CHECK(m.X.at(0, 2) == 3.0);
    CHECK(m.Y.at(0, 0) == 4.0);
    CHECK(m.X.at(1, 0) == 2.0);
    CHECK(m.X.at(1, 1) == 3.0);
    CHECK(m.X.at(1, 2) == 4.0);
    CHECK(m.Y.at(1, 0) == 5.0);

    // Column metadata: oldest lag first, lag 0 at the anchor.
    REQUIRE(m.schema.columns.size() == 3);
    CHECK(m.schema.columns[0].lag == 2);
    CHECK(m.schema.columns[1].lag == 1);
    CHECK(m.schema.columns[2].lag == 0);
    for (const auto& c : m.schema.columns) {
      CHECK(c.role == ColumnRole::TargetLag);
      CHECK(c.target_derived);
    }

    // Anchors record the lag-0 value for inverse transforms.
    REQUIRE(m.anchors.size() == 2);
    CHECK(m.anchors[0].series_id == "a");
    CHECK(m.anchors[0].last_known == std::vector<double>{3.0});
    CHECK(m.anchors[1].last_known == std::vector<double>{4.0});
  }

  SECTION("row count is T - history - mh + 1") {
    const LongFrame frame = make_frame({make_series("a", fixtures::iota_values(120))});
    CHECK(make_lag_matrix(frame, 96, 24).n_rows() == 1);
    CHECK(make_lag_matrix(frame, 10, 5).n_rows() == 106);
  }

  SECTION("six points, history 2, two-step block") {
    const LongFrame frame = make_frame({make_series("a", fixtures::iota_values(6), /*start_ts=*/1)});
    const FeatureMatrix m = make_lag_matrix(frame, 2, 2);

    REQUIRE(m.n_rows() == 3);
    REQUIRE(m.schema.n_targets() == 2);
    const std::vector<std::int64_t> anchor_ts = {m.anchors[0].anchor_ts, m.anchors[1].anchor_ts,
                                                 m.anchors[2].anchor_ts};
    CHECK(anchor_ts == std::vector<std::int64_t>{2, 3, 4});

    // Last row: features are the final usable window, targets the tail.
    CHECK(m.X.at(2, 0) == 3.0);
    CHECK(m.X.at(2, 1) == 4.0);
    CHECK(m.Y.at(2, 0) == 5.0);
    CHECK(m.Y.at(2, 1) == 6.0);
  }
}

TEST_CASE("lag matrix rows match brute-force window enumeration", "[lag_matrix][property]") {
  // Independent oracle: directly enumerate every (history window, target
  // block) pair with nested loops, no shared code with the builder.
  for (const std::size_t T : {12u, 17u, 30u}) {
    for (const std::size_t h : {1u, 3u, 7u, 10u}) {
      for (const std::size_t mh : {1u, 2u, 5u}) {
        if (T < h + mh) continue;
        const std::vector<double> values = fixtures::random_walk(97 + T + h + mh, T);
        const LongFrame frame = make_frame({make_series("a", values)});
        const FeatureMatrix m = make_lag_matrix(frame, h, mh);

        std::vector<std::vector<double>> want_x;
        std::vector<std::vector<double>> want_y;
        for (std::size_t t = 0; t + 1 < T + 1; ++t) {
          if (t + 1 < h || t + mh > T - 1) continue;
          std::vector<double> xr;
          for (std::size_t k = t + 1 - h; k <= t; ++k) xr.push_back(values[k]);
          std::vector<double> yr;
          for (std::size_t j = 1; j <= mh; ++j) yr.push_back(values[t + j]);
          want_x.push_back(xr);
          want_y.push_back(yr);
        }

        REQUIRE(m.n_rows() == want_x.size());
        for (std::size_t r = 0; r < m.n_rows(); ++r) {
          for (std::size_t c = 0; c < h; ++c) REQUIRE(m.X.at(r, c) == want_x[r][c]);
          for (std::size_t c = 0; c < mh; ++c) REQUIRE(m.Y.at(r, c) == want_y[r][c]);
        }
      }
    }
  }
}

TEST_CASE("schema forbids leakage by construction", "[lag_matrix][property]") {
  // Every feature column must look backwards (lag >= 0) and every target
  // strictly forwards (step >= 1), including direct-strategy offsets.
  for (const std::size_t offset : {0u, 2u, 5u}) {
    const LongFrame frame = make_frame({make_series("a", fixtures::iota_values(30))});
    MatrixBuildOptions opt;
    opt.history = 4;
    opt.mh = 3;
    opt.target_offset = offset;
    const FeatureMatrix m = build_pooled_matrix(prepare(frame), opt);

    for (const auto& c : m.schema.columns) {
      if (c.role == ColumnRole::TargetLag || c.role == ColumnRole::ExogLag) CHECK(c.lag >= 0);
    }
    for (const auto& t : m.schema.targets) {
      CHECK(t.step >= static_cast<int>(offset) + 1);
    }
    // And the data agrees with the metadata: targets sit strictly after the
    // anchor in time, so no feature value can equal a target row index.
    for (std::size_t r = 0; r < m.n_rows(); ++r) {
      const double anchor_value = m.anchors[r].last_known[0];
      for (std::size_t c = 0; c < m.schema.n_targets(); ++c) {
        // values are iota, so "later" means "strictly greater"
        CHECK(m.Y.at(r, c) > anchor_value);
      }
    }
  }
}

TEST_CASE("pooled assembly concatenates series and skips short ones", "[lag_matrix]") {
  const LongFrame frame = make_frame({
      make_series("long_one", fixtures::iota_values(8)),
      make_series("short_one", {1.0, 2.0, 3.0}),
  });

  SECTION("short series is skipped with a reason, not fatal") {
    MatrixBuildOptions opt;
    opt.history = 3;
    opt.mh = 2;
    const FeatureMatrix m = build_pooled_matrix(prepare(frame), opt);
    CHECK(m.n_rows() == 4);  // only long_one: 8 - 3 - 2 + 1
    REQUIRE(m.skipped.size() == 1);
    CHECK(m.skipped[0].find("short_one") != std::string::npos);
    for (const auto& a : m.anchors) CHECK(a.series_id == "long_one");
  }

  SECTION("all series too short is an error") {
    MatrixBuildOptions opt;
    opt.history = 9;
    opt.mh = 2;
    CHECK_THROWS_AS(build_pooled_matrix(prepare(frame), opt), Error);
    try {
      build_pooled_matrix(prepare(frame), opt);
    } catch (const Error& e) {
      CHECK(e.code() == ErrCode::SeriesTooShort);
    }
  }

  SECTION("rows are grouped by series, in id order") {
    const LongFrame two = make_frame({
        make_series("b", fixtures::iota_values(6, 100.0)),
        make_series("a", fixtures::iota_values(6)),
    });
    const FeatureMatrix m = make_lag_matrix(two, 2, 1);
    REQUIRE(m.n_rows() == 8);
    for (std::size_t r = 0; r < 4; ++r) CHECK(m.anchors[r].series_id == "a");
    for (std::size_t r = 4; r < 8; ++r) CHECK(m.anchors[r].series_id == "b");
  }
}

TEST_CASE("channel-mixing assembly stacks all series per row", "[lag_matrix]") {
  const std::vector<double> va = {1, 2, 3, 4, 5, 6, 7};
  const std::vector<double> vb = {10, 20, 30, 40, 50, 60, 70};
  const LongFrame frame = make_frame({make_series("a", va), make_series("b", vb)});

  SECTION("feature and target widths scale with the channel count") {
    MatrixBuildOptions opt;
    opt.history = 2;
    opt.mh = 3;
    const FeatureMatrix m = build_channel_mixing_matrix(prepare(frame), opt);

    REQUIRE(m.schema.n_features() == 4);   // 2 series x history 2
    REQUIRE(m.schema.n_targets() == 6);    // 2 series x mh 3
    REQUIRE(m.schema.block_ids == std::vector<std::string>{"a", "b"});
    REQUIRE(m.n_rows() == 3);  // anchors t = 1..3

    // First row (anchor t=1): a-lags [1,2], b-lags [10,20]; targets are
    // a's next three then b's next three.
    CHECK(m.X.at(0, 0) == 1.0);
    CHECK(m.X.at(0, 1) == 2.0);
    CHECK(m.X.at(0, 2) == 10.0);
    CHECK(m.X.at(0, 3) == 20.0);
    CHECK(m.Y.at(0, 0) == 3.0);
    CHECK(m.Y.at(0, 1) == 4.0);
    CHECK(m.Y.at(0, 2) == 5.0);
    CHECK(m.Y.at(0, 3) == 30.0);
    CHECK(m.Y.at(0, 4) == 40.0);
    CHECK(m.Y.at(0, 5) == 50.0);

    // Rows span every channel, so anchors carry one lag-0 value per series
    // and no single owning id.
    REQUIRE(m.anchors[0].last_known.size() == 2);
    CHECK(m.anchors[0].last_known[0] == 2.0);
    CHECK(m.anchors[0].last_known[1] == 20.0);
    CHECK(m.anchors[0].series_id.empty());
  }

  SECTION("misaligned series are rejected") {
    const LongFrame bad = make_frame({
        make_series("a", va),
        make_series("b", vb, /*start_ts=*/5),
    });
    MatrixBuildOptions opt;
    opt.history = 2;
    opt.mh = 1;
    try {
      build_channel_mixing_matrix(prepare(bad), opt);
      FAIL("expected NotAligned");
    } catch (const Error& e) {
      CHECK(e.code() == ErrCode::NotAligned);
    }
  }

  SECTION("short series are fatal, not skippable") {
    // Alignment forces equal lengths, so "too short" hits every channel at
    // once; unlike the pooled builder there is nothing left to fall back on.
    const LongFrame bad = make_frame({
        make_series("a", {1.0, 2.0}),
        make_series("b", {10.0, 20.0}),
    });
    MatrixBuildOptions opt;
    opt.history = 3;
    opt.mh = 2;
    try {
      build_channel_mixing_matrix(prepare(bad), opt);
      FAIL("expected SeriesTooShort");
    } catch (const Error& e) {
      CHECK(e.code() == ErrCode::SeriesTooShort);
      CHECK(std::string(e.what()).find("too short") != std::string::npos);
    }
  }
}

TEST_CASE("inference rows take the latest anchor only", "[lag_matrix]") {
  const LongFrame frame = make_frame({
      make_series("a", fixtures::iota_values(5)),
      make_series("b", fixtures::iota_values(5, 10.0)),
  });
  MatrixBuildOptions opt;
  opt.history = 3;
  opt.mh = 4;  // would leave no training anchors, but inference ignores targets

  const FeatureMatrix m = build_pooled_matrix(prepare(frame), opt, /*with_targets=*/false);
  REQUIRE(m.n_rows() == 2);
  CHECK(m.Y.cols == 0);
  CHECK(m.X.at(0, 0) == 3.0);
  CHECK(m.X.at(0, 2) == 5.0);
  CHECK(m.X.at(1, 2) == 14.0);
  CHECK(m.anchors[0].series_id == "a");
  CHECK(m.anchors[1].series_id == "b");

  SECTION("but history must still fit") {
    MatrixBuildOptions tight;
    tight.history = 6;
    try {
      build_pooled_matrix(prepare(frame), tight, false);
      FAIL("expected InsufficientHistory");
    } catch (const Error& e) {
      CHECK(e.code() == ErrCode::InsufficientHistory);
    }
  }
}

TEST_CASE("exogenous columns get their own lag windows", "[lag_matrix]") {
  Series s;
  s.id = "a";
  s.timestamps = {0, 1, 2, 3, 4};
  s.target = {1, 2, 3, 4, 5};
  s.exog = {{0.5, 1.5, 2.5, 3.5, 4.5}};
  const LongFrame frame(FrequencySpec::integer(), {ExogColumn{"temp", false, {}}}, {s});

  const FeatureMatrix m = make_lag_matrix(frame, 2, 1);
  REQUIRE(m.schema.n_features() == 4);  // 2 target lags + 2 exog lags
  CHECK(m.schema.columns[2].role == ColumnRole::ExogLag);
  CHECK(m.schema.columns[2].source == "temp");
  CHECK_FALSE(m.schema.columns[2].target_derived);
  // Row 0 anchors at t=1: target window [1,2], exog window [0.5,1.5].
  CHECK(m.X.at(0, 2) == 0.5);
  CHECK(m.X.at(0, 3) == 1.5);
}

TEST_CASE("horizon flattening splits multi-step rows", "[lag_matrix]") {
  const LongFrame frame = make_frame({make_series("a", fixtures::iota_values(7))});
  const FeatureMatrix wide = make_lag_matrix(frame, 2, 3);
  REQUIRE(wide.n_rows() == 3);

  SECTION("raw horizon index") {
    const FeatureMatrix flat = flatten_to_horizon_rows(wide, 3, /*onehot_index=*/false);
    REQUIRE(flat.n_rows() == 9);
    REQUIRE(flat.schema.n_features() == 3);  // 2 lags + 1 horizon column
    REQUIRE(flat.schema.n_targets() == 1);
    CHECK(flat.schema.columns.back().role == ColumnRole::HorizonIndex);

    for (std::size_t r = 0; r < flat.n_rows(); ++r) {
      const std::size_t src = r / 3;
      const std::size_t h = r % 3;
      // features copied, horizon index appended as 1..H
      CHECK(flat.X.at(r, 0) == wide.X.at(src, 0));
      CHECK(flat.X.at(r, 1) == wide.X.at(src, 1));
      CHECK(flat.X.at(r, 2) == static_cast<double>(h + 1));
      // the single target is the source row's h-th step
      CHECK(flat.Y.at(r, 0) == wide.Y.at(src, h));
      CHECK(flat.anchors[r] == wide.anchors[src]);
    }
  }

  SECTION("one-hot horizon index") {
    const FeatureMatrix flat = flatten_to_horizon_rows(wide, 3, /*onehot_index=*/true);
    REQUIRE(flat.schema.n_features() == 5);  // 2 lags + 3 one-hot columns
    for (std::size_t r = 0; r < flat.n_rows(); ++r) {
      double sum = 0.0;
      for (std::size_t c = 2; c < 5; ++c) sum += flat.X.at(r, c);
      CHECK(sum == 1.0);
      CHECK(flat.X.at(r, 2 + r % 3) == 1.0);
    }
  }

  SECTION("width mismatch is rejected") {
    try {
      flatten_to_horizon_rows(wide, 4);
      FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrCode::DimensionMismatch);
    }
  }
}
