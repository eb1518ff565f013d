#include <doctest.h>

#include <cmath>

#include "sdfe/scenarios.hpp"
#include "test_economies.hpp"

using namespace sdfe;
using namespace sdfe::testing;

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

TEST_CASE("compare_regimes on the vertical economy") {
  const Economy economy = vertical_economy();
  const RegimeComparison cmp = compare_regimes(economy);
  REQUIRE(cmp.entries.size() == 3);
  const auto& multi = cmp.entries[0];
  const auto& uni = cmp.entries[1];
  CHECK(multi.slopes(kVerticalFirmU) == doctest::Approx(kSqrt2).epsilon(1e-9));
  CHECK(multi.slopes(kVerticalFirmD) ==
        doctest::Approx(1.0 / kSqrt2).epsilon(1e-9));
  CHECK(uni.slopes(kVerticalFirmU) == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(uni.slopes(kVerticalFirmD) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(cmp.slopes_dominate);
  // Two consumed goods: no single final price to compare.
  CHECK_FALSE(cmp.has_single_consumed_good);
  // The price of good D is lower without multilateral market power.
  CHECK(multi.prices(kVerticalGoodD) > uni.prices(kVerticalGoodD));
  CHECK(uni.prices(kVerticalGoodD) == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("compare_regimes on a chain orders the final price") {
  const Economy economy = chain_to_economy(ChainSpec::uniform(2, 2, 1.0));
  const RegimeComparison cmp = compare_regimes(economy);
  CHECK(cmp.has_single_consumed_good);
  CHECK(cmp.slopes_dominate);
  CHECK(cmp.final_price_ordered);
}

TEST_CASE("regimes coincide when no firm has inputs") {
  const Economy economy = horizontal_economy(3, 1.0);
  const RegimeComparison cmp = compare_regimes(economy);
  for (const auto& entry : cmp.entries)
    CHECK((entry.slopes - cmp.entries[0].slopes).cwiseAbs().maxCoeff() <=
          1e-10);
  CHECK_FALSE(cmp.slopes_dominate);  // coincidence, not strict dominance
}

TEST_CASE("merger study finds ordered thresholds") {
  const MergerStudy study = merger_study(20, 1.0, 1.0, 1.0);
  CHECK(study.post_merger_slope == doctest::Approx(0.5));
  CHECK(study.n_star_unilateral < study.n_star_multilateral);

  for (const auto& regime : study.regimes) {
    if (!regime.price_threshold_found) continue;
    CHECK(regime.price_threshold > 2.0);
    CHECK(regime.price_threshold < 20.0);
  }

  // Rows bracket the threshold: pre-merger CS below it, post above it.
  const auto& multi = study.regimes[0];
  for (const auto& row : multi.rows) {
    if (row.n1 < multi.price_threshold - 1.0)
      CHECK(row.post_consumer_surplus > row.pre_consumer_surplus);
    if (row.n1 > multi.price_threshold + 1.0)
      CHECK(row.post_consumer_surplus < row.pre_consumer_surplus);
  }

  // Inside (n_*, n^*): multilateral says the merger raises consumer
  // surplus, unilateral says it lowers it.
  const double mid =
      0.5 * (study.n_star_unilateral + study.n_star_multilateral);
  CHECK(study.n_star_unilateral < mid);
  CHECK(mid < study.n_star_multilateral);
}

TEST_CASE("depth sweep ratios exceed one and grow") {
  const std::vector<DepthRow> rows = depth_sweep(6, 1.0, 1.0, 1.0);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0].depth == 2);
  for (const auto& row : rows) {
    CHECK(row.q_ratio > 1.0);
    CHECK(row.w_ratio > 1.0);
  }
  for (size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].q_ratio > rows[i - 1].q_ratio);
    CHECK(rows[i].w_ratio > rows[i - 1].w_ratio);
  }
}

TEST_CASE("surplus profile verdicts") {
  const SurplusProfile profile =
      surplus_profile(ChainSpec::uniform(3, 2, 1.0));
  REQUIRE(profile.regimes.size() == 4);
  CHECK(profile.regimes[0].name == "multilateral");
  CHECK(profile.regimes[0].profits_equal);
  CHECK(profile.regimes[1].profits_increasing_upstream);
  CHECK(profile.regimes[2].profits_increasing_downstream);
  CHECK(profile.regimes[3].profits_increasing_upstream);
}
