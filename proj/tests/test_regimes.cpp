#include <doctest.h>

#include <cmath>
#include <random>

#include "sdfe/chain.hpp"
#include "sdfe/regimes.hpp"
#include "test_economies.hpp"

using namespace sdfe;
using namespace sdfe::testing;

namespace {

const double kSqrt2 = std::sqrt(2.0);

SlopeProfile vertical_slopes() {
  Vec s(2);
  s(kVerticalFirmU) = kSqrt2;
  s(kVerticalFirmD) = 1.0 / kSqrt2;
  return s;
}

Vec random_slopes(const Economy& economy, unsigned seed, double lo = 0.05,
                  double hi = 1.5) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Vec slopes(economy.n_firms());
  for (Index i = 0; i < economy.n_firms(); ++i) {
    slopes(i) = dist(rng);
    const double kappa = economy.inv_capacity(i);
    if (kappa > 0.0) slopes(i) = std::min(slopes(i), 1.0 / kappa);
  }
  return slopes;
}

}  // namespace

TEST_CASE("downstream partition on the vertical economy") {
  const Economy economy = vertical_economy();
  const SlopeProfile slopes = vertical_slopes();

  const Partition part_d = downstream_partition(economy, slopes, kVerticalFirmD);
  CHECK(part_d.down == std::vector<Index>{kVerticalGoodD});
  CHECK(part_d.up == std::vector<Index>{kVerticalGoodU});

  const Partition part_u = downstream_partition(economy, slopes, kVerticalFirmU);
  CHECK(part_u.down == std::vector<Index>({kVerticalGoodD, kVerticalGoodU}));
  CHECK(part_u.up.empty());
}

TEST_CASE("downstream partition on a three-layer chain") {
  // Middle-layer firm: its input good stays upstream even when a competitor
  // links the two goods.
  for (int width : {1, 2}) {
    const ChainSpec spec = ChainSpec::uniform(3, width, 1.0);
    const Economy economy = chain_to_economy(spec);
    const Index mid_firm = width;  // first firm of layer 2 (layer-major)
    const Partition part =
        downstream_partition(economy, Vec::Ones(economy.n_firms()), mid_firm);
    CHECK(part.down == std::vector<Index>({0, 1}));
    CHECK(part.up == std::vector<Index>{2});
  }
}

TEST_CASE("unilateral price impact of firm D is diag(1, 0)") {
  const Economy economy = vertical_economy();
  const Regime regime{RegimeKind::UnilateralInputs, {}};
  const Mat lam =
      lambda_for(regime, economy, vertical_slopes(), kVerticalFirmD).block;
  Mat expected(2, 2);
  expected << 1.0, 0.0, 0.0, 0.0;
  CHECK(lam.isApprox(expected, 1e-12));
}

TEST_CASE("unilateral impact zeroes all input rows and columns") {
  for (unsigned seed : {21u, 22u, 23u}) {
    const Economy economy = random_economy(seed);
    const Vec slopes = random_slopes(economy, seed);
    const Regime regime{RegimeKind::UnilateralInputs, {}};
    for (Index i = 0; i < economy.n_firms(); ++i) {
      const Mat lam = lambda_for(regime, economy, slopes, i).block;
      for (Index r = 1; r < lam.rows(); ++r) {
        CHECK(lam.row(r).cwiseAbs().maxCoeff() == 0.0);
        CHECK(lam.col(r).cwiseAbs().maxCoeff() == 0.0);
      }
      CHECK(lam(0, 0) > 0.0);
    }
  }
}

TEST_CASE("local equals multilateral when the firm trades every good") {
  const Economy economy = vertical_economy();
  const SlopeProfile slopes = vertical_slopes();
  const Mat local =
      lambda_for({RegimeKind::Local, {}}, economy, slopes, kVerticalFirmD)
          .block;
  const Mat multi = price_impact_multilateral(economy, slopes, kVerticalFirmD)
                        .block;
  CHECK(local.isApprox(multi, 1e-12));
}

TEST_CASE("Cournot price impact in the horizontal economy is 1/B_c") {
  const Economy economy = horizontal_economy(4, 1.0, 2.0);
  const Vec slopes = Vec::Constant(4, 0.7);
  for (Index i = 0; i < 4; ++i) {
    const Mat lam =
        lambda_for({RegimeKind::Cournot, {}}, economy, slopes, i).block;
    CHECK(lam(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("walrasian regime has zero price impact") {
  const Economy economy = vertical_economy();
  const Mat lam = lambda_for({RegimeKind::Walrasian, {}}, economy,
                             vertical_slopes(), kVerticalFirmD)
                      .block;
  CHECK(lam.isZero());
}

TEST_CASE("constrained regimes are dominated in the p.s.d. order") {
  for (unsigned seed : {24u, 25u, 26u}) {
    const Economy economy = random_economy(seed);
    const Vec slopes = random_slopes(economy, seed + 1);
    for (Index i = 0; i < economy.n_firms(); ++i) {
      const Mat multi = price_impact_multilateral(economy, slopes, i).block;
      for (RegimeKind kind :
           {RegimeKind::UnilateralInputs, RegimeKind::UnilateralOutputs,
            RegimeKind::Local}) {
        const Mat constrained =
            lambda_for({kind, {}}, economy, slopes, i).block;
        Eigen::SelfAdjointEigenSolver<Mat> es(multi - constrained);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10);
      }
    }
  }
}

TEST_CASE("unilateral impact on chains matches the aggregate-slope form") {
  // Upper-left entry must equal ((agg_out)^-1 + (n_i - 1) B_i)^-1 and the
  // input-side variant mirrors it, for every layer width.
  for (int width : {1, 2, 3}) {
    const ChainSpec spec = ChainSpec::uniform(4, width, 1.0);
    const Economy economy = chain_to_economy(spec);
    Vec layer_slopes(4);
    layer_slopes << 0.9, 0.7, 0.8, 0.6;
    Vec slopes(economy.n_firms());
    for (Index i = 0; i < economy.n_firms(); ++i)
      slopes(i) = layer_slopes(economy.out_good(i));
    const ChainAggregates agg = chain_aggregates(spec, layer_slopes);

    for (int layer = 0; layer < 4; ++layer) {
      const Index firm = static_cast<Index>(width * layer);
      const double comp = (width - 1) * layer_slopes(layer);
      const Mat uni_in =
          lambda_for({RegimeKind::UnilateralInputs, {}}, economy, slopes, firm)
              .block;
      const double expected_out =
          1.0 / (1.0 / agg.out_slope_recip(layer) + comp);
      CHECK(uni_in(0, 0) == doctest::Approx(expected_out).epsilon(1e-10));

      const Mat uni_out = lambda_for({RegimeKind::UnilateralOutputs, {}},
                                     economy, slopes, firm)
                              .block;
      if (layer < 3) {
        const double expected_in =
            1.0 / (1.0 / agg.in_slope_recip(layer) + comp);
        CHECK(uni_out(1, 1) == doctest::Approx(expected_in).epsilon(1e-10));
        CHECK(uni_out(0, 0) == 0.0);
      } else {
        CHECK(uni_out.isZero());
      }
    }
  }
}

TEST_CASE("regime monotonicity reports no violations") {
  const Economy vertical = vertical_economy();
  for (RegimeKind kind :
       {RegimeKind::Multilateral, RegimeKind::UnilateralInputs}) {
    const MonotonicityReport report =
        check_regime_monotonicity({kind, {}}, vertical, kVerticalFirmD, 100);
    CHECK(report.trials == 100);
    CHECK(report.violations == 0);
  }
  for (unsigned seed : {31u, 32u}) {
    const Economy economy = random_economy(seed);
    const MonotonicityReport report = check_regime_monotonicity(
        {RegimeKind::Local, {}}, economy, 0, 100, seed);
    CHECK(report.violations == 0);
  }
  // Cournot: raising a same-good competitor leaves the impact flat, raising
  // anyone else lowers it; both are admissible.
  const Economy wide = horizontal_economy(3, 1.0);
  const MonotonicityReport cournot = check_regime_monotonicity(
      {RegimeKind::Cournot, {}}, wide, 0, 50);
  CHECK(cournot.violations == 0);
}

TEST_CASE("partition overrides are checked") {
  const Economy economy = vertical_economy();
  Regime regime{RegimeKind::UnilateralInputs, {}};
  // Valid override: same as the default.
  regime.up_override[kVerticalFirmD] = {kVerticalGoodU};
  CHECK_NOTHROW(
      lambda_for(regime, economy, vertical_slopes(), kVerticalFirmD));
  // Output good may not be taken as given.
  regime.up_override[kVerticalFirmD] = {kVerticalGoodD, kVerticalGoodU};
  CHECK_THROWS_AS(
      lambda_for(regime, economy, vertical_slopes(), kVerticalFirmD),
      PartitionInvalid);
  // Inputs must be taken as given.
  regime.up_override[kVerticalFirmD] = {};
  CHECK_THROWS_AS(
      lambda_for(regime, economy, vertical_slopes(), kVerticalFirmD),
      PartitionInvalid);
}

TEST_CASE("regime names round trip") {
  for (RegimeKind kind :
       {RegimeKind::Multilateral, RegimeKind::UnilateralInputs,
        RegimeKind::UnilateralOutputs, RegimeKind::Local, RegimeKind::Cournot,
        RegimeKind::Walrasian})
    CHECK(regime_from_name(regime_name(kind)) == kind);
  CHECK_THROWS_AS(regime_from_name("bogus"), InvalidArgument);
}
