#include <doctest.h>

#include <cmath>
#include <limits>

#include "sdfe/chain.hpp"
#include "sdfe/solver.hpp"
#include "test_economies.hpp"

using namespace sdfe;
using namespace sdfe::testing;

namespace {
const double kSqrt2 = std::sqrt(2.0);
const double kInf = std::numeric_limits<double>::infinity();
}  // namespace

TEST_CASE("chain_to_economy materializes the structure") {
  const ChainSpec spec = ChainSpec::uniform(2, 2, 1.0);
  const Economy economy = chain_to_economy(spec);
  CHECK(economy.n_firms() == 4);
  CHECK(economy.n_goods() == 2);
  CHECK(economy.consumer_goods() == std::vector<Index>{0});
  CHECK(economy.inputs(0).at(0).good == 1);
  CHECK(economy.inputs(2).empty());
  CHECK(validate(economy).ok());

  // N = 1 gives the horizontal economy.
  const Economy horizontal = chain_to_economy(ChainSpec::uniform(1, 3, 1.0));
  CHECK(horizontal.n_goods() == 1);
  CHECK(horizontal.n_firms() == 3);
  for (Index i = 0; i < 3; ++i) CHECK(horizontal.inputs(i).empty());

  // Asymmetric layers.
  ChainSpec asym = ChainSpec::uniform(2, 1, 1.0);
  asym.firms_per_layer = {3, 1};
  const Economy asym_econ = chain_to_economy(asym);
  CHECK(asym_econ.n_firms() == 4);
}

TEST_CASE("chain best reply closed forms") {
  // X = (1 + 1/(1 + X))^{-1}  =>  X = (sqrt(5) - 1)/2.
  CHECK(chain_best_reply(1.0, 2, 1.0) ==
        doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-14));
  CHECK(chain_best_reply(1.0, 3, 1.0) ==
        doctest::Approx(1.0 / kSqrt2).epsilon(1e-14));
  // Infinite aggregate impact: X -> (n-2) k / (n-1).
  CHECK(chain_best_reply(kInf, 2, 1.0) == doctest::Approx(0.0));
  CHECK(chain_best_reply(kInf, 3, 1.0) == doctest::Approx(0.5));
  CHECK(chain_best_reply(kInf, 5, 2.0) == doctest::Approx(0.375).epsilon(1e-12));
  // Monopolist layer degenerates to (kappa + agg)^{-1}.
  CHECK(chain_best_reply(2.0, 1, 0.5) == doctest::Approx(0.4));
  // Fixed-point property.
  for (double agg : {0.3, 1.0, 2.5}) {
    for (double n : {2.0, 3.0, 4.0}) {
      const double x = chain_best_reply(agg, n, 1.0);
      const double rhs = 1.0 / (1.0 + 1.0 / (1.0 / agg + (n - 1.0) * x));
      CHECK(x == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(chain_best_reply(1.0, 2, 0.0), NoPositiveRoot);
}

TEST_CASE("chain aggregates recursions") {
  const ChainSpec spec = ChainSpec::uniform(3, 2, 1.0, 2.0);
  Vec slopes(3);
  slopes << 0.5, 0.4, 0.8;
  const ChainAggregates agg = chain_aggregates(spec, slopes);
  CHECK(agg.out_slope_recip(0) == doctest::Approx(0.5));
  CHECK(agg.out_slope_recip(1) == doctest::Approx(0.5 + 1.0));
  CHECK(agg.out_slope_recip(2) == doctest::Approx(0.5 + 1.0 + 1.25));
  CHECK(agg.in_slope_recip(2) == doctest::Approx(0.0));
  CHECK(agg.in_slope_recip(1) == doctest::Approx(1.0 / 1.6));
  CHECK(agg.in_slope_recip(0) == doctest::Approx(1.25 + 1.0 / 1.6));
  // agg_out increases upstream, agg_in decreases upstream.
  CHECK(agg.out_slope_recip(2) > agg.out_slope_recip(0));
  CHECK(agg.in_slope_recip(0) > agg.in_slope_recip(2));
}

TEST_CASE("homogeneous chain: equal slopes and equal profits") {
  const ChainSpec spec = ChainSpec::uniform(3, 2, 1.0);
  const ChainSolution sol = solve_chain(spec, ChainRegime::Multilateral);
  for (int i = 1; i < 3; ++i) {
    CHECK(sol.slopes(i) == doctest::Approx(sol.slopes(0)).epsilon(1e-10));
    CHECK(sol.profit(i) == doctest::Approx(sol.profit(0)).epsilon(1e-8));
  }
  // Markups rise upstream, markdowns rise downstream.
  CHECK(sol.markup_out(2) > sol.markup_out(1));
  CHECK(sol.markup_out(1) > sol.markup_out(0));
  CHECK(sol.markdown_in(0) > sol.markdown_in(1));
  CHECK(sol.markdown_in(1) > sol.markdown_in(2));
  CHECK(sol.markdown_in(2) == 0.0);
}

TEST_CASE("unilateral chains order profits") {
  const ChainSpec spec = ChainSpec::uniform(3, 2, 1.0);
  const ChainSolution uni_in =
      solve_chain(spec, ChainRegime::UnilateralInputs);
  CHECK(uni_in.profit(2) > uni_in.profit(1));
  CHECK(uni_in.profit(1) > uni_in.profit(0));
  CHECK(uni_in.markdown_in.isZero());

  const ChainSolution uni_out =
      solve_chain(spec, ChainRegime::UnilateralOutputs);
  CHECK(uni_out.profit(0) > uni_out.profit(1));
  CHECK(uni_out.profit(1) > uni_out.profit(2));
  CHECK(uni_out.markup_out.isZero());

  const ChainSolution seq =
      solve_chain(spec, ChainRegime::SequentialCournot);
  CHECK(seq.profit(2) > seq.profit(1));
  CHECK(seq.profit(1) > seq.profit(0));
}

TEST_CASE("chain welfare") {
  SUBCASE("perfect competition benchmark quantity") {
    const ChainSpec spec = ChainSpec::uniform(3, 2, 1.0, 1.0, 2.0);
    Vec walras = Vec::Ones(3);  // B_i = k_i
    const auto [w, q] = chain_welfare(spec, walras);
    const double q_star = 2.0 / (1.0 * (0.5 + 0.5 + 0.5) + 1.0);
    CHECK(q == doctest::Approx(q_star).epsilon(1e-12));
    CHECK(w > 0.0);
  }
  SUBCASE("single-layer monopoly matches the quadratic surplus") {
    ChainSpec spec = ChainSpec::uniform(1, 1, 0.0);
    spec.inv_capacity(0) = 0.0;  // k infinite
    const ChainSolution sol = solve_chain(spec, ChainRegime::Multilateral);
    CHECK(sol.slopes(0) == doctest::Approx(1.0));
    CHECK(sol.total_welfare == doctest::Approx(0.375).epsilon(1e-10));
  }
  SUBCASE("matches the general welfare computation") {
    const ChainSpec spec = ChainSpec::uniform(2, 2, 1.0);
    const ChainSolution sol = solve_chain(spec, ChainRegime::Multilateral);
    const auto [w, q] = chain_welfare(spec, sol.slopes);
    CHECK(w == doctest::Approx(sol.total_welfare).epsilon(1e-12));
    CHECK(q == doctest::Approx(sol.quantity).epsilon(1e-12));
  }
}

TEST_CASE("closed-form chain agrees with the general solver") {
  for (int n_layers : {2, 3}) {
    for (int width : {2, 3}) {
      for (double k : {0.5, 1.0}) {
        const ChainSpec spec = ChainSpec::uniform(n_layers, width, k);
        const ChainSolution chain_sol =
            solve_chain(spec, ChainRegime::Multilateral);
        const Economy economy = chain_to_economy(spec);
        auto [firm_slopes, diag] = solve(economy);
        (void)diag;
        for (Index i = 0; i < economy.n_firms(); ++i)
          CHECK(std::abs(firm_slopes(i) -
                         chain_sol.slopes(economy.out_good(i))) <= 1e-8);
      }
    }
  }
}

TEST_CASE("equilibrium slopes increase with layer width") {
  // Comparative statics: each n_j raises every equilibrium slope; with
  // equal capacity, wider layers have weakly larger slopes.
  const ChainSpec base = ChainSpec::uniform(3, 2, 1.0);
  const ChainSolution sol_base = solve_chain(base, ChainRegime::Multilateral);
  for (int bump_layer = 0; bump_layer < 3; ++bump_layer) {
    ChainSpec wider = base;
    wider.firms_per_layer[bump_layer] = 3;
    const ChainSolution sol = solve_chain(wider, ChainRegime::Multilateral);
    for (int i = 0; i < 3; ++i)
      CHECK(sol.slopes(i) >= sol_base.slopes(i) - 1e-12);
    CHECK(sol.slopes(bump_layer) > sol_base.slopes(bump_layer));
    // Wider layer carries weakly lower aggregate profit (Prop-5-style).
    const double pi_wide =
        wider.firms_per_layer[bump_layer] * sol.profit(bump_layer);
    for (int i = 0; i < 3; ++i) {
      if (i == bump_layer) continue;
      const double pi_other = wider.firms_per_layer[i] * sol.profit(i);
      CHECK(pi_wide <= pi_other + 1e-10);
    }
  }
}

TEST_CASE("interiority failures are reported") {
  // Competitors with unbounded capacity blow up.
  ChainSpec spec = ChainSpec::uniform(2, 2, 1.0);
  spec.inv_capacity(0) = 0.0;
  CHECK_THROWS_AS(solve_chain(spec, ChainRegime::Multilateral),
                  DegenerateChain);

  // A single seller facing a single buyer can only shut the market.
  CHECK_THROWS_AS(
      solve_chain(ChainSpec::uniform(2, 1, 1.0), ChainRegime::Multilateral),
      DegenerateChain);

  // The merger-study shape (one upstream monopolist, several downstream
  // buyers) is fine but still flagged as a single-firm layer.
  ChainSpec merger_shape = ChainSpec::uniform(2, 2, 1.0);
  merger_shape.firms_per_layer = {3, 1};
  merger_shape.inv_capacity(1) = 0.0;
  const ChainSolution sol =
      solve_chain(merger_shape, ChainRegime::Multilateral);
  CHECK_FALSE(sol.warnings.empty());
  CHECK(sol.slopes.minCoeff() > 0.0);
}

TEST_CASE("long chains approach the limit slope") {
  const ChainSpec spec = ChainSpec::uniform(60, 3, 1.0);
  const ChainSolution sol = solve_chain(spec, ChainRegime::Multilateral);
  // Mid-chain slopes approach k (n-2)/(n-1) = 1/2.
  CHECK(std::abs(sol.slopes(30) - 0.5) < 0.02);
}
