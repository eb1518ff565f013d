#pragma once

#include <utility>
#include <vector>

#include "sdfe/analysis.hpp"
#include "sdfe/regimes.hpp"

namespace sdfe {

struct SolveOptions {
  double tol = 1e-12;   // absolute tolerance on slopes
  int max_iter = 10000;
  double damping = 1.0;  // step factor in (0, 1]
  double cap = 0.0;      // upper start for kappa == 0 firms; 0 picks the
                         // default 1e3 * max demand slope
};

struct SolveDiagnostics {
  int iterations_upper = 0;
  int iterations_lower = 0;
  double bracket_gap = 0.0;  // max |upper - lower| at termination
  bool converged = false;
  bool unique_certified = false;  // bracket_gap <= tol
};

struct EquilibriumSolution {
  SlopeProfile slopes;
  PriceQuantityState state;
  std::vector<MarkupVector> markups;  // regime price impact times net trades
  Vec profits;
  double total_welfare = 0.0;
};

// Optimal schedule slope against a residual schedule with price impact
// Lambda: (v' Lambda v + kappa)^{-1}.
double best_reply_slope(const PriceImpact& impact, const TechVector& v,
                        double kappa);

// Fixed point of the best-reply map under `regime`, solved by two monotone
// Picard iterations: one decreasing from the Walrasian/cap profile and one
// increasing from zero. Returns the upper limit. For the multilateral
// regime on viable connected economies the two limits coincide (unique
// equilibrium); for other regimes they bracket the maximal and minimal
// equilibria and any gap is reported, not an error.
std::pair<SlopeProfile, SolveDiagnostics> solve(
    const Economy& economy, const Regime& regime = {},
    const SolveOptions& opts = {});

// Prices, quantities, markups, profits and welfare at a slope profile. The
// regime only selects which price impact the reported markups use.
EquilibriumSolution solution(const Economy& economy,
                             const SlopeProfile& slopes,
                             const Regime& regime = {});

// Hessian of the log-slope potential; -H strictly diagonally dominant is
// the uniqueness certificate. Requires all slopes positive.
Mat potential_hessian(const Economy& economy, const SlopeProfile& slopes);

// One sweep of the best-reply map (Jacobi). Exposed for property tests.
SlopeProfile best_reply_profile(const Economy& economy, const Regime& regime,
                                const SlopeProfile& slopes);

double default_cap(const Economy& economy);

}  // namespace sdfe
