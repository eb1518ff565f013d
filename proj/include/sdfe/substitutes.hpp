#pragma once

#include <utility>
#include <vector>

#include "sdfe/economy.hpp"

namespace sdfe {

// Technology of a firm whose intermediate inputs are imperfect
// complements/substitutes: labor is (q_in)' Sigma (q_in) + l^2/2 with
// q_out + omega' q_in = alpha l.
struct SubstitutesTech {
  Mat sigma;   // (d-1) x (d-1), symmetric, strictly diagonally dominant, PD
  Vec omega;   // nonnegative intensity per input
  double alpha = 1.0;  // > 0
};

// Full-rank strategy block B_i (symmetric positive definite).
struct CoefficientBlock {
  Mat block;
};

// Economy where every firm carries a SubstitutesTech and schedules are full
// coefficient blocks q_i = B_i p_i. The network structure (outputs, input
// sets, consumer block) is borrowed from a core Economy whose f_L / kappa
// fields are ignored.
struct SubstitutesEconomy {
  Economy base;
  std::vector<SubstitutesTech> tech;  // one per firm, inputs in canonical order
};

SubstitutesEconomy make_substitutes_economy(Economy base,
                                            std::vector<SubstitutesTech> tech);

// Walrasian coefficient block C_i: the inverse of
//   [ 1/a^2       omega'/a^2            ]
//   [ omega/a^2   2 Sigma + omega omega'/a^2 ].
CoefficientBlock cost_matrix(const SubstitutesTech& tech);

// Best reply (C_i^{-1} + Lambda_i)^{-1}.
CoefficientBlock best_reply_block(const CoefficientBlock& cost,
                                  const Mat& impact);

struct BlockProfile {
  std::vector<CoefficientBlock> blocks;
};

struct SubstitutesSolution {
  BlockProfile minimal;
  BlockProfile maximal;
  int iterations_down = 0;
  int iterations_up = 0;
  // Most negative eigenvalue seen in any bracket monotonicity check:
  // iterates from above must decrease, from below increase, and the lower
  // iterate must stay below the upper one, all in the p.s.d. order.
  double worst_bracket_eigenvalue = 0.0;
};

struct SubstitutesSolveOptions {
  double tol = 1e-12;
  int max_iter = 10000;
  bool freeze_lambda_zero = false;  // Walrasian check: forces Lambda == 0
};

// Monotone iteration from (C_i) downward and from 0 upward; returns both
// limits (maximal and minimal equilibria).
SubstitutesSolution solve_substitutes(const SubstitutesEconomy& economy,
                                      const SubstitutesSolveOptions& opts = {});

// Clearing with full blocks: M = sum Bhat_i + Bhat_c, p = M^{-1} Ahat.
Vec substitutes_prices(const SubstitutesEconomy& economy,
                       const BlockProfile& profile);

// Multilateral price impact at a block profile.
Mat substitutes_impact(const SubstitutesEconomy& economy,
                       const BlockProfile& profile, Index firm);

// Markups mu_i = Lambda_i q_i at a block profile.
std::vector<Vec> substitutes_markups(const SubstitutesEconomy& economy,
                                     const BlockProfile& profile);

}  // namespace sdfe
