#pragma once

#include <vector>

#include "sdfe/economy.hpp"
#include "sdfe/types.hpp"

namespace sdfe {

// Firms' strategy profile: one nonnegative slope per firm.
using SlopeProfile = Vec;

// Aggregate clearing system  M p = A_bar  with
//   M = sum_j B_j vhat_j vhat_j' + Bhat_c,   A_bar = Ahat + sum_j B_j f_jL vhat_j.
struct ClearingSystem {
  Mat m;
  Vec a_bar;
};

struct PriceQuantityState {
  Vec prices;                         // p, length m
  Vec output_qty;                     // q_i^out per firm
  std::vector<Vec> net_trades;        // q_i = q_i^out * v_i (canonical order)
  Vec labor;                          // l_i = f_iL q + (kappa/2) q^2
  std::vector<Index> negative_outputs;  // firms with q_i^out < 0
  std::vector<Index> negative_prices;   // goods with p_g < 0
};

// Price-impact block Lambda_i, rows/columns in the firm's canonical order.
struct PriceImpact {
  Mat block;
};

ClearingSystem assemble_system(const Economy& economy,
                               const SlopeProfile& slopes);

// Solves M p = A_bar and evaluates the schedules. Negative prices or
// quantities are legal (trade-direction convention) but reported.
PriceQuantityState clear(const Economy& economy, const SlopeProfile& slopes);

// Multilateral price impact: the N(i)-submatrix of (M - Bhat_i)^{-1}.
PriceImpact price_impact_multilateral(const Economy& economy,
                                      const SlopeProfile& slopes, Index firm);

// v' Lambda v, the scalar index of price-impact strength.
double aggregate_impact(const PriceImpact& impact, const TechVector& v);

// Max absolute market-clearing residual over non-labor goods; test hook.
double clearing_residual(const Economy& economy, const SlopeProfile& slopes,
                         const PriceQuantityState& state);

// Internal building blocks shared with the regimes and analysis modules.
namespace detail {

// Symmetric solve with a condition estimate from the LDLT pivots;
// throws SingularSystem above the 10^12 guard.
class SymSolver {
 public:
  explicit SymSolver(const Mat& m, const char* what);
  Vec solve(const Vec& rhs) const;
  Mat solve(const Mat& rhs) const;

 private:
  Eigen::LDLT<Mat> ldlt_;
};

// M - Bhat_i (drop firm i's own schedule from the aggregate).
Mat system_without_firm(const Economy& economy, const SlopeProfile& slopes,
                        Index firm);

// Submatrix of (S)^{-1} on the listed goods, via solves against unit vectors.
Mat inverse_submatrix(const Mat& s, const std::vector<Index>& goods,
                      const char* what);

}  // namespace detail

}  // namespace sdfe
