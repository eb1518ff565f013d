#pragma once

#include <string>
#include <vector>

#include "sdfe/chain.hpp"
#include "sdfe/solver.hpp"

namespace sdfe {

// Side-by-side solve under multilateral / unilateral-inputs / local with the
// orderings recomputed from the raw solves.
struct RegimeComparison {
  struct Entry {
    RegimeKind kind;
    SlopeProfile slopes;
    Vec prices;
    Vec profits;
    double final_price = 0.0;  // only meaningful with one consumed good
    double total_welfare = 0.0;
  };
  std::vector<Entry> entries;  // multilateral, unilateral-inputs, local
  bool slopes_dominate = false;      // both alternatives above multilateral
  bool final_price_ordered = false;  // p0 largest under multilateral
  bool has_single_consumed_good = false;
};

RegimeComparison compare_regimes(const Economy& economy,
                                 const SolveOptions& opts = {});

// Vertical-merger study on the two-layer chain (n_2 = 1, kappa_2 = 0):
// pre-merger equilibrium per regime against the post-merger monopoly with
// slope B_M = (1/k + 1/B_c)^{-1}. The n1 threshold of each regime solves
// 2k = n1 * B1(n1); consumer surplus flips sign exactly there, total
// welfare is reported alongside with its own flip point.
struct MergerStudy {
  struct Row {
    double n1;
    double pre_quantity, post_quantity;
    double pre_welfare, post_welfare;
    double pre_consumer_surplus, post_consumer_surplus;
  };
  struct RegimeResult {
    std::string name;
    std::vector<Row> rows;            // at integer n1
    double price_threshold = 0.0;     // n solving 2k = n B1(n)
    double welfare_threshold = 0.0;   // n where total-welfare gain flips
    bool price_threshold_found = false;
    bool welfare_threshold_found = false;
  };
  std::vector<RegimeResult> regimes;  // multilateral, unilateral, seq-Cournot
  double n_star_unilateral = 0.0;     // n_*
  double n_star_multilateral = 0.0;   // n^*
  double post_merger_slope = 0.0;     // B_M
};

MergerStudy merger_study(int n1_max, double k, double b_c, double a);

// One point of the merger study at a possibly fractional n1, for the given
// regime name (multilateral | unilateral-inputs | sequential-cournot).
MergerStudy::Row merger_point(double n1, double k, double b_c, double a,
                              const std::string& regime);

// Quantity and welfare of the n=2 chain under multilateral vs local market
// power, N = 2..n_max.
struct DepthRow {
  int depth;
  double q_multilateral, q_local;
  double w_multilateral, w_local;
  double q_ratio, w_ratio;  // local / multilateral
};

std::vector<DepthRow> depth_sweep(int n_max, double k, double b_c, double a);

// Per-layer surplus decomposition of a homogeneous chain under the four
// chain regimes, with monotonicity verdicts recomputed from the solves.
struct SurplusProfile {
  struct RegimeRows {
    std::string name;
    Vec markup_out;
    Vec markdown_in;
    Vec profit;
    bool profits_equal = false;
    bool profits_increasing_upstream = false;
    bool profits_increasing_downstream = false;
  };
  std::vector<RegimeRows> regimes;
};

SurplusProfile surplus_profile(const ChainSpec& spec);

// Number of worker threads honoring the SDFE_THREADS cap.
int sweep_threads();

}  // namespace sdfe
