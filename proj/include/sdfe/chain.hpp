#pragma once

#include <string>
#include <vector>

#include "sdfe/economy.hpp"

namespace sdfe {

// Layered supply chain: layer i sells to layer i-1, layer 1 sells to the
// consumer, layer N uses only labor. Unit technology coefficients.
struct ChainSpec {
  int n_layers = 1;
  std::vector<int> firms_per_layer;  // n_i >= 1, one entry per layer
  Vec inv_capacity;                  // kappa_i >= 0 per layer (0 = k_i inf)
  double consumer_slope = 1.0;       // B_c > 0
  double consumer_intercept = 1.0;   // A_c > 0
  double last_layer_labor = 0.0;     // f_{N,L} >= 0

  static ChainSpec uniform(int n_layers, int firms_per_layer, double k,
                           double b_c = 1.0, double a_c = 1.0);
};

enum class ChainRegime {
  Multilateral,
  UnilateralInputs,
  UnilateralOutputs,
  SequentialCournot,
};

// Slopes of the aggregate demand (out) and supply (in) schedules per layer:
//   agg_out_i = 1/B_c + sum_{j<i} 1/(n_j B_j),  agg_in_i = sum_{j>i} 1/(n_j B_j).
struct ChainAggregates {
  Vec out_slope_recip;
  Vec in_slope_recip;
};

struct ChainSolution {
  Vec slopes;        // per layer
  Vec prices;        // per layer good, increasing upstream
  double quantity = 0.0;  // consumer quantity Q
  Vec markup_out;    // per layer
  Vec markdown_in;   // per layer (magnitude; zero for the top layer)
  Vec profit;        // per firm in each layer
  double total_welfare = 0.0;
  int iterations = 0;
  std::vector<std::string> warnings;
};

ChainSpec validate_chain(const ChainSpec& spec);

// Materializes the chain as a general Economy (goods 0..N-1, only good 0
// consumed, firms grouped layer-major) for oracle cross-checks.
Economy chain_to_economy(const ChainSpec& spec);

ChainAggregates chain_aggregates(const ChainSpec& spec, const Vec& slopes);

// Unique positive solution of X = (kappa + (agg^{-1} + (n-1) X)^{-1})^{-1}.
// agg_impact may be +inf (its reciprocal enters the quadratic), n = 1
// degenerates to (kappa + agg_impact)^{-1}, and fractional n >= 1 is
// accepted (the merger study treats the firm count as continuous).
double chain_best_reply(double agg_impact, double n_firms, double kappa);

ChainSolution solve_chain(const ChainSpec& spec, ChainRegime regime,
                          double tol = 1e-13, int max_iter = 200000);

// (W, Q) at the given per-layer slopes.
std::pair<double, double> chain_welfare(const ChainSpec& spec,
                                        const Vec& slopes);

}  // namespace sdfe
