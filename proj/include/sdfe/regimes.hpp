#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sdfe/clearing.hpp"

namespace sdfe {

enum class RegimeKind {
  Multilateral,
  UnilateralInputs,
  UnilateralOutputs,
  Local,
  Cournot,
  Walrasian,  // Lambda == 0; every firm behaves competitively
};

// A market-power regime: which price impacts firms internalize.
// `up_override` optionally fixes the up-set of selected firms for the
// unilateral regimes; it must keep all inputs up and the output down.
struct Regime {
  RegimeKind kind = RegimeKind::Multilateral;
  std::map<Index, std::vector<Index>> up_override;
};

const char* regime_name(RegimeKind kind);
RegimeKind regime_from_name(const std::string& name);

struct Partition {
  std::vector<Index> down;  // contains out(i)
  std::vector<Index> up;    // contains all inputs of i
};

// Default partition for the unilateral regimes. The down-set collects the
// output good plus every good reachable from it in the goods network with
// firm i removed (two goods adjacent iff some firm j != i trades both),
// where paths never pass through an input good of i; the up-set is the
// complement. On layered chains this reproduces the closed-form unilateral
// price impact for every layer width.
Partition downstream_partition(const Economy& economy,
                               const SlopeProfile& slopes, Index firm);

// Price-impact function of the Generalized SDFE for the given regime.
PriceImpact lambda_for(const Regime& regime, const Economy& economy,
                       const SlopeProfile& slopes, Index firm);

struct MonotonicityReport {
  int trials = 0;
  int violations = 0;
  double worst_eigenvalue = 0.0;  // most negative eigenvalue observed
};

// Randomized check of Def. of a price-impact function: Lambda_i must
// decrease (p.s.d. sense) when any other firm's slope increases.
MonotonicityReport check_regime_monotonicity(const Regime& regime,
                                             const Economy& economy, Index firm,
                                             int trials,
                                             unsigned seed = 20250810);

}  // namespace sdfe
