#include "sdfe/regimes.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <set>

namespace sdfe {

const char* regime_name(RegimeKind kind) {
  switch (kind) {
    case RegimeKind::Multilateral: return "multilateral";
    case RegimeKind::UnilateralInputs: return "unilateral-inputs";
    case RegimeKind::UnilateralOutputs: return "unilateral-outputs";
    case RegimeKind::Local: return "local";
    case RegimeKind::Cournot: return "cournot";
    case RegimeKind::Walrasian: return "walrasian";
  }
  return "?";
}

RegimeKind regime_from_name(const std::string& name) {
  if (name == "multilateral") return RegimeKind::Multilateral;
  if (name == "unilateral-inputs") return RegimeKind::UnilateralInputs;
  if (name == "unilateral-outputs") return RegimeKind::UnilateralOutputs;
  if (name == "local") return RegimeKind::Local;
  if (name == "cournot") return RegimeKind::Cournot;
  if (name == "walrasian") return RegimeKind::Walrasian;
  throw InvalidArgument("unknown regime: " + name);
}

namespace {

// Goods adjacency excluding firm `skip`: g ~ h iff some other firm trades
// both. Built once per partition query.
std::vector<std::set<Index>> goods_adjacency(const Economy& economy,
                                             Index skip) {
  std::vector<std::set<Index>> adj(economy.n_goods());
  for (Index j = 0; j < economy.n_firms(); ++j) {
    if (j == skip) continue;
    const auto& goods = economy.traded(j);
    for (size_t r = 0; r < goods.size(); ++r)
      for (size_t c = r + 1; c < goods.size(); ++c) {
        adj[goods[r]].insert(goods[c]);
        adj[goods[c]].insert(goods[r]);
      }
  }
  return adj;
}

Partition partition_from_up(const Economy& economy, Index firm,
                            const std::vector<Index>& up) {
  std::vector<char> in_up(economy.n_goods(), 0);
  for (Index g : up) {
    if (g < 0 || g >= economy.n_goods())
      throw PartitionInvalid("up-set contains an invalid good");
    in_up[g] = 1;
  }
  if (in_up[economy.out_good(firm)])
    throw PartitionInvalid("output good must be in the down-set");
  for (const auto& in : economy.inputs(firm))
    if (!in_up[in.good])
      throw PartitionInvalid("every input good must be in the up-set");
  Partition part;
  for (Index g = 0; g < economy.n_goods(); ++g)
    (in_up[g] ? part.up : part.down).push_back(g);
  return part;
}

// Reachability closure from `seeds`, never expanding through `blocked`.
std::vector<char> reach(const std::vector<std::set<Index>>& adj,
                        const std::vector<Index>& seeds,
                        const std::vector<char>& blocked, Index m) {
  std::vector<char> seen(m, 0);
  std::deque<Index> queue;
  for (Index s : seeds) {
    seen[s] = 1;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    const Index g = queue.front();
    queue.pop_front();
    for (Index h : adj[g]) {
      if (seen[h] || blocked[h]) continue;
      seen[h] = 1;
      queue.push_back(h);
    }
  }
  return seen;
}

PriceImpact unilateral_impact(const Economy& economy,
                              const SlopeProfile& slopes, Index firm,
                              const std::vector<Index>& internalized,
                              bool output_side) {
  // Restrict the cleared system to the internalized goods, drop the firm's
  // own schedule there, and read off the block of traded internalized goods.
  Mat s = detail::system_without_firm(economy, slopes, firm);
  std::vector<Index> keep = internalized;
  std::sort(keep.begin(), keep.end());
  Mat sub(keep.size(), keep.size());
  std::vector<Index> pos_of(economy.n_goods(), -1);
  for (size_t r = 0; r < keep.size(); ++r) pos_of[keep[r]] = static_cast<Index>(r);
  for (size_t r = 0; r < keep.size(); ++r)
    for (size_t c = 0; c < keep.size(); ++c) sub(r, c) = s(keep[r], keep[c]);

  const auto& traded = economy.traded(firm);
  const Index d = static_cast<Index>(traded.size());
  std::vector<Index> traded_pos;
  std::vector<Index> block_rows;
  for (Index j = 0; j < d; ++j) {
    const bool internal = pos_of[traded[j]] >= 0;
    const bool wanted = output_side ? (j == 0) : (j > 0);
    if (internal != wanted)
      throw PartitionInvalid("partition does not match the regime side");
    if (internal) {
      traded_pos.push_back(pos_of[traded[j]]);
      block_rows.push_back(j);
    }
  }
  Mat inner = detail::inverse_submatrix(sub, traded_pos, "unilateral impact");
  Mat block = Mat::Zero(d, d);
  for (size_t r = 0; r < block_rows.size(); ++r)
    for (size_t c = 0; c < block_rows.size(); ++c)
      block(block_rows[r], block_rows[c]) = inner(r, c);
  return PriceImpact{block};
}

}  // namespace

Partition downstream_partition(const Economy& economy,
                               const SlopeProfile& slopes, Index firm) {
  (void)slopes;  // the default partition depends on the network only
  if (firm < 0 || firm >= economy.n_firms())
    throw InvalidArgument("firm index out of range");
  const auto adj = goods_adjacency(economy, firm);
  std::vector<char> blocked(economy.n_goods(), 0);
  for (const auto& in : economy.inputs(firm)) blocked[in.good] = 1;
  const auto seen =
      reach(adj, {economy.out_good(firm)}, blocked, economy.n_goods());
  Partition part;
  for (Index g = 0; g < economy.n_goods(); ++g)
    (seen[g] ? part.down : part.up).push_back(g);
  return part;
}

PriceImpact lambda_for(const Regime& regime, const Economy& economy,
                       const SlopeProfile& slopes, Index firm) {
  if (firm < 0 || firm >= economy.n_firms())
    throw InvalidArgument("firm index out of range");
  const Index d = static_cast<Index>(economy.traded(firm).size());
  switch (regime.kind) {
    case RegimeKind::Multilateral:
      return price_impact_multilateral(economy, slopes, firm);
    case RegimeKind::Walrasian:
      return PriceImpact{Mat::Zero(d, d)};
    case RegimeKind::Local: {
      Mat s = detail::system_without_firm(economy, slopes, firm);
      const auto& goods = economy.traded(firm);
      Mat sub(d, d);
      for (Index r = 0; r < d; ++r)
        for (Index c = 0; c < d; ++c) sub(r, c) = s(goods[r], goods[c]);
      detail::SymSolver solver(sub, "local impact");
      const Mat eye = Mat::Identity(d, d);
      return PriceImpact{solver.solve(eye)};
    }
    case RegimeKind::Cournot: {
      // Same-good competitors commit to quantities: their slopes are zero.
      SlopeProfile modified = slopes;
      for (Index j = 0; j < economy.n_firms(); ++j)
        if (j != firm && economy.out_good(j) == economy.out_good(firm))
          modified(j) = 0.0;
      return price_impact_multilateral(economy, modified, firm);
    }
    case RegimeKind::UnilateralInputs:
    case RegimeKind::UnilateralOutputs: {
      Partition part;
      const auto it = regime.up_override.find(firm);
      if (it != regime.up_override.end())
        part = partition_from_up(economy, firm, it->second);
      else
        part = downstream_partition(economy, slopes, firm);
      const bool output_side = regime.kind == RegimeKind::UnilateralInputs;
      const auto& internalized = output_side ? part.down : part.up;
      if (!output_side && economy.inputs(firm).empty())
        return PriceImpact{Mat::Zero(d, d)};  // no inputs: fully price-taking
      return unilateral_impact(economy, slopes, firm, internalized,
                               output_side);
    }
  }
  throw InvalidArgument("unhandled regime");
}

MonotonicityReport check_regime_monotonicity(const Regime& regime,
                                             const Economy& economy, Index firm,
                                             int trials, unsigned seed) {
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> slope_dist(0.05, 2.0);
  std::uniform_real_distribution<double> bump_dist(0.01, 1.0);
  std::uniform_int_distribution<Index> firm_dist(0, economy.n_firms() - 1);

  MonotonicityReport report;
  report.trials = trials;
  for (int t = 0; t < trials; ++t) {
    SlopeProfile slopes(economy.n_firms());
    for (Index i = 0; i < economy.n_firms(); ++i) {
      slopes(i) = slope_dist(rng);
      const double kappa = economy.inv_capacity(i);
      if (kappa > 0.0) slopes(i) = std::min(slopes(i), 1.0 / kappa);
    }
    Index other = firm_dist(rng);
    while (other == firm) other = firm_dist(rng);
    SlopeProfile bumped = slopes;
    bumped(other) += bump_dist(rng);

    const Mat before = lambda_for(regime, economy, slopes, firm).block;
    const Mat after = lambda_for(regime, economy, bumped, firm).block;
    Eigen::SelfAdjointEigenSolver<Mat> es(before - after);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -1e-10) {
      ++report.violations;
      report.worst_eigenvalue = std::min(report.worst_eigenvalue, min_eig);
    }
  }
  return report;
}

}  // namespace sdfe
