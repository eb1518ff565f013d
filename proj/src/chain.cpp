#include "sdfe/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sdfe {

ChainSpec ChainSpec::uniform(int n_layers, int firms_per_layer, double k,
                             double b_c, double a_c) {
  ChainSpec spec;
  spec.n_layers = n_layers;
  spec.firms_per_layer.assign(n_layers, firms_per_layer);
  spec.inv_capacity = Vec::Constant(n_layers, k > 0.0 ? 1.0 / k : 0.0);
  spec.consumer_slope = b_c;
  spec.consumer_intercept = a_c;
  return spec;
}

ChainSpec validate_chain(const ChainSpec& spec) {
  if (spec.n_layers < 1) throw InvalidArgument("chain needs >= 1 layer");
  if (static_cast<int>(spec.firms_per_layer.size()) != spec.n_layers ||
      spec.inv_capacity.size() != spec.n_layers)
    throw InvalidArgument("per-layer field lengths disagree");
  for (int n : spec.firms_per_layer)
    if (n < 1) throw InvalidArgument("each layer needs >= 1 firm");
  if ((spec.inv_capacity.array() < 0.0).any())
    throw InvalidArgument("kappa must be nonnegative");
  if (!(spec.consumer_slope > 0.0) || !(spec.consumer_intercept > 0.0))
    throw InvalidArgument("consumer block must be positive");
  if (spec.last_layer_labor < 0.0)
    throw InvalidArgument("last-layer labor must be nonnegative");
  return spec;
}

Economy chain_to_economy(const ChainSpec& spec_in) {
  const ChainSpec spec = validate_chain(spec_in);
  const int n_layers = spec.n_layers;
  std::vector<Index> out;
  std::vector<std::vector<InputCoeff>> inputs;
  std::vector<double> f_l;
  std::vector<double> kappa;
  std::vector<std::string> firm_names;
  for (int layer = 0; layer < n_layers; ++layer) {
    for (int f = 0; f < spec.firms_per_layer[layer]; ++f) {
      out.push_back(layer);
      if (layer + 1 < n_layers)
        inputs.push_back({InputCoeff{layer + 1, 1.0}});
      else
        inputs.push_back({});
      f_l.push_back(layer + 1 == n_layers ? spec.last_layer_labor : 0.0);
      kappa.push_back(spec.inv_capacity(layer));
      firm_names.push_back("L" + std::to_string(layer + 1) + "_" +
                           std::to_string(f + 1));
    }
  }
  const Index n = static_cast<Index>(out.size());
  Vec f_l_vec(n), kappa_vec(n);
  for (Index i = 0; i < n; ++i) {
    f_l_vec(i) = f_l[i];
    kappa_vec(i) = kappa[i];
  }
  Vec a(1);
  a << spec.consumer_intercept;
  Mat b_c(1, 1);
  b_c << spec.consumer_slope;
  std::vector<std::string> good_names;
  for (int g = 0; g < n_layers; ++g)
    good_names.push_back("good" + std::to_string(g + 1));
  return Economy(n_layers, std::move(out), std::move(inputs),
                 std::move(f_l_vec), std::move(kappa_vec), {0}, std::move(a),
                 std::move(b_c), std::move(good_names), std::move(firm_names));
}

ChainAggregates chain_aggregates(const ChainSpec& spec, const Vec& slopes) {
  const int n_layers = spec.n_layers;
  if (slopes.size() != n_layers)
    throw DimensionMismatch("slope vector length != number of layers");
  ChainAggregates agg;
  agg.out_slope_recip = Vec(n_layers);
  agg.in_slope_recip = Vec(n_layers);
  double acc = 1.0 / spec.consumer_slope;
  for (int i = 0; i < n_layers; ++i) {
    agg.out_slope_recip(i) = acc;
    acc += 1.0 / (spec.firms_per_layer[i] * slopes(i));
  }
  acc = 0.0;
  for (int i = n_layers - 1; i >= 0; --i) {
    agg.in_slope_recip(i) = acc;
    acc += 1.0 / (spec.firms_per_layer[i] * slopes(i));
  }
  return agg;
}

double chain_best_reply(double agg_impact, double n_firms, double kappa) {
  if (n_firms < 1.0) throw InvalidArgument("layer needs >= 1 firm");
  if (agg_impact < 0.0 || kappa < 0.0)
    throw InvalidArgument("chain best reply needs nonnegative inputs");
  if (n_firms == 1.0) {
    const double denom = kappa + agg_impact;
    if (!(denom > 0.0))
      throw NoPositiveRoot("degenerate monopolist reply (kappa + impact = 0)");
    return 1.0 / denom;
  }
  if (!(kappa > 0.0)) {
    if (n_firms < 2.0 && agg_impact > 0.0)
      return (1.0 / agg_impact) / (2.0 - n_firms);
    throw NoPositiveRoot(
        "competitors with kappa = 0: slope is unbounded");
  }
  const double k = 1.0 / kappa;
  if (agg_impact == 0.0) return k;  // no residual price impact: Walrasian
  const double lam_inv = 1.0 / agg_impact;  // 0 when agg_impact = inf
  const double b = (n_firms - 2) * k - lam_inv;
  const double disc = b * b + 4.0 * (n_firms - 1) * lam_inv * k;
  return (b + std::sqrt(disc)) / (2.0 * (n_firms - 1));
}

namespace {

Vec reply_sweep(const ChainSpec& spec, ChainRegime regime, const Vec& slopes) {
  const ChainAggregates agg = chain_aggregates(spec, slopes);
  Vec next(spec.n_layers);
  for (int i = 0; i < spec.n_layers; ++i) {
    const double kappa = spec.inv_capacity(i);
    const int n = spec.firms_per_layer[i];
    switch (regime) {
      case ChainRegime::Multilateral:
        next(i) = chain_best_reply(
            agg.out_slope_recip(i) + agg.in_slope_recip(i), n, kappa);
        break;
      case ChainRegime::UnilateralInputs:
        next(i) = chain_best_reply(agg.out_slope_recip(i), n, kappa);
        break;
      case ChainRegime::UnilateralOutputs:
        next(i) = chain_best_reply(agg.in_slope_recip(i), n, kappa);
        break;
      case ChainRegime::SequentialCournot: {
        // Quantity commitment: no competitor-slope term in the price impact.
        const double denom = kappa + agg.out_slope_recip(i);
        if (!(denom > 0.0))
          throw NoPositiveRoot("degenerate sequential-Cournot reply");
        next(i) = 1.0 / denom;
        break;
      }
    }
  }
  return next;
}

}  // namespace

ChainSolution solve_chain(const ChainSpec& spec_in, ChainRegime regime,
                          double tol, int max_iter) {
  const ChainSpec spec = validate_chain(spec_in);
  const int n_layers = spec.n_layers;
  ChainSolution sol;

  for (int i = 0; i < n_layers; ++i) {
    if (spec.inv_capacity(i) == 0.0 && spec.firms_per_layer[i] >= 2 &&
        regime != ChainRegime::SequentialCournot)
      throw DegenerateChain(
          "layer with several firms and kappa = 0 has no interior "
          "equilibrium (competitive blow-up)");
    // A layer boundary traded by one seller and one buyer only is a
    // bilateral monopoly whose unique linear equilibrium has zero trade.
    if (i + 1 < n_layers && spec.firms_per_layer[i] == 1 &&
        spec.firms_per_layer[i + 1] == 1)
      throw DegenerateChain(
          "good " + std::to_string(i + 2) +
          " is traded by a single seller and a single buyer: only the "
          "degenerate zero-trade equilibrium exists");
  }
  if (n_layers >= 2)
    for (int i = 0; i < n_layers; ++i)
      if (spec.firms_per_layer[i] == 1)
        sol.warnings.push_back(
            "layer " + std::to_string(i + 1) +
            ": single firm; interiority is not guaranteed in general");

  // Monotone decreasing iteration from a dominating start.
  double cap = std::max(1.0, 1e3 * spec.consumer_slope);
  for (int i = 0; i < n_layers; ++i)
    if (spec.inv_capacity(i) > 0.0)
      cap = std::max(cap, 1.0 / spec.inv_capacity(i));
  Vec upper(n_layers);
  for (int i = 0; i < n_layers; ++i)
    upper(i) = spec.inv_capacity(i) > 0.0 ? 1.0 / spec.inv_capacity(i) : cap;

  Vec slopes = upper;
  int iterations = 0;
  for (; iterations < max_iter; ++iterations) {
    const Vec next = reply_sweep(spec, regime, slopes).cwiseMin(upper);
    const double step = (next - slopes).cwiseAbs().maxCoeff();
    slopes = next;
    if (step < tol) break;
  }
  if (iterations >= max_iter)
    throw NotConverged("chain fixed point hit max_iter");
  sol.iterations = iterations + 1;
  sol.slopes = slopes;

  const ChainAggregates agg = chain_aggregates(spec, slopes);
  const auto [w, q] = chain_welfare(spec, slopes);
  sol.total_welfare = w;
  sol.quantity = q;

  // p_N = Q/(n_N B_N) + f_{N,L}; p_i = p_{i+1} + Q/(n_i B_i).
  sol.prices = Vec(n_layers);
  double price = 0.0;
  for (int i = n_layers - 1; i >= 0; --i) {
    price += q / (spec.firms_per_layer[i] * slopes(i)) +
             (i + 1 == n_layers ? spec.last_layer_labor : 0.0);
    sol.prices(i) = price;
  }

  sol.markup_out = Vec::Zero(n_layers);
  sol.markdown_in = Vec::Zero(n_layers);
  sol.profit = Vec::Zero(n_layers);
  for (int i = 0; i < n_layers; ++i) {
    const double qi = q / spec.firms_per_layer[i];
    const int n = spec.firms_per_layer[i];
    const double comp = (n - 1) * slopes(i);
    const double out_recip = agg.out_slope_recip(i);
    const double in_recip = agg.in_slope_recip(i);
    switch (regime) {
      case ChainRegime::Multilateral: {
        const double denom = 1.0 + (out_recip + in_recip) * comp;
        sol.markup_out(i) = qi * out_recip / denom;
        sol.markdown_in(i) = qi * in_recip / denom;
        break;
      }
      case ChainRegime::UnilateralInputs:
        sol.markup_out(i) = qi / (1.0 / out_recip + comp);
        break;
      case ChainRegime::UnilateralOutputs:
        if (in_recip > 0.0) sol.markdown_in(i) = qi / (1.0 / in_recip + comp);
        break;
      case ChainRegime::SequentialCournot:
        sol.markup_out(i) = qi * out_recip;
        break;
    }
    sol.profit(i) = (1.0 / slopes(i) - 0.5 * spec.inv_capacity(i)) * qi * qi;
  }
  return sol;
}

std::pair<double, double> chain_welfare(const ChainSpec& spec_in,
                                        const Vec& slopes) {
  const ChainSpec spec = validate_chain(spec_in);
  if (slopes.size() != spec.n_layers)
    throw DimensionMismatch("slope vector length != number of layers");
  if ((slopes.array() <= 0.0).any())
    throw InvalidArgument("chain welfare needs positive slopes");
  double recip_sum = 0.0;
  double cost_curv = 0.0;
  for (int i = 0; i < spec.n_layers; ++i) {
    recip_sum += 1.0 / (spec.firms_per_layer[i] * slopes(i));
    cost_curv += spec.inv_capacity(i) / spec.firms_per_layer[i];
  }
  const double a = spec.consumer_intercept;
  const double b_c = spec.consumer_slope;
  const double q =
      (a - b_c * spec.last_layer_labor) / (b_c * recip_sum + 1.0);
  const double w = a * q / b_c - 0.5 * q * q / b_c -
                   spec.last_layer_labor * q - 0.5 * cost_curv * q * q;
  return {w, q};
}

}  // namespace sdfe
