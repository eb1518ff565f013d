#include "sdfe/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <thread>

namespace sdfe {

namespace {

bool strictly_above(const Vec& a, const Vec& b, double margin = 1e-10) {
  return ((a - b).array() > margin).all();
}

}  // namespace

RegimeComparison compare_regimes(const Economy& economy,
                                 const SolveOptions& opts) {
  RegimeComparison cmp;
  cmp.has_single_consumed_good = economy.consumer_goods().size() == 1;
  const RegimeKind kinds[] = {RegimeKind::Multilateral,
                              RegimeKind::UnilateralInputs, RegimeKind::Local};
  for (RegimeKind kind : kinds) {
    Regime regime{kind, {}};
    auto [slopes, diag] = solve(economy, regime, opts);
    (void)diag;
    const EquilibriumSolution sol = solution(economy, slopes, regime);
    RegimeComparison::Entry entry;
    entry.kind = kind;
    entry.slopes = slopes;
    entry.prices = sol.state.prices;
    entry.profits = sol.profits;
    entry.total_welfare = sol.total_welfare;
    if (cmp.has_single_consumed_good)
      entry.final_price = sol.state.prices(economy.consumer_goods()[0]);
    cmp.entries.push_back(std::move(entry));
  }
  const auto& multi = cmp.entries[0];
  const auto& uni = cmp.entries[1];
  const auto& local = cmp.entries[2];
  cmp.slopes_dominate = strictly_above(uni.slopes, multi.slopes) &&
                        strictly_above(local.slopes, multi.slopes);
  if (cmp.has_single_consumed_good)
    cmp.final_price_ordered = multi.final_price > uni.final_price + 1e-10 &&
                              multi.final_price > local.final_price + 1e-10;
  return cmp;
}

namespace {

struct TwoLayerEq {
  double b1, b2;
};

// Pre-merger two-layer chain with n1 downstream firms (continuous), a single
// upstream firm with kappa = 0, and downstream curvature kappa = 1/k. The
// upstream best reply is the same under all three regimes.
TwoLayerEq premerger_equilibrium(double n1, double k, double b_c,
                                 const std::string& regime) {
  const double kappa = 1.0 / k;
  double b1 = k;
  double b2 = b_c;
  for (int it = 0; it < 100000; ++it) {
    const double lam2 = 1.0 / b_c + 1.0 / (n1 * b1);
    const double next_b2 = 1.0 / lam2;
    double next_b1;
    if (regime == "sequential-cournot") {
      next_b1 = 1.0 / (kappa + 1.0 / b_c);
    } else {
      const double agg = regime == "multilateral" ? 1.0 / b_c + 1.0 / next_b2
                                                  : 1.0 / b_c;
      next_b1 = chain_best_reply(agg, n1, kappa);
    }
    const double step =
        std::max(std::abs(next_b1 - b1), std::abs(next_b2 - b2));
    b1 = next_b1;
    b2 = next_b2;
    if (step < 1e-14) return {b1, b2};
  }
  throw NotConverged("pre-merger fixed point hit max_iter");
}

MergerStudy::Row merger_row(double n1, double k, double b_c, double a,
                            const std::string& regime, double b_m) {
  const TwoLayerEq eq = premerger_equilibrium(n1, k, b_c, regime);
  MergerStudy::Row row;
  row.n1 = n1;
  const double recip = 1.0 / (n1 * eq.b1) + 1.0 / eq.b2;
  row.pre_quantity = a / (b_c * recip + 1.0);
  row.post_quantity = a * b_m / (b_c + b_m);
  const auto welf = [&](double q, double curv) {
    return a * q / b_c - 0.5 * q * q / b_c - 0.5 * curv * q * q;
  };
  row.pre_welfare = welf(row.pre_quantity, 1.0 / (k * n1));
  row.post_welfare = welf(row.post_quantity, 1.0 / k);
  row.pre_consumer_surplus = 0.5 * row.pre_quantity * row.pre_quantity / b_c;
  row.post_consumer_surplus =
      0.5 * row.post_quantity * row.post_quantity / b_c;
  return row;
}

double bisect(double lo, double hi, double tol,
              const std::function<double(double)>& f) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw ThresholdNotBracketed("no sign change on [" + std::to_string(lo) +
                                ", " + std::to_string(hi) + "]");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

MergerStudy::Row merger_point(double n1, double k, double b_c, double a,
                              const std::string& regime) {
  if (n1 < 1.0 || !(k > 0.0) || !(b_c > 0.0) || !(a > 0.0))
    throw InvalidArgument("bad merger-point parameters");
  return merger_row(n1, k, b_c, a, regime, 1.0 / (1.0 / k + 1.0 / b_c));
}

MergerStudy merger_study(int n1_max, double k, double b_c, double a) {
  if (n1_max < 2 || !(k > 0.0) || !(b_c > 0.0) || !(a > 0.0))
    throw InvalidArgument("merger study needs n1_max >= 2, k > 0, B_c > 0");
  MergerStudy study;
  study.post_merger_slope = 1.0 / (1.0 / k + 1.0 / b_c);

  for (const std::string regime :
       {"multilateral", "unilateral-inputs", "sequential-cournot"}) {
    MergerStudy::RegimeResult result;
    result.name = regime;
    for (int n1 = 2; n1 <= n1_max; ++n1)
      result.rows.push_back(
          merger_row(n1, k, b_c, a, regime, study.post_merger_slope));

    const auto price_gap = [&](double n1) {
      return n1 * premerger_equilibrium(n1, k, b_c, regime).b1 - 2.0 * k;
    };
    const auto welfare_gap = [&](double n1) {
      const MergerStudy::Row row =
          merger_row(n1, k, b_c, a, regime, study.post_merger_slope);
      return row.post_welfare - row.pre_welfare;
    };
    try {
      result.price_threshold =
          bisect(2.0, static_cast<double>(n1_max), 1e-6, price_gap);
      result.price_threshold_found = true;
    } catch (const ThresholdNotBracketed&) {
    }
    try {
      result.welfare_threshold =
          bisect(2.0, static_cast<double>(n1_max), 1e-6, welfare_gap);
      result.welfare_threshold_found = true;
    } catch (const ThresholdNotBracketed&) {
    }
    study.regimes.push_back(std::move(result));
  }

  if (!study.regimes[0].price_threshold_found ||
      !study.regimes[1].price_threshold_found)
    throw ThresholdNotBracketed(
        "no threshold in [2, n1_max]: raise n1_max");
  study.n_star_multilateral = study.regimes[0].price_threshold;
  study.n_star_unilateral = study.regimes[1].price_threshold;
  return study;
}

int sweep_threads() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("SDFE_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && cap < static_cast<long>(hw)) hw = static_cast<unsigned>(cap);
  }
  return static_cast<int>(hw);
}

std::vector<DepthRow> depth_sweep(int n_max, double k, double b_c, double a) {
  if (n_max < 2) throw InvalidArgument("depth sweep needs N_max >= 2");
  std::vector<DepthRow> rows(n_max - 1);
  const auto run_point = [&](int depth) {
    const ChainSpec spec = ChainSpec::uniform(depth, 2, k, b_c, a);
    const ChainSolution multi = solve_chain(spec, ChainRegime::Multilateral);

    const Economy economy = chain_to_economy(spec);
    auto [firm_slopes, diag] = solve(economy, Regime{RegimeKind::Local, {}});
    (void)diag;
    Vec layer_slopes(depth);
    for (int layer = 0; layer < depth; ++layer)
      layer_slopes(layer) = firm_slopes(2 * layer);  // layer-major, symmetric
    const auto [w_local, q_local] = chain_welfare(spec, layer_slopes);

    DepthRow row;
    row.depth = depth;
    row.q_multilateral = multi.quantity;
    row.w_multilateral = multi.total_welfare;
    row.q_local = q_local;
    row.w_local = w_local;
    row.q_ratio = q_local / multi.quantity;
    row.w_ratio = w_local / multi.total_welfare;
    return row;
  };

  const int workers = std::min(sweep_threads(), n_max - 1);
  std::atomic<int> next{2};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int depth = next.fetch_add(1); depth <= n_max;
             depth = next.fetch_add(1))
          rows[depth - 2] = run_point(depth);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);
  return rows;
}

SurplusProfile surplus_profile(const ChainSpec& spec) {
  validate_chain(spec);
  SurplusProfile profile;
  const std::pair<ChainRegime, const char*> regimes[] = {
      {ChainRegime::Multilateral, "multilateral"},
      {ChainRegime::UnilateralInputs, "unilateral-inputs"},
      {ChainRegime::UnilateralOutputs, "unilateral-outputs"},
      {ChainRegime::SequentialCournot, "sequential-cournot"},
  };
  for (const auto& [regime, name] : regimes) {
    const ChainSolution sol = solve_chain(spec, regime);
    SurplusProfile::RegimeRows rows;
    rows.name = name;
    rows.markup_out = sol.markup_out;
    rows.markdown_in = sol.markdown_in;
    rows.profit = sol.profit;
    const Index n = sol.profit.size();
    rows.profits_equal = true;
    rows.profits_increasing_upstream = true;
    rows.profits_increasing_downstream = true;
    for (Index i = 0; i + 1 < n; ++i) {
      const double lo = sol.profit(i), hi = sol.profit(i + 1);
      if (std::abs(hi - lo) > 1e-8 * std::max(std::abs(lo), std::abs(hi)))
        rows.profits_equal = false;
      if (hi <= lo) rows.profits_increasing_upstream = false;
      if (hi >= lo) rows.profits_increasing_downstream = false;
    }
    profile.regimes.push_back(std::move(rows));
  }
  return profile;
}

}  // namespace sdfe
