#include "sdfe/solver.hpp"

#include <algorithm>
#include <cmath>

namespace sdfe {

double best_reply_slope(const PriceImpact& impact, const TechVector& v,
                        double kappa) {
  const double denom = aggregate_impact(impact, v) + kappa;
  if (denom <= 0.0)
    throw DegenerateReply(
        "zero aggregate price impact with kappa = 0: firm behaves as "
        "perfectly competitive (unbounded slope)");
  return 1.0 / denom;
}

double default_cap(const Economy& economy) {
  Eigen::SelfAdjointEigenSolver<Mat> es(economy.demand_slope());
  return 1e3 * es.eigenvalues().maxCoeff();
}

namespace {

// Best reply of one firm; a singular cleared system means the residual
// schedule is vertical (infinite price impact), whose limit reply is zero.
// That only arises on the lower sweep at degenerate profiles.
double reply_or_zero(const Economy& economy, const Regime& regime,
                     const SlopeProfile& slopes, Index firm) {
  try {
    const PriceImpact impact = lambda_for(regime, economy, slopes, firm);
    return best_reply_slope(impact, economy.tech(firm),
                            economy.inv_capacity(firm));
  } catch (const SingularSystem&) {
    return 0.0;
  }
}

SlopeProfile reply_sweep(const Economy& economy, const Regime& regime,
                         const SlopeProfile& slopes) {
  SlopeProfile next(economy.n_firms());
  for (Index i = 0; i < economy.n_firms(); ++i)
    next(i) = reply_or_zero(economy, regime, slopes, i);
  return next;
}

struct IterationResult {
  SlopeProfile profile;
  int iterations = 0;
};

IterationResult iterate(const Economy& economy, const Regime& regime,
                        const SolveOptions& opts, SlopeProfile profile,
                        const Vec& upper_bound) {
  for (int it = 1; it <= opts.max_iter; ++it) {
    const SlopeProfile reply =
        reply_sweep(economy, regime, profile).cwiseMin(upper_bound);
    const SlopeProfile next =
        (1.0 - opts.damping) * profile + opts.damping * reply;
    const double step = (next - profile).cwiseAbs().maxCoeff();
    profile = next;
    if (step < opts.tol) return {profile, it};
  }
  throw NotConverged("best-reply iteration hit max_iter with step > tol");
}

}  // namespace

SlopeProfile best_reply_profile(const Economy& economy, const Regime& regime,
                                const SlopeProfile& slopes) {
  return reply_sweep(economy, regime, slopes);
}

std::pair<SlopeProfile, SolveDiagnostics> solve(const Economy& economy,
                                                const Regime& regime,
                                                const SolveOptions& opts) {
  if (!(opts.tol > 0.0) || opts.max_iter < 1 || !(opts.damping > 0.0) ||
      opts.damping > 1.0)
    throw InvalidArgument("bad solve options");
  const Index n = economy.n_firms();
  const double cap = opts.cap > 0.0 ? opts.cap : default_cap(economy);

  Vec upper_bound(n);
  for (Index i = 0; i < n; ++i) {
    const double kappa = economy.inv_capacity(i);
    upper_bound(i) = kappa > 0.0 ? 1.0 / kappa : cap;
  }

  const IterationResult upper =
      iterate(economy, regime, opts, upper_bound, upper_bound);
  for (Index i = 0; i < n; ++i) {
    if (economy.inv_capacity(i) == 0.0 &&
        upper.profile(i) >= cap * (1.0 - 1e-9))
      throw NotConverged(
          "slope pinned at the cap with kappa = 0: competitive blow-up");
  }

  // The zero profile is a degenerate rest point whenever some market has no
  // active participant (the cleared system is singular and every reply is
  // zero). The map is subhomogeneous, tS + B_c >= t(S + B_c) for t <= 1
  // gives BR(t B) >= t BR(B), so a tiny multiple of the upper limit is a
  // valid from-below start whose increasing iterates stay under the upper
  // limit. Positive equilibria are bracketed either way.
  SlopeProfile lower_start = Vec::Zero(n);
  if (reply_sweep(economy, regime, lower_start).isZero() &&
      !upper.profile.isZero())
    lower_start = 1e-9 * upper.profile;
  IterationResult lower =
      iterate(economy, regime, opts, lower_start, upper_bound);

  // The per-iteration step criterion can stop each bracket a small multiple
  // of tol away from the common fixed point. When the gap is above tol but
  // still contracting, a few joint sweeps close it; a stagnating gap is a
  // real equilibrium gap and is reported as such.
  SlopeProfile top = upper.profile;
  int extra_upper = upper.iterations, extra_lower = lower.iterations;
  double gap = (top - lower.profile).cwiseAbs().maxCoeff();
  for (int it = extra_upper + extra_lower;
       gap > opts.tol && it < opts.max_iter; ++it) {
    const SlopeProfile next_top =
        reply_sweep(economy, regime, top).cwiseMin(upper_bound);
    const SlopeProfile next_lower = reply_sweep(economy, regime, lower.profile);
    const double next_gap = (next_top - next_lower).cwiseAbs().maxCoeff();
    if (next_gap >= gap * 0.999) break;
    top = next_top;
    lower.profile = next_lower;
    gap = next_gap;
    ++extra_upper;
    ++extra_lower;
  }

  SolveDiagnostics diag;
  diag.iterations_upper = extra_upper;
  diag.iterations_lower = extra_lower;
  diag.bracket_gap = gap;
  diag.converged = true;
  diag.unique_certified = diag.bracket_gap <= opts.tol;
  return {top, diag};
}

EquilibriumSolution solution(const Economy& economy,
                             const SlopeProfile& slopes,
                             const Regime& regime) {
  EquilibriumSolution sol;
  sol.slopes = slopes;
  sol.state = clear(economy, slopes);
  const Index n = economy.n_firms();
  sol.profits = Vec::Zero(n);
  sol.markups.resize(n);
  for (Index i = 0; i < n; ++i) {
    if (slopes(i) == 0.0) {
      sol.state.output_qty(i) = 0.0;
      sol.state.net_trades[i].setZero();
      sol.markups[i].entries =
          Vec::Zero(static_cast<Index>(economy.traded(i).size()));
      continue;
    }
    const PriceImpact impact = lambda_for(regime, economy, slopes, i);
    sol.markups[i] = markup_vector(impact, sol.state.net_trades[i]);
    const double q = sol.state.output_qty(i);
    sol.profits(i) =
        (1.0 / slopes(i) - 0.5 * economy.inv_capacity(i)) * q * q;
  }
  sol.total_welfare = welfare(economy, sol.state);
  return sol;
}

Mat potential_hessian(const Economy& economy, const SlopeProfile& slopes) {
  const Index n = economy.n_firms();
  if (slopes.size() != n)
    throw DimensionMismatch("slope profile length != number of firms");
  if ((slopes.array() <= 0.0).any())
    throw InvalidArgument("potential Hessian needs all slopes positive");

  const ClearingSystem sys = assemble_system(economy, slopes);
  detail::SymSolver solver(sys.m, "potential Hessian");
  Mat v(economy.n_goods(), n);
  for (Index i = 0; i < n; ++i) v.col(i) = economy.tech_lifted(i);
  const Mat s = v.transpose() * solver.solve(v);  // s_ij = vhat_i' M^-1 vhat_j

  Mat h(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      h(i, j) = 2.0 * slopes(i) * slopes(j) * s(i, j) * s(i, j);
    }
    const double kappa = economy.inv_capacity(i);
    const double bs = slopes(i) * s(i, i);
    double diag = -2.0 * bs + 2.0 * bs * bs;
    if (kappa > 0.0) {
      const double half = 0.5 * kappa * slopes(i);
      diag -= half / ((1.0 - half) * (1.0 - half));
    }
    h(i, i) = diag;
  }
  return h;
}

}  // namespace sdfe
