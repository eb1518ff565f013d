#include "sdfe/substitutes.hpp"

#include <cmath>

#include "sdfe/clearing.hpp"

namespace sdfe {

namespace {

void check_spd(const Mat& m, const char* what) {
  if (m.rows() != m.cols() || !m.isApprox(m.transpose(), 1e-10))
    throw NotPositiveDefinite(std::string(what) + ": not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw NotPositiveDefinite(std::string(what) + ": not positive definite");
}

Mat spd_inverse(const Mat& m, const char* what) {
  check_spd(m, what);
  return Eigen::LDLT<Mat>(m).solve(Mat::Identity(m.rows(), m.cols()));
}

// Lift all blocks and the consumer slope into the m x m clearing matrix,
// optionally skipping one firm.
Mat clearing_matrix(const SubstitutesEconomy& economy,
                    const BlockProfile& profile, Index skip) {
  Mat m = economy.base.consumer_slope_lifted();
  for (Index j = 0; j < economy.base.n_firms(); ++j) {
    if (j == skip) continue;
    const auto& goods = economy.base.traded(j);
    const Mat& b = profile.blocks[j].block;
    for (size_t r = 0; r < goods.size(); ++r)
      for (size_t c = 0; c < goods.size(); ++c)
        m(goods[r], goods[c]) += b(r, c);
  }
  return m;
}

double min_eigenvalue(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
  return es.eigenvalues().minCoeff();
}

}  // namespace

SubstitutesEconomy make_substitutes_economy(Economy base,
                                            std::vector<SubstitutesTech> tech) {
  if (static_cast<Index>(tech.size()) != base.n_firms())
    throw InvalidArgument("one SubstitutesTech per firm required");
  for (Index i = 0; i < base.n_firms(); ++i) {
    const Index d_in = static_cast<Index>(base.inputs(i).size());
    const auto& t = tech[i];
    if (t.sigma.rows() != d_in || t.sigma.cols() != d_in ||
        t.omega.size() != d_in)
      throw InvalidArgument("SubstitutesTech dimensions disagree with inputs");
    if (!(t.alpha > 0.0)) throw InvalidArgument("alpha must be positive");
    if ((t.omega.array() < 0.0).any())
      throw InvalidArgument("omega must be nonnegative");
    if (d_in > 0) {
      check_spd(t.sigma, "Sigma");
      for (Index r = 0; r < d_in; ++r) {
        double off = 0.0;
        for (Index c = 0; c < d_in; ++c)
          if (c != r) off += std::abs(t.sigma(r, c));
        if (t.sigma(r, r) <= off)
          throw InvalidArgument("Sigma must be strictly diagonally dominant");
      }
    }
  }
  return SubstitutesEconomy{std::move(base), std::move(tech)};
}

CoefficientBlock cost_matrix(const SubstitutesTech& tech) {
  const Index d_in = tech.omega.size();
  const double a2 = tech.alpha * tech.alpha;
  Mat inv_c(d_in + 1, d_in + 1);
  inv_c(0, 0) = 1.0 / a2;
  if (d_in > 0) {
    inv_c.block(0, 1, 1, d_in) = tech.omega.transpose() / a2;
    inv_c.block(1, 0, d_in, 1) = tech.omega / a2;
    inv_c.block(1, 1, d_in, d_in) =
        2.0 * tech.sigma + tech.omega * tech.omega.transpose() / a2;
  }
  return CoefficientBlock{spd_inverse(inv_c, "cost matrix")};
}

CoefficientBlock best_reply_block(const CoefficientBlock& cost,
                                  const Mat& impact) {
  const Mat inv_c = spd_inverse(cost.block, "cost block");
  Mat sum = inv_c + impact;
  return CoefficientBlock{spd_inverse(sum, "C^-1 + Lambda")};
}

Vec substitutes_prices(const SubstitutesEconomy& economy,
                       const BlockProfile& profile) {
  const Mat m = clearing_matrix(economy, profile, -1);
  detail::SymSolver solver(m, "substitutes clearing");
  return solver.solve(economy.base.intercept_lifted());
}

Mat substitutes_impact(const SubstitutesEconomy& economy,
                       const BlockProfile& profile, Index firm) {
  const Mat s = clearing_matrix(economy, profile, firm);
  return detail::inverse_submatrix(s, economy.base.traded(firm),
                                   "substitutes impact");
}

std::vector<Vec> substitutes_markups(const SubstitutesEconomy& economy,
                                     const BlockProfile& profile) {
  const Vec p = substitutes_prices(economy, profile);
  std::vector<Vec> mu(economy.base.n_firms());
  for (Index i = 0; i < economy.base.n_firms(); ++i) {
    const auto& goods = economy.base.traded(i);
    Vec p_i(goods.size());
    for (size_t j = 0; j < goods.size(); ++j) p_i(j) = p(goods[j]);
    const Vec q_i = profile.blocks[i].block * p_i;
    mu[i] = substitutes_impact(economy, profile, i) * q_i;
  }
  return mu;
}

SubstitutesSolution solve_substitutes(const SubstitutesEconomy& economy,
                                      const SubstitutesSolveOptions& opts) {
  const Index n = economy.base.n_firms();
  std::vector<CoefficientBlock> walras(n);
  for (Index i = 0; i < n; ++i) walras[i] = cost_matrix(economy.tech[i]);

  SubstitutesSolution sol;
  const auto sweep = [&](const BlockProfile& profile) {
    BlockProfile next;
    next.blocks.resize(n);
    for (Index i = 0; i < n; ++i) {
      Mat impact;
      if (opts.freeze_lambda_zero) {
        const Index d = walras[i].block.rows();
        impact = Mat::Zero(d, d);
      } else {
        impact = substitutes_impact(economy, profile, i);
      }
      next.blocks[i] = best_reply_block(walras[i], impact);
    }
    return next;
  };
  const auto track = [&](double eig) {
    sol.worst_bracket_eigenvalue =
        std::min(sol.worst_bracket_eigenvalue, eig);
  };

  BlockProfile upper;
  upper.blocks = walras;
  BlockProfile lower;
  lower.blocks.resize(n);
  for (Index i = 0; i < n; ++i) {
    const Index d = walras[i].block.rows();
    lower.blocks[i] = CoefficientBlock{Mat::Zero(d, d)};
  }

  bool upper_done = false, lower_done = false;
  for (int it = 1; it <= opts.max_iter; ++it) {
    double step = 0.0;
    if (!upper_done) {
      const BlockProfile next = sweep(upper);
      for (Index i = 0; i < n; ++i) {
        // Iterates from above must decrease in the p.s.d. order.
        track(min_eigenvalue(upper.blocks[i].block - next.blocks[i].block));
        step = std::max(step, (next.blocks[i].block - upper.blocks[i].block)
                                  .cwiseAbs()
                                  .maxCoeff());
      }
      upper.blocks = next.blocks;
      if (step < opts.tol) {
        upper_done = true;
        sol.iterations_down = it;
      }
    }
    double step_lo = 0.0;
    if (!lower_done) {
      const BlockProfile next = sweep(lower);
      for (Index i = 0; i < n; ++i) {
        // ... and from below must increase, staying under the upper iterate.
        track(min_eigenvalue(next.blocks[i].block - lower.blocks[i].block));
        track(min_eigenvalue(upper.blocks[i].block - next.blocks[i].block));
        step_lo = std::max(step_lo,
                           (next.blocks[i].block - lower.blocks[i].block)
                               .cwiseAbs()
                               .maxCoeff());
      }
      lower.blocks = next.blocks;
      if (step_lo < opts.tol) {
        lower_done = true;
        sol.iterations_up = it;
      }
    }
    if (upper_done && lower_done) {
      sol.maximal = upper;
      sol.minimal = lower;
      return sol;
    }
  }
  throw NotConverged("substitutes iteration hit max_iter");
}

}  // namespace sdfe
