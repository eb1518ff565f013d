#include "sdfe/analysis.hpp"

#include <cmath>

namespace sdfe {

MarkupVector markup_vector(const PriceImpact& impact, const Vec& net_trades) {
  if (impact.block.rows() != net_trades.size())
    throw DimensionMismatch("price impact and net trades disagree");
  return MarkupVector{impact.block * net_trades};
}

Vec residual_prices(const Economy& economy, const SlopeProfile& slopes,
                    Index firm, double q_out) {
  Mat s = detail::system_without_firm(economy, slopes, firm);
  Vec rhs = economy.intercept_lifted();
  for (Index j = 0; j < economy.n_firms(); ++j) {
    if (j == firm) continue;
    rhs += slopes(j) * economy.labor_linear(j) * economy.tech_lifted(j);
  }
  rhs -= q_out * economy.tech_lifted(firm);
  detail::SymSolver solver(s, "residual schedule");
  const Vec p = solver.solve(rhs);
  const auto& goods = economy.traded(firm);
  Vec out(goods.size());
  for (size_t j = 0; j < goods.size(); ++j) out(j) = p(goods[j]);
  return out;
}

MarkupVector markup_fd_oracle(const Economy& economy,
                              const SlopeProfile& slopes, Index firm) {
  const PriceQuantityState st = clear(economy, slopes);
  const double q0 = st.output_qty(firm);
  if (q0 == 0.0) throw DegenerateInput("markup oracle needs q_i^out != 0");

  const auto& inputs = economy.inputs(firm);
  const Index d = static_cast<Index>(economy.traded(firm).size());
  const double f_l = economy.labor_linear(firm);
  const double kappa = economy.inv_capacity(firm);
  const double h = 1e-5 * (1.0 + std::abs(q0));

  // Everything is expressed along the technology ray q_i = q v_i, with the
  // residual schedule re-solved at each displaced quantity.
  const auto prices_at = [&](double q) {
    return residual_prices(economy, slopes, firm, q);
  };
  const auto labor_at = [&](double q) { return f_l * q + 0.5 * kappa * q * q; };
  const auto total_cost = [&](double q) {
    const Vec p = prices_at(q);
    double bill = 0.0;
    for (size_t j = 0; j < inputs.size(); ++j)
      bill += p(static_cast<Index>(j) + 1) * inputs[j].coeff * q;
    return bill + labor_at(q);
  };

  MarkupVector mu;
  mu.entries = Vec::Zero(d);
  const Vec p0 = prices_at(q0);
  const double mc = (total_cost(q0 + h) - total_cost(q0 - h)) / (2.0 * h);
  mu.entries(0) = p0(0) - mc;

  for (size_t j = 0; j < inputs.size(); ++j) {
    const double f = inputs[j].coeff;
    if (f == 0.0)
      throw DegenerateInput("markdown oracle undefined for a zero coefficient");
    // Revenue product of input j as a function of the quantity bought
    // x = f q; differentiate in q and divide by f.
    const auto revenue_product = [&](double q) {
      const Vec p = prices_at(q);
      double vp = 0.0;
      for (Index r = 0; r < d; ++r)
        vp += economy.tech(firm).entries(r) * p(r);
      return q * vp + p(static_cast<Index>(j) + 1) * f * q - labor_at(q);
    };
    const double marginal =
        (revenue_product(q0 + h) - revenue_product(q0 - h)) / (2.0 * h * f);
    const double markdown = marginal - p0(static_cast<Index>(j) + 1);
    mu.entries(static_cast<Index>(j) + 1) = -markdown;
  }
  return mu;
}

GoodsNetwork goods_network(const Economy& economy, const SlopeProfile& slopes,
                           std::optional<Index> removed_firm) {
  Mat m;
  if (removed_firm) {
    if (*removed_firm < 0 || *removed_firm >= economy.n_firms())
      throw InvalidArgument("firm index out of range");
    m = detail::system_without_firm(economy, slopes, *removed_firm);
  } else {
    m = assemble_system(economy, slopes).m;
  }
  const Index n = m.rows();
  GoodsNetwork gn;
  gn.removed_firm = removed_firm;
  gn.d = m.diagonal();
  if ((gn.d.array() <= 0.0).any())
    throw SingularSystem("goods network needs every good priced (M_gg > 0)");
  gn.g = Mat::Zero(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c)
      if (r != c) gn.g(r, c) = -m(r, c) / m(r, r);
  return gn;
}

Vec centrality_prices(const GoodsNetwork& gn, const Vec& a_bar) {
  if (a_bar.size() != gn.g.rows())
    throw DimensionMismatch("intercept length does not match goods network");
  const Mat i_minus_g = Mat::Identity(gn.g.rows(), gn.g.cols()) - gn.g;
  Eigen::FullPivLU<Mat> lu(i_minus_g);
  if (!lu.isInvertible()) throw SingularSystem("I - G is singular");
  return lu.solve(gn.d.cwiseInverse().asDiagonal() * a_bar);
}

MarkupVector markup_centrality(const Economy& economy,
                               const SlopeProfile& slopes, Index firm) {
  const GoodsNetwork gn = goods_network(economy, slopes, firm);
  const Mat i_minus_g = Mat::Identity(gn.g.rows(), gn.g.cols()) - gn.g;
  Eigen::FullPivLU<Mat> lu(i_minus_g);
  if (!lu.isInvertible()) throw SingularSystem("I - G_{-i} is singular");
  const Vec z = lu.solve(
      gn.d.cwiseInverse().asDiagonal() * economy.tech_lifted(firm));
  const PriceQuantityState st = clear(economy, slopes);
  const auto& goods = economy.traded(firm);
  Vec mu(goods.size());
  for (size_t j = 0; j < goods.size(); ++j)
    mu(j) = st.output_qty(firm) * z(goods[j]);
  return MarkupVector{mu};
}

double welfare(const Economy& economy, const PriceQuantityState& state) {
  const auto& goods = economy.consumer_goods();
  Vec p_c(goods.size());
  for (size_t j = 0; j < goods.size(); ++j) p_c(j) = state.prices(goods[j]);
  const Vec q_c = economy.demand_intercept() - economy.demand_slope() * p_c;
  const Vec bc_inv_q = Eigen::LDLT<Mat>(economy.demand_slope()).solve(q_c);
  const double gross = economy.demand_intercept().dot(bc_inv_q) -
                       0.5 * q_c.dot(bc_inv_q);
  return gross - state.labor.sum();
}

}  // namespace sdfe
