#include "sdfe/clearing.hpp"

#include <cmath>

namespace sdfe {

namespace detail {

SymSolver::SymSolver(const Mat& m, const char* what) : ldlt_(m) {
  if (ldlt_.info() != Eigen::Success)
    throw SingularSystem(std::string(what) + ": factorization failed");
  const Vec d = ldlt_.vectorD();
  const double dmax = d.cwiseAbs().maxCoeff();
  const double dmin = d.minCoeff();
  // Clearing systems are positive definite on valid inputs; a nonpositive
  // pivot or a pivot ratio beyond 1e12 counts as numerically singular.
  if (!(dmin > 0.0) || dmax / dmin > 1e12)
    throw SingularSystem(std::string(what) +
                         ": system numerically singular (condition estimate "
                         "above 1e12)");
}

Vec SymSolver::solve(const Vec& rhs) const { return ldlt_.solve(rhs); }
Mat SymSolver::solve(const Mat& rhs) const { return ldlt_.solve(rhs); }

Mat system_without_firm(const Economy& economy, const SlopeProfile& slopes,
                        Index firm) {
  const Index m = economy.n_goods();
  Mat s = economy.consumer_slope_lifted();
  for (Index j = 0; j < economy.n_firms(); ++j) {
    if (j == firm || slopes(j) == 0.0) continue;
    const auto& goods = economy.traded(j);
    const Vec& v = economy.tech(j).entries;
    for (size_t r = 0; r < goods.size(); ++r)
      for (size_t c = 0; c < goods.size(); ++c)
        s(goods[r], goods[c]) += slopes(j) * v(r) * v(c);
  }
  (void)m;
  return s;
}

Mat inverse_submatrix(const Mat& s, const std::vector<Index>& goods,
                      const char* what) {
  SymSolver solver(s, what);
  Mat rhs = Mat::Zero(s.rows(), static_cast<Index>(goods.size()));
  for (size_t j = 0; j < goods.size(); ++j) rhs(goods[j], j) = 1.0;
  const Mat cols = solver.solve(rhs);
  Mat sub(goods.size(), goods.size());
  for (size_t r = 0; r < goods.size(); ++r)
    for (size_t c = 0; c < goods.size(); ++c) sub(r, c) = cols(goods[r], c);
  return 0.5 * (sub + sub.transpose());
}

}  // namespace detail

ClearingSystem assemble_system(const Economy& economy,
                               const SlopeProfile& slopes) {
  if (slopes.size() != economy.n_firms())
    throw DimensionMismatch("slope profile length != number of firms");
  if ((slopes.array() < 0.0).any())
    throw InvalidArgument("slopes must be nonnegative");
  ClearingSystem sys;
  sys.m = economy.consumer_slope_lifted();
  sys.a_bar = economy.intercept_lifted();
  for (Index j = 0; j < economy.n_firms(); ++j) {
    if (slopes(j) == 0.0) continue;
    const auto& goods = economy.traded(j);
    const Vec& v = economy.tech(j).entries;
    for (size_t r = 0; r < goods.size(); ++r) {
      sys.a_bar(goods[r]) += slopes(j) * economy.labor_linear(j) * v(r);
      for (size_t c = 0; c < goods.size(); ++c)
        sys.m(goods[r], goods[c]) += slopes(j) * v(r) * v(c);
    }
  }
  return sys;
}

PriceQuantityState clear(const Economy& economy, const SlopeProfile& slopes) {
  const ClearingSystem sys = assemble_system(economy, slopes);
  detail::SymSolver solver(sys.m, "clear");
  PriceQuantityState st;
  st.prices = solver.solve(sys.a_bar);

  const Index n = economy.n_firms();
  st.output_qty = Vec(n);
  st.labor = Vec(n);
  st.net_trades.resize(n);
  for (Index i = 0; i < n; ++i) {
    const auto& goods = economy.traded(i);
    const Vec& v = economy.tech(i).entries;
    double vp = 0.0;
    for (size_t j = 0; j < goods.size(); ++j) vp += v(j) * st.prices(goods[j]);
    const double q = slopes(i) * (vp - economy.labor_linear(i));
    st.output_qty(i) = q;
    st.net_trades[i] = q * v;
    st.labor(i) = economy.labor_linear(i) * q +
                  0.5 * economy.inv_capacity(i) * q * q;
    if (q < 0.0) st.negative_outputs.push_back(i);
  }
  for (Index g = 0; g < economy.n_goods(); ++g)
    if (st.prices(g) < 0.0) st.negative_prices.push_back(g);
  return st;
}

PriceImpact price_impact_multilateral(const Economy& economy,
                                      const SlopeProfile& slopes, Index firm) {
  if (firm < 0 || firm >= economy.n_firms())
    throw InvalidArgument("firm index out of range");
  const Mat s = detail::system_without_firm(economy, slopes, firm);
  return PriceImpact{
      detail::inverse_submatrix(s, economy.traded(firm), "price impact")};
}

double aggregate_impact(const PriceImpact& impact, const TechVector& v) {
  if (impact.block.rows() != v.entries.size())
    throw DimensionMismatch("price impact and tech vector disagree");
  return v.entries.dot(impact.block * v.entries);
}

double clearing_residual(const Economy& economy, const SlopeProfile& slopes,
                         const PriceQuantityState& state) {
  Vec residual = Vec::Zero(economy.n_goods());
  for (Index i = 0; i < economy.n_firms(); ++i) {
    const auto& goods = economy.traded(i);
    for (size_t j = 0; j < goods.size(); ++j)
      residual(goods[j]) += state.net_trades[i](static_cast<Index>(j));
  }
  (void)slopes;
  const Vec demand = economy.intercept_lifted() -
                     economy.consumer_slope_lifted() * state.prices;
  for (Index g = 0; g < economy.n_goods(); ++g)
    residual(g) -= economy.is_consumed(g) ? demand(g) : 0.0;
  return residual.cwiseAbs().maxCoeff();
}

}  // namespace sdfe
