#include "sdfe/economy.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace sdfe {

Economy::Economy(Index n_goods, std::vector<Index> out_good,
                 std::vector<std::vector<InputCoeff>> inputs, Vec labor_linear,
                 Vec inv_capacity, std::vector<Index> consumer_goods,
                 Vec demand_intercept, Mat demand_slope,
                 std::vector<std::string> good_names,
                 std::vector<std::string> firm_names)
    : m_(n_goods),
      out_(std::move(out_good)),
      inputs_(std::move(inputs)),
      f_l_(std::move(labor_linear)),
      kappa_(std::move(inv_capacity)),
      consumer_goods_(std::move(consumer_goods)),
      a_(std::move(demand_intercept)),
      b_c_(std::move(demand_slope)),
      good_names_(std::move(good_names)),
      firm_names_(std::move(firm_names)) {
  const Index n = static_cast<Index>(out_.size());
  if (m_ <= 0 || n <= 0) throw InvalidArgument("economy needs goods and firms");
  if (static_cast<Index>(inputs_.size()) != n || f_l_.size() != n ||
      kappa_.size() != n)
    throw InvalidArgument("per-firm field lengths disagree");

  for (Index i = 0; i < n; ++i) {
    if (out_[i] < 0 || out_[i] >= m_) throw InvalidArgument("bad output good");
    if (f_l_(i) < 0.0) throw InvalidArgument("f_L must be nonnegative");
    if (kappa_(i) < 0.0) throw InvalidArgument("kappa must be nonnegative");
    std::sort(inputs_[i].begin(), inputs_[i].end(),
              [](const InputCoeff& a, const InputCoeff& b) {
                return a.good < b.good;
              });
    for (size_t j = 0; j < inputs_[i].size(); ++j) {
      const auto& in = inputs_[i][j];
      if (in.good < 0 || in.good >= m_) throw InvalidArgument("bad input good");
      if (in.good == out_[i])
        throw InvalidArgument("firm cannot use its own output as input");
      if (in.coeff < 0.0) throw InvalidArgument("input coefficients must be >= 0");
      if (j > 0 && inputs_[i][j - 1].good == in.good)
        throw InvalidArgument("duplicate input good");
    }
  }

  const Index nc = static_cast<Index>(consumer_goods_.size());
  if (nc == 0) throw InvalidArgument("consumer must demand at least one good");
  if (a_.size() != nc || b_c_.rows() != nc || b_c_.cols() != nc)
    throw InvalidArgument("consumer block dimensions disagree");
  {
    std::set<Index> seen;
    for (Index g : consumer_goods_) {
      if (g < 0 || g >= m_) throw InvalidArgument("bad consumer good");
      if (!seen.insert(g).second)
        throw InvalidArgument("duplicate consumer good");
    }
  }
  if ((a_.array() <= 0.0).any())
    throw InvalidArgument("demand intercept A must be strictly positive");
  if (!b_c_.isApprox(b_c_.transpose(), 1e-12))
    throw InvalidArgument("B_c must be symmetric");
  {
    Eigen::SelfAdjointEigenSolver<Mat> es(b_c_);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw InvalidArgument("B_c must be positive definite");
  }

  if (good_names_.empty()) {
    good_names_.resize(m_);
    for (Index g = 0; g < m_; ++g) good_names_[g] = "g" + std::to_string(g);
  }
  if (firm_names_.empty()) {
    firm_names_.resize(n);
    for (Index i = 0; i < n; ++i) firm_names_[i] = "f" + std::to_string(i);
  }
  if (static_cast<Index>(good_names_.size()) != m_ ||
      static_cast<Index>(firm_names_.size()) != n)
    throw InvalidArgument("name lists have wrong length");

  consumer_pos_.assign(m_, -1);
  for (Index c = 0; c < nc; ++c) consumer_pos_[consumer_goods_[c]] = static_cast<int>(c);
  b_c_lifted_ = Mat::Zero(m_, m_);
  a_lifted_ = Vec::Zero(m_);
  for (Index r = 0; r < nc; ++r) {
    a_lifted_(consumer_goods_[r]) = a_(r);
    for (Index c = 0; c < nc; ++c)
      b_c_lifted_(consumer_goods_[r], consumer_goods_[c]) = b_c_(r, c);
  }

  traded_.resize(n);
  tech_.resize(n);
  tech_lifted_.resize(n);
  producers_.assign(m_, {});
  traders_.assign(m_, {});
  for (Index i = 0; i < n; ++i) {
    auto& goods = traded_[i];
    goods.push_back(out_[i]);
    for (const auto& in : inputs_[i]) goods.push_back(in.good);
    const Index d = static_cast<Index>(goods.size());
    Vec v(d);
    v(0) = 1.0;
    for (Index j = 1; j < d; ++j) v(j) = -inputs_[i][j - 1].coeff;
    tech_[i] = TechVector{goods, v};
    Vec lifted = Vec::Zero(m_);
    for (Index j = 0; j < d; ++j) lifted(goods[j]) = v(j);
    tech_lifted_[i] = lifted;
    producers_[out_[i]].push_back(i);
    for (Index g : goods) traders_[g].push_back(i);
  }
}

TechVector tech_vector(const Economy& economy, Index firm) {
  if (firm < 0 || firm >= economy.n_firms())
    throw InvalidArgument("firm index out of range");
  return economy.tech(firm);
}

namespace {

// Phase-1 simplex on: min sum(artificials) s.t. G p - s = 1, p, s, a >= 0.
// Dense tableau, Bland's rule (deterministic, no cycling). Sizes here are
// tiny (rows = firms), so no effort is spent on sparsity.
class Phase1Simplex {
 public:
  explicit Phase1Simplex(const Mat& g)
      : rows_(g.rows()), p_vars_(g.cols()) {
    const Index cols = p_vars_ + rows_ + rows_;  // p, slack, artificial
    t_ = Mat::Zero(rows_ + 1, cols + 1);
    for (Index r = 0; r < rows_; ++r) {
      t_.block(r, 0, 1, p_vars_) = g.row(r);
      t_(r, p_vars_ + r) = -1.0;            // surplus
      t_(r, p_vars_ + rows_ + r) = 1.0;     // artificial
      t_(r, cols) = 1.0;                    // rhs
    }
    basis_.resize(rows_);
    for (Index r = 0; r < rows_; ++r) basis_[r] = p_vars_ + rows_ + r;
    // objective row: minimize sum of artificials, expressed in reduced form
    for (Index r = 0; r < rows_; ++r)
      t_.row(rows_) -= t_.row(r);
    for (Index r = 0; r < rows_; ++r)
      t_(rows_, p_vars_ + rows_ + r) = 0.0;
  }

  std::optional<Vec> solve() {
    const Index cols = t_.cols() - 1;
    const double eps = 1e-11;
    for (int iter = 0; iter < 20000; ++iter) {
      Index pivot_col = -1;
      for (Index c = 0; c < cols; ++c) {
        if (t_(rows_, c) < -eps) {
          pivot_col = c;  // Bland: first improving column
          break;
        }
      }
      if (pivot_col < 0) break;
      Index pivot_row = -1;
      double best_ratio = 0.0;
      for (Index r = 0; r < rows_; ++r) {
        if (t_(r, pivot_col) > eps) {
          const double ratio = t_(r, cols) / t_(r, pivot_col);
          if (pivot_row < 0 || ratio < best_ratio - eps ||
              (ratio < best_ratio + eps && basis_[r] < basis_[pivot_row])) {
            pivot_row = r;
            best_ratio = ratio;
          }
        }
      }
      if (pivot_row < 0) return std::nullopt;  // unbounded: cannot happen here
      pivot(pivot_row, pivot_col);
    }
    if (t_(rows_, t_.cols() - 1) < -1e-8) return std::nullopt;  // infeasible
    Vec p = Vec::Zero(p_vars_);
    for (Index r = 0; r < rows_; ++r)
      if (basis_[r] < p_vars_) p(basis_[r]) = t_(r, t_.cols() - 1);
    return p;
  }

 private:
  void pivot(Index r, Index c) {
    t_.row(r) /= t_(r, c);
    for (Index i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const double factor = t_(i, c);
      if (factor != 0.0) t_.row(i) -= factor * t_.row(r);
    }
    basis_[r] = c;
  }

  Index rows_;
  Index p_vars_;
  Mat t_;
  std::vector<Index> basis_;
};

}  // namespace

std::optional<Vec> strict_feasible_point(const Mat& g) {
  Phase1Simplex lp(g);
  return lp.solve();
}

ValidationReport validate(const Economy& economy) {
  ValidationReport report;
  const Index n = economy.n_firms();
  const Index m = economy.n_goods();

  // Viability: exists p > 0 with p_out(i) > sum_h f_ih p_h for all i.
  // The system is homogeneous, so it is equivalent to {p >= 0 : G p >= 1}
  // being nonempty, where row i of G is the lifted tech vector of firm i.
  Mat g(n, m);
  for (Index i = 0; i < n; ++i) g.row(i) = economy.tech_lifted(i).transpose();
  if (auto p = strict_feasible_point(g)) {
    // Perturb towards strict positivity while keeping every margin positive.
    Vec witness = *p;
    const Vec margins = g * witness;  // >= 1 up to simplex tolerance
    double worst_drop = 0.0;
    for (Index i = 0; i < n; ++i)
      worst_drop = std::max(worst_drop, -(g.row(i).sum()));
    double delta = 0.5;
    if (worst_drop > 0.0) delta = std::min(delta, 0.5 / worst_drop);
    witness.array() += delta;
    if ((g * witness).minCoeff() > 0.0 && witness.minCoeff() > 0.0) {
      report.viable = true;
      report.witness_price = witness;
    }
  }

  // Connectivity: every good reaches a consumed good along input->output
  // steps. BFS backwards from the consumed goods over reversed edges.
  std::vector<char> reaches(m, 0);
  std::deque<Index> queue;
  for (Index c : economy.consumer_goods()) {
    reaches[c] = 1;
    queue.push_back(c);
  }
  while (!queue.empty()) {
    const Index good = queue.front();
    queue.pop_front();
    for (Index i : economy.producers(good)) {
      for (const auto& in : economy.inputs(i)) {
        if (!reaches[in.good]) {
          reaches[in.good] = 1;
          queue.push_back(in.good);
        }
      }
    }
  }
  report.connected =
      std::all_of(reaches.begin(), reaches.end(), [](char r) { return r != 0; });

  // Thin markets: warn, do not reject.
  for (Index good = 0; good < m; ++good) {
    Index count = static_cast<Index>(economy.traders(good).size());
    if (economy.is_consumed(good)) ++count;
    if (count < 3) report.thin_goods.push_back(good);
  }
  return report;
}

}  // namespace sdfe
