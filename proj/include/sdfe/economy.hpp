#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sdfe/types.hpp"

namespace sdfe {

// One (good, requirement) pair of a firm's Leontief input list.
struct InputCoeff {
  Index good;
  double coeff;  // f_{ig} >= 0, units of input per unit of output
};

// Technology vector v_i = (1, -f_{ig} ...) in the firm's canonical good
// order: output first, then inputs by ascending good index. Row/column
// meaning of every per-firm block (price impacts, markups, schedules)
// follows this ordering.
struct TechVector {
  std::vector<Index> goods;  // canonical order, goods[0] == out_good
  Vec entries;               // entries[0] == 1, entries[j] == -f_{ig} <= 0
};

// Immutable problem instance. Construct once, share freely across solves.
class Economy {
 public:
  Economy(Index n_goods, std::vector<Index> out_good,
          std::vector<std::vector<InputCoeff>> inputs, Vec labor_linear,
          Vec inv_capacity, std::vector<Index> consumer_goods,
          Vec demand_intercept, Mat demand_slope,
          std::vector<std::string> good_names = {},
          std::vector<std::string> firm_names = {});

  Index n_firms() const { return static_cast<Index>(out_.size()); }
  Index n_goods() const { return m_; }

  Index out_good(Index firm) const { return out_.at(firm); }
  const std::vector<InputCoeff>& inputs(Index firm) const {
    return inputs_.at(firm);
  }
  double labor_linear(Index firm) const { return f_l_(firm); }
  double inv_capacity(Index firm) const { return kappa_(firm); }
  const Vec& inv_capacities() const { return kappa_; }

  const std::vector<Index>& consumer_goods() const { return consumer_goods_; }
  const Vec& demand_intercept() const { return a_; }
  const Mat& demand_slope() const { return b_c_; }
  bool is_consumed(Index good) const { return consumer_pos_[good] >= 0; }

  // Goods traded by the firm in canonical order (output first, inputs
  // ascending); d_i = traded(i).size().
  const std::vector<Index>& traded(Index firm) const {
    return traded_.at(firm);
  }
  const TechVector& tech(Index firm) const { return tech_.at(firm); }
  // v_i lifted to R^m (zeros outside N(i)).
  const Vec& tech_lifted(Index firm) const { return tech_lifted_.at(firm); }

  // B_c lifted to an m x m block (zeros outside consumer goods).
  const Mat& consumer_slope_lifted() const { return b_c_lifted_; }
  // A lifted to R^m.
  const Vec& intercept_lifted() const { return a_lifted_; }

  const std::string& good_name(Index g) const { return good_names_[g]; }
  const std::string& firm_name(Index i) const { return firm_names_[i]; }

  // Producers of a good and firms trading it (either side).
  const std::vector<Index>& producers(Index good) const {
    return producers_[good];
  }
  const std::vector<Index>& traders(Index good) const { return traders_[good]; }

 private:
  Index m_;
  std::vector<Index> out_;
  std::vector<std::vector<InputCoeff>> inputs_;
  Vec f_l_;
  Vec kappa_;
  std::vector<Index> consumer_goods_;
  Vec a_;
  Mat b_c_;
  std::vector<std::string> good_names_;
  std::vector<std::string> firm_names_;

  std::vector<std::vector<Index>> traded_;
  std::vector<TechVector> tech_;
  std::vector<Vec> tech_lifted_;
  Mat b_c_lifted_;
  Vec a_lifted_;
  std::vector<int> consumer_pos_;
  std::vector<std::vector<Index>> producers_;
  std::vector<std::vector<Index>> traders_;
};

struct ValidationReport {
  bool viable = false;
  bool connected = false;
  std::vector<Index> thin_goods;  // traded by < 3 agents (consumer counts once)
  std::optional<Vec> witness_price;

  bool ok() const { return viable && connected; }
};

// Decides viability (a strictly positive price vector making every firm's
// output price exceed its input bill) via an exact LP feasibility test,
// connectivity by reachability to a consumed good along input->output steps,
// and reports thin markets as warnings.
ValidationReport validate(const Economy& economy);

// Tech vector of one firm; throws InvalidArgument on a bad index.
TechVector tech_vector(const Economy& economy, Index firm);

// Strict feasibility of {p >= 0 : G p >= 1} for a dense G, by a phase-1
// simplex with Bland's rule. Returns a feasible point if one exists.
// Exposed for tests; validate() is the intended entry point.
std::optional<Vec> strict_feasible_point(const Mat& g);

}  // namespace sdfe
