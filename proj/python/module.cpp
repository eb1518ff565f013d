#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sdfe/io.hpp"
#include "sdfe/scenarios.hpp"

namespace py = pybind11;
using namespace sdfe;

namespace {

Economy economy_from_json(const std::string& text) {
  return load_economy_json(text).economy;
}

py::dict validate_py(const Economy& economy) {
  const ValidationReport report = validate(economy);
  py::dict d;
  d["viable"] = report.viable;
  d["connected"] = report.connected;
  d["thin_goods"] = report.thin_goods;
  if (report.witness_price) d["witness_price"] = *report.witness_price;
  return d;
}

py::dict solve_py(const Economy& economy, const std::string& regime_name_str,
                  double tol, int max_iter, double damping) {
  Regime regime{regime_from_name(regime_name_str), {}};
  SolveOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  opts.damping = damping;
  auto [slopes, diag] = solve(economy, regime, opts);
  const EquilibriumSolution sol = solution(economy, slopes, regime);
  py::dict d;
  d["slopes"] = slopes;
  d["prices"] = sol.state.prices;
  d["quantities"] = sol.state.output_qty;
  d["labor"] = sol.state.labor;
  d["profits"] = sol.profits;
  d["welfare"] = sol.total_welfare;
  py::list markups;
  for (const auto& mu : sol.markups) markups.append(mu.entries);
  d["markups"] = markups;
  d["bracket_gap"] = diag.bracket_gap;
  d["unique_certified"] = diag.unique_certified;
  d["iterations"] =
      py::make_tuple(diag.iterations_upper, diag.iterations_lower);
  return d;
}

py::dict solve_chain_py(int layers, std::vector<int> firms, double k,
                        double b_c, double a,
                        const std::string& regime_name_str) {
  ChainSpec spec;
  spec.n_layers = layers;
  spec.firms_per_layer = firms.size() == 1
                             ? std::vector<int>(layers, firms[0])
                             : std::move(firms);
  spec.inv_capacity = Vec::Constant(layers, k > 0.0 ? 1.0 / k : 0.0);
  spec.consumer_slope = b_c;
  spec.consumer_intercept = a;
  ChainRegime regime;
  if (regime_name_str == "multilateral")
    regime = ChainRegime::Multilateral;
  else if (regime_name_str == "unilateral-inputs")
    regime = ChainRegime::UnilateralInputs;
  else if (regime_name_str == "unilateral-outputs")
    regime = ChainRegime::UnilateralOutputs;
  else if (regime_name_str == "sequential-cournot")
    regime = ChainRegime::SequentialCournot;
  else
    throw InvalidArgument("unknown chain regime: " + regime_name_str);
  const ChainSolution sol = solve_chain(spec, regime);
  py::dict d;
  d["slopes"] = sol.slopes;
  d["prices"] = sol.prices;
  d["quantity"] = sol.quantity;
  d["markup_out"] = sol.markup_out;
  d["markdown_in"] = sol.markdown_in;
  d["profit"] = sol.profit;
  d["welfare"] = sol.total_welfare;
  return d;
}

py::dict compare_regimes_py(const Economy& economy) {
  const RegimeComparison cmp = compare_regimes(economy);
  py::dict d;
  for (const auto& entry : cmp.entries) {
    py::dict e;
    e["slopes"] = entry.slopes;
    e["prices"] = entry.prices;
    e["profits"] = entry.profits;
    e["welfare"] = entry.total_welfare;
    if (cmp.has_single_consumed_good) e["final_price"] = entry.final_price;
    d[regime_name(entry.kind)] = e;
  }
  d["slopes_dominate"] = cmp.slopes_dominate;
  if (cmp.has_single_consumed_good)
    d["final_price_ordered"] = cmp.final_price_ordered;
  return d;
}

py::dict merger_study_py(int n1_max, double k, double b_c, double a) {
  const MergerStudy study = merger_study(n1_max, k, b_c, a);
  py::dict d;
  d["n_star_unilateral"] = study.n_star_unilateral;
  d["n_star_multilateral"] = study.n_star_multilateral;
  d["post_merger_slope"] = study.post_merger_slope;
  py::list regimes;
  for (const auto& r : study.regimes) {
    py::dict e;
    e["name"] = r.name;
    if (r.price_threshold_found) e["price_threshold"] = r.price_threshold;
    if (r.welfare_threshold_found)
      e["welfare_threshold"] = r.welfare_threshold;
    py::list rows;
    for (const auto& row : r.rows) {
      py::dict rd;
      rd["n1"] = row.n1;
      rd["pre_quantity"] = row.pre_quantity;
      rd["post_quantity"] = row.post_quantity;
      rd["pre_welfare"] = row.pre_welfare;
      rd["post_welfare"] = row.post_welfare;
      rd["pre_consumer_surplus"] = row.pre_consumer_surplus;
      rd["post_consumer_surplus"] = row.post_consumer_surplus;
      rows.append(rd);
    }
    e["rows"] = rows;
    regimes.append(e);
  }
  d["regimes"] = regimes;
  return d;
}

py::list depth_sweep_py(int n_max, double k, double b_c, double a) {
  py::list rows;
  for (const DepthRow& row : depth_sweep(n_max, k, b_c, a)) {
    py::dict d;
    d["N"] = row.depth;
    d["Q_multi"] = row.q_multilateral;
    d["Q_local"] = row.q_local;
    d["W_multi"] = row.w_multilateral;
    d["W_local"] = row.w_local;
    d["Q_ratio"] = row.q_ratio;
    d["W_ratio"] = row.w_ratio;
    rows.append(d);
  }
  return rows;
}

py::dict solve_substitutes_py(const std::string& json_text) {
  const LoadedEconomy loaded = load_economy_json(json_text);
  if (!loaded.substitutes)
    throw InvalidArgument("not a substitutes economy spec");
  const SubstitutesSolution sol = solve_substitutes(*loaded.substitutes);
  py::dict d;
  py::list minimal, maximal;
  for (const auto& b : sol.minimal.blocks) minimal.append(b.block);
  for (const auto& b : sol.maximal.blocks) maximal.append(b.block);
  d["minimal"] = minimal;
  d["maximal"] = maximal;
  d["prices"] = substitutes_prices(*loaded.substitutes, sol.maximal);
  d["worst_bracket_eigenvalue"] = sol.worst_bracket_eigenvalue;
  return d;
}

}  // namespace

PYBIND11_MODULE(_sdfe, m) {
  m.doc() = "Supply and demand function equilibria on production networks";

  py::register_exception<Error>(m, "SdfeError");

  py::class_<Economy>(m, "Economy")
      .def_property_readonly("n_firms", &Economy::n_firms)
      .def_property_readonly("n_goods", &Economy::n_goods)
      .def("good_name", &Economy::good_name)
      .def("firm_name", &Economy::firm_name)
      .def("to_json", &economy_to_json);

  m.def("economy_from_json", &economy_from_json, py::arg("text"),
        "Parse an economy spec from a JSON string");
  m.def("validate", &validate_py, py::arg("economy"));
  m.def("solve", &solve_py, py::arg("economy"),
        py::arg("regime") = "multilateral", py::arg("tol") = 1e-12,
        py::arg("max_iter") = 10000, py::arg("damping") = 1.0);
  m.def("solve_chain", &solve_chain_py, py::arg("layers"), py::arg("firms"),
        py::arg("k") = 1.0, py::arg("b_c") = 1.0, py::arg("a") = 1.0,
        py::arg("regime") = "multilateral");
  m.def("compare_regimes", &compare_regimes_py, py::arg("economy"));
  m.def("merger_study", &merger_study_py, py::arg("n1_max") = 20,
        py::arg("k") = 1.0, py::arg("b_c") = 1.0, py::arg("a") = 1.0);
  m.def("depth_sweep", &depth_sweep_py, py::arg("n_max") = 30,
        py::arg("k") = 1.0, py::arg("b_c") = 1.0, py::arg("a") = 1.0);
  m.def("solve_substitutes", &solve_substitutes_py, py::arg("json_text"));
}
