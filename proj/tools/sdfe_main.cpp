// sdfe: compute supply/demand function equilibria of production networks
// and run the comparative experiments (regime comparison, vertical merger,
// depth sweep, surplus profiles).
//
// Exit codes: 0 ok, 1 validation failure, 2 parse/usage error,
// 3 not converged, 4 singular system.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sdfe/io.hpp"
#include "sdfe/scenarios.hpp"

namespace {

using namespace sdfe;

int g_precision = 9;

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", g_precision, x);
  return buf;
}

struct Output {
  std::string format = "pretty";  // pretty | csv | json
  std::string path;               // empty = stdout

  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out << text;
  }
};

void add_output_flags(CLI::App* cmd, Output* out) {
  cmd->add_option("--format", out->format, "Output format")
      ->check(CLI::IsMember({"pretty", "csv", "json"}))
      ->capture_default_str();
  cmd->add_option("-o,--output", out->path, "Write to file instead of stdout");
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string row;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) row += ',';
    row += cells[i];
  }
  row += '\n';
  return row;
}

int cmd_validate(const std::string& path) {
  const LoadedEconomy loaded = load_economy_file(path);
  const ValidationReport report = validate(loaded.economy);
  std::ostringstream os;
  os << "viable: " << (report.viable ? "true" : "false") << "\n";
  os << "connected: " << (report.connected ? "true" : "false") << "\n";
  if (report.witness_price) {
    os << "witness_price:";
    for (Index g = 0; g < report.witness_price->size(); ++g)
      os << " " << loaded.economy.good_name(g) << "="
         << num((*report.witness_price)(g));
    os << "\n";
  }
  if (!report.thin_goods.empty()) {
    os << "thin_goods (fewer than 3 traders):";
    for (Index g : report.thin_goods) os << " " << loaded.economy.good_name(g);
    os << "\n";
  }
  std::cout << os.str();
  if (!report.ok()) {
    std::cout << (report.viable ? "" : "viability failed\n")
              << (report.connected ? "" : "connectivity failed\n");
    return 1;
  }
  return 0;
}

std::string solution_text(const Economy& economy, const Regime& regime,
                          const SlopeProfile& slopes,
                          const SolveDiagnostics& diag, const Output& out) {
  const EquilibriumSolution sol = solution(economy, slopes, regime);
  std::ostringstream os;
  if (out.format == "csv") {
    os << csv_row({"record", "name", "good", "value"});
    for (Index i = 0; i < economy.n_firms(); ++i)
      os << csv_row({"slope", economy.firm_name(i), "", num(slopes(i))});
    for (Index g = 0; g < economy.n_goods(); ++g)
      os << csv_row({"price", "", economy.good_name(g),
                     num(sol.state.prices(g))});
    for (Index i = 0; i < economy.n_firms(); ++i) {
      os << csv_row({"quantity", economy.firm_name(i), "",
                     num(sol.state.output_qty(i))});
      const auto& goods = economy.traded(i);
      for (size_t j = 0; j < goods.size(); ++j)
        os << csv_row({"markup", economy.firm_name(i),
                       economy.good_name(goods[j]),
                       num(sol.markups[i].entries(static_cast<Index>(j)))});
      os << csv_row({"profit", economy.firm_name(i), "", num(sol.profits(i))});
    }
    os << csv_row({"welfare", "", "", num(sol.total_welfare)});
    return os.str();
  }
  if (out.format == "json") {
    os << "{\n  \"regime\": \"" << regime_name(regime.kind) << "\",\n";
    os << "  \"slopes\": {";
    for (Index i = 0; i < economy.n_firms(); ++i)
      os << (i ? ", " : "") << '"' << economy.firm_name(i)
         << "\": " << num(slopes(i));
    os << "},\n  \"prices\": {";
    for (Index g = 0; g < economy.n_goods(); ++g)
      os << (g ? ", " : "") << '"' << economy.good_name(g)
         << "\": " << num(sol.state.prices(g));
    os << "},\n  \"quantities\": {";
    for (Index i = 0; i < economy.n_firms(); ++i)
      os << (i ? ", " : "") << '"' << economy.firm_name(i)
         << "\": " << num(sol.state.output_qty(i));
    os << "},\n  \"profits\": {";
    for (Index i = 0; i < economy.n_firms(); ++i)
      os << (i ? ", " : "") << '"' << economy.firm_name(i)
         << "\": " << num(sol.profits(i));
    os << "},\n  \"welfare\": " << num(sol.total_welfare) << ",\n";
    os << "  \"bracket_gap\": " << num(diag.bracket_gap) << ",\n";
    os << "  \"unique_certified\": "
       << (diag.unique_certified ? "true" : "false") << "\n}\n";
    return os.str();
  }
  os << "regime: " << regime_name(regime.kind) << "\n";
  os << "slopes:\n";
  for (Index i = 0; i < economy.n_firms(); ++i)
    os << "  " << economy.firm_name(i) << ": " << num(slopes(i)) << "\n";
  os << "prices:\n";
  for (Index g = 0; g < economy.n_goods(); ++g)
    os << "  " << economy.good_name(g) << ": " << num(sol.state.prices(g))
       << "\n";
  os << "quantities and profits:\n";
  for (Index i = 0; i < economy.n_firms(); ++i) {
    os << "  " << economy.firm_name(i)
       << ": q=" << num(sol.state.output_qty(i))
       << " labor=" << num(sol.state.labor(i))
       << " profit=" << num(sol.profits(i)) << " markups=[";
    const auto& goods = economy.traded(i);
    for (size_t j = 0; j < goods.size(); ++j)
      os << (j ? ", " : "") << economy.good_name(goods[j]) << "="
         << num(sol.markups[i].entries(static_cast<Index>(j)));
    os << "]\n";
  }
  os << "welfare: " << num(sol.total_welfare) << "\n";
  os << "iterations: upper=" << diag.iterations_upper
     << " lower=" << diag.iterations_lower
     << " bracket_gap=" << num(diag.bracket_gap)
     << " unique_certified=" << (diag.unique_certified ? "true" : "false")
     << "\n";
  if (!sol.state.negative_outputs.empty()) {
    os << "note: negative output quantities (reversed trade) for:";
    for (Index i : sol.state.negative_outputs)
      os << " " << economy.firm_name(i);
    os << "\n";
  }
  if (!sol.state.negative_prices.empty()) {
    os << "note: negative prices for:";
    for (Index g : sol.state.negative_prices)
      os << " " << economy.good_name(g);
    os << "\n";
  }
  return os.str();
}

int cmd_solve(const std::string& path, const std::string& regime_str,
              const SolveOptions& opts, const Output& out) {
  const LoadedEconomy loaded = load_economy_file(path);
  const ValidationReport report = validate(loaded.economy);
  if (!report.ok()) {
    std::cerr << "economy failed validation ("
              << (report.viable ? "connectivity" : "viability") << ")\n";
    return 1;
  }
  const Regime regime{regime_from_name(regime_str), {}};
  auto [slopes, diag] = solve(loaded.economy, regime, opts);
  out.write(solution_text(loaded.economy, regime, slopes, diag, out));
  return 0;
}

int cmd_compare(const std::string& path, const Output& out) {
  const LoadedEconomy loaded = load_economy_file(path);
  const RegimeComparison cmp = compare_regimes(loaded.economy);
  std::ostringstream os;
  if (out.format == "csv") {
    os << csv_row({"regime", "firm", "slope", "profit", "final_price",
                   "welfare"});
    for (const auto& entry : cmp.entries)
      for (Index i = 0; i < loaded.economy.n_firms(); ++i)
        os << csv_row({regime_name(entry.kind),
                       loaded.economy.firm_name(i), num(entry.slopes(i)),
                       num(entry.profits(i)), num(entry.final_price),
                       num(entry.total_welfare)});
  } else {
    for (const auto& entry : cmp.entries) {
      os << regime_name(entry.kind) << ": slopes=[";
      for (Index i = 0; i < entry.slopes.size(); ++i)
        os << (i ? ", " : "") << num(entry.slopes(i));
      os << "] welfare=" << num(entry.total_welfare);
      if (cmp.has_single_consumed_good)
        os << " final_price=" << num(entry.final_price);
      os << "\n";
    }
    os << "slopes dominate multilateral: "
       << (cmp.slopes_dominate ? "yes" : "NO") << "\n";
    if (cmp.has_single_consumed_good)
      os << "final price largest under multilateral: "
         << (cmp.final_price_ordered ? "yes" : "NO") << "\n";
  }
  out.write(os.str());
  return 0;
}

ChainRegime chain_regime_from_name(const std::string& name) {
  if (name == "multilateral") return ChainRegime::Multilateral;
  if (name == "unilateral-inputs") return ChainRegime::UnilateralInputs;
  if (name == "unilateral-outputs") return ChainRegime::UnilateralOutputs;
  if (name == "sequential-cournot") return ChainRegime::SequentialCournot;
  throw ParseError("unknown chain regime: " + name);
}

int cmd_chain(int layers, const std::vector<int>& firms, double k, double b_c,
              double a, const std::string& regime_str, const Output& out) {
  ChainSpec spec;
  spec.n_layers = layers;
  spec.firms_per_layer =
      firms.size() == 1 ? std::vector<int>(layers, firms[0]) : firms;
  spec.inv_capacity = Vec::Constant(layers, k > 0.0 ? 1.0 / k : 0.0);
  spec.consumer_slope = b_c;
  spec.consumer_intercept = a;
  const ChainSolution sol =
      solve_chain(spec, chain_regime_from_name(regime_str));

  std::ostringstream os;
  if (out.format == "csv") {
    os << csv_row(
        {"layer", "slope", "price", "markup_out", "markdown_in", "profit"});
    for (int i = 0; i < layers; ++i)
      os << csv_row({std::to_string(i + 1), num(sol.slopes(i)),
                     num(sol.prices(i)), num(sol.markup_out(i)),
                     num(sol.markdown_in(i)), num(sol.profit(i))});
    os << csv_row({"total", "", "", "", "Q=" + num(sol.quantity),
                   "W=" + num(sol.total_welfare)});
  } else {
    os << "regime: " << regime_str << "\n";
    for (int i = 0; i < layers; ++i)
      os << "layer " << (i + 1) << ": slope=" << num(sol.slopes(i))
         << " price=" << num(sol.prices(i)) << " markup="
         << num(sol.markup_out(i)) << " markdown=" << num(sol.markdown_in(i))
         << " profit=" << num(sol.profit(i)) << "\n";
    os << "Q=" << num(sol.quantity) << " welfare=" << num(sol.total_welfare)
       << "\n";
    bool equal = true;
    for (int i = 0; i + 1 < layers; ++i)
      if (std::abs(sol.profit(i + 1) - sol.profit(i)) >
          1e-8 * std::max(std::abs(sol.profit(i)), 1e-300))
        equal = false;
    if (layers > 1)
      os << "equal profits across layers: " << (equal ? "yes" : "no") << "\n";
    for (const auto& w : sol.warnings) os << "warning: " << w << "\n";
  }
  out.write(os.str());
  return 0;
}

int cmd_merger(int n1_max, double k, double b_c, double a, const Output& out) {
  const MergerStudy study = merger_study(n1_max, k, b_c, a);
  std::ostringstream os;
  if (out.format == "csv") {
    os << csv_row({"regime", "n1", "pre_quantity", "post_quantity",
                   "pre_welfare", "post_welfare", "pre_cs", "post_cs"});
    for (const auto& regime : study.regimes)
      for (const auto& row : regime.rows)
        os << csv_row({regime.name, num(row.n1), num(row.pre_quantity),
                       num(row.post_quantity), num(row.pre_welfare),
                       num(row.post_welfare), num(row.pre_consumer_surplus),
                       num(row.post_consumer_surplus)});
  } else {
    os << "post-merger slope B_M = " << num(study.post_merger_slope) << "\n";
    for (const auto& regime : study.regimes) {
      os << regime.name << ":";
      if (regime.price_threshold_found)
        os << " price/CS threshold n1 = " << num(regime.price_threshold);
      if (regime.welfare_threshold_found)
        os << ", total-welfare threshold n1 = "
           << num(regime.welfare_threshold);
      os << "\n";
    }
    os << "n_* (unilateral) = " << num(study.n_star_unilateral)
       << ", n^* (multilateral) = " << num(study.n_star_multilateral) << "\n";
    os << "disagreement interval (n_*, n^*) = ("
       << num(study.n_star_unilateral) << ", "
       << num(study.n_star_multilateral) << ")\n";
  }
  out.write(os.str());
  return 0;
}

int cmd_sweep_depth(int n_max, double k, double b_c, double a,
                    const Output& out) {
  const std::vector<DepthRow> rows = depth_sweep(n_max, k, b_c, a);
  std::ostringstream os;
  os << csv_row({"N", "Q_multi", "Q_local", "W_multi", "W_local", "Q_ratio",
                 "W_ratio"});
  for (const auto& row : rows)
    os << csv_row({std::to_string(row.depth), num(row.q_multilateral),
                   num(row.q_local), num(row.w_multilateral),
                   num(row.w_local), num(row.q_ratio), num(row.w_ratio)});
  out.write(os.str());
  return 0;
}

int cmd_surplus(int layers, const std::vector<int>& firms, double k,
                double b_c, double a, const Output& out) {
  ChainSpec spec;
  spec.n_layers = layers;
  spec.firms_per_layer =
      firms.size() == 1 ? std::vector<int>(layers, firms[0]) : firms;
  spec.inv_capacity = Vec::Constant(layers, k > 0.0 ? 1.0 / k : 0.0);
  spec.consumer_slope = b_c;
  spec.consumer_intercept = a;
  const SurplusProfile profile = surplus_profile(spec);
  std::ostringstream os;
  if (out.format == "csv") {
    os << csv_row({"regime", "layer", "markup_out", "markdown_in", "profit"});
    for (const auto& regime : profile.regimes)
      for (Index i = 0; i < regime.profit.size(); ++i)
        os << csv_row({regime.name, std::to_string(i + 1),
                       num(regime.markup_out(i)), num(regime.markdown_in(i)),
                       num(regime.profit(i))});
  } else {
    for (const auto& regime : profile.regimes) {
      os << regime.name << ": profits=[";
      for (Index i = 0; i < regime.profit.size(); ++i)
        os << (i ? ", " : "") << num(regime.profit(i));
      os << "]";
      if (regime.profits_equal) os << " (equal across layers)";
      if (regime.profits_increasing_upstream) os << " (increasing upstream)";
      if (regime.profits_increasing_downstream)
        os << " (increasing downstream)";
      os << "\n";
    }
  }
  out.write(os.str());
  return 0;
}

int cmd_goods_network(const std::string& path, const std::string& regime_str,
                      int removed_firm, const Output& out) {
  const LoadedEconomy loaded = load_economy_file(path);
  const Regime regime{regime_from_name(regime_str), {}};
  auto [slopes, diag] = solve(loaded.economy, regime);
  (void)diag;
  std::optional<Index> removed;
  if (removed_firm >= 0) removed = removed_firm;
  const GoodsNetwork gn = goods_network(loaded.economy, slopes, removed);
  std::ostringstream os;
  os << csv_row({"from", "to", "weight"});
  for (Index r = 0; r < gn.g.rows(); ++r)
    for (Index c = 0; c < gn.g.cols(); ++c)
      if (r != c && gn.g(r, c) != 0.0)
        os << csv_row({loaded.economy.good_name(r),
                       loaded.economy.good_name(c), num(gn.g(r, c))});
  os << csv_row({"good", "diagonal", ""});
  for (Index g = 0; g < gn.d.size(); ++g)
    os << csv_row({loaded.economy.good_name(g), num(gn.d(g)), ""});
  if (!removed) {
    const Vec p = centrality_prices(
        gn, assemble_system(loaded.economy, slopes).a_bar);
    os << csv_row({"good", "centrality_price", ""});
    for (Index g = 0; g < p.size(); ++g)
      os << csv_row({loaded.economy.good_name(g), num(p(g)), ""});
  }
  out.write(os.str());
  return 0;
}

int cmd_solve_substitutes(const std::string& path, const Output& out) {
  const LoadedEconomy loaded = load_economy_file(path);
  if (!loaded.substitutes)
    throw ParseError("file does not describe a substitutes economy");
  const SubstitutesSolution sol = solve_substitutes(*loaded.substitutes);
  const Vec prices = substitutes_prices(*loaded.substitutes, sol.maximal);
  const auto markups = substitutes_markups(*loaded.substitutes, sol.maximal);
  std::ostringstream os;
  const Economy& economy = loaded.substitutes->base;
  os << "maximal equilibrium:\n";
  for (Index i = 0; i < economy.n_firms(); ++i) {
    os << "  " << economy.firm_name(i) << ": B=[";
    const Mat& b = sol.maximal.blocks[i].block;
    for (Index r = 0; r < b.rows(); ++r)
      for (Index c = 0; c < b.cols(); ++c)
        os << (r + c ? ", " : "") << num(b(r, c));
    os << "] markups=[";
    for (Index j = 0; j < markups[i].size(); ++j)
      os << (j ? ", " : "") << num(markups[i](j));
    os << "]\n";
  }
  os << "prices:";
  for (Index g = 0; g < prices.size(); ++g)
    os << " " << economy.good_name(g) << "=" << num(prices(g));
  os << "\n";
  double gap = 0.0;
  for (Index i = 0; i < economy.n_firms(); ++i)
    gap = std::max(gap, (sol.maximal.blocks[i].block -
                         sol.minimal.blocks[i].block)
                            .cwiseAbs()
                            .maxCoeff());
  os << "max |maximal - minimal| = " << num(gap) << "\n";
  out.write(os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Supply and demand function equilibria on production networks"};
  app.require_subcommand(1);
  app.add_option("--precision", g_precision, "Significant digits printed")
      ->check(CLI::Range(1, 17))
      ->capture_default_str();

  std::string path, regime = "multilateral";
  SolveOptions opts;
  Output out;
  int layers = 3, n1_max = 20, n_max = 30, removed_firm = -1;
  std::vector<int> firms{2};
  double k = 1.0, b_c = 1.0, a = 1.0;

  auto* validate_cmd =
      app.add_subcommand("validate", "Check viability and connectivity");
  validate_cmd->add_option("file", path, "Economy spec (JSON)")->required();

  auto* solve_cmd = app.add_subcommand("solve", "Solve for an equilibrium");
  solve_cmd->add_option("file", path, "Economy spec (JSON)")->required();
  solve_cmd
      ->add_option("--regime", regime, "Market-power regime")
      ->check(CLI::IsMember({"multilateral", "unilateral-inputs",
                             "unilateral-outputs", "local", "cournot"}))
      ->capture_default_str();
  solve_cmd->add_option("--tol", opts.tol, "Slope tolerance")
      ->capture_default_str();
  solve_cmd->add_option("--max-iter", opts.max_iter, "Iteration cap")
      ->capture_default_str();
  solve_cmd->add_option("--damping", opts.damping, "Step factor in (0,1]")
      ->capture_default_str();
  add_output_flags(solve_cmd, &out);

  auto* compare_cmd = app.add_subcommand(
      "compare", "Solve under multilateral/unilateral/local side by side");
  compare_cmd->add_option("file", path, "Economy spec (JSON)")->required();
  add_output_flags(compare_cmd, &out);

  auto* chain_cmd =
      app.add_subcommand("chain", "Closed-form layered supply chain");
  chain_cmd->add_option("--layers", layers, "Number of layers")->required();
  chain_cmd->add_option("--firms", firms,
                        "Firms per layer (one value or one per layer)")
      ->required()
      ->delimiter(',');
  chain_cmd->add_option("--k", k, "Capacity per layer")->capture_default_str();
  chain_cmd->add_option("--Bc", b_c, "Consumer slope")->capture_default_str();
  chain_cmd->add_option("--A", a, "Consumer intercept")->capture_default_str();
  chain_cmd
      ->add_option("--regime", regime, "Chain regime")
      ->check(CLI::IsMember({"multilateral", "unilateral-inputs",
                             "unilateral-outputs", "sequential-cournot"}))
      ->capture_default_str();
  add_output_flags(chain_cmd, &out);

  auto* merger_cmd =
      app.add_subcommand("merger", "Vertical-merger welfare study");
  merger_cmd->add_option("--n1-max", n1_max, "Largest downstream firm count")
      ->capture_default_str();
  merger_cmd->add_option("--k", k, "Downstream capacity")->capture_default_str();
  merger_cmd->add_option("--Bc", b_c, "Consumer slope")->capture_default_str();
  merger_cmd->add_option("--A", a, "Consumer intercept")->capture_default_str();
  add_output_flags(merger_cmd, &out);

  auto* sweep_cmd = app.add_subcommand(
      "sweep-depth", "Quantity/welfare ratios of local vs multilateral");
  sweep_cmd->add_option("--N-max", n_max, "Deepest chain")->capture_default_str();
  sweep_cmd->add_option("--k", k, "Capacity per layer")->capture_default_str();
  sweep_cmd->add_option("--Bc", b_c, "Consumer slope")->capture_default_str();
  sweep_cmd->add_option("--A", a, "Consumer intercept")->capture_default_str();
  add_output_flags(sweep_cmd, &out);

  auto* surplus_cmd = app.add_subcommand(
      "surplus", "Per-layer surplus division across chain regimes");
  surplus_cmd->add_option("--layers", layers, "Number of layers")->required();
  surplus_cmd->add_option("--firms", firms, "Firms per layer")
      ->required()
      ->delimiter(',');
  surplus_cmd->add_option("--k", k, "Capacity per layer")->capture_default_str();
  surplus_cmd->add_option("--Bc", b_c, "Consumer slope")->capture_default_str();
  surplus_cmd->add_option("--A", a, "Consumer intercept")->capture_default_str();
  add_output_flags(surplus_cmd, &out);

  auto* gn_cmd = app.add_subcommand(
      "goods-network", "Goods projection and centrality prices");
  gn_cmd->add_option("file", path, "Economy spec (JSON)")->required();
  gn_cmd->add_option("--regime", regime, "Regime for the slopes")
      ->check(CLI::IsMember({"multilateral", "unilateral-inputs",
                             "unilateral-outputs", "local", "cournot"}))
      ->capture_default_str();
  gn_cmd->add_option("--removed-firm", removed_firm,
                     "Index of the firm to remove (G_{-i})");
  add_output_flags(gn_cmd, &out);

  auto* subs_cmd = app.add_subcommand(
      "solve-substitutes", "Substitutes extension: minimal/maximal equilibria");
  subs_cmd->add_option("file", path, "Economy spec (JSON)")->required();
  add_output_flags(subs_cmd, &out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (validate_cmd->parsed()) return cmd_validate(path);
    if (solve_cmd->parsed()) return cmd_solve(path, regime, opts, out);
    if (compare_cmd->parsed()) return cmd_compare(path, out);
    if (chain_cmd->parsed())
      return cmd_chain(layers, firms, k, b_c, a, regime, out);
    if (merger_cmd->parsed()) return cmd_merger(n1_max, k, b_c, a, out);
    if (sweep_cmd->parsed()) return cmd_sweep_depth(n_max, k, b_c, a, out);
    if (surplus_cmd->parsed())
      return cmd_surplus(layers, firms, k, b_c, a, out);
    if (gn_cmd->parsed())
      return cmd_goods_network(path, regime, removed_firm, out);
    if (subs_cmd->parsed()) return cmd_solve_substitutes(path, out);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NotConverged& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const SingularSystem& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
