#include "sdfe/io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace sdfe {

namespace {

using nlohmann::json;

Index resolve(const std::map<std::string, Index>& names,
              const std::string& name, const char* what) {
  const auto it = names.find(name);
  if (it == names.end())
    throw ParseError(std::string("unknown ") + what + ": " + name);
  return it->second;
}

Mat parse_matrix(const json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw ParseError(std::string(what) + " must be a nonempty array of rows");
  const size_t cols = j[0].size();
  Mat m(j.size(), cols);
  for (size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw ParseError(std::string(what) + " rows have unequal lengths");
    for (size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

Vec parse_vector(const json& j, const char* what) {
  if (!j.is_array())
    throw ParseError(std::string(what) + " must be an array");
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

}  // namespace

LoadedEconomy load_economy_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  try {
    std::map<std::string, Index> good_index;
    std::vector<std::string> good_names;
    for (const auto& g : j.at("goods")) {
      const std::string name = g.get<std::string>();
      if (!good_index.emplace(name, static_cast<Index>(good_names.size()))
               .second)
        throw ParseError("duplicate good name: " + name);
      good_names.push_back(name);
    }

    std::vector<Index> out;
    std::vector<std::vector<InputCoeff>> inputs;
    std::vector<double> f_l, kappa;
    std::vector<std::string> firm_names;
    std::map<std::string, Index> firm_index;
    std::vector<std::optional<SubstitutesTech>> subs;
    for (const auto& f : j.at("firms")) {
      const std::string name = f.at("name").get<std::string>();
      if (!firm_index.emplace(name, static_cast<Index>(firm_names.size()))
               .second)
        throw ParseError("duplicate firm name: " + name);
      firm_names.push_back(name);
      out.push_back(resolve(good_index, f.at("output").get<std::string>(),
                            "output good"));
      std::vector<InputCoeff> firm_inputs;
      if (f.contains("inputs"))
        for (const auto& [good, coeff] : f.at("inputs").items())
          firm_inputs.push_back(InputCoeff{
              resolve(good_index, good, "input good"), coeff.get<double>()});
      inputs.push_back(std::move(firm_inputs));

      if (f.contains("sigma") || f.contains("omega") || f.contains("alpha")) {
        SubstitutesTech tech;
        tech.alpha = f.at("alpha").get<double>();
        tech.omega = parse_vector(f.at("omega"), "omega");
        tech.sigma = f.at("sigma").is_array() && !f.at("sigma").empty()
                         ? parse_matrix(f.at("sigma"), "sigma")
                         : Mat(0, 0);
        subs.push_back(tech);
        f_l.push_back(0.0);
        kappa.push_back(0.0);
      } else {
        subs.push_back(std::nullopt);
        f_l.push_back(f.value("f_L", 0.0));
        kappa.push_back(f.value("kappa", 0.0));
      }
    }

    const auto& consumer = j.at("consumer");
    std::vector<Index> consumer_goods;
    for (const auto& g : consumer.at("goods"))
      consumer_goods.push_back(
          resolve(good_index, g.get<std::string>(), "consumer good"));
    const Vec a = parse_vector(consumer.at("A"), "A");
    const Mat b_c = parse_matrix(consumer.at("B_c"), "B_c");

    const Index n = static_cast<Index>(out.size());
    Vec f_l_vec(n), kappa_vec(n);
    for (Index i = 0; i < n; ++i) {
      f_l_vec(i) = f_l[i];
      kappa_vec(i) = kappa[i];
    }
    Economy economy(static_cast<Index>(good_names.size()), std::move(out),
                    std::move(inputs), std::move(f_l_vec),
                    std::move(kappa_vec), std::move(consumer_goods), a, b_c,
                    good_names, firm_names);

    LoadedEconomy loaded{std::move(economy), std::nullopt};
    const bool any_sub =
        std::any_of(subs.begin(), subs.end(), [](const auto& s) {
          return s.has_value();
        });
    if (any_sub) {
      std::vector<SubstitutesTech> tech;
      for (Index i = 0; i < n; ++i) {
        if (!subs[i])
          throw ParseError(
              "substitutes economies need sigma/omega/alpha on every firm");
        // Inputs were sorted by good index inside Economy; sigma/omega rows
        // follow that canonical order.
        tech.push_back(std::move(*subs[i]));
      }
      loaded.substitutes =
          make_substitutes_economy(loaded.economy, std::move(tech));
    }
    return loaded;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad economy spec: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("bad economy spec: ") + e.what());
  }
}

LoadedEconomy load_economy_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_economy_json(buffer.str());
}

std::string economy_to_json(const Economy& economy) {
  json j;
  for (Index g = 0; g < economy.n_goods(); ++g)
    j["goods"].push_back(economy.good_name(g));
  for (Index i = 0; i < economy.n_firms(); ++i) {
    json firm;
    firm["name"] = economy.firm_name(i);
    firm["output"] = economy.good_name(economy.out_good(i));
    firm["inputs"] = json::object();
    for (const auto& in : economy.inputs(i))
      firm["inputs"][economy.good_name(in.good)] = in.coeff;
    firm["f_L"] = economy.labor_linear(i);
    firm["kappa"] = economy.inv_capacity(i);
    j["firms"].push_back(firm);
  }
  json consumer;
  for (Index c : economy.consumer_goods())
    consumer["goods"].push_back(economy.good_name(c));
  for (Index r = 0; r < economy.demand_intercept().size(); ++r)
    consumer["A"].push_back(economy.demand_intercept()(r));
  for (Index r = 0; r < economy.demand_slope().rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < economy.demand_slope().cols(); ++c)
      row.push_back(economy.demand_slope()(r, c));
    consumer["B_c"].push_back(row);
  }
  j["consumer"] = consumer;
  return j.dump(2);
}

}  // namespace sdfe
