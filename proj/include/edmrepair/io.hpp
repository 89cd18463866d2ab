#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"

namespace edmrepair {

using json = nlohmann::json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double round_significant(double v, int digits = 12) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return std::stod(buf);
}

// ---------------------------------------------------------------------------
// instances

inline json instance_to_json(const WeightedInstance& inst) {
  const std::size_t n = inst.size();
  json j;
  j["labels"] = inst.space.labels();
  json rows = json::array();
  for (PointId i = 0; i < n; ++i) {
    json row = json::array();
    for (PointId k = 0; k < n; ++k) row.push_back(inst.space(i, k));
    rows.push_back(std::move(row));
  }
  j["sqdist"] = std::move(rows);
  j["d"] = inst.d;
  j["k_out"] = inst.k_out;
  j["k_mod"] = inst.k_mod;
  j["W"] = inst.W;
  j["w_out"] = inst.w_out;
  json wm = json::object();
  for (PointId a = 0; a < n; ++a)
    for (PointId b = a + 1; b < n; ++b)
      if (inst.w_mod(a, b) != 1) wm[std::to_string(a) + "," + std::to_string(b)] = inst.w_mod(a, b);
  j["w_mod"] = std::move(wm);
  return j;
}

namespace detail {

inline Pair parse_pair_key(const std::string& key, std::size_t n) {
  const auto comma = key.find(',');
  if (comma == std::string::npos) throw FormatError("w_mod key must look like \"i,j\": " + key);
  std::size_t a = 0, b = 0;
  try {
    std::size_t used = 0;
    a = std::stoul(key.substr(0, comma), &used);
    if (used != comma) throw FormatError("bad w_mod key " + key);
    const std::string rest = key.substr(comma + 1);
    b = std::stoul(rest, &used);
    if (used != rest.size()) throw FormatError("bad w_mod key " + key);
  } catch (const std::logic_error&) {
    throw FormatError("bad w_mod key " + key);
  }
  if (a >= b || b >= n) throw FormatError("w_mod key out of range or not i<j: " + key);
  return Pair(a, b);
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad value for \"") + key + "\": " + e.what());
  }
}

}  // namespace detail

inline WeightedInstance instance_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("instance must be a JSON object");
  if (!j.contains("sqdist")) throw FormatError("missing \"sqdist\"");
  std::vector<std::vector<double>> rows;
  try {
    rows = j.at("sqdist").get<std::vector<std::vector<double>>>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("\"sqdist\" must be an array of numeric rows: ") + e.what());
  }
  const std::size_t n = rows.size();
  for (const auto& r : rows)
    if (r.size() != n) throw FormatError("\"sqdist\" must be square");
  std::vector<std::string> labels = detail::get_or(j, "labels", std::vector<std::string>{});
  if (!labels.empty() && labels.size() != n) throw FormatError("\"labels\" needs one entry per point");
  {
    std::vector<std::string> sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw FormatError("duplicate label");
  }
  std::vector<double> flat;
  flat.reserve(n * n);
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  DistanceSpace s(n, std::move(flat), std::move(labels));
  if (auto v = validate(s)) throw FormatError("invalid distance matrix: " + v->message());

  WeightedInstance inst = WeightedInstance::unit(std::move(s), 1, 0, 0);
  if (!j.contains("d")) throw FormatError("missing \"d\"");
  inst.d = detail::get_or(j, "d", 1);
  inst.k_out = detail::get_or(j, "k_out", 0);
  inst.k_mod = detail::get_or(j, "k_mod", 0);
  if (j.contains("w_out")) {
    inst.w_out = detail::get_or(j, "w_out", std::vector<Weight>{});
    if (inst.w_out.size() != n) throw FormatError("\"w_out\" needs one entry per point");
  }
  if (j.contains("w_mod")) {
    if (!j.at("w_mod").is_object()) throw FormatError("\"w_mod\" must be an object");
    for (const auto& [key, val] : j.at("w_mod").items()) {
      const Pair p = detail::parse_pair_key(key, n);
      if (!val.is_number_integer()) throw FormatError("w_mod values must be integers");
      inst.w_mod.set(p.a, p.b, val.get<Weight>());
    }
  }
  inst.W = detail::get_or(j, "W", inst.total_weight());
  try {
    inst.check();
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return inst;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  out << j.dump(2) << '\n';
}

inline WeightedInstance read_instance_file(const std::string& path) { return instance_from_json(read_json_file(path)); }

// Bare squared-distance matrix, comma or whitespace separated, one row per line.
inline DistanceSpace space_from_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    for (char& c : line)
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw FormatError("bad number: " + tok);
      } catch (const std::logic_error&) {
        throw FormatError("bad number: " + tok);
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  const std::size_t n = rows.size();
  for (const auto& r : rows)
    if (r.size() != n) throw FormatError("CSV matrix must be square");
  std::vector<double> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  DistanceSpace s(n, std::move(flat));
  if (auto v = validate(s)) throw FormatError("invalid distance matrix: " + v->message());
  return s;
}

inline DistanceSpace read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return space_from_csv(ss.str());
}

// ---------------------------------------------------------------------------
// graphs and matrices

// {"n": 3, "edges": [[0,1],[1,2]]}; a bare edge list infers n.
inline Graph graph_from_json(const json& j) {
  try {
    json edges = j.is_array() ? j : j.at("edges");
    std::size_t n = 0;
    std::vector<Pair> list;
    for (const auto& e : edges) {
      const auto ab = e.get<std::vector<std::size_t>>();
      if (ab.size() != 2) throw FormatError("edges must be pairs");
      list.emplace_back(ab[0], ab[1]);
      n = std::max({n, ab[0] + 1, ab[1] + 1});
    }
    if (j.is_object() && j.contains("n")) {
      const auto given = j.at("n").get<std::size_t>();
      if (given < n) throw FormatError("edge endpoint exceeds n");
      n = given;
    }
    return Graph(n, std::move(list));
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad graph: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("bad graph: ") + e.what());
  }
}

inline json graph_to_json(const Graph& g) {
  json edges = json::array();
  for (const Pair& p : g.edges) edges.push_back({p.a, p.b});
  return {{"n", g.n}, {"edges", edges}};
}

// {"rows": [[...], ...]} or a bare array of rows.
inline std::vector<std::vector<double>> matrix_from_json(const json& j) {
  try {
    auto rows = (j.is_array() ? j : j.at("rows")).get<std::vector<std::vector<double>>>();
    for (const auto& r : rows)
      if (r.size() != rows.front().size()) throw FormatError("ragged matrix");
    return rows;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad matrix: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// solutions

struct SolutionMeta {
  std::string algorithm;
  std::uint64_t seed = 0;
  double elapsed_ms = 0.0;
  json extra = json::object();
};

inline json solution_to_json(const WeightedInstance& inst, const std::optional<Solution>& sol,
                             const SolutionMeta& meta) {
  json j;
  j["answer"] = sol ? "yes" : "no";
  json outl = json::array();
  json mods = json::array();
  if (sol) {
    for (PointId p : sol->outliers) outl.push_back(inst.space.label(p));
    for (const auto& [p, v] : sol->modifications)
      mods.push_back({{"pair", {inst.space.label(p.a), inst.space.label(p.b)}},
                      {"old_sq", inst.space(p.a, p.b)},
                      {"new_sq", round_significant(v)}});
  }
  j["outliers"] = std::move(outl);
  j["modifications"] = std::move(mods);
  j["cost"] = sol ? sol->cost : 0;
  if (sol && sol->realization) {
    json pts = json::array();
    for (PointId p : set_minus(inst.space.points(), sol->outliers)) {
      json row = json::array();
      auto it = sol->realization->coords.find(p);
      if (it == sol->realization->coords.end()) continue;
      for (double c : it->second) row.push_back(round_significant(c));
      pts.push_back(std::move(row));
    }
    j["realization"] = std::move(pts);
  }
  json m = meta.extra;
  m["algorithm"] = meta.algorithm;
  m["seed"] = meta.seed;
  m["elapsed_ms"] = meta.elapsed_ms;
  j["meta"] = std::move(m);
  return j;
}

inline std::optional<Solution> solution_from_json(const WeightedInstance& inst, const json& j) {
  std::map<std::string, PointId> index;
  for (PointId i = 0; i < inst.size(); ++i) index[inst.space.label(i)] = i;
  auto lookup = [&](const std::string& label) {
    auto it = index.find(label);
    if (it == index.end()) throw FormatError("unknown label " + label);
    return it->second;
  };
  try {
    const std::string answer = j.at("answer").get<std::string>();
    if (answer == "no") return std::nullopt;
    if (answer != "yes") throw FormatError("answer must be \"yes\" or \"no\"");
    Solution sol;
    for (const auto& l : j.at("outliers")) sol.outliers.push_back(lookup(l.get<std::string>()));
    sol.outliers = make_point_set(sol.outliers);
    for (const auto& m : j.at("modifications")) {
      const auto pr = m.at("pair").get<std::vector<std::string>>();
      if (pr.size() != 2) throw FormatError("modification pair needs two labels");
      sol.modifications[Pair(lookup(pr[0]), lookup(pr[1]))] = m.at("new_sq").get<double>();
    }
    sol.cost = j.at("cost").get<Weight>();
    if (j.contains("realization")) {
      Realization r;
      const PointSet survivors = set_minus(inst.space.points(), sol.outliers);
      const auto rows = j.at("realization").get<std::vector<std::vector<double>>>();
      if (rows.size() != survivors.size()) throw FormatError("realization row count mismatch");
      r.dim = rows.empty() ? 0 : static_cast<int>(rows.front().size());
      for (std::size_t i = 0; i < rows.size(); ++i) r.coords[survivors[i]] = rows[i];
      sol.realization = std::move(r);
    }
    return sol;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad solution file: ") + e.what());
  }
}

}  // namespace edmrepair
