#pragma once

// JSON market specification: outcomes, filtration, measure set, named
// processes and claims. Also the strategy file written by `hedge`.
//
// {
//   "outcomes":   {"count": 2, "labels": ["up", "down"]},
//   "filtration": [[[0, 1]], [[0], [1]]],
//   "measures":   {"generators": [[0.5, 0.5]]}   or   {"martingale_assets": ["S"]},
//   "processes":  {"S": [[100, 100], [120, 80]]},
//   "claims":     {"call": [20, 0]}
// }

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "supmart/error.hpp"
#include "supmart/filtered_space.hpp"
#include "supmart/hedging.hpp"
#include "supmart/measure_set.hpp"

namespace supmart {

using Json = nlohmann::ordered_json;

struct MarketSpec {
  std::size_t outcome_count = 0;
  std::vector<std::string> labels;
  std::vector<Partition> filtration;
  std::optional<std::vector<Vector>> generators;
  std::optional<std::vector<std::string>> martingale_assets;
  std::vector<std::pair<std::string, ProcessRows>> processes;
  std::vector<std::pair<std::string, Vector>> claims;

  const ProcessRows* process(const std::string& name) const {
    for (const auto& [n, rows] : processes)
      if (n == name) return &rows;
    return nullptr;
  }
  const Vector* claim(const std::string& name) const {
    for (const auto& [n, v] : claims)
      if (n == name) return &v;
    return nullptr;
  }
};

/// Validated mathematical objects built from a MarketSpec.
struct Model {
  FilteredSpace space;
  MeasureSet measures;
  std::vector<std::pair<std::string, AdaptedProcess>> processes;
  std::vector<std::pair<std::string, Vector>> claims;

  const AdaptedProcess& process(const std::string& name) const {
    for (const auto& [n, p] : processes)
      if (n == name) return p;
    fail(ErrorKind::InvalidArgument, "unknown process '" + name + "'");
  }
  const Vector& claim(const std::string& name) const {
    for (const auto& [n, v] : claims)
      if (n == name) return v;
    fail(ErrorKind::InvalidArgument, "unknown claim '" + name + "'");
  }
};

namespace detail {

[[noreturn]] inline void field_error(const std::string& path, const std::string& what) {
  fail(ErrorKind::Parse, "field '" + path + "': " + what);
}

inline const Json& require(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) field_error(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) field_error(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

inline double number(const Json& j, const std::string& path) {
  if (!j.is_number()) field_error(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) field_error(path, "not finite");
  return v;
}

inline Vector number_list(const Json& j, const std::string& path) {
  if (!j.is_array()) field_error(path, "expected an array of numbers");
  Vector out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline std::size_t index(const Json& j, const std::string& path) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) field_error(path, "expected a nonnegative integer");
  const auto v = j.get<long long>();
  if (v < 0) field_error(path, "expected a nonnegative integer");
  return static_cast<std::size_t>(v);
}

inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace detail

inline MarketSpec spec_from_json(const Json& doc) {
  using namespace detail;
  MarketSpec spec;
  const Json& outcomes = require(doc, "outcomes", "");
  spec.outcome_count = index(require(outcomes, "count", "outcomes"), "outcomes.count");
  if (auto it = outcomes.find("labels"); it != outcomes.end()) {
    if (!it->is_array()) field_error("outcomes.labels", "expected an array of strings");
    for (std::size_t i = 0; i < it->size(); ++i) {
      if (!(*it)[i].is_string()) field_error("outcomes.labels[" + std::to_string(i) + "]", "expected a string");
      spec.labels.push_back((*it)[i].get<std::string>());
    }
    if (spec.labels.size() != spec.outcome_count) field_error("outcomes.labels", "length differs from count");
  }

  const Json& filt = require(doc, "filtration", "");
  if (!filt.is_array() || filt.empty()) field_error("filtration", "expected a nonempty array of partitions");
  for (std::size_t t = 0; t < filt.size(); ++t) {
    const std::string tp = "filtration[" + std::to_string(t) + "]";
    if (!filt[t].is_array()) field_error(tp, "expected an array of cells");
    Partition part;
    for (std::size_t c = 0; c < filt[t].size(); ++c) {
      const std::string cp = tp + "[" + std::to_string(c) + "]";
      if (!filt[t][c].is_array()) field_error(cp, "expected an array of outcome indices");
      Cell cell;
      for (std::size_t k = 0; k < filt[t][c].size(); ++k)
        cell.push_back(index(filt[t][c][k], cp + "[" + std::to_string(k) + "]"));
      part.push_back(std::move(cell));
    }
    spec.filtration.push_back(std::move(part));
  }

  const Json& meas = require(doc, "measures", "");
  const bool has_gen = meas.is_object() && meas.contains("generators");
  const bool has_assets = meas.is_object() && meas.contains("martingale_assets");
  if (has_gen == has_assets) field_error("measures", "exactly one of 'generators' or 'martingale_assets' is required");
  if (has_gen) {
    const Json& gens = meas["generators"];
    if (!gens.is_array() || gens.empty()) field_error("measures.generators", "expected a nonempty array");
    std::vector<Vector> list;
    for (std::size_t i = 0; i < gens.size(); ++i)
      list.push_back(number_list(gens[i], "measures.generators[" + std::to_string(i) + "]"));
    spec.generators = std::move(list);
  } else {
    const Json& names = meas["martingale_assets"];
    if (!names.is_array()) field_error("measures.martingale_assets", "expected an array of process names");
    std::vector<std::string> list;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (!names[i].is_string())
        field_error("measures.martingale_assets[" + std::to_string(i) + "]", "expected a string");
      list.push_back(names[i].get<std::string>());
    }
    spec.martingale_assets = std::move(list);
  }

  if (auto it = doc.find("processes"); it != doc.end()) {
    if (!it->is_object()) field_error("processes", "expected an object");
    for (const auto& [name, rows] : it->items()) {
      const std::string pp = "processes." + name;
      if (!rows.is_array()) field_error(pp, "expected an array of rows");
      ProcessRows pr;
      for (std::size_t t = 0; t < rows.size(); ++t) pr.push_back(number_list(rows[t], pp + "[" + std::to_string(t) + "]"));
      spec.processes.emplace_back(name, std::move(pr));
    }
  }
  if (auto it = doc.find("claims"); it != doc.end()) {
    if (!it->is_object()) field_error("claims", "expected an object");
    for (const auto& [name, v] : it->items()) spec.claims.emplace_back(name, number_list(v, "claims." + name));
  }
  return spec;
}

inline MarketSpec parse_spec(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = detail::line_column(text, e.byte);
    fail(ErrorKind::Parse, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": malformed JSON");
  }
  return spec_from_json(doc);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  out << content;
  if (!out) fail(ErrorKind::Io, "write to '" + path + "' failed");
}

inline MarketSpec load_spec(const std::string& path) { return parse_spec(read_file(path)); }

inline Json spec_to_json(const MarketSpec& spec) {
  Json doc;
  doc["outcomes"]["count"] = spec.outcome_count;
  if (!spec.labels.empty()) doc["outcomes"]["labels"] = spec.labels;
  doc["filtration"] = spec.filtration;
  if (spec.generators) doc["measures"]["generators"] = *spec.generators;
  if (spec.martingale_assets) doc["measures"]["martingale_assets"] = *spec.martingale_assets;
  doc["processes"] = Json::object();
  for (const auto& [name, rows] : spec.processes) doc["processes"][name] = rows;
  doc["claims"] = Json::object();
  for (const auto& [name, v] : spec.claims) doc["claims"][name] = v;
  return doc;
}

inline std::string dump_spec(const MarketSpec& spec) { return spec_to_json(spec).dump(2) + "\n"; }

inline Model build_model(const MarketSpec& spec) {
  FilteredSpace space = FilteredSpace::build(spec.outcome_count, spec.filtration);
  std::vector<std::pair<std::string, AdaptedProcess>> processes;
  for (const auto& [name, rows] : spec.processes) {
    try {
      processes.emplace_back(name, AdaptedProcess(space, rows));
    } catch (const Error& e) {
      fail(e.kind(), "process '" + name + "': " + e.detail());
    }
  }
  std::optional<MeasureSet> set;
  if (spec.generators) {
    std::vector<Measure> gens;
    for (std::size_t i = 0; i < spec.generators->size(); ++i) {
      try {
        gens.emplace_back((*spec.generators)[i]);
      } catch (const Error& e) {
        fail(e.kind(), "generator " + std::to_string(i) + ": " + e.detail());
      }
    }
    set.emplace(MeasureSet::hull(space, std::move(gens)));
  } else {
    std::vector<AdaptedProcess> assets;
    for (const auto& name : *spec.martingale_assets) {
      bool found = false;
      for (const auto& [n, p] : processes) {
        if (n == name) {
          assets.push_back(p);
          found = true;
        }
      }
      if (!found) fail(ErrorKind::InvalidArgument, "martingale asset '" + name + "' is not a declared process");
    }
    set.emplace(MeasureSet::martingale_polytope(space, std::move(assets)));
  }
  for (const auto& [name, v] : spec.claims) check_length(space, v, ("claim '" + name + "'").c_str());
  return Model{space, std::move(*set), std::move(processes), spec.claims};
}

/// Strategy file: asset names plus cash [t][w] and risky [t][w][j] tables.
inline Json strategy_to_json(const TradingStrategy& s, const std::vector<std::string>& asset_names) {
  Json doc;
  doc["assets"] = asset_names;
  Json cash = Json::array();
  for (const auto& row : s.cash.rows()) {
    Json r = Json::array();
    for (const auto& v : row) r.push_back(v[0]);
    cash.push_back(std::move(r));
  }
  doc["cash"] = std::move(cash);
  doc["risky"] = s.risky.rows();
  return doc;
}

inline TradingStrategy strategy_from_json(const Json& doc, const Model& model) {
  using namespace detail;
  const Json& names = require(doc, "assets", "");
  if (!names.is_array()) field_error("assets", "expected an array of process names");
  std::vector<AdaptedProcess> assets;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!names[i].is_string()) field_error("assets[" + std::to_string(i) + "]", "expected a string");
    assets.push_back(model.process(names[i].get<std::string>()));
  }
  const Json& cash = require(doc, "cash", "");
  const Json& risky = require(doc, "risky", "");
  if (!cash.is_array() || !risky.is_array()) field_error("cash", "expected arrays");
  PredictableProcess::Rows cash_rows, risky_rows;
  for (std::size_t t = 0; t < cash.size(); ++t) {
    const Vector row = number_list(cash[t], "cash[" + std::to_string(t) + "]");
    std::vector<Vector> r;
    for (double v : row) r.push_back(Vector{v});
    cash_rows.push_back(std::move(r));
  }
  for (std::size_t t = 0; t < risky.size(); ++t) {
    const std::string tp = "risky[" + std::to_string(t) + "]";
    if (!risky[t].is_array()) field_error(tp, "expected an array");
    std::vector<Vector> r;
    for (std::size_t w = 0; w < risky[t].size(); ++w) r.push_back(number_list(risky[t][w], tp + "[" + std::to_string(w) + "]"));
    risky_rows.push_back(std::move(r));
  }
  PredictableProcess cash_p(model.space, 1, std::move(cash_rows));
  PredictableProcess risky_p(model.space, assets.size(), std::move(risky_rows));
  return TradingStrategy{std::move(assets), std::move(cash_p), std::move(risky_p)};
}

}  // namespace supmart
