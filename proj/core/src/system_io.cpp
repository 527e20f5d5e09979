#include "hyrelax/system_io.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace hyrelax {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return j.get<int>();
}

Vec vector(const json& j, const std::string& where, Eigen::Index expected = -1) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], where);
  if (expected >= 0 && v.size() != expected)
    throw ConfigError(where + ": expected " + std::to_string(expected) + " entries, got " + std::to_string(v.size()));
  return v;
}

Mat matrix(const json& j, const std::string& where, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw ConfigError(where + ": expected " + std::to_string(rows) + " rows");
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) m.row(r) = vector(j[static_cast<std::size_t>(r)], where, cols).transpose();
  return m;
}

json to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json to_json(const Mat& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(to_json(Vec(m.row(r).transpose())));
  return a;
}

VectorField parse_field(const json& j, Eigen::Index n, Eigen::Index m, const std::string& where) {
  const std::string kind = require(j, "kind", where).get<std::string>();
  const json params = j.contains("params") ? j.at("params") : json::object();
  if (kind == "affine") {
    AffineField f;
    f.F = params.contains("F") ? matrix(params.at("F"), where + ".F", n, n) : Mat::Zero(n, n);
    f.G = params.contains("G") ? matrix(params.at("G"), where + ".G", n, m) : Mat::Zero(n, m);
    f.w = params.contains("w") ? vector(params.at("w"), where + ".w", n) : Vec::Zero(n);
    return VectorField(f);
  }
  std::map<std::string, double> p;
  if (!params.is_object()) throw ConfigError(where + ".params: expected an object");
  for (const auto& [key, value] : params.items()) p[key] = number(value, where + ".params." + key);
  return VectorField::named(kind, p);
}

}  // namespace

HybridSystem parse_system(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  try {
    HybridSystem sys;
    const int n = integer(require(doc, "state_dim", "system"), "state_dim");
    const int m = doc.contains("input_dim") ? integer(doc.at("input_dim"), "input_dim") : 0;
    if (n <= 0) throw ConfigError("state_dim must be positive");
    if (m < 0) throw ConfigError("input_dim must be nonnegative");
    sys.state_dim = static_cast<std::size_t>(n);
    sys.input_dim = static_cast<std::size_t>(m);
    if (doc.contains("input_box")) {
      const json& ib = doc.at("input_box");
      sys.input_box.lo = vector(require(ib, "lo", "input_box"), "input_box.lo", m);
      sys.input_box.hi = vector(require(ib, "hi", "input_box"), "input_box.hi", m);
    } else if (m == 0) {
      sys.input_box = {Vec(), Vec()};
    } else {
      throw ConfigError("system: missing key 'input_box'");
    }

    const json& modes = require(doc, "modes", "system");
    if (!modes.is_array()) throw ConfigError("modes: expected an array");
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const std::string where = "modes[" + std::to_string(i) + "]";
      const json& mj = modes[i];
      Mode mode;
      mode.id = integer(require(mj, "id", where), where + ".id");
      const json& hs = require(mj, "halfspaces", where);
      if (!hs.is_array()) throw ConfigError(where + ".halfspaces: expected an array");
      mode.domain.normals.resize(static_cast<Eigen::Index>(hs.size()), n);
      mode.domain.offsets.resize(static_cast<Eigen::Index>(hs.size()));
      for (std::size_t r = 0; r < hs.size(); ++r) {
        const std::string hw = where + ".halfspaces[" + std::to_string(r) + "]";
        const auto rr = static_cast<Eigen::Index>(r);
        mode.domain.normals.row(rr) = vector(require(hs[r], "normal", hw), hw + ".normal", n).transpose();
        mode.domain.offsets[rr] = number(require(hs[r], "offset", hw), hw + ".offset");
      }
      mode.field = parse_field(require(mj, "field", where), n, m, where + ".field");
      sys.modes.push_back(std::move(mode));
    }

    const json edges = doc.contains("edges") ? doc.at("edges") : json::array();
    if (!edges.is_array()) throw ConfigError("edges: expected an array");
    std::vector<std::optional<int>> partner_ids;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const std::string where = "edges[" + std::to_string(i) + "]";
      const json& ej = edges[i];
      Edge e;
      e.id = integer(require(ej, "id", where), where + ".id");
      const int src = integer(require(ej, "source", where), where + ".source");
      const int tgt = integer(require(ej, "target", where), where + ".target");
      const auto s = sys.mode_by_id(src);
      const auto t = sys.mode_by_id(tgt);
      if (!s || !t) throw ConfigError(where + ": source or target names an unknown mode");
      e.source = *s;
      e.target = *t;
      const json& g = require(ej, "guard", where);
      e.guard_normal = vector(require(g, "normal", where + ".guard"), where + ".guard.normal", n);
      e.guard_offset = number(require(g, "offset", where + ".guard"), where + ".guard.offset");
      const json& rj = require(ej, "reset", where);
      e.reset_A = matrix(require(rj, "A", where + ".reset"), where + ".reset.A", n, n);
      e.reset_b = rj.contains("b") ? vector(rj.at("b"), where + ".reset.b", n) : Vec::Zero(n);
      if (ej.contains("partner") && !ej.at("partner").is_null())
        partner_ids.emplace_back(integer(ej.at("partner"), where + ".partner"));
      else
        partner_ids.emplace_back(std::nullopt);
      if (ej.contains("target_facet") && !ej.at("target_facet").is_null()) {
        const json& tf = ej.at("target_facet");
        e.target_facet_normal = vector(require(tf, "normal", where + ".target_facet"), where + ".target_facet.normal", n);
        e.target_facet_offset = number(require(tf, "offset", where + ".target_facet"), where + ".target_facet.offset");
      }
      sys.edges.push_back(std::move(e));
    }
    for (std::size_t i = 0; i < sys.edges.size(); ++i) {
      if (!partner_ids[i]) continue;
      const auto p = sys.edge_by_id(*partner_ids[i]);
      if (!p) throw ConfigError("edges[" + std::to_string(i) + "].partner names an unknown edge");
      sys.edges[i].partner = *p;
    }
    return sys;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("schema error: ") + e.what());
  }
}

HybridSystem load_system(const std::string& path) {
  if (!std::filesystem::exists(path)) throw IoError("file not found: " + path);
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_system(ss.str());
}

std::string system_to_json(const HybridSystem& sys, int indent) {
  json doc;
  doc["state_dim"] = sys.state_dim;
  doc["input_dim"] = sys.input_dim;
  doc["input_box"] = {{"lo", to_json(sys.input_box.lo)}, {"hi", to_json(sys.input_box.hi)}};
  json modes = json::array();
  for (const auto& mode : sys.modes) {
    json hs = json::array();
    for (Eigen::Index r = 0; r < mode.domain.normals.rows(); ++r)
      hs.push_back({{"normal", to_json(Vec(mode.domain.normals.row(r).transpose()))}, {"offset", mode.domain.offsets[r]}});
    json field;
    if (const auto* a = mode.field.affine()) {
      field = {{"kind", "affine"}, {"params", {{"F", to_json(a->F)}, {"G", to_json(a->G)}, {"w", to_json(a->w)}}}};
    } else if (const auto* d = mode.field.double_pendulum()) {
      const auto& p = d->params;
      field = {{"kind", "double_pendulum"},
               {"params", {{"m1", p.m1}, {"m2", p.m2}, {"L1", p.L1}, {"L2", p.L2}, {"g", p.g}}}};
    } else {
      throw ConfigError("field '" + mode.field.kind() + "' cannot be serialized");
    }
    modes.push_back({{"id", mode.id}, {"halfspaces", hs}, {"field", field}});
  }
  doc["modes"] = modes;
  json edges = json::array();
  for (const auto& e : sys.edges) {
    json ej = {{"id", e.id},
               {"source", sys.mode(e.source).id},
               {"target", sys.mode(e.target).id},
               {"guard", {{"normal", to_json(e.guard_normal)}, {"offset", e.guard_offset}}},
               {"reset", {{"A", to_json(e.reset_A)}, {"b", to_json(e.reset_b)}}}};
    if (e.partner) ej["partner"] = sys.edge(*e.partner).id;
    if (e.target_facet_normal && e.target_facet_offset)
      ej["target_facet"] = {{"normal", to_json(*e.target_facet_normal)}, {"offset", *e.target_facet_offset}};
    edges.push_back(ej);
  }
  doc["edges"] = edges;
  return doc.dump(indent);
}

InputSignal parse_input_table(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed input table: ") + e.what());
  }
  if (!doc.is_array() || doc.empty()) throw ConfigError("input table: expected a nonempty array");
  std::vector<double> ts;
  std::vector<Vec> us;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string where = "input[" + std::to_string(i) + "]";
    ts.push_back(number(require(doc[i], "t", where), where + ".t"));
    us.push_back(vector(require(doc[i], "u", where), where + ".u"));
  }
  return InputSignal(ts, us);
}

}  // namespace hyrelax
