#include "crfc/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace crfc {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::ValidationError, field + ": " + what);
}

const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) bad(where + "." + key, "missing");
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) bad(where, "expected a number");
  return j.get<double>();
}

int index(const json& j, const std::string& where) {
  if (!j.is_number_integer()) bad(where, "expected an integer");
  return j.get<int>();
}

Vec3 vec3(const json& j, const std::string& where, int min_size) {
  if (!j.is_array() || static_cast<int>(j.size()) < min_size || j.size() > 3)
    bad(where, "expected " + std::to_string(min_size) + " to 3 numbers");
  Vec3 v = Vec3::Zero();
  for (size_t k = 0; k < j.size(); ++k) v(k) = number(j[k], where + "[" + std::to_string(k) + "]");
  return v;
}

int dof_index(const json& j, Regime r, const std::string& where) {
  if (j.is_number_integer()) return j.get<int>();
  if (!j.is_string()) bad(where, "expected a DOF label or index");
  const auto labels = dof_labels(r);
  for (size_t k = 0; k < labels.size(); ++k)
    if (labels[k] == j.get<std::string>()) return static_cast<int>(k);
  bad(where, "unknown DOF '" + j.get<std::string>() + "'");
}

template <class F>
auto wrap(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ValidationError) throw;
    bad(where, e.what());
  }
}

}  // namespace

Model parse_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  Model m;
  const json& reg = need(doc, "regime", "model");
  if (!reg.is_string()) bad("regime", "expected a string");
  m.regime = wrap("regime", [&] { return parse_regime(reg.get<std::string>()); });
  const int min_coords = m.regime == Regime::Plane ? 2 : 3;

  const json& nodes = need(doc, "nodes", "model");
  if (!nodes.is_array()) bad("nodes", "expected a list");
  for (size_t i = 0; i < nodes.size(); ++i) m.nodes.push_back(vec3(nodes[i], "nodes[" + std::to_string(i) + "]", min_coords));

  const json& els = need(doc, "elements", "model");
  if (!els.is_array()) bad("elements", "expected a list");
  for (size_t e = 0; e < els.size(); ++e) {
    const std::string w = "elements[" + std::to_string(e) + "]";
    const json& j = els[e];
    ElementSpec s;
    const json& kind = need(j, "kind", w);
    if (!kind.is_string()) bad(w + ".kind", "expected a string");
    s.kind = wrap(w + ".kind", [&] { return parse_element_kind(kind.get<std::string>()); });
    const json& conn = need(j, "nodes", w);
    if (!conn.is_array()) bad(w + ".nodes", "expected a list");
    for (size_t k = 0; k < conn.size(); ++k) s.nodes.push_back(index(conn[k], w + ".nodes[" + std::to_string(k) + "]"));
    s.mat.E = number(need(j, "E", w), w + ".E");
    if (j.contains("nu")) s.mat.nu = number(j["nu"], w + ".nu");
    if (j.contains("thickness")) s.mat.thickness = number(j["thickness"], w + ".thickness");
    if (j.contains("drill_factor")) s.mat.drill_factor = number(j["drill_factor"], w + ".drill_factor");
    if (j.contains("section")) {
      const json& sec = j["section"];
      const std::string ws = w + ".section";
      s.mat.section.A = number(need(sec, "A", ws), ws + ".A");
      s.mat.section.Iy = number(need(sec, "Iy", ws), ws + ".Iy");
      s.mat.section.Iz = number(need(sec, "Iz", ws), ws + ".Iz");
      s.mat.section.J = number(need(sec, "J", ws), ws + ".J");
    }
    if (j.contains("orientation")) s.orientation = vec3(j["orientation"], w + ".orientation", 3);
    if (j.contains("frame")) {
      if (!j["frame"].is_string()) bad(w + ".frame", "expected a string");
      s.frame = wrap(w + ".frame", [&] { return parse_frame(j["frame"].get<std::string>(), s.kind); });
    } else {
      s.frame = default_frame(s.kind);
    }
    m.elements.push_back(s);
  }

  if (doc.contains("fixed")) {
    const json& fx = doc["fixed"];
    if (!fx.is_array()) bad("fixed", "expected a list");
    for (size_t k = 0; k < fx.size(); ++k) {
      const std::string w = "fixed[" + std::to_string(k) + "]";
      const int node = index(need(fx[k], "node", w), w + ".node");
      const json& dofs = need(fx[k], "dofs", w);
      const double value = fx[k].contains("value") ? number(fx[k]["value"], w + ".value") : 0.0;
      std::vector<int> list;
      if (dofs.is_string() && dofs.get<std::string>() == "all") {
        for (int d = 0; d < dofs_per_node(m.regime); ++d) list.push_back(d);
      } else {
        if (!dofs.is_array()) bad(w + ".dofs", "expected a list or \"all\"");
        for (size_t d = 0; d < dofs.size(); ++d) list.push_back(dof_index(dofs[d], m.regime, w + ".dofs"));
      }
      for (int d : list) m.fixed.push_back({node, d, value});
    }
  }

  if (doc.contains("loads")) {
    const json& ld = doc["loads"];
    if (!ld.is_array()) bad("loads", "expected a list");
    for (size_t k = 0; k < ld.size(); ++k) {
      const std::string w = "loads[" + std::to_string(k) + "]";
      const json& j = ld[k];
      const bool constant = j.contains("constant") && j["constant"].is_boolean() && j["constant"].get<bool>();
      if (j.contains("edge")) {
        const json& edge = j["edge"];
        if (!edge.is_array() || edge.size() != 2) bad(w + ".edge", "expected two node indices");
        EdgeLoad e;
        e.n1 = index(edge[0], w + ".edge[0]");
        e.n2 = index(edge[1], w + ".edge[1]");
        e.traction = vec3(need(j, "traction", w), w + ".traction", min_coords);
        e.constant = constant;
        m.edge_loads.push_back(e);
      } else {
        NodalLoad l;
        l.node = index(need(j, "node", w), w + ".node");
        const json& v = need(j, "vector", w);
        if (!v.is_array() || static_cast<int>(v.size()) != dofs_per_node(m.regime))
          bad(w + ".vector", "expected " + std::to_string(dofs_per_node(m.regime)) + " numbers");
        l.vector.resize(v.size());
        for (size_t q = 0; q < v.size(); ++q) l.vector(q) = number(v[q], w + ".vector");
        l.constant = constant;
        m.loads.push_back(l);
      }
    }
  }

  if (doc.contains("monitors")) {
    const json& mon = doc["monitors"];
    if (!mon.is_array()) bad("monitors", "expected a list");
    for (size_t k = 0; k < mon.size(); ++k) {
      const std::string w = "monitors[" + std::to_string(k) + "]";
      Monitor mo;
      mo.node = index(need(mon[k], "node", w), w + ".node");
      mo.dof = dof_index(need(mon[k], "dof", w), m.regime, w + ".dof");
      m.monitors.push_back(mo);
    }
  }
  m.validate();
  return m;
}

Model read_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

std::string write_model(const Model& m) {
  json doc;
  doc["regime"] = to_string(m.regime);
  const int nc = m.regime == Regime::Plane ? 2 : 3;
  doc["nodes"] = json::array();
  for (const auto& x : m.nodes) {
    json p = json::array();
    for (int k = 0; k < nc; ++k) p.push_back(x(k));
    doc["nodes"].push_back(p);
  }
  doc["elements"] = json::array();
  for (const auto& e : m.elements) {
    json j;
    j["kind"] = to_string(e.kind);
    j["nodes"] = e.nodes;
    j["E"] = e.mat.E;
    j["nu"] = e.mat.nu;
    j["thickness"] = e.mat.thickness;
    j["drill_factor"] = e.mat.drill_factor;
    if (e.kind == ElementKind::Beam2)
      j["section"] = {{"A", e.mat.section.A}, {"Iy", e.mat.section.Iy}, {"Iz", e.mat.section.Iz}, {"J", e.mat.section.J}};
    if (e.orientation) j["orientation"] = {e.orientation->x(), e.orientation->y(), e.orientation->z()};
    j["frame"] = frame_name(e.frame);
    doc["elements"].push_back(j);
  }
  const auto labels = dof_labels(m.regime);
  doc["fixed"] = json::array();
  for (const auto& f : m.fixed) doc["fixed"].push_back({{"node", f.node}, {"dofs", {labels[f.dof]}}, {"value", f.value}});
  doc["loads"] = json::array();
  for (const auto& l : m.loads) {
    json j{{"node", l.node}, {"vector", std::vector<double>(l.vector.data(), l.vector.data() + l.vector.size())}};
    if (l.constant) j["constant"] = true;
    doc["loads"].push_back(j);
  }
  for (const auto& l : m.edge_loads) {
    json t = json::array();
    for (int k = 0; k < nc; ++k) t.push_back(l.traction(k));
    json j{{"edge", {l.n1, l.n2}}, {"traction", t}};
    if (l.constant) j["constant"] = true;
    doc["loads"].push_back(j);
  }
  doc["monitors"] = json::array();
  for (const auto& mo : m.monitors) doc["monitors"].push_back({{"node", mo.node}, {"dof", labels[mo.dof]}});
  return doc.dump(1);
}

void save_model(const Model& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  out << write_model(m) << "\n";
}

}  // namespace crfc
