#include "dlorenz/model_config.hpp"

#include <fstream>

namespace dlorenz {

using nlohmann::json;

TangencyCase parse_case(const std::string& s) {
  if (s == "I" || s == "CaseI" || s == "1") return TangencyCase::CaseI;
  if (s == "II" || s == "CaseII" || s == "2") return TangencyCase::CaseII;
  if (s == "Simple") return TangencyCase::Simple;
  if (s == "Degenerate") return TangencyCase::Degenerate;
  throw Error(ErrorKind::Config, "unknown tangency case '" + s + "'");
}

namespace {

void read_number(const json& obj, const char* key, double& dst) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw Error(ErrorKind::Config, std::string("field '") + key + "' must be a number");
  dst = v.get<double>();
}

State3 read_triple(const json& v, const char* what) {
  if (v.is_number()) {
    const double x = v.get<double>();
    return {x, x, x};
  }
  if (!v.is_array() || v.size() != 3)
    throw Error(ErrorKind::Config, std::string(what) + " must be a number or a 3-array");
  State3 out{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!v[i].is_number()) throw Error(ErrorKind::Config, std::string(what) + " entries must be numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

}  // namespace

Model model_from_json(const json& j, bool validate) {
  try {
    if (!j.is_object()) throw Error(ErrorKind::Config, "model config must be a JSON object");
    if (j.contains("schema") && j.at("schema") != kModelSchema)
      throw Error(ErrorKind::Config, "unsupported model schema " + j.at("schema").dump());
    TangencyCase c = TangencyCase::CaseI;
    if (j.contains("case")) c = parse_case(j.at("case").get<std::string>());
    Model m = default_model(c == TangencyCase::CaseII ? TangencyCase::CaseII : TangencyCase::CaseI);
    m.declared_case = c;

    if (j.contains("saddle")) {
      const auto& s = j.at("saddle");
      read_number(s, "lambda1", m.saddle.lambda1);
      read_number(s, "lambda2", m.saddle.lambda2);
      read_number(s, "gamma", m.saddle.gamma);
    }
    if (j.contains("global")) {
      const auto& g = j.at("global");
      auto& o = m.global;
      read_number(g, "a11", o.a11);
      read_number(g, "a12", o.a12);
      read_number(g, "a21", o.a21);
      read_number(g, "a22", o.a22);
      read_number(g, "b1", o.b1);
      read_number(g, "b2", o.b2);
      read_number(g, "c1", o.c1);
      read_number(g, "c2", o.c2);
      read_number(g, "d", o.d);
      read_number(g, "x1plus", o.x1plus);
      read_number(g, "x2plus", o.x2plus);
      read_number(g, "yminus", o.yminus);
      read_number(g, "yplus", o.yplus);
    }
    if (j.contains("tails")) {
      const auto& t = j.at("tails");
      if (t.contains("quadratic")) {
        const auto& q = t.at("quadratic");
        if (!q.is_array() || q.size() != 3)
          throw Error(ErrorKind::Config, "tails.quadratic must hold three 3x3 matrices");
        for (std::size_t i = 0; i < 3; ++i) {
          if (!q[i].is_array() || q[i].size() != 3)
            throw Error(ErrorKind::Config, "tails.quadratic entries must be 3x3");
          for (std::size_t r = 0; r < 3; ++r) m.tails.quadratic[i][r] = read_triple(q[i][r], "tails row");
        }
      }
      if (t.contains("cubic_u")) m.tails.cubic_u = read_triple(t.at("cubic_u"), "tails.cubic_u");
    }
    if (j.contains("neighborhoods")) {
      const auto& n = j.at("neighborhoods");
      if (n.contains("pi_plus_halfwidth"))
        m.pi_plus_half = read_triple(n.at("pi_plus_halfwidth"), "pi_plus_halfwidth");
      if (n.contains("pi_minus_halfwidth"))
        m.pi_minus_half = read_triple(n.at("pi_minus_halfwidth"), "pi_minus_halfwidth");
    }
    if (validate) validate_model(m);
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("malformed model config: ") + e.what());
  }
}

json model_to_json(const Model& m) {
  const auto& g = m.global;
  json q = json::array();
  for (const auto& mat : m.tails.quadratic) {
    json rows = json::array();
    for (const auto& row : mat) rows.push_back(row);
    q.push_back(rows);
  }
  return {
      {"schema", kModelSchema},
      {"case", m.declared_case == TangencyCase::CaseII ? "II" : "I"},
      {"saddle", {{"lambda1", m.saddle.lambda1}, {"lambda2", m.saddle.lambda2}, {"gamma", m.saddle.gamma}}},
      {"global",
       {{"a11", g.a11}, {"a12", g.a12}, {"a21", g.a21}, {"a22", g.a22}, {"b1", g.b1},
        {"b2", g.b2}, {"c1", g.c1}, {"c2", g.c2}, {"d", g.d}, {"x1plus", g.x1plus},
        {"x2plus", g.x2plus}, {"yminus", g.yminus}, {"yplus", g.yplus}}},
      {"tails", {{"quadratic", q}, {"cubic_u", m.tails.cubic_u}}},
      {"neighborhoods",
       {{"pi_plus_halfwidth", m.pi_plus_half}, {"pi_minus_halfwidth", m.pi_minus_half}}},
  };
}

Model load_model(const std::string& path, bool validate) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open model config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, "cannot parse '" + path + "': " + e.what());
  }
  return model_from_json(j, validate);
}

}  // namespace dlorenz
