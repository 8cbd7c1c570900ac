#include "dlorenz/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dlorenz {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Config, "cannot write '" + path + "'");
  out << content;
  out.flush();
  if (!out) throw Error(ErrorKind::Config, "cannot write '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Config, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string schema_line(const char* schema) { return std::string("# schema=") + schema + "\n"; }

json params_json(const HenonParams& p) { return {{"M1", p.M1}, {"M2", p.M2}, {"B", p.B}}; }

json axis_json(const AxisRange& a) { return {{"min", a.min}, {"max", a.max}, {"steps", a.steps}}; }

AxisRange axis_from_json(const json& j) {
  return {j.at("min").get<double>(), j.at("max").get<double>(), j.at("steps").get<int>()};
}

}  // namespace

std::string trajectory_csv(const std::vector<State3>& states, int dims) {
  std::string s = schema_line(kTrajectoryCsvSchema);
  s += dims == 2 ? "i,y,z\n" : "i,x,y,z\n";
  for (std::size_t i = 0; i < states.size(); ++i) {
    s += std::to_string(i);
    for (int c = 0; c < dims; ++c) s += "," + format_double(states[i][static_cast<std::size_t>(c)]);
    s += "\n";
  }
  return s;
}

std::string atlas_csv(const Atlas& atlas) {
  std::string s = schema_line(kAtlasCsvSchema);
  s += "M1,M2,B,class,L1,L2,L3\n";
  for (const auto& c : atlas.cells) {
    const auto& e = c.cls.spectrum.exponents;
    s += format_double(c.params.M1) + "," + format_double(c.params.M2) + "," + format_double(c.params.B) +
         "," + to_string(c.cls.kind) + "," + format_double(e[0]) + "," + format_double(e[1]) + "," +
         format_double(e[2]) + "\n";
  }
  return s;
}

std::string rescaling_csv(const RescalingReport& rep) {
  std::string s = schema_line(kRescalingCsvSchema);
  s += "k,C0,C1,jac_residual\n";
  for (const auto& r : rep.records)
    s += std::to_string(r.k) + "," + format_double(r.c0) + "," + format_double(r.c1) + "," +
         format_double(r.jacobian_residual) + "\n";
  return s;
}

std::string delta_k_csv(const DeltaKReport& rep) {
  std::string s = schema_line(kDeltaKCsvSchema);
  s += "k,M1,M2,M3,limit_class,rescaled_class,limit_L1,rescaled_L1\n";
  for (const auto& sl : rep.slices)
    for (const auto& c : sl.cells)
      s += std::to_string(sl.k) + "," + format_double(c.M1) + "," + format_double(c.M2) + "," +
           format_double(c.M3) + "," + to_string(c.limit.kind) + "," + to_string(c.rescaled.kind) + "," +
           format_double(c.limit.spectrum.exponents[0]) + "," +
           format_double(c.rescaled.spectrum.exponents[0]) + "\n";
  return s;
}

json spectrum_json(const LyapunovSpectrum& spec) {
  return {{"exponents", spec.exponents},
          {"sum", spec.sum()},
          {"iterations", spec.iterations_used},
          {"transient", spec.transient_discarded}};
}

json sweep_config_json(const SweepConfig& cfg) {
  return {{"M1", axis_json(cfg.M1)},
          {"M2", axis_json(cfg.M2)},
          {"B", axis_json(cfg.B)},
          {"transient", cfg.transient},
          {"iterations", cfg.iterations},
          {"tolerance", cfg.tolerance},
          {"recurrence_tol", cfg.recurrence_tol},
          {"max_period", cfg.max_period},
          {"ic", cfg.ic == InitialCondition::FixedPointOffset ? "fixed-point" : "seed"},
          {"ic_offset", cfg.ic_offset},
          {"seed_point", cfg.seed_point},
          {"seed", cfg.seed},
          {"ic_jitter", cfg.ic_jitter}};
}

SweepConfig sweep_config_from_json(const json& j) {
  try {
    SweepConfig c;
    c.M1 = axis_from_json(j.at("M1"));
    c.M2 = axis_from_json(j.at("M2"));
    c.B = axis_from_json(j.at("B"));
    c.transient = j.at("transient").get<std::size_t>();
    c.iterations = j.at("iterations").get<std::size_t>();
    c.tolerance = j.at("tolerance").get<double>();
    c.recurrence_tol = j.at("recurrence_tol").get<double>();
    c.max_period = j.at("max_period").get<int>();
    c.ic = j.at("ic").get<std::string>() == "seed" ? InitialCondition::SeedPoint
                                                   : InitialCondition::FixedPointOffset;
    c.ic_offset = j.at("ic_offset").get<double>();
    c.seed_point = j.at("seed_point").get<State3>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.ic_jitter = j.at("ic_jitter").get<double>();
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("malformed sweep config: ") + e.what());
  }
}

json regions_json(const Atlas& atlas, const std::vector<Component>& comps, const HenonParams& reference,
                  double adjoin_distance) {
  json list = json::array();
  for (const auto& c : comps) {
    const auto d = c.distance_to(reference);
    list.push_back({{"size", c.size()},
                    {"lo", params_json(c.lo)},
                    {"hi", params_json(c.hi)},
                    {"index_lo", c.index_lo},
                    {"index_hi", c.index_hi},
                    {"distance_to_reference", d},
                    {"adjoins_reference", c.adjoins(reference, adjoin_distance)}});
  }
  const BoundaryStats bs = boundary_fraction(atlas, is_lorenz_cell);
  const EscapeMonotonicity em = escape_monotonicity(atlas);
  return {{"schema", kRegionsSchema},
          {"predicate", "DiscreteLorenzCandidate"},
          {"connectivity", 6},
          {"reference", params_json(reference)},
          {"adjoin_distance", adjoin_distance},
          {"components", list},
          {"boundary", {{"matching", bs.matching}, {"boundary", bs.boundary}, {"fraction", bs.fraction()}}},
          {"escape_monotonicity",
           {{"rows", em.rows}, {"monotone_rows", em.monotone_rows}, {"fraction", em.fraction()}}}};
}

json rescaling_json(const RescalingReport& rep) {
  json recs = json::array();
  for (const auto& r : rep.records)
    recs.push_back({{"k", r.k},
                    {"C0_deviation", r.c0},
                    {"C1_deviation", r.c1},
                    {"jacobian_residual", r.jacobian_residual},
                    {"det_at_origin", r.det_at_origin},
                    {"reference_det", r.reference_det},
                    {"M3", r.M3},
                    {"saddle_jacobian", r.saddle_jacobian},
                    {"coverage", r.coverage},
                    {"mu", {r.mu1, r.mu2, r.mu3}}});
  return {{"schema", kRescalingSchema},
          {"case", to_string(rep.tcase)},
          {"targets", {{"M1", rep.targets.M1}, {"M2", rep.targets.M2}}},
          {"mu3", rep.mu3},
          {"records", recs},
          {"fitted_rate", rep.fitted_rate},
          {"predicted_rate", rep.predicted_rate},
          {"fit_points", rep.fit_points},
          {"k_cap", rep.k_cap}};
}

json delta_k_json(const DeltaKReport& rep) {
  json slices = json::array();
  for (const auto& s : rep.slices)
    slices.push_back({{"k", s.k},
                      {"mu3", s.mu3},
                      {"M3", s.M3},
                      {"agreement", s.agreement},
                      {"limit_candidates", s.limit_candidates},
                      {"rescaled_candidates", s.rescaled_candidates},
                      {"shared_candidates", s.shared_candidates},
                      {"candidate_region_reproduced", s.candidate_region_reproduced}});
  const auto& c = rep.cfg;
  return {{"schema", kDeltaKSchema},
          {"case", to_string(c.tcase)},
          {"M1", axis_json(c.M1)},
          {"M2", axis_json(c.M2)},
          {"slices", slices}};
}

json manifest_json(const RunManifest& m) {
  return {{"schema", kManifestSchema},
          {"command", m.command},
          {"config", m.config},
          {"seed", m.seed},
          {"artifacts", m.artifacts},
          {"tool_version", m.tool_version},
          {"threads", m.threads}};
}

RunManifest manifest_from_json(const json& j) {
  try {
    if (j.at("schema") != kManifestSchema)
      throw Error(ErrorKind::Config, "unsupported manifest schema " + j.at("schema").dump());
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.config = j.at("config");
    m.seed = j.at("seed").get<std::uint64_t>();
    m.artifacts = j.at("artifacts").get<std::vector<std::string>>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.threads = j.at("threads").get<int>();
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("malformed manifest: ") + e.what());
  }
}

}  // namespace dlorenz
