#include "dlorenz/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <omp.h>

#include "dlorenz/atlas.hpp"
#include "dlorenz/core_maps.hpp"
#include "dlorenz/io.hpp"
#include "dlorenz/lyapunov.hpp"
#include "dlorenz/model_config.hpp"
#include "dlorenz/rescaling.hpp"

namespace dlorenz::cli {

using nlohmann::json;

int default_threads() {
  if (const char* env = std::getenv("DLORENZ_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return 0;
}

namespace {

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(v))
      throw Error(ErrorKind::Config, what + ": cannot parse '" + item + "' as a number");
    out.push_back(v);
  }
  return out;
}

std::vector<double> parse_list(const std::string& s, const std::string& what, std::size_t n) {
  auto v = parse_list(s, what);
  if (v.size() != n)
    throw Error(ErrorKind::Config, what + ": expected " + std::to_string(n) + " comma-separated values");
  return v;
}

State3 parse_state(const std::string& s, const std::string& what) {
  const auto v = parse_list(s, what, 3);
  return {v[0], v[1], v[2]};
}

int resolved_threads(int t) { return t > 0 ? t : omp_get_max_threads(); }

int exit_for(ErrorKind k) {
  return k == ErrorKind::Escape || k == ErrorKind::Overflow ? kExitEscape : kExitInput;
}

void write_manifest(const std::string& out, const std::string& command, json config, std::uint64_t seed,
                    std::vector<std::string> artifacts, int threads, const std::vector<std::string>& args) {
  RunManifest m;
  m.command = command;
  config["argv"] = args;
  m.config = std::move(config);
  m.seed = seed;
  m.artifacts = std::move(artifacts);
  m.tool_version = DLORENZ_VERSION;
  m.threads = resolved_threads(threads);
  write_text_file(out + ".manifest.json", manifest_json(m).dump(2) + "\n");
}

/// Ensures the output prefix is writable before any long computation.
void probe_output(const std::string& path) { write_text_file(path, ""); }

// ---------------------------------------------------------------------------
// Map selection shared by orbit and lyapunov.

struct MapOptions {
  std::string map = "henon3d";
  std::string params;
  std::string x0;
  std::string model;
  std::string tcase = "I";
  int k = 0;
};

struct SelectedMap {
  AnyMap map;
  int dims = 3;
  std::vector<double> params;
  std::optional<double> log_abs_det;  ///< constant ln|det Df| when known
  State3 default_x0{};
};

Model model_for(const std::string& path, TangencyCase c) {
  if (!path.empty()) return load_model(path);
  return default_model(c == TangencyCase::CaseII ? TangencyCase::CaseII : TangencyCase::CaseI);
}

SelectedMap select_map(const MapOptions& o) {
  SelectedMap sel;
  const auto& name = o.map;
  if (name == "henon3d" || name == "henon3d-inv" || name == "limit1" || name == "limit2" ||
      name == "diagonal") {
    sel.params = parse_list(o.params, "--params", 3);
  } else if (name == "mira") {
    sel.params = parse_list(o.params, "--params", 2);
  } else if (name == "model-return") {
    sel.params = o.params.empty() ? std::vector<double>{0.0, 0.0, 0.0} : parse_list(o.params, "--params", 3);
  } else {
    throw Error(ErrorKind::Config, "unknown map '" + name + "'");
  }
  const auto& p = sel.params;

  if (name == "henon3d") {
    const HenonParams hp{p[0], p[1], p[2]};
    sel.map = AnyMap::from(HenonMap{hp});
    sel.log_abs_det = std::log(std::abs(hp.B));
    SweepConfig policy;
    sel.default_x0 = initial_condition(hp, policy, 0);
  } else if (name == "henon3d-inv") {
    const HenonParams hp{p[0], p[1], p[2]};
    const InverseHenonParams ip = hatted_params(hp);
    sel.map = AnyMap::from(InverseHenonMap{ip});
    sel.log_abs_det = std::log(std::abs(ip.Bhat));
    sel.default_x0 = to_inverse_coords(initial_condition(hp, SweepConfig{}, 0), hp.B);
  } else if (name == "limit1" || name == "limit2") {
    const TangencyCase c = name == "limit1" ? TangencyCase::CaseI : TangencyCase::CaseII;
    if (c == TangencyCase::CaseI)
      sel.map = AnyMap::from(LimitMap1{p[0], p[1], p[2]});
    else
      sel.map = AnyMap::from(LimitMap2{p[0], p[1], p[2]});
    sel.log_abs_det = std::log(std::abs(p[2]));
    sel.default_x0 = limit_initial_condition(c, p[0], p[1], p[2], 1e-3);
  } else if (name == "diagonal") {
    sel.map = AnyMap::from(DiagonalLinearMap{{p[0], p[1], p[2]}});
    sel.log_abs_det = std::log(std::abs(p[0] * p[1] * p[2]));
    sel.default_x0 = {1.0, 1.0, 1.0};
  } else if (name == "mira") {
    const std::pair<double, double> m{p[0], p[1]};
    sel.dims = 2;
    sel.map.step_fn = [m](const State3& s) {
      const auto r = mira_step({s[0], s[1]}, m);
      return State3{r.first, r.second, 0.0};
    };
    sel.map.jacobian_fn = [m](const State3& s) {
      return Matrix3{{{0.0, 1.0, 0.0}, {-2.0 * s[0], m.second, 0.0}, {0.0, 0.0, 0.0}}};
    };
  } else {  // model-return
    const TangencyCase c = parse_case(o.tcase);
    Model m = model_for(o.model, c);
    if (c == TangencyCase::CaseI || c == TangencyCase::CaseII)
      m = apply_unfolding(m, UnfoldingParams{p[0], p[1], p[2]}, c);
    const FirstReturnMap T(o.k, m);
    sel.map.step_fn = [T](const State3& s) { return T.step(s); };
    sel.map.jacobian_fn = [T](const State3& s) { return T.jacobian(s); };
    const Box3& b = T.strip_box().box;
    for (std::size_t i = 0; i < 3; ++i) sel.default_x0[i] = 0.5 * (b.lo[i] + b.hi[i]);
  }
  return sel;
}

json map_config(const MapOptions& o, const SelectedMap& sel, const State3& x0) {
  json j{{"map", o.map}, {"params", sel.params}, {"x0", std::vector<double>(x0.begin(), x0.begin() + sel.dims)}};
  if (o.map == "model-return") {
    j["model"] = o.model;
    j["case"] = o.tcase;
    j["k"] = o.k;
  }
  return j;
}

State3 resolve_x0(const MapOptions& o, const SelectedMap& sel) {
  if (o.x0.empty()) return sel.default_x0;
  const auto v = parse_list(o.x0, "--x0");
  if (v.size() != static_cast<std::size_t>(sel.dims) && v.size() != 3)
    throw Error(ErrorKind::Config, "--x0: expected " + std::to_string(sel.dims) + " values");
  State3 s{};
  for (std::size_t i = 0; i < v.size() && i < 3; ++i) s[i] = v[i];
  if (sel.dims == 2) s[2] = 0.0;
  return s;
}

void add_map_options(CLI::App* sub, MapOptions& o) {
  sub->add_option("--map", o.map, "henon3d | henon3d-inv | mira | limit1 | limit2 | diagonal | model-return")
      ->capture_default_str();
  sub->add_option("--params", o.params,
                  "comma list: M1,M2,B (henon3d, henon3d-inv), M1h,M2h (mira), M1,M2,M3 (limit1/2), "
                  "l1,l2,l3 (diagonal), mu1,mu2,mu3 (model-return)");
  sub->add_option("--x0", o.x0, "initial state, comma separated");
  sub->add_option("--model", o.model, "model config (model-return)");
  sub->add_option("--case", o.tcase, "tangency case for model-return: I or II")->capture_default_str();
  sub->add_option("--k", o.k, "return index for model-return")->capture_default_str();
}

// ---------------------------------------------------------------------------

struct OrbitOptions {
  MapOptions map;
  std::size_t n = 100;
  std::size_t transient = 0;
  std::string out;
};

int cmd_orbit(const OrbitOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  const SelectedMap sel = select_map(o.map);
  const State3 x0 = resolve_x0(o.map, sel);
  const std::string csv = o.out + ".csv";
  probe_output(csv);

  State3 s = x0;
  std::vector<State3> rows;
  bool esc = false;
  std::size_t esc_at = 0;
  for (std::size_t i = 0; i < o.transient && !esc; ++i) {
    s = sel.map.step(s);
    if (escaped(s)) esc = true, esc_at = i + 1;
  }
  for (std::size_t i = 0; i < o.n && !esc; ++i) {
    if (i > 0) {
      s = sel.map.step(s);
      if (escaped(s)) {
        esc = true;
        esc_at = o.transient + i;
        break;
      }
    }
    rows.push_back(s);
  }
  write_text_file(csv, trajectory_csv(rows, sel.dims));
  json cfg = map_config(o.map, sel, x0);
  cfg["n"] = o.n;
  cfg["transient"] = o.transient;
  write_manifest(o.out, "orbit", cfg, 0, {csv}, 1, args);
  if (esc) {
    out << "orbit escaped at iterate " << esc_at << "; " << rows.size() << " rows written to " << csv << "\n";
    return kExitEscape;
  }
  out << rows.size() << " rows written to " << csv << "\n";
  return kExitOk;
}

struct LyapunovOptions {
  MapOptions map;
  std::size_t iters = 1000000;
  std::size_t transient = 10000;
  std::string out;
};

int cmd_lyapunov(const LyapunovOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  const SelectedMap sel = select_map(o.map);
  const State3 x0 = resolve_x0(o.map, sel);
  const std::string path = o.out + ".json";
  probe_output(path);
  json cfg = map_config(o.map, sel, x0);
  cfg["iters"] = o.iters;
  cfg["transient"] = o.transient;

  json rep{{"schema", kSpectrumSchema}, {"map", o.map.map}, {"params", sel.params}, {"x0", cfg["x0"]}};
  int code = kExitOk;
  if (sel.dims == 2) {
    try {
      const auto sp = mira_lyapunov_spectrum({sel.params[0], sel.params[1]}, {x0[0], x0[1]}, o.transient, o.iters);
      rep["escaped"] = false;
      rep["exponents"] = sp.exponents;
      rep["sum"] = sp.sum();
      rep["iterations"] = sp.iterations_used;
      rep["transient"] = sp.transient_discarded;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Escape) throw;
      rep["escaped"] = true;
      rep["message"] = e.what();
      code = kExitEscape;
    }
  } else {
    State3 s = x0;
    LyapunovSpectrum sp;
    const EscapeInfo e = lyapunov_spectrum_into(sel.map, s, o.transient, o.iters, sp);
    if (e.escaped) {
      rep["escaped"] = true;
      rep["escape_iteration"] = e.iteration;
      code = kExitEscape;
    } else {
      rep["escaped"] = false;
      rep.update(spectrum_json(sp));
      if (sel.log_abs_det) {
        rep["log_abs_det"] = *sel.log_abs_det;
        rep["sum_residual"] = std::abs(sp.sum() - *sel.log_abs_det);
      }
    }
  }
  write_text_file(path, rep.dump(2) + "\n");
  write_manifest(o.out, "lyapunov", cfg, 0, {path}, 1, args);
  if (code == kExitEscape) {
    out << "orbit escaped; partial report written to " << path << "\n";
  } else {
    out << "exponents:";
    for (const auto& v : rep["exponents"]) out << " " << format_double(v.get<double>());
    out << "\nsum: " << format_double(rep["sum"].get<double>()) << "\n";
  }
  return code;
}

struct AtlasOptions {
  std::string box = "-0.5,0.5,0.5,1.1,0.5,1.0";
  std::string steps = "50";
  std::size_t iters = 200000;
  std::size_t transient = 10000;
  double tolerance = 1e-3;
  std::uint64_t seed = 0;
  std::string ic = "fixed-point";
  std::string seed_point = "0,0,0";
  double ic_offset = 1e-3;
  double jitter = 0.0;
  std::string reference = "-0.25,1,1";
  double adjoin = 0.3;
  bool serial = false;
  int threads = 0;
  std::string out;
};

int cmd_atlas(const AtlasOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  const auto box = parse_list(o.box, "--box", 6);
  const auto steps = parse_list(o.steps, "--steps");
  if (steps.size() != 1 && steps.size() != 3)
    throw Error(ErrorKind::Config, "--steps: expected 1 or 3 values");
  auto step_at = [&](std::size_t i) {
    const double v = steps.size() == 1 ? steps[0] : steps[i];
    if (v != std::floor(v) || v < 1 || v > 1e6) throw Error(ErrorKind::Config, "--steps must be positive integers");
    return static_cast<int>(v);
  };
  SweepConfig cfg;
  cfg.M1 = {box[0], box[1], step_at(0)};
  cfg.M2 = {box[2], box[3], step_at(1)};
  cfg.B = {box[4], box[5], step_at(2)};
  cfg.iterations = o.iters;
  cfg.transient = o.transient;
  cfg.tolerance = o.tolerance;
  cfg.seed = o.seed;
  if (o.ic != "fixed-point" && o.ic != "seed") throw Error(ErrorKind::Config, "--ic must be fixed-point or seed");
  cfg.ic = o.ic == "seed" ? InitialCondition::SeedPoint : InitialCondition::FixedPointOffset;
  cfg.seed_point = parse_state(o.seed_point, "--seed-point");
  cfg.ic_offset = o.ic_offset;
  cfg.ic_jitter = o.jitter;
  cfg.threads = o.threads;
  cfg.validate();
  const State3 r = parse_state(o.reference, "--reference");
  const HenonParams ref{r[0], r[1], r[2]};

  const std::string csv = o.out + ".csv";
  const std::string regions = o.out + ".regions.json";
  probe_output(csv);
  probe_output(regions);

  const Atlas atlas = o.serial ? sweep_grid_serial(cfg) : sweep_grid(cfg);
  const auto comps = region_extract(atlas, is_lorenz_cell);
  write_text_file(csv, atlas_csv(atlas));
  write_text_file(regions, regions_json(atlas, comps, ref, o.adjoin).dump(2) + "\n");
  json jc = sweep_config_json(cfg);
  jc["reference"] = {ref.M1, ref.M2, ref.B};
  jc["adjoin"] = o.adjoin;
  jc["serial"] = o.serial;
  write_manifest(o.out, "atlas", jc, cfg.seed, {csv, regions}, o.serial ? 1 : o.threads, args);

  std::map<std::string, std::size_t> hist;
  for (const auto& c : atlas.cells) ++hist[to_string(c.cls.kind)];
  out << atlas.cells.size() << " cells\n";
  for (const auto& [k, v] : hist) out << "  " << k << ": " << v << "\n";
  out << comps.size() << " DiscreteLorenzCandidate components";
  if (!comps.empty())
    out << "; largest has " << comps.front().size() << " cells"
        << (comps.front().adjoins(ref, o.adjoin) ? " and adjoins the reference point" : "");
  out << "\n";
  return kExitOk;
}

struct RescaleOptions {
  std::string tcase;
  int kmin = 10;
  int kmax = 24;
  std::string targets = "0,0";
  std::string model;
  double mu3 = 0.0;
  int grid = 5;
  double box_half = 1.0;
  double fd_step = 1e-5;
  double band = 0.15;
  std::string inversion = "corrected";
  bool sabotage = false;
  bool serial = false;
  int threads = 0;
  std::string out;
};

int cmd_rescale_verify(const RescaleOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  Model base;
  TangencyCase c;
  if (!o.model.empty()) {
    base = load_model(o.model);
    c = o.tcase.empty() ? base.declared_case : parse_case(o.tcase);
  } else {
    c = parse_case(o.tcase.empty() ? "I" : o.tcase);
    base = model_for("", c);
  }
  const auto t = parse_list(o.targets, "--targets", 2);
  if (o.inversion != "corrected" && o.inversion != "leading")
    throw Error(ErrorKind::Config, "--inversion must be corrected or leading");
  if (o.grid < 1) throw Error(ErrorKind::Config, "--grid must be >= 1");
  ConvergenceOptions opt;
  opt.mu3 = o.mu3;
  opt.box_half = o.box_half;
  opt.grid_per_axis = o.grid;
  opt.fd_step = o.fd_step;
  opt.inversion = o.inversion == "leading" ? ParameterInversion::LeadingOrder : ParameterInversion::Corrected;
  opt.sabotage = o.sabotage ? 1.5 : 1.0;
  opt.threads = o.threads;

  const std::string jpath = o.out + ".json";
  const std::string cpath = o.out + ".csv";
  probe_output(jpath);
  probe_output(cpath);
  const LimitTargets targets{t[0], t[1]};
  const RescalingReport rep = o.serial ? convergence_report_serial(o.kmin, o.kmax, targets, c, base, opt)
                                       : convergence_report(o.kmin, o.kmax, targets, c, base, opt);
  const bool pass = std::isfinite(rep.fitted_rate) && std::abs(rep.fitted_rate - rep.predicted_rate) <= o.band;
  json jr = rescaling_json(rep);
  jr["rate_band"] = o.band;
  jr["verified"] = pass;
  write_text_file(jpath, jr.dump(2) + "\n");
  write_text_file(cpath, rescaling_csv(rep));
  json cfg{{"case", to_string(c)},  {"kmin", o.kmin},         {"kmax", o.kmax},
           {"targets", t},          {"model", o.model},       {"model_config", model_to_json(base)},
           {"mu3", o.mu3},          {"grid", o.grid},         {"box_half", o.box_half},
           {"fd_step", o.fd_step},  {"rate_band", o.band},    {"inversion", o.inversion},
           {"sabotage", o.sabotage}, {"serial", o.serial}};
  write_manifest(o.out, "rescale-verify", cfg, 0, {jpath, cpath}, o.serial ? 1 : o.threads, args);

  out << "case " << to_string(c) << ", k = " << o.kmin << ".." << o.kmax << "\n";
  out << "fitted rate " << format_double(rep.fitted_rate) << ", predicted " << format_double(rep.predicted_rate)
      << ", band +-" << format_double(o.band) << "\n";
  out << (pass ? "verified" : "verification FAILED") << "\n";
  return pass ? kExitOk : kExitVerification;
}

struct ClassifyOptions {
  std::string model;
  std::string out;
};

int cmd_classify_model(const ClassifyOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  const Model m = load_model(o.model, false);
  const std::string path = o.out + ".json";
  probe_output(path);
  const TangencyCase c = classify_tangency(m.global);
  const auto& s = m.saddle;
  const bool cond_a = std::abs(s.lambda2) > 0.0 && std::abs(s.lambda2) < std::abs(s.lambda1) &&
                      std::abs(s.lambda1) < 1.0 && std::abs(s.gamma) > 1.0;
  const double j = s.jacobian();
  const bool cond_b = std::abs(j - 1.0) <= 1e-12;
  const double det = m.global.jacobian();
  const bool diffeo = std::abs(det) > 1e-12;

  out << to_string(c) << "\n";
  out << "condition A (0<|l2|<|l1|<1<|gamma|): " << (cond_a ? "satisfied" : "violated") << "\n";
  out << "condition B (lambda1*lambda2*gamma = 1): " << (cond_b ? "satisfied" : "violated") << " ("
      << format_double(j) << ")\n";
  out << "global map determinant: " << format_double(det) << (diffeo ? "" : " (singular)") << "\n";

  const json rep{{"schema", kClassificationSchema},
                 {"case", to_string(c)},
                 {"condition_A", cond_a},
                 {"condition_B", cond_b},
                 {"saddle_jacobian", j},
                 {"global_determinant", det}};
  write_text_file(path, rep.dump(2) + "\n");
  write_manifest(o.out, "classify-model", {{"model", o.model}, {"model_config", model_to_json(m)}}, 0, {path}, 1,
                 args);
  return kExitOk;
}

struct DeltaKOptions {
  std::string tcase = "I";
  std::string ks = "18";
  std::string m1 = "-0.5,0.5,20";
  std::string m2 = "0.5,1.1,20";
  double mu3 = 0.0;
  std::optional<double> target_m3;
  std::size_t iters = 200000;
  std::size_t transient = 10000;
  double tolerance = 1e-3;
  std::string model;
  double min_agreement = 0.0;
  bool serial = false;
  int threads = 0;
  std::string out;
};

AxisRange parse_axis(const std::string& s, const std::string& what) {
  const auto v = parse_list(s, what, 3);
  if (v[2] != std::floor(v[2]) || v[2] < 1) throw Error(ErrorKind::Config, what + ": steps must be a positive integer");
  return {v[0], v[1], static_cast<int>(v[2])};
}

int cmd_delta_k(const DeltaKOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  DeltaKConfig cfg;
  cfg.tcase = parse_case(o.tcase);
  cfg.ks.clear();
  for (double k : parse_list(o.ks, "--k")) {
    if (k != std::floor(k)) throw Error(ErrorKind::Config, "--k: integers expected");
    cfg.ks.push_back(static_cast<int>(k));
  }
  cfg.M1 = parse_axis(o.m1, "--m1");
  cfg.M2 = parse_axis(o.m2, "--m2");
  cfg.mu3 = o.mu3;
  cfg.target_M3 = o.target_m3;
  cfg.iterations = o.iters;
  cfg.transient = o.transient;
  cfg.tolerance = o.tolerance;
  cfg.threads = o.threads;
  cfg.validate();
  const Model base = model_for(o.model, cfg.tcase);

  const std::string jpath = o.out + ".json";
  const std::string cpath = o.out + ".csv";
  probe_output(jpath);
  probe_output(cpath);
  const DeltaKReport rep = o.serial ? delta_k_scan_serial(cfg, base) : delta_k_scan(cfg, base);
  bool pass = true;
  for (const auto& s : rep.slices) pass = pass && s.agreement >= o.min_agreement;
  json jr = delta_k_json(rep);
  jr["min_agreement"] = o.min_agreement;
  jr["verified"] = pass;
  write_text_file(jpath, jr.dump(2) + "\n");
  write_text_file(cpath, delta_k_csv(rep));
  json jc{{"case", to_string(cfg.tcase)}, {"k", cfg.ks},          {"m1", o.m1},
          {"m2", o.m2},                   {"mu3", o.mu3},         {"iters", o.iters},
          {"transient", o.transient},     {"tolerance", o.tolerance}, {"model", o.model},
          {"model_config", model_to_json(base)}, {"min_agreement", o.min_agreement}, {"serial", o.serial}};
  jc["target_m3"] = o.target_m3 ? json(*o.target_m3) : json(nullptr);
  write_manifest(o.out, "delta-k", jc, 0, {jpath, cpath}, o.serial ? 1 : o.threads, args);

  for (const auto& s : rep.slices)
    out << "k=" << s.k << " M3=" << format_double(s.M3) << " agreement=" << format_double(s.agreement)
        << " candidates(limit/rescaled/shared)=" << s.limit_candidates << "/" << s.rescaled_candidates << "/"
        << s.shared_candidates << "\n";
  return pass ? kExitOk : kExitVerification;
}

/// Drops `--name value` and `--name=value` occurrences.
std::vector<std::string> strip_option(const std::vector<std::string>& args, const std::string& name) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == name) {
      ++i;
      continue;
    }
    if (args[i].rfind(name + "=", 0) == 0) continue;
    out.push_back(args[i]);
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerics for discrete Lorenz-like attractors of three-dimensional Henon maps", "dlorenz"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(DLORENZ_VERSION));

  OrbitOptions orbit;
  auto* s_orbit = app.add_subcommand("orbit", "iterate a map and write the trajectory as CSV");
  add_map_options(s_orbit, orbit.map);
  s_orbit->add_option("--n", orbit.n, "rows to write")->capture_default_str();
  s_orbit->add_option("--transient", orbit.transient, "iterations discarded first")->capture_default_str();
  s_orbit->add_option("--out", orbit.out, "output prefix")->required();

  LyapunovOptions lyap;
  auto* s_lyap = app.add_subcommand("lyapunov", "Lyapunov spectrum of a map as JSON");
  add_map_options(s_lyap, lyap.map);
  s_lyap->add_option("--iters", lyap.iters)->capture_default_str();
  s_lyap->add_option("--transient", lyap.transient)->capture_default_str();
  s_lyap->add_option("--out", lyap.out, "output prefix")->required();

  AtlasOptions atlas;
  atlas.threads = default_threads();
  auto* s_atlas = app.add_subcommand("atlas", "attractor classification sweep over (M1, M2, B)");
  s_atlas->add_option("--box", atlas.box, "M1min,M1max,M2min,M2max,Bmin,Bmax")->capture_default_str();
  s_atlas->add_option("--steps", atlas.steps, "grid steps, one value or three")->capture_default_str();
  s_atlas->add_option("--iters", atlas.iters)->capture_default_str();
  s_atlas->add_option("--transient", atlas.transient)->capture_default_str();
  s_atlas->add_option("--tolerance", atlas.tolerance)->capture_default_str();
  s_atlas->add_option("--seed", atlas.seed)->capture_default_str();
  s_atlas->add_option("--ic", atlas.ic, "fixed-point | seed")->capture_default_str();
  s_atlas->add_option("--seed-point", atlas.seed_point)->capture_default_str();
  s_atlas->add_option("--ic-offset", atlas.ic_offset)->capture_default_str();
  s_atlas->add_option("--jitter", atlas.jitter, "seeded uniform jitter of the start point")->capture_default_str();
  s_atlas->add_option("--reference", atlas.reference)->capture_default_str();
  s_atlas->add_option("--adjoin", atlas.adjoin)->capture_default_str();
  s_atlas->add_flag("--serial", atlas.serial, "use the single-threaded reference sweep");
  s_atlas->add_option("--threads", atlas.threads, "0: OpenMP default or DLORENZ_THREADS");
  s_atlas->add_option("--out", atlas.out, "output prefix")->required();

  RescaleOptions resc;
  resc.threads = default_threads();
  auto* s_resc = app.add_subcommand("rescale-verify", "convergence of rescaled first-return maps");
  s_resc->add_option("--case", resc.tcase, "I | II (default: the model's case)");
  s_resc->add_option("--kmin", resc.kmin)->capture_default_str();
  s_resc->add_option("--kmax", resc.kmax)->capture_default_str();
  s_resc->add_option("--targets", resc.targets, "M1,M2")->capture_default_str();
  s_resc->add_option("--model", resc.model, "model config path");
  s_resc->add_option("--mu3", resc.mu3)->capture_default_str();
  s_resc->add_option("--grid", resc.grid, "grid points per axis")->capture_default_str();
  s_resc->add_option("--box-half", resc.box_half)->capture_default_str();
  s_resc->add_option("--fd-step", resc.fd_step)->capture_default_str();
  s_resc->add_option("--rate-band", resc.band, "allowed |fitted - predicted|")->capture_default_str();
  s_resc->add_option("--inversion", resc.inversion, "corrected | leading")->capture_default_str();
  s_resc->add_flag("--sabotage", resc.sabotage, "break the Y scaling (negative control)");
  s_resc->add_flag("--serial", resc.serial, "single-threaded reference");
  s_resc->add_option("--threads", resc.threads);
  s_resc->add_option("--out", resc.out, "output prefix")->required();

  ClassifyOptions cls;
  auto* s_cls = app.add_subcommand("classify-model", "tangency case and saddle conditions of a model");
  s_cls->add_option("--model", cls.model, "model config path")->required();
  s_cls->add_option("--out", cls.out, "output prefix")->required();

  DeltaKOptions dk;
  dk.threads = default_threads();
  auto* s_dk = app.add_subcommand("delta-k", "classify rescaled return maps over a target grid");
  s_dk->add_option("--case", dk.tcase)->capture_default_str();
  s_dk->add_option("--k", dk.ks, "comma list of k")->capture_default_str();
  s_dk->add_option("--m1", dk.m1, "min,max,steps")->capture_default_str();
  s_dk->add_option("--m2", dk.m2, "min,max,steps")->capture_default_str();
  s_dk->add_option("--mu3", dk.mu3)->capture_default_str();
  s_dk->add_option("--target-m3", dk.target_m3, "tune mu3 per k so that M3 hits this value");
  s_dk->add_option("--iters", dk.iters)->capture_default_str();
  s_dk->add_option("--transient", dk.transient)->capture_default_str();
  s_dk->add_option("--tolerance", dk.tolerance)->capture_default_str();
  s_dk->add_option("--model", dk.model);
  s_dk->add_option("--min-agreement", dk.min_agreement, "exit 3 below this agreement")->capture_default_str();
  s_dk->add_flag("--serial", dk.serial);
  s_dk->add_option("--threads", dk.threads);
  s_dk->add_option("--out", dk.out, "output prefix")->required();

  std::string manifest_path, replay_out;
  auto* s_replay = app.add_subcommand("replay", "re-run a manifest single-threaded");
  s_replay->add_option("--manifest", manifest_path)->required();
  s_replay->add_option("--out", replay_out, "output prefix for the re-run")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << DLORENZ_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (s_orbit->parsed()) return cmd_orbit(orbit, args, out);
    if (s_lyap->parsed()) return cmd_lyapunov(lyap, args, out);
    if (s_atlas->parsed()) return cmd_atlas(atlas, args, out);
    if (s_resc->parsed()) return cmd_rescale_verify(resc, args, out);
    if (s_cls->parsed()) return cmd_classify_model(cls, args, out);
    if (s_dk->parsed()) return cmd_delta_k(dk, args, out);
    if (s_replay->parsed()) {
      const RunManifest m = manifest_from_json(json::parse(read_text_file(manifest_path)));
      auto argv = m.config.at("argv").get<std::vector<std::string>>();
      argv = strip_option(strip_option(argv, "--out"), "--threads");
      argv.push_back("--out");
      argv.push_back(replay_out);
      if (m.command == "atlas" || m.command == "rescale-verify" || m.command == "delta-k") {
        argv.push_back("--threads");
        argv.push_back("1");
      }
      return run(argv, out, err);
    }
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_for(e.kind());
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace dlorenz::cli
