#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "dlorenz/cli.hpp"
#include "dlorenz/io.hpp"

using namespace dlorenz;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string data = DLORENZ_TEST_DATA;

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  return {code, o.str(), e.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("dlorenz_cli_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::size_t data_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') ++n;
  return n - 1;  // header
}

std::string slurp(const std::string& p) { return read_text_file(p); }

}  // namespace

TEST_CASE("orbit") {
  TempDir t;
  auto r = run({"orbit", "--map", "henon3d", "--params", "-0.25,1,1", "--x0", "0.5,0.5,0.5", "--n", "10", "--out",
                t / "fp"});
  CHECK(r.code == 0);
  const std::string csv = slurp(t / "fp.csv");
  CHECK(data_rows(csv) == 10);
  CHECK(csv.find("9,0.5,0.5,0.5\n") != std::string::npos);
  CHECK(csv.find("0,0.5,0.5,0.5\n") != std::string::npos);
  CHECK(fs::exists(t / "fp.manifest.json"));

  r = run({"orbit", "--map", "henon3d", "--params=-0.25,1,1", "--n", "0", "--out", t / "empty"});
  CHECK(r.code == 0);
  CHECK(data_rows(slurp(t / "empty.csv")) == 0);

  r = run({"orbit", "--map", "henon3d-inv", "--params", "1,1,0", "--out", t / "inv"});
  CHECK(r.code == 1);
  CHECK(r.err.find("zero-B") != std::string::npos);

  r = run({"orbit", "--map", "henon3d", "--params", "100,0,0", "--x0", "0,0,0", "--n", "100", "--out", t / "esc"});
  CHECK(r.code == 2);
  CHECK(data_rows(slurp(t / "esc.csv")) < 100);

  CHECK(run({"orbit", "--map", "nope", "--params", "1,1,1", "--out", t / "x"}).code == 1);
  CHECK(run({"orbit", "--map", "henon3d", "--params", "1,1", "--out", t / "x"}).code == 1);
  CHECK(run({"orbit", "--bogus-flag", "--out", t / "x"}).code == 1);
  CHECK(run({"orbit", "--map", "henon3d", "--params", "1,1,1"}).code == 1);  // --out missing

  r = run({"orbit", "--map", "mira", "--params", "0.1,0.5", "--x0", "0.1,0.1", "--n", "3", "--out", t / "mira"});
  CHECK(r.code == 0);
  CHECK(slurp(t / "mira.csv").find("i,y,z\n") != std::string::npos);

  r = run({"orbit", "--map", "model-return", "--k", "6", "--case", "II", "--n", "2", "--out", t / "mr"});
  CHECK(r.code == 0);
  CHECK(run({"orbit", "--map", "model-return", "--k", "0", "--out", t / "mr0"}).code == 1);
}

TEST_CASE("help and version") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"atlas", "--help"}).code == 0);
  CHECK(run({"--version"}).code == 0);
  CHECK(run({}).code == 1);
}

TEST_CASE("lyapunov") {
  TempDir t;
  auto r = run({"lyapunov", "--map", "henon3d", "--params", "0,0.9,0.7", "--iters", "100000", "--out", t / "b07"});
  CHECK(r.code == 0);
  const json j = json::parse(slurp(t / "b07.json"));
  CHECK(j.at("schema") == kSpectrumSchema);
  CHECK(std::abs(j.at("sum").get<double>() - std::log(0.7)) <= 1e-4);
  CHECK(j.at("sum_residual").get<double>() <= 1e-4);
  CHECK(j.at("log_abs_det").get<double>() == std::log(0.7));

  r = run({"lyapunov", "--map", "diagonal", "--params", "0.5,0.4,5", "--x0", "1e-3,1e-3,0", "--iters", "100", "--transient", "0",
           "--out", t / "diag"});
  CHECK(r.code == 0);
  const json d = json::parse(slurp(t / "diag.json"));
  CHECK(d.at("exponents")[0].get<double>() == doctest::Approx(std::log(5.0)).epsilon(1e-14));
  CHECK(d.at("exponents")[1].get<double>() == doctest::Approx(std::log(0.5)).epsilon(1e-14));
  CHECK(d.at("exponents")[2].get<double>() == doctest::Approx(std::log(0.4)).epsilon(1e-14));

  r = run({"lyapunov", "--map", "henon3d", "--params", "100,0,0", "--x0", "0,0,0", "--out", t / "esc"});
  CHECK(r.code == 2);
  CHECK(json::parse(slurp(t / "esc.json")).at("escaped") == true);
}

TEST_CASE("atlas") {
  TempDir t;
  const std::vector<std::string> base{"atlas", "--steps", "3", "--iters", "3000", "--transient", "300"};
  auto a = base;
  a.insert(a.end(), {"--threads", "1", "--out", t / "one"});
  CHECK(run(a).code == 0);
  auto b = base;
  b.insert(b.end(), {"--threads", "4", "--out", t / "four"});
  CHECK(run(b).code == 0);
  CHECK(slurp(t / "one.csv") == slurp(t / "four.csv"));
  CHECK(data_rows(slurp(t / "one.csv")) == 27);
  const json regions = json::parse(slurp(t / "one.regions.json"));
  CHECK(regions.at("schema") == kRegionsSchema);

  CHECK(run({"atlas", "--box", "0.5,-0.5,0.5,1.1,0.5,1", "--steps", "2", "--out", t / "bad"}).code == 1);
  CHECK(run({"atlas", "--steps", "2,2", "--out", t / "bad"}).code == 1);
  CHECK(run({"atlas", "--steps", "2", "--iters", "10", "--out", t / "missing/dir/x"}).code == 1);
}

TEST_CASE("rescale-verify") {
  TempDir t;
  auto r = run({"rescale-verify", "--case", "I", "--kmin", "10", "--kmax", "24", "--out", t / "ok"});
  CHECK(r.code == 0);
  const json j = json::parse(slurp(t / "ok.json"));
  CHECK(j.at("schema") == kRescalingSchema);
  CHECK(j.at("records").size() == 15);
  CHECK(slurp(t / "ok.csv").find("k,C0,C1,jac_residual\n") != std::string::npos);

  r = run({"rescale-verify", "--case", "I", "--sabotage", "--out", t / "sab"});
  CHECK(r.code == 3);

  r = run({"rescale-verify", "--case", "I", "--kmax", "400", "--out", t / "cap"});
  CHECK(r.code == 1);
  CHECK(r.err.find("cap") != std::string::npos);

  CHECK(run({"rescale-verify", "--model", data + "/malformed.json", "--out", t / "m"}).code == 1);
  CHECK(run({"rescale-verify", "--model", data + "/case2.json", "--kmin", "10", "--kmax", "16", "--out", t / "c2"})
            .code == 0);
  CHECK(json::parse(slurp(t / "c2.json")).at("case") == "CaseII");
}

TEST_CASE("classify-model") {
  TempDir t;
  auto r = run({"classify-model", "--model", data + "/case1.json", "--out", t / "c1"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("CaseI\n", 0) == 0);
  CHECK(r.out.find("condition B") != std::string::npos);
  CHECK(run({"classify-model", "--model", data + "/case2.json", "--out", t / "c2"}).out.rfind("CaseII\n", 0) == 0);
  CHECK(run({"classify-model", "--model", data + "/simple.json", "--out", t / "s"}).out.rfind("Simple\n", 0) == 0);
  CHECK(run({"classify-model", "--model", data + "/degenerate.json", "--out", t / "d"}).out.rfind("Degenerate\n", 0) ==
        0);
  CHECK(run({"classify-model", "--model", data + "/zero_d.json", "--out", t / "z"}).code == 1);
  CHECK(run({"classify-model", "--model", data + "/malformed.json", "--out", t / "m"}).code == 1);
  CHECK(json::parse(slurp(t / "c1.json")).at("case") == "CaseI");
}

TEST_CASE("delta-k") {
  TempDir t;
  const std::vector<std::string> base{"delta-k", "--k", "16", "--m1=-0.5,0.5,3", "--m2", "0.5,1.1,3", "--iters",
                                      "3000", "--transient", "300", "--target-m3", "0.7"};
  auto a = base;
  a.insert(a.end(), {"--out", t / "dk"});
  CHECK(run(a).code == 0);
  const json j = json::parse(slurp(t / "dk.json"));
  CHECK(j.at("schema") == kDeltaKSchema);
  CHECK(j.at("slices").size() == 1);
  auto b = base;
  b.insert(b.end(), {"--min-agreement", "1.5", "--out", t / "dk2"});
  CHECK(run(b).code == 3);
  CHECK(run({"delta-k", "--k", "0", "--out", t / "dk0"}).code == 1);
}

TEST_CASE("replay reproduces data files byte for byte") {
  TempDir t;
  struct Case {
    std::vector<std::string> args;
    std::vector<std::string> files;
  };
  const std::vector<Case> cases{
      {{"orbit", "--map", "henon3d", "--params", "0,0.9,0.7", "--n", "50", "--out", t / "o"}, {".csv"}},
      {{"lyapunov", "--map", "limit1", "--params", "0,0.9,0.7", "--iters", "5000", "--out", t / "l"}, {".json"}},
      {{"atlas", "--steps", "3", "--iters", "2000", "--jitter", "1e-4", "--seed", "3", "--out", t / "a"},
       {".csv", ".regions.json"}},
      {{"rescale-verify", "--case", "II", "--kmin", "10", "--kmax", "14", "--out", t / "r"}, {".json", ".csv"}},
      {{"classify-model", "--model", data + "/case2.json", "--out", t / "c"}, {".json"}},
  };
  for (const auto& c : cases) {
    const std::string prefix = c.args.back();
    REQUIRE(run(c.args).code == 0);
    const json m = json::parse(slurp(prefix + ".manifest.json"));
    CHECK(m.at("schema") == kManifestSchema);
    CHECK(m.at("command") == c.args[0]);
    CHECK(m.at("artifacts").size() == c.files.size());
    REQUIRE(run({"replay", "--manifest", prefix + ".manifest.json", "--out", prefix + "_re"}).code == 0);
    for (const auto& ext : c.files) CHECK(slurp(prefix + ext) == slurp(prefix + "_re" + ext));
  }
  CHECK(run({"replay", "--manifest", t / "none.json", "--out", t / "x"}).code == 1);
}

TEST_CASE("the installed tool honours the exit-code contract") {
  TempDir t;
  const std::string tool = DLORENZ_TOOL;
  auto status = [&](const std::string& args) {
    const int s = std::system((tool + " " + args + " > " + (t / "log") + " 2>&1").c_str());
    return WEXITSTATUS(s);
  };
  CHECK(status("orbit --map henon3d --params=-0.25,1,1 --n 5 --out " + (t / "a")) == 0);
  CHECK(status("orbit --map henon3d-inv --params 1,1,0 --out " + (t / "b")) == 1);
  CHECK(status("orbit --map henon3d --params 100,0,0 --x0 0,0,0 --out " + (t / "c")) == 2);
  CHECK(status("rescale-verify --sabotage --out " + (t / "d")) == 3);
  CHECK(status("replay --manifest " + (t / "a.manifest.json") + " --out " + (t / "a2")) == 0);
  CHECK(slurp(t / "a.csv") == slurp(t / "a2.csv"));
}

TEST_CASE("thread default from the environment") {
  ::setenv("DLORENZ_THREADS", "3", 1);
  CHECK(cli::default_threads() == 3);
  ::setenv("DLORENZ_THREADS", "zero", 1);
  CHECK(cli::default_threads() == 0);
  ::unsetenv("DLORENZ_THREADS");
  CHECK(cli::default_threads() == 0);
}
