#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "plateau/cli.hpp"
#include "plateau/config.hpp"
#include "plateau/errors.hpp"
#include "plateau/io.hpp"

namespace fs = std::filesystem;
using namespace plateau;

namespace {

const fs::path kData = PLATEAU_TEST_DATA;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "plateau_cli_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "plateau");
  return run_cli(args);
}

const char* kC1 =
    "t_bar = 2\n"
    "gamma2 = poly(0, 0.5, -0.25)\n"
    "gamma1 = poly(0, -0.5, 0.25)\n"
    "phi1 = poly(0, 0.006, -0.003)  # small datum\n"
    "phi2 = poly(0)\n";

}  // namespace

TEST_CASE("config grammar") {
  const auto c = parse_config(kC1);
  CHECK(c.t_bar == 2.0);
  CHECK(c.gamma2.coeffs() == std::vector<double>{0, 0.5, -0.25});
  CHECK(c.gamma2(1.0) == 0.25);
  CHECK(c.n_s == 257);
  const auto p = c.problem();
  CHECK(p.zeta.zeta == doctest::Approx(0.027).epsilon(1e-13));

  const auto g = parse_config(std::string(kC1) + "n_y = 65\nseed = 18446744073709551615\neps = 1e-3, 2e-3\n");
  CHECK(g.n_y == 65);
  CHECK(g.seed == 18446744073709551615ull);
  CHECK(g.eps == std::vector<double>{1e-3, 2e-3});
}

TEST_CASE("config errors carry positions") {
  try {
    parse_config("gamma1 = poly(0)\ngamma2 = poly(0)\nphi1 = poly(0)\nphi2 = poly(0)\n");
    FAIL("accepted");
  } catch (const ConfigError& e) {
    REQUIRE(e.issues().size() == 1);
    CHECK(e.issues()[0].message == "missing required key t_bar");
  }
  try {
    parse_config(std::string(kC1) + "colour = blue\n  gamma1 = poly(0, x)\n");
    FAIL("accepted");
  } catch (const ConfigError& e) {
    REQUIRE(e.issues().size() == 2);
    CHECK(e.issues()[0].line == 6);
    CHECK(e.issues()[0].column == 1);
    CHECK(e.issues()[0].message.find("unknown key") != std::string::npos);
    CHECK(e.issues()[1].line == 7);
  }
  CHECK_THROWS_AS(parse_config(std::string(kC1) + "gamma2 = cos(t)\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(std::string(kC1) + "n_s = -3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(std::string(kC1) + "t_bar = 3\n"), ConfigError);
}

TEST_CASE("sample tables") {
  const auto dir = scratch("samples");
  {
    std::ofstream f(dir / "phi1.csv");
    f << "0,0\n0.5,0.001\n1,0.002\n2,0\n";
  }
  const auto c = parse_config(
      "t_bar = 2\ngamma2 = poly(0, 0.5, -0.25)\ngamma1 = poly(0, -0.5, 0.25)\nphi1 = samples(phi1.csv)\nphi2 = poly(0)\n",
      dir);
  CHECK(c.phi1.kind() == ScalarFn1D::Kind::PiecewiseLinear);
  CHECK(c.phi1(0.75) == doctest::Approx(0.0015).epsilon(1e-15));
  {
    std::ofstream f(dir / "bad.csv");
    f << "0,0\n1,1\n0.5,0\n2,0\n";
  }
  CHECK_THROWS(load_samples(dir / "bad.csv", 2.0));
}

TEST_CASE("solve writes every artifact when the gates are open") {
  const auto out = scratch("solve_c1");
  CHECK(run({"solve", "--config", (kData / "c1.cfg").string(), "--grid", "65", "--out", out.string()}) == 0);
  for (const char* f : {"lambda.csv", "u.csv", "u_right.csv", "surface.obj", "surface_burgers.csv", "area.json",
                        "zeta.json"})
    CHECK(fs::exists(out / f));
  const auto area = nlohmann::json::parse(slurp(out / "area.json"));
  CHECK(area["area_at_least_lebesgue"].get<bool>());
  CHECK(area["area_domain"].get<double>() == doctest::Approx(area["area_surface"].get<double>()).epsilon(1e-9));
  CHECK(slurp(out / "u.csv").rfind("# y,t,u\n", 0) == 0);
}

TEST_CASE("solve skips graph stages behind a closed gate") {
  const auto out = scratch("solve_z");
  CHECK(run({"solve", "--config", (kData / "zeta045.cfg").string(), "--out", out.string()}) == kExitGate);
  CHECK(fs::exists(out / "lambda.csv"));
  CHECK_FALSE(fs::exists(out / "u.csv"));
  CHECK_FALSE(fs::exists(out / "u_right.csv"));
  const auto z = nlohmann::json::parse(slurp(out / "zeta.json"));
  CHECK(z["zeta"].get<double>() == doctest::Approx(0.45).epsilon(1e-12));
  CHECK(z["gates"][1]["condition"] == "zeta < (sqrt(129)-11)/4");
  CHECK(z["gates"][2]["condition"] == "zeta < (sqrt(721)-25)/48");
  CHECK(z["stages"][0]["status"] == "ran");
  CHECK(z["stages"][1]["status"] == "skipped");
  CHECK(z["stages"][1]["reason"].get<std::string>().find("(sqrt(129)-11)/4") != std::string::npos);
  CHECK(z["stages"].size() == 2);
}

TEST_CASE("malformed input exits with 1") {
  const auto dir = scratch("bad");
  {
    std::ofstream f(dir / "bad.cfg");
    f << "t_bar = 2\ngamma1 = poly(0,,1)\n";
  }
  CHECK(run({"solve", "--config", (dir / "bad.cfg").string()}) == kExitError);
  CHECK(run({"solve", "--config", (dir / "missing.cfg").string()}) == kExitError);
  CHECK(run({"solve"}) == kExitError);
  CHECK(run({"launch", "--config", (kData / "c1.cfg").string()}) == kExitError);
  CHECK(run({"verify", "--config", (kData / "c1.cfg").string(), "--fault", "lambda=1"}) == kExitError);
}

TEST_CASE("verify passes on the flat and small data and trips on an injected fault") {
  const auto out = scratch("verify");
  CHECK(run({"verify", "--config", (kData / "flat.cfg").string(), "--grid", "65", "--out", (out / "flat").string()}) ==
        0);
  CHECK(run({"verify", "--config", (kData / "c1.cfg").string(), "--grid", "129", "--out", (out / "c1").string()}) ==
        0);
  const auto v = nlohmann::json::parse(slurp(out / "c1" / "verify.json"));
  CHECK(v["passed"].get<bool>());
  CHECK(run({"verify", "--config", (kData / "c1.cfg").string(), "--grid", "65", "--out", (out / "fault").string(),
             "--fault", "mu_bar_offset=0.01"}) == kExitVerify);
  const auto f = nlohmann::json::parse(slurp(out / "fault" / "verify.json"));
  bool tripped = false;
  for (const auto& c : f["checks"])
    if (c["name"] == "calibration.normal_agreement") tripped = !c["passed"].get<bool>() && c["value"].get<double>() >= 0.009;
  CHECK(tripped);
}

TEST_CASE("compete and probe") {
  const auto out = scratch("compete");
  CHECK(run({"compete", "--config", (kData / "c1.cfg").string(), "--grid", "129", "--out", out.string()}) == 0);
  const auto c = nlohmann::json::parse(slurp(out / "compete.json"));
  CHECK(c["competitors"].size() == 40);
  CHECK(c["min_margin"].get<double>() >= -1e-10);

  const auto dir = scratch("probe");
  {
    std::ofstream f(dir / "p.cfg");
    f << kC1 << "n_s = 65\nn_y = 65\nn_t = 65\nprobe_rho = 0.45, 0.4\n";
  }
  CHECK(run({"probe", "--config", (dir / "p.cfg").string(), "--out", dir.string()}) == kExitGate);
  const auto p = nlohmann::json::parse(slurp(dir / "probe.json"));
  for (const auto& r : p["rungs"]) CHECK_FALSE(r["gate_passed"].get<bool>());
}

TEST_CASE("outputs are byte-identical across worker counts") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  for (auto [dir, w] : {std::pair{a, "1"}, std::pair{b, "3"}}) {
    CHECK(run({"solve", "--config", (kData / "c1.cfg").string(), "--grid", "65", "--out", dir.string(), "--workers",
               w}) == 0);
    CHECK(run({"compete", "--config", (kData / "c1.cfg").string(), "--grid", "65", "--out", dir.string(),
               "--workers", w, "--seed", "77"}) == 0);
  }
  for (const auto& e : fs::directory_iterator(a)) CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
}

TEST_CASE("mesh export") {
  const auto dir = scratch("mesh");
  const RulingSolver S(oracle::problem_for(0.003));
  const auto R = build_ruled_surface(S, 3, 3);
  export_mesh(R, dir / "m.obj", dir / "m.csv");
  std::istringstream in(slurp(dir / "m.obj"));
  std::string line;
  int v = 0, f = 0;
  while (std::getline(in, line)) {
    if (line.rfind("v ", 0) == 0) ++v;
    if (line.rfind("f ", 0) == 0) ++f;
  }
  CHECK(v == 9);
  CHECK(f == 8);

  const RulingSolver F(oracle::problem_for(0.0));
  const auto P = build_ruled_surface(F, 17, 5);
  export_mesh(P, dir / "p.obj", dir / "p.csv");
  std::istringstream pin(slurp(dir / "p.obj"));
  v = 0;
  while (std::getline(pin, line))
    if (line.rfind("v ", 0) == 0) {
      ++v;
      std::istringstream ls(line.substr(2));
      double x = 1.0;
      ls >> x;
      CHECK(x == 0.0);
    }
  CHECK(v == 17 * 5);
}
