#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

// exercises the installed binary end to end
#ifndef NCPS_CLI_PATH
#error "NCPS_CLI_PATH must point at the ncps executable"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("ncps_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run(const std::string& args) {
  static int counter = 0;
  const fs::path out = scratch_dir() / ("stdout_" + std::to_string(counter));
  const fs::path err = scratch_dir() / ("stderr_" + std::to_string(counter));
  ++counter;
  const std::string cmd = std::string(NCPS_CLI_PATH) + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

json parse_json(const std::string& text) { return json::parse(text); }

}  // namespace

TEST_CASE("orbit: Kepler limit values") {
  const RunResult r = run("orbit --m 1 --k 1 --r0 1");
  REQUIRE(r.exit_code == 0);
  const json j = parse_json(r.out);
  CHECK(j["omega_ccw"].get<double>() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(j["T_ccw"].get<double>() == doctest::Approx(2.0 * M_PI).epsilon(1e-14));
  CHECK(j["delta_omega"].get<double>() == 0.0);
  CHECK(j["p0_cw"].get<double>() == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(j["t_flip_consistent"].get<bool>());
}

TEST_CASE("orbit: deformed case and csv format") {
  const RunResult r = run("orbit --theta 0.01 --eta 0.01");
  REQUIRE(r.exit_code == 0);
  const json j = parse_json(r.out);
  CHECK(j["omega_ccw"].get<double>() == doctest::Approx(0.99).epsilon(1e-14));
  CHECK(j["omega_cw"].get<double>() == doctest::Approx(1.01).epsilon(1e-14));
  CHECK(j["delta_omega"].get<double>() == doctest::Approx(0.02).epsilon(1e-14));

  const RunResult csv = run("orbit --theta 0.01 --eta 0.01 --format csv");
  REQUIRE(csv.exit_code == 0);
  CHECK(csv.out.rfind("omega_ccw,", 0) == 0);
  CHECK(csv.out.find("0.98999999999999999") != std::string::npos);
}

TEST_CASE("orbit: constraint failures exit 2 with machine-readable bodies") {
  const RunResult neg = run("orbit --k -1");
  CHECK(neg.exit_code == 2);
  CHECK(parse_json(neg.err)["error"]["code"] == "NO_CIRCULAR_ORBIT");

  const RunResult degen = run("orbit --theta 2 --eta 2");
  CHECK(degen.exit_code == 2);
  CHECK(parse_json(degen.err)["error"]["code"] == "DEGENERATE_FREQUENCY");
}

TEST_CASE("usage errors exit 64, help exits 0") {
  CHECK(run("orbit --no-such-flag 1").exit_code == 64);
  CHECK(run("no-such-command").exit_code == 64);

  const RunResult help = run("--help");
  CHECK(help.exit_code == 0);
  CHECK(help.out.find("--seed") != std::string::npos);
  CHECK(help.out.find("orbit") != std::string::npos);

  const RunResult sub_help = run("simulate --help");
  CHECK(sub_help.exit_code == 0);
  CHECK(sub_help.out.find("--measure-period") != std::string::npos);
}

TEST_CASE("simulate: circular shorthand, period sidecar, csv trajectory") {
  const fs::path out = scratch_dir() / "kepler.csv";
  const RunResult r = run("simulate --circular ccw --measure-period --out " + out.string());
  REQUIRE(r.exit_code == 0);

  const std::string csv = slurp(out);
  CHECK(csv.rfind("t,X1,X2,P1,P2,H\n", 0) == 0);

  const json side = parse_json(slurp(out.string() + ".period.json"));
  CHECK(std::abs(side["period_numeric"].get<double>() - 2.0 * M_PI) < 1e-5);
  CHECK(side["period_abs_error"].get<double>() < 1e-5);
}

TEST_CASE("simulate: direction asymmetry from measured periods") {
  const fs::path ccw = scratch_dir() / "ccw.csv";
  const fs::path cw = scratch_dir() / "cw.csv";
  REQUIRE(run("simulate --theta 0.01 --eta 0.01 --circular ccw --measure-period --out " +
              ccw.string()).exit_code == 0);
  REQUIRE(run("simulate --theta 0.01 --eta 0.01 --circular cw --measure-period --out " +
              cw.string()).exit_code == 0);
  const double w_ccw =
      parse_json(slurp(ccw.string() + ".period.json"))["omega_numeric"].get<double>();
  const double w_cw =
      parse_json(slurp(cw.string() + ".period.json"))["omega_numeric"].get<double>();
  CHECK(std::abs((w_cw - w_ccw) - 0.02) < 1e-6);
}

TEST_CASE("simulate: reversal distance vanishes in the commutative limit") {
  const fs::path out = scratch_dir() / "rev.csv";
  const RunResult r =
      run("simulate --circular ccw --reversal tau=T --out " + out.string());
  REQUIRE(r.exit_code == 0);
  const json side = parse_json(slurp(out.string() + ".period.json"));
  CHECK(side["reversal_distance"].get<double>() < 1e-8);
}

TEST_CASE("simulate: too short a record for the period exits 3") {
  const fs::path out = scratch_dir() / "short.csv";
  const RunResult r = run("simulate --circular ccw --steps 100 --measure-period --out " +
                          out.string());
  CHECK(r.exit_code == 3);
  CHECK(parse_json(r.err)["error"]["code"] == "NON_WINDING");
}

TEST_CASE("simulate: starting on the singularity exits 2") {
  const RunResult r = run("simulate --state 1e-10,0,0,0 --steps 10 --dt 0.01");
  CHECK(r.exit_code == 2);
  CHECK(parse_json(r.err)["error"]["code"] == "ORIGIN_SINGULARITY");
}

TEST_CASE("repsolve: both branches with swapped primed pairs") {
  const RunResult r = run("repsolve --theta 0.2 --eta 0.1 --gamma 0.004");
  REQUIRE(r.exit_code == 0);
  const json j = parse_json(r.out);
  REQUIRE(j["solutions"].size() == 2);
  const json& plus = j["solutions"][0];
  const json& minus = j["solutions"][1];
  CHECK(plus["theta1p"].get<double>() ==
        doctest::Approx(minus["theta2p"].get<double>()).epsilon(1e-14));
  CHECK(plus["eta1p"].get<double>() ==
        doctest::Approx(minus["eta2p"].get<double>()).epsilon(1e-14));
  CHECK(j["degenerate"].get<bool>() == false);
  CHECK(plus["residuals"]["gamma11"].get<double>() < 1e-10);
}

TEST_CASE("repsolve: degenerate discriminant and constraint error") {
  const RunResult degen = run("repsolve --theta 0.1 --eta 0.2 --gamma 0.005");
  REQUIRE(degen.exit_code == 0);
  CHECK(parse_json(degen.out)["degenerate"].get<bool>());

  const RunResult bad = run("repsolve --theta 0.2 --eta 0.1 --gamma 0.01");
  CHECK(bad.exit_code == 2);
  CHECK(parse_json(bad.err)["error"]["code"] == "GAMMA_CONSTRAINT");
}

TEST_CASE("repsolve: gamma-zero family and the paper example") {
  const RunResult r = run("repsolve --theta 0.2 --eta 0.1 --gamma-zero --theta2p 0");
  REQUIRE(r.exit_code == 0);
  const json sol = parse_json(r.out)["solution"];
  CHECK(sol["eps"].get<double>() == 1.0);
  CHECK(sol["theta1p"].get<double>() == 0.2);
  CHECK(sol["eta1p"].get<double>() == 0.0);
  CHECK(sol["eta2p"].get<double>() == 0.1);

  const RunResult sym = run("repsolve --theta 0.2 --eta 0.1 --symmetric minus");
  REQUIRE(sym.exit_code == 0);
  CHECK(parse_json(sym.out)["solution"]["theta1p"].get<double>() ==
        doctest::Approx(0.100505063).epsilon(1e-7));
}

TEST_CASE("verify: momentum-built tensors pass every gate") {
  const RunResult r = run("verify --draws 25 --dt 0.002");
  REQUIRE(r.exit_code == 0);
  const json j = parse_json(r.out);
  CHECK(j["pass"].get<bool>());
  CHECK(j["residuals"]["algebra"].get<double>() < 1e-12);
  CHECK(j["residuals"]["jacobi"].get<double>() < 1e-9);
  CHECK(j["residuals"]["time_reversal"].get<double>() < 1e-12);
  CHECK(j["residuals"]["reversal_distance"].get<double>() < 1e-6);
}

TEST_CASE("verify: a coarse reversal step exceeds the distance gate and exits 4") {
  const RunResult r = run("verify --draws 2 --dt 0.5");
  CHECK(r.exit_code == 4);
  const json j = parse_json(r.out);
  CHECK_FALSE(j["pass"].get<bool>());
  CHECK(j["residuals"]["reversal_distance"].get<double>() > 1e-6);
}

TEST_CASE("verify: the position-built tensors break time reversal as expected") {
  const RunResult r = run("verify --draws 10 --alternative --l0 0.3 --dt 0.002");
  REQUIRE(r.exit_code == 0);
  const json j = parse_json(r.out);
  CHECK(j["time_reversal_flag"] == "EXPECTED_BREAKING");
  CHECK(j["residuals"]["time_reversal"].get<double>() > 1e-3);
  CHECK(j["pass"].get<bool>());
}

TEST_CASE("average: moments and invariance checks at a reduced sample count") {
  const RunResult r = run("average --n 20000 --seed 12");
  REQUIRE(r.exit_code == 0);
  const json j = parse_json(r.out);
  CHECK(j["checks_pass"].get<bool>());
  CHECK(j["moments"]["theta_sq"]["analytic"].get<double>() ==
        doctest::Approx(1.5).epsilon(1e-14));
  CHECK(j["effective_hamiltonian"]["rejection_rate"].get<double>() == 0.0);
}

TEST_CASE("average: fixed seed gives byte-identical output") {
  const fs::path a = scratch_dir() / "avg_a.json";
  const fs::path b = scratch_dir() / "avg_b.json";
  REQUIRE(run("average --n 5000 --seed 7 --out " + a.string()).exit_code == 0);
  REQUIRE(run("average --n 5000 --seed 7 --out " + b.string()).exit_code == 0);
  CHECK(slurp(a) == slurp(b));

  const fs::path c = scratch_dir() / "avg_c.json";
  REQUIRE(run("average --n 5000 --seed 8 --out " + c.string()).exit_code == 0);
  CHECK(slurp(a) != slurp(c));
}

TEST_CASE("config file values apply, flags override, unknown keys reject") {
  const fs::path cfg = scratch_dir() / "orbit.json";
  std::ofstream(cfg) << R"({"command": "orbit", "theta": 0.01, "eta": 0.01})";

  const RunResult r = run("orbit --config " + cfg.string());
  REQUIRE(r.exit_code == 0);
  CHECK(parse_json(r.out)["delta_omega"].get<double>() ==
        doctest::Approx(0.02).epsilon(1e-14));

  // the flag wins over the config value
  const RunResult over = run("orbit --config " + cfg.string() + " --theta 0");
  REQUIRE(over.exit_code == 0);
  CHECK(parse_json(over.out)["delta_omega"].get<double>() ==
        doctest::Approx(0.01).epsilon(1e-14));

  const fs::path bad = scratch_dir() / "bad.json";
  std::ofstream(bad) << R"({"thtea": 0.01})";
  const RunResult rejected = run("orbit --config " + bad.string());
  CHECK(rejected.exit_code == 2);
  CHECK(parse_json(rejected.err)["error"]["code"] == "UNKNOWN_CONFIG_KEY");
}
