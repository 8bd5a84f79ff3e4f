#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ncps/averaging.hpp"
#include "ncps/bracket2d.hpp"
#include "ncps/extended.hpp"
#include "ncps/kepler2d.hpp"
#include "ncps/orbit.hpp"
#include "ncps/representation.hpp"
#include "ncps/rng.hpp"

using nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// JSON output with every floating-point number at 17 significant digits

std::string format_double17(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void dump17(const ordered_json& j, std::string& out, int depth) {
  const std::string pad(2 * static_cast<std::size_t>(depth), ' ');
  const std::string pad_in(2 * static_cast<std::size_t>(depth + 1), ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in + ordered_json(key).dump() + ": ";
        dump17(value, out, depth + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& value : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        dump17(value, out, depth + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case nlohmann::json::value_t::number_float:
      out += format_double17(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

std::string dump17(const ordered_json& j) {
  std::string out;
  dump17(j, out, 0);
  out += "\n";
  return out;
}

// ---------------------------------------------------------------------------
// shared invocation state

struct GlobalOpts {
  std::string config_path;
  std::string out_path;
  std::string format;
  std::uint64_t seed = 1;
  CLI::Option* seed_opt = nullptr;
  ordered_json config = ordered_json::object();
};

int exit_code_for(const std::string& code) {
  if (code == ncps::errc::non_winding || code == ncps::errc::direction_reversal)
    return 3;
  if (code == "TOLERANCE_FAILURE") return 4;
  return 2;
}

[[noreturn]] void fail(const std::string& code, const std::string& message) {
  ordered_json err;
  err["error"]["code"] = code;
  err["error"]["message"] = message;
  std::cerr << dump17(err);
  std::exit(exit_code_for(code));
}

void write_output(const GlobalOpts& g, const std::string& text) {
  if (g.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(g.out_path, std::ios::binary);
  if (!out) fail(ncps::errc::invalid_parameter, "cannot open output path " + g.out_path);
  out << text;
}

void load_config(GlobalOpts& g, const std::string& command,
                 const std::set<std::string>& known_keys) {
  if (g.config_path.empty()) return;
  std::ifstream in(g.config_path);
  if (!in) fail(ncps::errc::invalid_parameter, "cannot read config " + g.config_path);
  try {
    in >> g.config;
  } catch (const std::exception& e) {
    fail(ncps::errc::invalid_parameter, std::string("config is not valid JSON: ") + e.what());
  }
  if (!g.config.is_object())
    fail(ncps::errc::invalid_parameter, "config root must be a JSON object");
  for (const auto& [key, value] : g.config.items()) {
    if (key == "command") {
      if (!value.is_string() || value.get<std::string>() != command)
        fail(ncps::errc::invalid_parameter,
             "config command does not match the invoked command");
      continue;
    }
    if (key == "seed") continue;
    if (!known_keys.count(key))
      fail("UNKNOWN_CONFIG_KEY", "config key not recognized: " + key);
  }
  if (g.config.contains("seed") && g.seed_opt->count() == 0)
    g.seed = g.config["seed"].get<std::uint64_t>();
}

// command-line flags win over config file values
template <typename T>
void apply_config(const GlobalOpts& g, const std::string& key, CLI::Option* opt,
                  T* target) {
  if (opt != nullptr && opt->count() > 0) return;
  if (!g.config.contains(key)) return;
  try {
    *target = g.config.at(key).get<T>();
  } catch (const std::exception&) {
    fail(ncps::errc::invalid_parameter, "config key has the wrong type: " + key);
  }
}

std::vector<double> parse_numbers(const std::string& text, std::size_t expected,
                                  const std::string& what) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      vals.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ncps::errc::invalid_parameter, what + " must be a comma-separated number list");
    }
  }
  if (vals.size() != expected)
    fail(ncps::errc::invalid_parameter,
         what + " needs exactly " + std::to_string(expected) + " numbers");
  return vals;
}

// ---------------------------------------------------------------------------
// orbit

struct OrbitParams {
  double m = 1.0, k = 1.0, r0 = 1.0;
  double theta = 0.0, eta = 0.0, gamma = 0.0;
};

int run_orbit(const OrbitParams& prm, GlobalOpts& g) {
  const ncps::KeplerSystem2D sys{prm.m, prm.k, {prm.theta, prm.eta, prm.gamma}};
  const ncps::OrbitSolution ccw =
      ncps::solve_orbit({sys, prm.r0, ncps::Direction::CCW});
  const ncps::OrbitSolution cw = ncps::solve_orbit({sys, prm.r0, ncps::Direction::CW});

  ordered_json out;
  out["command"] = "orbit";
  out["input"] = {{"m", prm.m},         {"k", prm.k},     {"r0", prm.r0},
                  {"theta", prm.theta}, {"eta", prm.eta}, {"gamma", prm.gamma}};
  out["omega_ccw"] = ccw.omega;
  out["T_ccw"] = ccw.period;
  out["p0_ccw"] = ccw.p0;
  out["omega_cw"] = cw.omega;
  out["T_cw"] = cw.period;
  out["p0_cw"] = cw.p0;
  out["delta_omega"] = ncps::delta_omega(sys, prm.r0);
  out["t_flip_consistent"] = ncps::t_reversal_frequency_check(sys, prm.r0);

  if (g.format == "csv") {
    std::string text = "omega_ccw,T_ccw,p0_ccw,omega_cw,T_cw,p0_cw,delta_omega\n";
    for (const char* key :
         {"omega_ccw", "T_ccw", "p0_ccw", "omega_cw", "T_cw", "p0_cw", "delta_omega"}) {
      text += format_double17(out[key].get<double>());
      text += key == std::string("delta_omega") ? "\n" : ",";
    }
    write_output(g, text);
  } else {
    write_output(g, dump17(out));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateParams {
  double m = 1.0, k = 1.0;
  double theta = 0.0, eta = 0.0, gamma = 0.0;
  std::string state;     // "x1,x2,p1,p2"
  std::string circular;  // "ccw" | "cw"
  double r0 = 1.0;
  double dt = 0.0;           // 0: closed-form period / 1e4
  std::int64_t steps = 0;    // 0: 1.05 periods
  bool measure = false;
  std::string reversal;      // "", "tau=T", "tau=<float>" or "<float>"
};

int run_simulate(const SimulateParams& prm, GlobalOpts& g) {
  if (!g.format.empty() && g.format != "csv")
    fail(ncps::errc::invalid_parameter, "simulate emits csv only");
  const ncps::KeplerSystem2D sys{prm.m, prm.k, {prm.theta, prm.eta, prm.gamma}};

  ncps::PhaseState2D s0{};
  double t_est = 0.0;
  std::optional<double> t_closed;
  if (!prm.circular.empty()) {
    if (prm.circular != "ccw" && prm.circular != "cw")
      fail(ncps::errc::invalid_parameter, "--circular takes ccw or cw");
    const ncps::Direction dir =
        prm.circular == "ccw" ? ncps::Direction::CCW : ncps::Direction::CW;
    const ncps::CircularOrbitSpec spec{sys, prm.r0, dir};
    const ncps::OrbitSolution sol = ncps::solve_orbit(spec);
    s0 = ncps::circular_initial_conditions(sol, spec);
    t_est = sol.period;
    t_closed = sol.period;
  } else if (!prm.state.empty()) {
    const auto v = parse_numbers(prm.state, 4, "--state");
    s0 = {v[0], v[1], v[2], v[3]};
    const double r = std::hypot(s0.x1, s0.x2);
    t_est = 2.0 * M_PI * std::sqrt(prm.m * r * r * r / prm.k);
  } else {
    fail(ncps::errc::invalid_parameter, "simulate needs --state or --circular");
  }

  const double dt = prm.dt > 0.0 ? prm.dt : t_est / 1e4;
  const std::int64_t steps =
      prm.steps > 0 ? prm.steps : static_cast<std::int64_t>(std::ceil(1.05 * t_est / dt));

  const ncps::Trajectory traj = ncps::integrate(sys, s0, dt, steps);
  std::ostringstream csv;
  ncps::write_trajectory_csv(traj, csv);
  write_output(g, csv.str());

  if (!prm.measure && prm.reversal.empty()) return 0;

  ordered_json side;
  side["command"] = "simulate";
  if (prm.measure) {
    const double period = ncps::measure_period(traj);  // exit 3 on failure
    side["period_numeric"] = period;
    side["omega_numeric"] = 2.0 * M_PI / period;
    if (t_closed) {
      side["period_closed_form"] = *t_closed;
      side["period_abs_error"] = std::abs(period - *t_closed);
    }
  }
  if (!prm.reversal.empty()) {
    std::string spec = prm.reversal;
    if (spec.rfind("tau=", 0) == 0) spec = spec.substr(4);
    double tau = 0.0;
    if (spec == "T") {
      if (!t_closed)
        fail(ncps::errc::invalid_parameter, "--reversal tau=T needs --circular");
      tau = *t_closed;
    } else {
      tau = parse_numbers(spec, 1, "--reversal")[0];
    }
    side["reversal_tau"] = tau;
    side["reversal_distance"] = ncps::reversal_experiment(sys, s0, tau, dt);
  }

  const std::string text = dump17(side);
  if (g.out_path.empty()) {
    std::cerr << text;
  } else {
    std::ofstream out(g.out_path + ".period.json", std::ios::binary);
    if (!out)
      fail(ncps::errc::invalid_parameter, "cannot open sidecar next to " + g.out_path);
    out << text;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// repsolve

struct RepsolveParams {
  double theta = 0.0, eta = 0.0, gamma = 0.0;
  std::string branch = "both";  // plus | minus | both
  bool gamma_zero = false;
  double theta2p = 0.0;
  std::string symmetric;  // plus | minus
};

ordered_json rep_to_json(const ncps::RepParams& rp, double theta, double eta,
                         double gamma) {
  const ncps::InducedAlgebra ind = ncps::induced_algebra(rp);
  ordered_json j;
  j["eps"] = rp.eps;
  j["theta1p"] = rp.theta1p;
  j["theta2p"] = rp.theta2p;
  j["eta1p"] = rp.eta1p;
  j["eta2p"] = rp.eta2p;
  j["induced"] = {{"theta", ind.theta},
                  {"eta", ind.eta},
                  {"gamma11", ind.gamma11},
                  {"gamma22", ind.gamma22}};
  j["residuals"] = {{"theta", std::abs(ind.theta - theta)},
                    {"eta", std::abs(ind.eta - eta)},
                    {"gamma11", std::abs(ind.gamma11 - gamma)},
                    {"gamma22", std::abs(ind.gamma22 - gamma)},
                    {"gamma_diagonal_gap", std::abs(ind.gamma11 - ind.gamma22)}};
  return j;
}

int run_repsolve(const RepsolveParams& prm, GlobalOpts& g) {
  ordered_json out;
  out["command"] = "repsolve";
  out["input"] = {{"theta", prm.theta}, {"eta", prm.eta}, {"gamma", prm.gamma}};

  if (!prm.symmetric.empty()) {
    if (prm.symmetric != "plus" && prm.symmetric != "minus")
      fail(ncps::errc::invalid_parameter, "--symmetric takes plus or minus");
    if (prm.gamma != 0.0)
      fail(ncps::errc::invalid_parameter, "symmetric representations require gamma = 0");
    const auto branch =
        prm.symmetric == "plus" ? ncps::Branch::Plus : ncps::Branch::Minus;
    out["mode"] = "symmetric_gamma_zero";
    out["branch"] = prm.symmetric;
    out["solution"] =
        rep_to_json(ncps::symmetric_reps_gamma_zero(prm.theta, prm.eta, branch),
                    prm.theta, prm.eta, 0.0);
  } else if (prm.gamma_zero) {
    if (prm.gamma != 0.0)
      fail(ncps::errc::invalid_parameter, "--gamma-zero requires gamma = 0");
    out["mode"] = "gamma_zero";
    out["theta2p_choice"] = prm.theta2p;
    out["solution"] = rep_to_json(ncps::solve_gamma_zero(prm.theta, prm.eta, prm.theta2p),
                                  prm.theta, prm.eta, 0.0);
  } else {
    out["mode"] = "general";
    ordered_json solutions = ordered_json::array();
    const bool both = prm.branch == "both";
    if (!both && prm.branch != "plus" && prm.branch != "minus")
      fail(ncps::errc::invalid_parameter, "--branch takes plus, minus or both");

    std::optional<ncps::RepParams> plus, minus;
    if (both || prm.branch == "plus")
      plus = ncps::solve_general(prm.theta, prm.eta, prm.gamma, ncps::Branch::Plus);
    if (both || prm.branch == "minus")
      minus = ncps::solve_general(prm.theta, prm.eta, prm.gamma, ncps::Branch::Minus);

    if (plus) {
      ordered_json j = rep_to_json(*plus, prm.theta, prm.eta, prm.gamma);
      j["branch"] = "plus";
      solutions.push_back(j);
    }
    if (minus) {
      ordered_json j = rep_to_json(*minus, prm.theta, prm.eta, prm.gamma);
      j["branch"] = "minus";
      solutions.push_back(j);
    }
    out["solutions"] = solutions;
    if (plus && minus) {
      // a vanishing discriminant leaves ~1e-9 of cancellation noise in the
      // branch split, so the coincidence threshold sits above that
      const double gap = std::abs(plus->theta1p - minus->theta1p) +
                         std::abs(plus->eta1p - minus->eta1p);
      out["degenerate"] =
          gap < 1e-7 * std::max({1.0, std::abs(prm.theta), std::abs(prm.eta)});
    }
  }
  write_output(g, dump17(out));
  return 0;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyParams {
  double c_theta = 0.01, c_eta = 0.01;
  double l0 = 0.01, p0 = 0.01;
  double m_osc = 1.0, omega_osc = 2.0;
  double m = 1.0, k = 1.0;
  std::int64_t draws = 100;
  bool alternative = false;
  double tau = 2.0 * M_PI;
  double dt = 2.0 * M_PI * 1e-4;
};

// declared tolerances of the verification gate
constexpr double kTolAlgebra = 1e-12;
constexpr double kTolJacobi = 1e-9;
constexpr double kTolRotation = 1e-12;
constexpr double kTolTimeReversal = 1e-12;
constexpr double kTolReversalDistance = 1e-6;

ncps::ExtendedState reversal_start_state() {
  ncps::ExtendedState s;
  s.x = Eigen::Vector3d(1.0, 0.0, 0.0);
  s.p = Eigen::Vector3d(0.0, 1.0, 0.0);
  s.a = Eigen::Vector3d(0.05, -0.03, 0.02);
  s.pa = Eigen::Vector3d(0.01, 0.02, -0.015);
  s.b = Eigen::Vector3d(-0.02, 0.04, 0.01);
  s.pb = Eigen::Vector3d(0.03, -0.01, 0.02);
  return s;
}

int run_verify(const VerifyParams& prm, GlobalOpts& g) {
  ncps::TensorConfig cfg;
  cfg.c_theta = prm.c_theta;
  cfg.c_eta = prm.c_eta;
  cfg.l0 = prm.l0;
  cfg.p0 = prm.p0;
  cfg.m_osc = prm.m_osc;
  cfg.omega_osc = prm.omega_osc;

  double res_algebra = 0.0, res_jacobi = 0.0, res_rotation = 0.0, res_t = 0.0;

  using Kind = ncps::ExtObservable::Kind;
  const Kind jacobi_kinds[] = {Kind::NCX, Kind::NCP, Kind::AuxA, Kind::AuxPA};

  for (std::int64_t draw = 0; draw < prm.draws; ++draw) {
    std::mt19937_64 rng(ncps::derive_seed(g.seed, static_cast<std::uint64_t>(draw)));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto vec3 = [&] { return Eigen::Vector3d(u(rng), u(rng), u(rng)); };

    ncps::ExtendedState s;
    s.x = vec3();
    s.x += s.x.normalized();
    s.p = vec3();
    s.a = vec3();
    s.pa = vec3();
    s.b = vec3();
    s.pb = vec3();

    res_algebra = std::max(res_algebra, ncps::verify_algebra(cfg, s).max());

    auto pick = [&](Kind kind, int i) {
      ncps::ExtObservable o;
      o.kind = kind;
      o.i = i;
      o.cfg = cfg;
      return o;
    };
    std::uniform_int_distribution<int> kind_pick(0, 3);
    std::uniform_int_distribution<int> idx_pick(0, 2);
    res_jacobi = std::max(
        res_jacobi,
        ncps::jacobi_check(pick(jacobi_kinds[kind_pick(rng)], idx_pick(rng)),
                           pick(jacobi_kinds[kind_pick(rng)], idx_pick(rng)),
                           pick(jacobi_kinds[kind_pick(rng)], idx_pick(rng)), s));

    const Eigen::Vector3d axis = vec3().normalized();
    const double angle = M_PI * u(rng);
    const Eigen::Matrix3d r = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
    const ncps::ExtendedState rs = ncps::rotate_extended(s, axis, angle);
    const auto [X, P] = ncps::nc_coordinates(cfg, s);
    const auto [Xr, Pr] = ncps::nc_coordinates(cfg, rs);
    const ncps::NCTensors t = ncps::tensors_from_state(cfg, s);
    const ncps::NCTensors tr = ncps::tensors_from_state(cfg, rs);
    res_rotation = std::max(
        {res_rotation, (Xr - r * X).cwiseAbs().maxCoeff(),
         (Pr - r * P).cwiseAbs().maxCoeff(),
         (tr.theta - r * t.theta * r.transpose()).cwiseAbs().maxCoeff(),
         (tr.eta - r * t.eta * r.transpose()).cwiseAbs().maxCoeff()});

    const ncps::ExtendedState ts = ncps::time_reverse_extended(s);
    const auto [Xt, Pt] = ncps::nc_coordinates(cfg, ts);
    const ncps::NCTensors tt = prm.alternative ? ncps::tensors_alternative(cfg, ts)
                                               : ncps::tensors_from_state(cfg, ts);
    const ncps::NCTensors t0 = prm.alternative ? ncps::tensors_alternative(cfg, s)
                                               : ncps::tensors_from_state(cfg, s);
    res_t = std::max({res_t, (Xt - X).cwiseAbs().maxCoeff(),
                      (Pt + P).cwiseAbs().maxCoeff(),
                      (tt.theta + t0.theta).cwiseAbs().maxCoeff(),
                      (tt.eta + t0.eta).cwiseAbs().maxCoeff()});
  }

  const double reversal_distance = ncps::reversal_experiment_extended(
      cfg, reversal_start_state(), prm.m, prm.k, prm.tau, prm.dt);

  const bool t_breaks = prm.alternative;
  const bool pass = res_algebra < kTolAlgebra && res_jacobi < kTolJacobi &&
                    res_rotation < kTolRotation &&
                    (t_breaks || res_t < kTolTimeReversal) &&
                    reversal_distance < kTolReversalDistance;

  ordered_json out;
  out["command"] = "verify";
  out["draws"] = prm.draws;
  out["seed"] = g.seed;
  out["tensors"] = prm.alternative ? "position_built" : "momentum_built";
  out["residuals"] = {{"algebra", res_algebra},
                      {"jacobi", res_jacobi},
                      {"rotation_equivariance", res_rotation},
                      {"time_reversal", res_t},
                      {"reversal_distance", reversal_distance}};
  out["tolerances"] = {{"algebra", kTolAlgebra},
                       {"jacobi", kTolJacobi},
                       {"rotation_equivariance", kTolRotation},
                       {"time_reversal", kTolTimeReversal},
                       {"reversal_distance", kTolReversalDistance}};
  if (t_breaks) out["time_reversal_flag"] = "EXPECTED_BREAKING";
  out["pass"] = pass;
  write_output(g, dump17(out));
  return pass ? 0 : 4;
}

// ---------------------------------------------------------------------------
// average

struct AverageParams {
  double l0 = 1.0, p0 = 1.0, lp = 1.0;
  double c_theta = 0.01, c_eta = 0.01;
  double m = 1.0, k = 1.0;
  std::int64_t n = 1'000'000;
  std::string point = "1,0,0,0,1,0";  // x then p
};

ordered_json estimate_json(const ncps::MomentEstimate& e) {
  return {{"analytic", e.analytic},
          {"mc", e.mc},
          {"std_error", e.std_error},
          {"pass_3sigma", e.within(3.0) || e.std_error == 0.0}};
}

int run_average(const AverageParams& prm, GlobalOpts& g) {
  ncps::TensorConfig cfg;
  cfg.c_theta = prm.c_theta;
  cfg.c_eta = prm.c_eta;
  cfg.l0 = prm.l0;
  cfg.p0 = prm.p0;
  const ncps::GroundStateSpec spec{prm.lp};
  const auto pt = parse_numbers(prm.point, 6, "--point");
  const Eigen::Vector3d x(pt[0], pt[1], pt[2]);
  const Eigen::Vector3d p(pt[3], pt[4], pt[5]);

  const ncps::MomentReport rep =
      ncps::moments_mc(spec, cfg, {prm.n, g.seed});

  bool moments_pass = true;
  auto add_triplet = [&](ordered_json& parent, const char* name,
                         const std::array<ncps::MomentEstimate, 3>& arr) {
    ordered_json list = ordered_json::array();
    for (const auto& e : arr) {
      list.push_back(estimate_json(e));
      moments_pass = moments_pass && (e.within(3.0) || e.std_error == 0.0);
    }
    parent[name] = list;
  };

  ordered_json moments;
  add_triplet(moments, "a_mean", rep.a_mean);
  add_triplet(moments, "pb_mean", rep.pb_mean);
  add_triplet(moments, "a_sq", rep.a_sq);
  add_triplet(moments, "pb_sq", rep.pb_sq);
  add_triplet(moments, "theta_i_sq", rep.theta_i_sq);
  add_triplet(moments, "eta_i_sq", rep.eta_i_sq);
  moments["theta_sq"] = estimate_json(rep.theta_sq);
  moments["eta_sq"] = estimate_json(rep.eta_sq);
  moments_pass =
      moments_pass && rep.theta_sq.within(3.0) && rep.eta_sq.within(3.0);

  const auto eff = ncps::effective_hamiltonian_mc(cfg, spec, prm.m, prm.k, x, p,
                                                  {prm.n, ncps::derive_seed(g.seed, 1)});

  ncps::TensorConfig th_flip = cfg;
  th_flip.c_theta = -cfg.c_theta;
  const auto sign_theta = ncps::effective_hamiltonian_paired_diff(
      cfg, th_flip, spec, prm.m, prm.k, x, p, {prm.n, ncps::derive_seed(g.seed, 2)});

  ncps::TensorConfig et_flip = cfg;
  et_flip.c_eta = -cfg.c_eta;
  const auto sign_eta = ncps::effective_hamiltonian_paired_diff(
      cfg, et_flip, spec, prm.m, prm.k, x, p, {prm.n, ncps::derive_seed(g.seed, 3)});

  const auto first_order = ncps::effective_hamiltonian_ctheta_derivative(
      ncps::TensorConfig{cfg}, spec, prm.m, prm.k, x, p,
      {prm.n, ncps::derive_seed(g.seed, 4)});

  const bool zero_se_ok = cfg.c_theta == 0.0 && cfg.c_eta == 0.0;
  const bool sign_pass =
      (sign_theta.consistent_with_zero(3.0) || (zero_se_ok && sign_theta.std_error == 0.0)) &&
      (sign_eta.consistent_with_zero(3.0) || (zero_se_ok && sign_eta.std_error == 0.0));
  const bool first_order_pass =
      first_order.consistent_with_zero(3.0) || first_order.std_error == 0.0;
  const bool pass = moments_pass && sign_pass && first_order_pass;

  ordered_json out;
  out["command"] = "average";
  out["n_samples"] = prm.n;
  out["seed"] = g.seed;
  out["l_p"] = prm.lp;
  out["moments"] = moments;
  out["effective_hamiltonian"] = {
      {"point", {{"x", {x[0], x[1], x[2]}}, {"p", {p[0], p[1], p[2]}}}},
      {"estimate", eff.estimate},
      {"std_error", eff.std_error},
      {"rejection_rate", eff.rejection_rate},
      {"sign_flip_theta",
       {{"difference", sign_theta.difference},
        {"std_error", sign_theta.std_error},
        {"pass_3sigma", sign_theta.consistent_with_zero(3.0)}}},
      {"sign_flip_eta",
       {{"difference", sign_eta.difference},
        {"std_error", sign_eta.std_error},
        {"pass_3sigma", sign_eta.consistent_with_zero(3.0)}}},
      {"first_order_derivative",
       {{"value", first_order.difference},
        {"std_error", first_order.std_error},
        {"pass_3sigma", first_order.consistent_with_zero(3.0)}}}};
  out["checks_pass"] = pass;
  write_output(g, dump17(out));
  return pass ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for classical dynamics on noncommutative phase space"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--config", g.config_path, "JSON config file; flags override its values");
  app.add_option("--out", g.out_path, "output path (default: stdout)");
  app.add_option("--format", g.format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  g.seed_opt = app.add_option("--seed", g.seed, "random seed");

  OrbitParams orbit;
  CLI::App* orbit_cmd =
      app.add_subcommand("orbit", "closed-form circular orbits in both directions");
  CLI::Option* orbit_opts[6] = {
      orbit_cmd->add_option("--m", orbit.m, "particle mass"),
      orbit_cmd->add_option("--k", orbit.k, "attraction strength"),
      orbit_cmd->add_option("--r0", orbit.r0, "orbit radius"),
      orbit_cmd->add_option("--theta", orbit.theta, "coordinate noncommutativity"),
      orbit_cmd->add_option("--eta", orbit.eta, "momentum noncommutativity"),
      orbit_cmd->add_option("--gamma", orbit.gamma, "bracket deformation"),
  };

  SimulateParams sim;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "integrate a trajectory to CSV");
  CLI::Option* sim_num[5] = {
      sim_cmd->add_option("--m", sim.m, "particle mass"),
      sim_cmd->add_option("--k", sim.k, "attraction strength"),
      sim_cmd->add_option("--theta", sim.theta, "coordinate noncommutativity"),
      sim_cmd->add_option("--eta", sim.eta, "momentum noncommutativity"),
      sim_cmd->add_option("--gamma", sim.gamma, "bracket deformation"),
  };
  CLI::Option* sim_state = sim_cmd->add_option("--state", sim.state, "initial state x1,x2,p1,p2");
  CLI::Option* sim_circ =
      sim_cmd->add_option("--circular", sim.circular, "circular start: ccw or cw");
  CLI::Option* sim_r0 = sim_cmd->add_option("--r0", sim.r0, "radius for --circular");
  CLI::Option* sim_dt = sim_cmd->add_option("--dt", sim.dt, "time step (default period/1e4)");
  CLI::Option* sim_steps = sim_cmd->add_option("--steps", sim.steps, "step count");
  CLI::Option* sim_measure =
      sim_cmd->add_flag("--measure-period", sim.measure, "measure the winding period");
  CLI::Option* sim_rev = sim_cmd->add_option(
      "--reversal", sim.reversal, "forward-flip-forward distance, tau=T or tau=<time>");

  RepsolveParams rep;
  CLI::App* rep_cmd =
      app.add_subcommand("repsolve", "solve canonical-variable representations");
  CLI::Option* rep_theta = rep_cmd->add_option("--theta", rep.theta, "target theta");
  CLI::Option* rep_eta = rep_cmd->add_option("--eta", rep.eta, "target eta");
  CLI::Option* rep_gamma = rep_cmd->add_option("--gamma", rep.gamma, "target gamma");
  CLI::Option* rep_branch =
      rep_cmd->add_option("--branch", rep.branch, "plus, minus or both");
  CLI::Option* rep_gz =
      rep_cmd->add_flag("--gamma-zero", rep.gamma_zero, "gamma = 0 family solver");
  CLI::Option* rep_t2 =
      rep_cmd->add_option("--theta2p", rep.theta2p, "free theta2' for --gamma-zero");
  CLI::Option* rep_sym = rep_cmd->add_option("--symmetric", rep.symmetric,
                                             "symmetric gamma = 0 branch: plus or minus");

  VerifyParams ver;
  CLI::App* ver_cmd =
      app.add_subcommand("verify", "verify the invariant extended algebra");
  CLI::Option* ver_opts[10] = {
      ver_cmd->add_option("--ctheta", ver.c_theta, "theta tensor coupling"),
      ver_cmd->add_option("--ceta", ver.c_eta, "eta tensor coupling"),
      ver_cmd->add_option("--l0", ver.l0, "position-built theta coupling"),
      ver_cmd->add_option("--p0", ver.p0, "position-built eta coupling"),
      ver_cmd->add_option("--mosc", ver.m_osc, "oscillator mass"),
      ver_cmd->add_option("--wosc", ver.omega_osc, "oscillator frequency"),
      ver_cmd->add_option("--m", ver.m, "particle mass"),
      ver_cmd->add_option("--k", ver.k, "attraction strength"),
      ver_cmd->add_option("--tau", ver.tau, "reversal horizon"),
      ver_cmd->add_option("--dt", ver.dt, "reversal time step"),
  };
  CLI::Option* ver_draws = ver_cmd->add_option("--draws", ver.draws, "random draw count");
  CLI::Option* ver_alt = ver_cmd->add_flag(
      "--alternative", ver.alternative, "use the position-built tensors (T-breaking)");

  AverageParams avg;
  CLI::App* avg_cmd =
      app.add_subcommand("average", "ground-state averaging, analytic vs Monte Carlo");
  CLI::Option* avg_opts[7] = {
      avg_cmd->add_option("--l0", avg.l0, "theta tensor constant"),
      avg_cmd->add_option("--p0", avg.p0, "eta tensor constant"),
      avg_cmd->add_option("--lp", avg.lp, "oscillator length"),
      avg_cmd->add_option("--ctheta", avg.c_theta, "theta coupling for <H_s>"),
      avg_cmd->add_option("--ceta", avg.c_eta, "eta coupling for <H_s>"),
      avg_cmd->add_option("--m", avg.m, "particle mass"),
      avg_cmd->add_option("--k", avg.k, "attraction strength"),
  };
  CLI::Option* avg_n = avg_cmd->add_option("--n", avg.n, "Monte Carlo sample count");
  CLI::Option* avg_point =
      avg_cmd->add_option("--point", avg.point, "particle point x1,x2,x3,p1,p2,p3");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }

  try {
    if (orbit_cmd->parsed()) {
      load_config(g, "orbit", {"m", "k", "r0", "theta", "eta", "gamma"});
      const char* keys[6] = {"m", "k", "r0", "theta", "eta", "gamma"};
      double* targets[6] = {&orbit.m, &orbit.k, &orbit.r0,
                            &orbit.theta, &orbit.eta, &orbit.gamma};
      for (int i = 0; i < 6; ++i) apply_config(g, keys[i], orbit_opts[i], targets[i]);
      return run_orbit(orbit, g);
    }
    if (sim_cmd->parsed()) {
      load_config(g, "simulate",
                  {"m", "k", "theta", "eta", "gamma", "state", "circular", "r0", "dt",
                   "steps", "measure_period", "reversal"});
      const char* keys[5] = {"m", "k", "theta", "eta", "gamma"};
      double* targets[5] = {&sim.m, &sim.k, &sim.theta, &sim.eta, &sim.gamma};
      for (int i = 0; i < 5; ++i) apply_config(g, keys[i], sim_num[i], targets[i]);
      apply_config(g, "state", sim_state, &sim.state);
      apply_config(g, "circular", sim_circ, &sim.circular);
      apply_config(g, "r0", sim_r0, &sim.r0);
      apply_config(g, "dt", sim_dt, &sim.dt);
      apply_config(g, "steps", sim_steps, &sim.steps);
      apply_config(g, "measure_period", sim_measure, &sim.measure);
      apply_config(g, "reversal", sim_rev, &sim.reversal);
      return run_simulate(sim, g);
    }
    if (rep_cmd->parsed()) {
      load_config(g, "repsolve",
                  {"theta", "eta", "gamma", "branch", "gamma_zero", "theta2p",
                   "symmetric"});
      apply_config(g, "theta", rep_theta, &rep.theta);
      apply_config(g, "eta", rep_eta, &rep.eta);
      apply_config(g, "gamma", rep_gamma, &rep.gamma);
      apply_config(g, "branch", rep_branch, &rep.branch);
      apply_config(g, "gamma_zero", rep_gz, &rep.gamma_zero);
      apply_config(g, "theta2p", rep_t2, &rep.theta2p);
      apply_config(g, "symmetric", rep_sym, &rep.symmetric);
      return run_repsolve(rep, g);
    }
    if (ver_cmd->parsed()) {
      load_config(g, "verify",
                  {"ctheta", "ceta", "l0", "p0", "mosc", "wosc", "m", "k", "tau", "dt",
                   "draws", "alternative"});
      const char* keys[10] = {"ctheta", "ceta", "l0", "p0", "mosc",
                              "wosc",   "m",    "k",  "tau", "dt"};
      double* targets[10] = {&ver.c_theta, &ver.c_eta, &ver.l0, &ver.p0, &ver.m_osc,
                             &ver.omega_osc, &ver.m, &ver.k, &ver.tau, &ver.dt};
      for (int i = 0; i < 10; ++i) apply_config(g, keys[i], ver_opts[i], targets[i]);
      apply_config(g, "draws", ver_draws, &ver.draws);
      apply_config(g, "alternative", ver_alt, &ver.alternative);
      return run_verify(ver, g);
    }
    if (avg_cmd->parsed()) {
      load_config(g, "average",
                  {"l0", "p0", "lp", "ctheta", "ceta", "m", "k", "n", "point"});
      const char* keys[7] = {"l0", "p0", "lp", "ctheta", "ceta", "m", "k"};
      double* targets[7] = {&avg.l0, &avg.p0, &avg.lp, &avg.c_theta,
                            &avg.c_eta, &avg.m, &avg.k};
      for (int i = 0; i < 7; ++i) apply_config(g, keys[i], avg_opts[i], targets[i]);
      apply_config(g, "n", avg_n, &avg.n);
      apply_config(g, "point", avg_point, &avg.point);
      return run_average(avg, g);
    }
  } catch (const ncps::Error& e) {
    ordered_json err;
    err["error"]["code"] = e.code();
    err["error"]["message"] = e.what();
    std::cerr << dump17(err);
    return exit_code_for(e.code());
  }
  return 64;
}
