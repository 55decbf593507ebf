// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Library-level checks run in process; determinism checks drive the
// actual zygofoot binary.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "support/independent_check.hpp"
#include "zygo/foot.hpp"
#include "zygo/io.hpp"
#include "zygo/perch.hpp"
#include "zygo/reachability.hpp"
#include "zygo/tlm.hpp"

using namespace zygo;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

FingerSpec make_spec(double rho, double omega, double theta0 = 0.0, int chi = +1, int count = 5) {
  FingerSpec s;
  s.rho = rho;
  s.omega = omega;
  s.theta0 = theta0;
  s.chirality = chi;
  s.phalanx_count = count;
  return s;
}

FingerSpec perch_fwd() { return make_spec(kGoldenMean, kPi / 6, 0.0, +1, 4); }
FingerSpec perch_bwd() { return make_spec(kGoldenMean, kPi / 6, kPi, -1, 2); }

oracle::FingerParams oracle_params(const FingerSpec& s) {
  return {static_cast<long double>(s.rho), static_cast<long double>(s.omega),
          static_cast<long double>(s.theta0), s.chirality};
}

// worst independent incidence/parallelism component of one finger of a solution
double independent_component(const BranchSolution& sol, const FingerSpec& spec, bool fwd,
                             double plane, EllipseMode mode) {
  bool paper = mode == EllipseMode::Paper;
  const TangencySolution& tan = fwd ? sol.tangency_fwd : sol.tangency_bwd;
  const ControlSequence& seq = fwd ? sol.controls_fwd : sol.controls_bwd;
  int k = fwd ? sol.k_fwd : sol.k_bwd;
  auto r = oracle::tangency_residual(oracle_params(spec), seq, k, tan.t, tan.theta,
                                     sol.cylinder.axis_z, sol.cylinder.radius, plane, paper);
  long double worst = 0.0L;
  for (auto c : r) worst = std::max(worst, std::abs(c));
  return static_cast<double>(worst);
}

std::string run_cli(const std::string& bin, const std::string& args) {
  std::string cmd = bin + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  if (status != 0) return "exit " + std::to_string(status);
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// ---- criteria ----------------------------------------------------------------

void criterion_1_perch_branch() {
  auto t0 = std::chrono::steady_clock::now();
  auto sol = solve_branch({perch_fwd(), {1, 1, 1, 1}, 2}, {perch_bwd(), {1, 1}, 2}, kPi / 12,
                          EllipseMode::Geometric);
  double elapsed = seconds_since(t0);

  bool pass = sol.converged && sol.residual_norm <= 1e-8 && sol.cylinder.radius >= 0.53 &&
              sol.cylinder.radius <= 0.63 && sol.cylinder.axis_x == 0.0 &&
              std::abs(sol.cylinder.axis_z + sol.cylinder.radius) <= 0.05 && elapsed < 5.0;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "all-ones perch branch: r=%.4f (band [0.53,0.63]), c_z=%.4f (|c_z+r|=%.4f <= 0.05), "
                "residual=%.2e, %.2fs",
                sol.cylinder.radius, sol.cylinder.axis_z,
                std::abs(sol.cylinder.axis_z + sol.cylinder.radius), sol.residual_norm, elapsed);
  report(1, pass, buf);

  // diagnostic only: the squashed-section convention lands on the same
  // tangency family at a larger radius, outside the band
  auto paper = solve_branch({perch_fwd(), {1, 1, 1, 1}, 2}, {perch_bwd(), {1, 1}, 2}, kPi / 12,
                            EllipseMode::Paper);
  std::printf("       (diagnostic, non-gating: paper-mode section convention gives r=%.4f)\n",
              paper.cylinder.radius);
}

const std::vector<double> kGridRho = {1.2, kGoldenMean, 2.0};
const std::vector<double> kGridOmega = {kPi / 12, kPi / 6, kPi / 2};
const std::vector<int> kGridM = {2, 3, 4};

void criterion_2_oracle_and_4_bound(std::vector<PointCloud2>* grid_clouds) {
  auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (double rho : kGridRho) {
    for (double omega : kGridOmega) {
      for (int m : kGridM) {
        for (int k = 1; k <= 5; ++k) {
          auto spec = make_spec(rho, omega);
          auto ifs = reachable_set(spec, k, m);
          auto brute = reachable_set_bruteforce(spec, k, m);
          worst = std::max(worst, hausdorff_distance(ifs, brute));
          grid_clouds->push_back(std::move(ifs));
        }
      }
    }
  }
  double elapsed = seconds_since(t0);
  bool pass = worst <= 1e-12 && elapsed < 60.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "oracle equivalence over 135 grid cases: worst hausdorff %.3e <= 1e-12, %.2fs",
                worst, elapsed);
  report(2, pass, buf);
}

void criterion_3_contraction() {
  std::mt19937_64 rng(0x5EEDBEEF);  // fixed seed: deterministic suite
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  bool pass = true;
  double worst_excess = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    double rho = 1.25 + 1.5 * u01(rng);
    double omega = 0.15 + 5.9 * u01(rng);
    if (std::abs(omega - kPi) < 0.05) omega += 0.1;
    int m = 2 + static_cast<int>(u01(rng) * 2);  // 2 or 3

    std::vector<MapParams> maps;
    auto spec = make_spec(rho, omega);
    for (double v : spec.control_set.materialize(m)) maps.push_back({v, rho, omega});

    PointCloud2 prev;
    prev.points = {Complex(0, 0)};
    std::vector<double> gaps;
    for (int k = 1; k <= 7; ++k) {
      auto next = hutchinson_step(maps, prev);
      gaps.push_back(hausdorff_distance(next, prev));
      prev = std::move(next);
    }
    for (int k = 1; k <= 6; ++k) {
      double excess = gaps[static_cast<std::size_t>(k)] -
                      (gaps[static_cast<std::size_t>(k - 1)] / rho + 1e-12);
      worst_excess = std::max(worst_excess, excess);
      if (excess > 0.0) pass = false;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "hutchinson gap contraction on 20 seeded specs, k=1..6: worst excess %.3e",
                worst_excess);
  report(3, pass, buf);
}

void criterion_4_reach_bound(const std::vector<PointCloud2>& grid_clouds) {
  bool pass = true;
  double worst_ratio = 0.0;
  std::size_t idx = 0;
  for (double rho : kGridRho) {
    double bound = 1.0 / (rho - 1.0) + 1e-9;
    for (std::size_t i = 0; i < kGridOmega.size() * kGridM.size() * 5; ++i, ++idx) {
      for (const auto& p : grid_clouds[idx].points) {
        worst_ratio = std::max(worst_ratio, std::abs(p) / bound);
        if (std::abs(p) > bound) pass = false;
      }
    }
  }

  // embedded 3-space clouds at the default scaling
  FootSpec foot = default_parrot_foot();
  for (double omega : {kPi / 12, kPi / 6}) {
    for (auto& f : foot.fingers) f.omega = omega;
    auto cloud = foot_reachable(foot, 3, 4, 8);
    double bound = 1.0 / (kGoldenMean - 1.0) + 1e-9;
    for (const auto& p : cloud.points) {
      worst_ratio = std::max(worst_ratio, norm(p) / bound);
      if (norm(p) > bound) pass = false;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "reach bound |x| <= 1/(rho-1)+1e-9 on grid and embedded clouds: worst ratio %.6f",
                worst_ratio);
  report(4, pass, buf);
}

void criterion_5_tangency_verification() {
  bool pass = true;
  double worst = 0.0;
  int checked = 0;

  auto check_solution = [&](const BranchSolution& sol, EllipseMode mode) {
    if (!sol.converged) return;
    double rf = independent_component(sol, perch_fwd(), true, kPi / 12, mode);
    double rb = independent_component(sol, perch_bwd(), false, kPi / 12, mode);
    worst = std::max({worst, rf, rb});
    if (rf > 1e-8 || rb > 1e-8) pass = false;
    ++checked;
  };

  for (EllipseMode mode : {EllipseMode::Geometric, EllipseMode::Paper}) {
    for (int kf = 1; kf <= 4; ++kf) {
      for (int kb = 1; kb <= 2; ++kb) {
        check_solution(
            solve_branch({perch_fwd(), {1, 1, 1, 1}, kf}, {perch_bwd(), {1, 1}, kb}, kPi / 12, mode),
            mode);
      }
    }
  }

  auto base = solve_branch({perch_fwd(), {1, 1, 1, 1}, 2}, {perch_bwd(), {1, 1}, 2}, kPi / 12,
                           EllipseMode::Geometric);
  for (const auto& sol :
       search_grasp(perch_fwd(), perch_bwd(), kPi / 12, EllipseMode::Geometric, base.cylinder, 2)) {
    if (!sol.converged) continue;
    check_solution(sol, EllipseMode::Geometric);
  }

  // single-tangency path
  auto spec = make_spec(2.0, kPi / 2, 0.0, +1, 1);
  EllipseSection e = EllipseSection::from_branch({0.5, 0.0, -0.5}, 0.0, EllipseMode::Paper);
  auto tan = solve_tangency(spec, {0.0}, 1, e);
  if (tan.converged) {
    auto r = oracle::tangency_residual(oracle_params(spec), {0.0}, 1, tan.t, tan.theta, -0.5, 0.5,
                                       0.0, true);
    for (auto c : r) {
      worst = std::max(worst, static_cast<double>(std::abs(c)));
      if (std::abs(c) > 1e-8) pass = false;
    }
    ++checked;
  }

  pass = pass && checked >= 6;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "independent re-evaluation of %d converged solutions: worst component %.3e <= 1e-8",
                checked, worst);
  report(5, pass, buf);
}

void criterion_6_grasp_suite() {
  bool pass = grasp_condition({1, 0}, {-1, 0});
  if (grasp_condition({1, 0}, {0, 1})) pass = false;  // strict at the boundary

  std::mt19937_64 rng(0xFEEDFACE);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    Complex a(u(rng), u(rng)), b(u(rng), u(rng));
    if (std::abs(a) < 1e-3 || std::abs(b) < 1e-3) continue;
    bool base = grasp_condition(a, b);
    double phi = kPi * u(rng);
    Complex rot(std::cos(phi), std::sin(phi));
    if (grasp_condition(a * rot, b * rot) != base) pass = false;
  }
  report(6, pass, "grasp flag: antipodal true, orthogonal false, invariant under 100 rotations");
}

Scenario scenario_from_config(const fs::path& path, const FootSpec& foot) {
  std::ifstream f(path);
  nlohmann::json j = nlohmann::json::parse(f);
  const auto& t = j.at("tlm");
  Scenario sc;
  sc.duration = t.at("duration").get<double>();
  sc.dt = t.at("dt").get<double>();
  sc.obstacle = io::parse_obstacle(t.at("obstacle").get<std::string>());
  sc.free_controls = io::parse_free_controls(t.at("free-controls").get<std::string>(), foot);
  sc.profile = TlmProfile::linear(t.at("T").get<double>());
  return sc;
}

void criterion_7_tlm() {
  FootSpec foot = default_parrot_foot();
  bool pass = true;
  std::string detail;

  {  // (a) far obstacle, 1e4 steps, no events
    Scenario sc;
    sc.duration = 10.0;
    sc.dt = 0.001;
    sc.obstacle = SphereObstacle{{10, 10, 10}, 1.0};
    sc.profile = TlmProfile::linear(1.0);
    sc.free_controls = constant_controls(foot, 0.0);
    auto traj = simulate(foot, sc);
    bool ok = traj.events.empty() && traj.snapshots.size() == 10001;
    if (!ok) pass = false;
    detail += ok ? "a:ok" : "a:FAIL";
  }

  Trajectory origin_traj;
  {  // (b) origin obstacle: exactly [engaged, locked], lock at elapsed T +- dt
    Scenario sc;
    sc.duration = 2.0;
    sc.dt = 0.1;
    sc.obstacle = SphereObstacle{{0, 0, 0}, 0.5};
    sc.profile = TlmProfile::linear(1.0);
    sc.free_controls = constant_controls(foot, 0.0);
    origin_traj = simulate(foot, sc);
    bool ok = origin_traj.events.size() == 2 &&
              origin_traj.events[0].kind == TlmEvent::Kind::Engaged &&
              origin_traj.events[1].kind == TlmEvent::Kind::Locked;
    if (ok) {
      double elapsed_at_lock = origin_traj.events[1].time - origin_traj.events[0].time;
      ok = std::abs(elapsed_at_lock - 1.0) <= 0.1 + 1e-12;
    }
    if (!ok) pass = false;
    detail += ok ? " b:ok" : " b:FAIL";
  }

  {  // (c) post-lock snapshots identical
    bool ok = true;
    const Snapshot* locked = nullptr;
    for (const auto& snap : origin_traj.snapshots) {
      if (snap.mode != TlmMode::Locked) continue;
      if (!locked) locked = &snap;
      else if (!same_pose(*locked, snap)) ok = false;
    }
    ok = ok && locked != nullptr;
    if (!ok) pass = false;
    detail += ok ? " c:ok" : " c:FAIL";
  }

  {  // (d) spread controls + v(0)=0: no jump across the switch
    double jump = 0.0;
    for (std::size_t i = 1; i < origin_traj.snapshots.size(); ++i) {
      if (origin_traj.snapshots[i].mode == TlmMode::Engaged &&
          origin_traj.snapshots[i - 1].mode == TlmMode::Free) {
        for (int toe = 0; toe < 4; ++toe)
          jump = std::max(jump, norm(origin_traj.snapshots[i].talons[static_cast<std::size_t>(toe)] -
                                     origin_traj.snapshots[i - 1].talons[static_cast<std::size_t>(toe)]));
      }
    }
    bool ok = jump <= 1e-12;
    if (!ok) pass = false;
    detail += ok ? " d:ok" : " d:FAIL";
  }

  {  // (e) guard persistence on the three canonical scenarios
    bool ok = true;
    for (const char* name : {"perch-branch.json", "clutch-prey.json", "touch-origin.json"}) {
      fs::path path = fs::path(ZYGO_SOURCE_DIR) / "scenarios" / name;
      auto traj = simulate(foot, scenario_from_config(path, foot));
      bool engaged = false;
      for (const auto& e : traj.events) {
        if (e.kind == TlmEvent::Kind::Engaged) engaged = true;
        if (e.kind == TlmEvent::Kind::GuardViolation) ok = false;
      }
      ok = ok && engaged;
    }
    if (!ok) pass = false;
    detail += ok ? " e:ok" : " e:FAIL";
  }

  report(7, pass, "tlm state machine: " + detail);
}

void criterion_8_determinism(const std::string& bin) {
  fs::path dir = fs::temp_directory_path() / "zygo_acceptance";
  fs::create_directories(dir);
  bool pass = true;
  std::string detail;

  auto rerun_identical = [&](const std::string& label, const std::string& args,
                             const std::vector<fs::path>& outputs) {
    std::vector<std::string> first;
    for (int round = 0; round < 2; ++round) {
      std::string err = run_cli(bin, args);
      if (!err.empty()) {
        pass = false;
        detail += " " + label + ":" + err;
        return;
      }
      if (round == 0) {
        for (const auto& p : outputs) first.push_back(slurp(p));
      } else {
        for (std::size_t i = 0; i < outputs.size(); ++i) {
          if (slurp(outputs[i]) != first[i]) pass = false;
        }
      }
    }
    detail += " " + label + (pass ? ":ok" : ":FAIL");
  };

  fs::path branch_report = dir / "branch.json";
  rerun_identical("perch",
                  "perch --mode solve-branch --ellipse-mode geometric --k-fwd 2 --k-bwd 2 --output " +
                      branch_report.string(),
                  {branch_report});

  fs::path reach = dir / "reach.csv";
  rerun_identical("reach", "reach --finger 3 --depth 4 --resolution 4 --output " + reach.string(),
                  {reach});

  fs::path csv = dir / "tlm.csv";
  fs::path ev = dir / "tlm-events.json";
  fs::path cfg = fs::path(ZYGO_SOURCE_DIR) / "scenarios" / "touch-origin.json";
  rerun_identical("tlm",
                  "tlm --config " + cfg.string() + " --output-csv " + csv.string() +
                      " --output-events " + ev.string(),
                  {csv, ev});

  // in-process: the full criterion-2 grid serializes to identical bytes
  auto serialize_grid = [&]() {
    std::stringstream ss;
    for (double rho : kGridRho)
      for (double omega : kGridOmega)
        for (int m : kGridM)
          for (int k = 1; k <= 5; ++k) {
            auto cloud = reachable_set(make_spec(rho, omega), k, m);
            io::write_cloud_csv(ss, embed_finger(cloud, kPi / 12));
          }
    return ss.str();
  };
  bool grid_ok = serialize_grid() == serialize_grid();
  if (!grid_ok) pass = false;
  detail += grid_ok ? " grid:ok" : " grid:FAIL";

  fs::remove_all(dir);
  report(8, pass, "byte-identical reruns:" + detail);
}

}  // namespace

int main(int argc, char** argv) {
  std::string bin = argc > 1 ? argv[1] : ZYGOFOOT_BIN;

  criterion_1_perch_branch();
  std::vector<PointCloud2> grid_clouds;
  criterion_2_oracle_and_4_bound(&grid_clouds);
  criterion_3_contraction();
  criterion_4_reach_bound(grid_clouds);
  criterion_5_tangency_verification();
  criterion_6_grasp_suite();
  criterion_7_tlm();
  criterion_8_determinism(bin);

  if (g_failures) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
