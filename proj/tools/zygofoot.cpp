// zygofoot: reachable-set, perch and tendon-lock simulations for the
// zygodactyl foot model, emitting csv/ply/svg/json artifacts.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "schema_embed.hpp"
#include "zygo/foot.hpp"
#include "zygo/io.hpp"
#include "zygo/kernels.hpp"
#include "zygo/perch.hpp"
#include "zygo/reachability.hpp"
#include "zygo/tlm.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

double parse_rho(const std::string& token) {
  if (token == "phi" || token == "golden" || token == "golden-mean") return zygo::kGoldenMean;
  return std::stod(token);
}

std::vector<double> parse_controls(const std::string& token) {
  std::vector<double> out;
  std::stringstream ss(token);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

// Writes through a temporary ostream when the target is "-" (stdout).
void with_output(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  if (path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw zygo::ArgumentError("cannot open '" + path + "' for writing");
  fn(os);
}

struct ReachArgs {
  int finger = 3;
  int depth = 4;
  int resolution = 8;
  std::string rho = "phi";
  std::string omega = "pi/6";
  std::string plane_angle;  // empty: use the finger's plane
  std::string format = "csv";
  std::string output;
  long long budget = static_cast<long long>(zygo::kDefaultPointBudget);
};

int run_reach(const ReachArgs& a) {
  if (a.format != "csv" && a.format != "ply" && a.format != "svg" && a.format != "json")
    throw zygo::ArgumentError("--format must be one of csv, ply, svg, json");
  zygo::FootSpec foot = zygo::default_parrot_foot();
  double rho = parse_rho(a.rho);
  double omega = zygo::io::parse_angle(a.omega);
  for (auto& f : foot.fingers) {
    f.rho = rho;
    f.omega = omega;
  }
  double plane = a.plane_angle.empty() ? foot.plane_angle(a.finger)
                                       : zygo::io::parse_angle(a.plane_angle);

  const zygo::FingerSpec& f = foot.finger(a.finger);
  if (a.depth > f.phalanx_count)
    throw zygo::ArgumentError("--depth exceeds the phalanx count of finger " +
                              std::to_string(a.finger));
  zygo::PointCloud2 planar =
      zygo::reachable_set(f, a.depth, a.resolution, static_cast<std::size_t>(a.budget));
  zygo::PointCloud3 cloud = zygo::embed_finger(planar, plane);

  std::string output = a.output.empty() ? ("reach." + a.format) : a.output;
  double scale_radius = 1.0 / (rho - 1.0);
  // the format flag decides the encoding even when the extension disagrees
  with_output(output, [&](std::ostream& os) {
    if (a.format == "csv") zygo::io::write_cloud_csv(os, cloud);
    else if (a.format == "ply") zygo::io::write_cloud_ply(os, cloud);
    else if (a.format == "json") zygo::io::write_cloud_json(os, cloud, planar.depth, planar.resolution);
    else if (a.format == "svg") zygo::io::write_cloud_svg(os, cloud, scale_radius);
    else throw zygo::ArgumentError("--format must be one of csv, ply, svg, json");
  });
  return kExitOk;
}

struct PerchArgs {
  std::string mode = "solve-branch";
  std::string ellipse_mode = "geometric";
  std::string controls_fwd = "1,1,1,1";
  std::string controls_bwd = "1,1";
  int k_fwd = 0;  // 0: search over all phalanx pairs
  int k_bwd = 0;
  int fwd_count = 4;
  int bwd_count = 2;
  int grid = 2;
  double radius = 0.0;
  double center_z = 0.0;
  bool have_center_z = false;
  std::string rho = "phi";
  std::string omega = "pi/6";
  std::string plane_angle = "pi/12";
  std::string output;
  long long budget = 10'000'000;
};

int run_perch(const PerchArgs& a) {
  double rho = parse_rho(a.rho);
  double omega = zygo::io::parse_angle(a.omega);
  double plane = zygo::io::parse_angle(a.plane_angle);
  zygo::EllipseMode mode;
  if (a.ellipse_mode == "paper") mode = zygo::EllipseMode::Paper;
  else if (a.ellipse_mode == "geometric") mode = zygo::EllipseMode::Geometric;
  else throw zygo::ArgumentError("--ellipse-mode must be 'paper' or 'geometric'");

  zygo::FingerSpec fwd;
  fwd.rho = rho;
  fwd.omega = omega;
  fwd.theta0 = 0.0;
  fwd.chirality = +1;
  fwd.phalanx_count = a.fwd_count;
  zygo::FingerSpec bwd;
  bwd.rho = rho;
  bwd.omega = omega;
  bwd.theta0 = zygo::kPi;
  bwd.chirality = -1;
  bwd.phalanx_count = a.bwd_count;

  std::vector<zygo::BranchSolution> solutions;
  if (a.mode == "solve-branch") {
    zygo::ControlSequence cf = parse_controls(a.controls_fwd);
    zygo::ControlSequence cb = parse_controls(a.controls_bwd);
    std::vector<std::pair<int, int>> pairs;
    if (a.k_fwd > 0 && a.k_bwd > 0) {
      pairs.emplace_back(a.k_fwd, a.k_bwd);
    } else {
      for (int kf = 1; kf <= fwd.phalanx_count; ++kf)
        for (int kb = 1; kb <= bwd.phalanx_count; ++kb) pairs.emplace_back(kf, kb);
    }
    for (auto [kf, kb] : pairs) {
      solutions.push_back(
          zygo::solve_branch({fwd, cf, kf}, {bwd, cb, kb}, plane, mode));
    }
    std::stable_sort(solutions.begin(), solutions.end(),
                     [](const zygo::BranchSolution& x, const zygo::BranchSolution& y) {
                       if (x.converged != y.converged) return x.converged;
                       if (x.converged) return x.cylinder.radius < y.cylinder.radius;
                       return x.residual_norm < y.residual_norm;
                     });
  } else if (a.mode == "search-grasp") {
    if (!(a.radius > 0.0)) throw zygo::ArgumentError("--radius must be > 0 for search-grasp");
    zygo::CylinderBranch branch;
    branch.radius = a.radius;
    branch.axis_x = 0.0;
    branch.axis_z = a.have_center_z ? a.center_z : -a.radius;
    solutions = zygo::search_grasp(fwd, bwd, plane, mode, branch, a.grid,
                                   static_cast<std::size_t>(a.budget));
  } else {
    throw zygo::ArgumentError("--mode must be 'solve-branch' or 'search-grasp'");
  }

  nlohmann::json report = zygo::io::perch_report(solutions, a.mode, a.ellipse_mode);
  std::string output = a.output.empty() ? "perch-report.json" : a.output;
  with_output(output, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
  return kExitOk;
}

struct TlmArgs {
  std::string obstacle;
  double engagement_time = 1.0;
  double dt = 0.01;
  double duration = 2.0;
  std::string profile = "linear";
  double v_end = 1.0;
  std::string free_controls = "zero";
  std::string rho = "phi";
  std::string omega = "pi/6";
  std::string output_csv = "tlm.csv";
  std::string output_events = "tlm-events.json";
  std::string output_svg;
};

int run_tlm(const TlmArgs& a) {
  zygo::FootSpec foot = zygo::default_parrot_foot();
  double rho = parse_rho(a.rho);
  double omega = zygo::io::parse_angle(a.omega);
  for (auto& f : foot.fingers) {
    f.rho = rho;
    f.omega = omega;
  }
  if (a.obstacle.empty()) throw zygo::ArgumentError("--obstacle is required");

  zygo::Scenario scenario;
  scenario.duration = a.duration;
  scenario.dt = a.dt;
  scenario.obstacle = zygo::io::parse_obstacle(a.obstacle);
  scenario.free_controls = zygo::io::parse_free_controls(a.free_controls, foot);
  if (a.profile == "linear") {
    scenario.profile = zygo::TlmProfile::linear(a.engagement_time, a.v_end);
  } else {
    std::ifstream is(a.profile);
    if (!is) throw zygo::ArgumentError("cannot open profile file '" + a.profile + "'");
    nlohmann::json j = nlohmann::json::parse(is);
    std::vector<std::pair<double, double>> samples;
    for (const auto& s : j) samples.emplace_back(s.at(0).get<double>(), s.at(1).get<double>());
    scenario.profile = zygo::TlmProfile::from_samples(a.engagement_time, samples);
  }

  zygo::Trajectory traj = zygo::simulate(foot, scenario);

  with_output(a.output_csv, [&](std::ostream& os) { zygo::io::write_trajectory_csv(os, traj); });
  with_output(a.output_events,
              [&](std::ostream& os) { os << zygo::io::events_to_json(traj.events).dump(2) << '\n'; });
  if (!a.output_svg.empty())
    with_output(a.output_svg, [&](std::ostream& os) { zygo::io::write_talon_svg(os, traj); });
  return kExitOk;
}

int run_hausdorff(const std::string& file_a, const std::string& file_b) {
  zygo::PointCloud3 a = zygo::io::read_cloud_file(file_a);
  zygo::PointCloud3 b = zygo::io::read_cloud_file(file_b);
  if (a.points.empty() || b.points.empty())
    throw zygo::ArgumentError("hausdorff distance needs non-empty clouds");

  auto soa = [](const zygo::PointCloud3& c, std::vector<double>& x, std::vector<double>& y,
                std::vector<double>& z) {
    for (const zygo::Vec3& p : c.points) {
      x.push_back(p.x);
      y.push_back(p.y);
      z.push_back(p.z);
    }
  };
  std::vector<double> ax, ay, az, bx, by, bz;
  soa(a, ax, ay, az);
  soa(b, bx, by, bz);
  double d2 = std::max(
      zygo::kernels::directed_max_min_sq3(ax.data(), ay.data(), az.data(), ax.size(), bx.data(),
                                          by.data(), bz.data(), bx.size()),
      zygo::kernels::directed_max_min_sq3(bx.data(), by.data(), bz.data(), bx.size(), ax.data(),
                                          ay.data(), az.data(), ax.size()));
  std::printf("%.12g\n", std::sqrt(d2));
  return kExitOk;
}

// ---- config file support ----------------------------------------------------

std::string json_to_flag_value(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v.get<double>());
  return buf;
}

// Fills flags from the config section unless they already appear on the
// command line. Returns the amended argument list.
std::vector<std::string> apply_config(std::vector<std::string> args) {
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }
  if (config_path.empty()) return args;

  std::ifstream is(config_path);
  if (!is) throw zygo::ArgumentError("cannot open config file '" + config_path + "'");
  nlohmann::json cfg = nlohmann::json::parse(is);
  nlohmann::json schema = nlohmann::json::parse(zygo::embedded::kConfigSchema);
  auto errors = zygo::io::validate_against_schema(cfg, schema);
  if (!errors.empty()) {
    std::string msg = "config file rejected by schema:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw zygo::ArgumentError(msg);
  }

  std::string subcommand;
  for (const auto& arg : args) {
    if (!arg.empty() && arg[0] != '-') {
      subcommand = arg;
      break;
    }
  }
  if (subcommand.empty() || !cfg.contains(subcommand)) return args;

  for (auto it = cfg[subcommand].begin(); it != cfg[subcommand].end(); ++it) {
    std::string flag = "--" + it.key();
    bool present = false;
    for (const auto& arg : args) {
      if (arg == flag || arg.rfind(flag + "=", 0) == 0) {
        present = true;
        break;
      }
    }
    if (!present) {
      args.push_back(flag);
      args.push_back(json_to_flag_value(it.value()));
    }
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zygodactyl foot kinematics toolkit"};
  app.require_subcommand(1);
  std::string config_file;

  ReachArgs reach;
  auto* cmd_reach = app.add_subcommand("reach", "compute a toe's reachable set");
  cmd_reach->add_option("--finger", reach.finger, "toe index 1..4")->check(CLI::Range(1, 4));
  cmd_reach->add_option("--depth", reach.depth, "iteration depth k");
  cmd_reach->add_option("--resolution", reach.resolution, "control samples m");
  cmd_reach->add_option("--rho", reach.rho, "scaling factor (number or 'phi')");
  cmd_reach->add_option("--omega", reach.omega, "max rotation (radians or 'pi/6')");
  cmd_reach->add_option("--plane-angle", reach.plane_angle, "override the finger plane angle");
  cmd_reach->add_option("--format", reach.format, "csv|ply|svg|json");
  cmd_reach->add_option("--output", reach.output, "output path ('-' for stdout)");
  cmd_reach->add_option("--budget", reach.budget, "point budget");
  cmd_reach->add_option("--config", config_file, "JSON config file");

  PerchArgs perch;
  auto* cmd_perch = app.add_subcommand("perch", "branch tangency and grasp search");
  cmd_perch->add_option("--mode", perch.mode, "solve-branch|search-grasp");
  cmd_perch->add_option("--ellipse-mode", perch.ellipse_mode, "paper|geometric");
  cmd_perch->add_option("--controls-fwd", perch.controls_fwd, "forward controls, comma list");
  cmd_perch->add_option("--controls-bwd", perch.controls_bwd, "backward controls, comma list");
  cmd_perch->add_option("--k-fwd", perch.k_fwd, "forward tangent phalanx (0: search)");
  cmd_perch->add_option("--k-bwd", perch.k_bwd, "backward tangent phalanx (0: search)");
  cmd_perch->add_option("--fwd-count", perch.fwd_count, "forward phalanx count");
  cmd_perch->add_option("--bwd-count", perch.bwd_count, "backward phalanx count");
  cmd_perch->add_option("--grid", perch.grid, "control grid resolution for search-grasp");
  cmd_perch->add_option("--radius", perch.radius, "fixed branch radius (search-grasp)");
  auto* czopt = cmd_perch->add_option("--center-z", perch.center_z, "fixed branch axis height");
  cmd_perch->add_option("--rho", perch.rho);
  cmd_perch->add_option("--omega", perch.omega);
  cmd_perch->add_option("--plane-angle", perch.plane_angle);
  cmd_perch->add_option("--output", perch.output, "report path ('-' for stdout)");
  cmd_perch->add_option("--budget", perch.budget, "search budget");
  cmd_perch->add_option("--config", config_file, "JSON config file");

  TlmArgs tlm;
  auto* cmd_tlm = app.add_subcommand("tlm", "tendon-lock hybrid simulation");
  cmd_tlm->add_option("--obstacle", tlm.obstacle, "sphere:cx,cy,cz,r | cylinder:ax,az,r");
  cmd_tlm->add_option("--T", tlm.engagement_time, "engagement time");
  cmd_tlm->add_option("--dt", tlm.dt, "time step");
  cmd_tlm->add_option("--duration", tlm.duration, "simulated time span");
  cmd_tlm->add_option("--profile", tlm.profile, "'linear' or a samples json file");
  cmd_tlm->add_option("--v-end", tlm.v_end, "linear profile endpoint v(T)");
  cmd_tlm->add_option("--free-controls", tlm.free_controls, "zero | constant:v | ramp:toe,rate");
  cmd_tlm->add_option("--rho", tlm.rho);
  cmd_tlm->add_option("--omega", tlm.omega);
  cmd_tlm->add_option("--output-csv", tlm.output_csv, "trajectory csv path");
  cmd_tlm->add_option("--output-events", tlm.output_events, "events json path");
  cmd_tlm->add_option("--output-svg", tlm.output_svg, "talon trajectory svg path");
  cmd_tlm->add_option("--config", config_file, "JSON config file");

  std::string hd_a, hd_b;
  auto* cmd_hd = app.add_subcommand("hausdorff", "distance between two cloud files");
  cmd_hd->add_option("fileA", hd_a)->required();
  cmd_hd->add_option("fileB", hd_b)->required();
  cmd_hd->add_option("--config", config_file, "JSON config file");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = apply_config(args);
    // CLI11 consumes reversed argument vectors
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);

    if (cmd_perch->parsed()) perch.have_center_z = czopt->count() > 0;

    if (cmd_reach->parsed()) return run_reach(reach);
    if (cmd_perch->parsed()) return run_perch(perch);
    if (cmd_tlm->parsed()) return run_tlm(tlm);
    if (cmd_hd->parsed()) return run_hausdorff(hd_a, hd_b);
    return kExitUsage;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  } catch (const zygo::ResourceError& e) {
    std::cerr << "resource error: " << e.what() << '\n';
    return kExitBudget;
  } catch (const zygo::ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
