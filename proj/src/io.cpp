#include "zygo/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace zygo::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_angle(const std::string& token) {
  std::string s;
  for (char c : token) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (s.empty()) throw ArgumentError("empty angle");

  auto parse_number = [](const std::string& text) {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw ArgumentError("bad number in angle: '" + text + "'");
    return v;
  };

  std::size_t pi_pos = s.find("pi");
  if (pi_pos == std::string::npos) return parse_number(s);

  double sign = 1.0;
  std::string coeff = s.substr(0, pi_pos);
  if (!coeff.empty() && (coeff[0] == '+' || coeff[0] == '-')) {
    if (coeff[0] == '-') sign = -1.0;
    coeff.erase(0, 1);
  }
  if (!coeff.empty() && coeff.back() == '*') coeff.pop_back();
  double mult = coeff.empty() ? 1.0 : parse_number(coeff);

  std::string rest = s.substr(pi_pos + 2);
  double denom = 1.0;
  if (!rest.empty()) {
    if (rest[0] != '/') throw ArgumentError("bad angle token: '" + token + "'");
    denom = parse_number(rest.substr(1));
    if (denom == 0.0) throw ArgumentError("zero denominator in angle: '" + token + "'");
  }
  return sign * mult * kPi / denom;
}

// ---- CSV --------------------------------------------------------------------

void write_cloud_csv(std::ostream& os, const PointCloud3& cloud) {
  os << "x,y,z\n";
  for (const Vec3& p : cloud.points)
    os << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(p.z) << '\n';
}

PointCloud3 read_cloud_csv(std::istream& is) {
  PointCloud3 out;
  std::string line;
  if (!std::getline(is, line)) throw ArgumentError("empty csv cloud");
  // header row is mandatory
  if (line != "x,y,z" && line != "x,y,z\r") throw ArgumentError("csv cloud must start with 'x,y,z'");
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    Vec3 p;
    double* coords[3] = {&p.x, &p.y, &p.z};
    for (int i = 0; i < 3; ++i) {
      if (!std::getline(row, cell, ',')) throw ArgumentError("csv row with fewer than 3 columns");
      *coords[i] = std::stod(cell);
    }
    out.points.push_back(p);
  }
  return out;
}

// ---- PLY --------------------------------------------------------------------

void write_cloud_ply(std::ostream& os, const PointCloud3& cloud) {
  os << "ply\nformat ascii 1.0\nelement vertex " << cloud.points.size()
     << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
  for (const Vec3& p : cloud.points)
    os << format_double(p.x) << ' ' << format_double(p.y) << ' ' << format_double(p.z) << '\n';
}

PointCloud3 read_cloud_ply(std::istream& is) {
  std::string line;
  std::size_t count = 0;
  bool in_header = true;
  if (!std::getline(is, line) || (line != "ply" && line != "ply\r"))
    throw ArgumentError("not a ply file");
  while (in_header && std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("element vertex ", 0) == 0) count = std::stoull(line.substr(15));
    if (line == "end_header") in_header = false;
  }
  if (in_header) throw ArgumentError("ply header never ends");
  PointCloud3 out;
  out.points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Vec3 p;
    if (!(is >> p.x >> p.y >> p.z)) throw ArgumentError("ply vertex data truncated");
    out.points.push_back(p);
  }
  return out;
}

// ---- JSON -------------------------------------------------------------------

void write_cloud_json(std::ostream& os, const PointCloud3& cloud, int depth, int resolution) {
  nlohmann::json j;
  j["format"] = "zygo-cloud";
  if (depth >= 0) j["depth"] = depth;
  if (resolution >= 0) j["resolution"] = resolution;
  auto& pts = j["points"] = nlohmann::json::array();
  for (const Vec3& p : cloud.points) pts.push_back({p.x, p.y, p.z});
  os << j.dump(2) << '\n';
}

PointCloud3 read_cloud_json(std::istream& is) {
  nlohmann::json j = nlohmann::json::parse(is);
  if (!j.is_object() || j.value("format", "") != "zygo-cloud" || !j.contains("points"))
    throw ArgumentError("not a zygo-cloud json file");
  PointCloud3 out;
  for (const auto& p : j["points"]) {
    if (!p.is_array() || p.size() != 3) throw ArgumentError("json cloud point must have 3 coords");
    out.points.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
  }
  return out;
}

// ---- SVG --------------------------------------------------------------------

namespace {

std::string svg_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

void write_cloud_svg(std::ostream& os, const PointCloud3& cloud, double scale_radius) {
  double extent = scale_radius;
  for (const Vec3& p : cloud.points) extent = std::max({extent, std::abs(p.x), std::abs(p.z)});
  if (extent <= 0.0) extent = 1.0;
  const double view = 500.0, margin = 30.0;
  const double s = (view / 2.0 - margin) / extent;
  auto tx = [&](double x) { return view / 2.0 + s * x; };
  auto tz = [&](double z) { return view / 2.0 - s * z; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << view << ' ' << view
     << "\">\n";
  os << "  <rect width=\"" << view << "\" height=\"" << view << "\" fill=\"white\"/>\n";
  if (scale_radius > 0.0) {
    os << "  <circle cx=\"" << svg_coord(tx(0)) << "\" cy=\"" << svg_coord(tz(0)) << "\" r=\""
       << svg_coord(s * scale_radius)
       << "\" fill=\"none\" stroke=\"#999\" stroke-dasharray=\"4 3\" data-scale-radius=\""
       << format_double(scale_radius) << "\"/>\n";
  }
  for (const Vec3& p : cloud.points) {
    os << "  <circle class=\"pt\" cx=\"" << svg_coord(tx(p.x)) << "\" cy=\"" << svg_coord(tz(p.z))
       << "\" r=\"1.2\" fill=\"#1f4e79\" data-x=\"" << format_double(p.x) << "\" data-y=\""
       << format_double(p.y) << "\" data-z=\"" << format_double(p.z) << "\"/>\n";
  }
  os << "</svg>\n";
}

PointCloud3 read_cloud_svg(std::istream& is) {
  PointCloud3 out;
  std::string line;
  auto grab = [](const std::string& text, const std::string& key) -> std::optional<double> {
    std::string needle = key + "=\"";
    std::size_t at = text.find(needle);
    if (at == std::string::npos) return std::nullopt;
    std::size_t start = at + needle.size();
    std::size_t end = text.find('"', start);
    if (end == std::string::npos) return std::nullopt;
    return std::stod(text.substr(start, end - start));
  };
  while (std::getline(is, line)) {
    if (line.find("class=\"pt\"") == std::string::npos) continue;
    auto x = grab(line, "data-x");
    auto y = grab(line, "data-y");
    auto z = grab(line, "data-z");
    if (!x || !y || !z) throw ArgumentError("svg point without data coordinates");
    out.points.push_back({*x, *y, *z});
  }
  return out;
}

// ---- file dispatch ----------------------------------------------------------

namespace {

std::string extension_of(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

}  // namespace

void write_cloud_file(const std::filesystem::path& path, const PointCloud3& cloud,
                      double scale_radius, int depth, int resolution) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ArgumentError("cannot open '" + path.string() + "' for writing");
  std::string ext = extension_of(path);
  if (ext == ".csv") write_cloud_csv(os, cloud);
  else if (ext == ".ply") write_cloud_ply(os, cloud);
  else if (ext == ".json") write_cloud_json(os, cloud, depth, resolution);
  else if (ext == ".svg") write_cloud_svg(os, cloud, scale_radius);
  else throw ArgumentError("unsupported cloud format '" + ext + "'");
}

PointCloud3 read_cloud_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ArgumentError("cannot open '" + path.string() + "'");
  std::string ext = extension_of(path);
  if (ext == ".csv") return read_cloud_csv(is);
  if (ext == ".ply") return read_cloud_ply(is);
  if (ext == ".json") return read_cloud_json(is);
  if (ext == ".svg") return read_cloud_svg(is);
  throw ArgumentError("unsupported cloud format '" + ext + "'");
}

// ---- reports ----------------------------------------------------------------

nlohmann::json branch_solution_to_json(const BranchSolution& sol) {
  nlohmann::json j;
  j["controls_fwd"] = sol.controls_fwd;
  j["controls_bwd"] = sol.controls_bwd;
  j["k_fwd"] = sol.k_fwd;
  j["k_bwd"] = sol.k_bwd;
  j["t_fwd"] = sol.tangency_fwd.t;
  j["theta_fwd"] = sol.tangency_fwd.theta;
  j["t_bwd"] = sol.tangency_bwd.t;
  j["theta_bwd"] = sol.tangency_bwd.theta;
  // non-finite residuals (nothing converged at all) serialize as null
  if (std::isfinite(sol.residual_norm))
    j["residual"] = sol.residual_norm;
  else
    j["residual"] = nullptr;
  j["r"] = sol.cylinder.radius;
  j["c_z"] = sol.cylinder.axis_z;
  j["stable"] = sol.converged;
  j["grasping"] = sol.grasping;
  return j;
}

nlohmann::json perch_report(const std::vector<BranchSolution>& solutions,
                            const std::string& search_mode, const std::string& ellipse_mode) {
  nlohmann::json j;
  j["command"] = "perch";
  j["mode"] = search_mode;
  j["ellipse_mode"] = ellipse_mode;
  j["converged"] = !solutions.empty() && solutions.front().converged;
  auto& arr = j["solutions"] = nlohmann::json::array();
  for (const BranchSolution& s : solutions) arr.push_back(branch_solution_to_json(s));
  return j;
}

// ---- trajectories -----------------------------------------------------------

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "time,mode";
  for (int toe = 1; toe <= 4; ++toe)
    os << ",toe" << toe << "_x,toe" << toe << "_y,toe" << toe << "_z";
  os << '\n';
  for (const Snapshot& s : traj.snapshots) {
    os << format_double(s.time) << ',' << mode_name(s.mode);
    for (const Vec3& p : s.talons)
      os << ',' << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(p.z);
    os << '\n';
  }
}

nlohmann::json events_to_json(const std::vector<TlmEvent>& events) {
  nlohmann::json j;
  auto& arr = j["events"] = nlohmann::json::array();
  for (const TlmEvent& e : events) {
    nlohmann::json je;
    je["type"] = event_name(e.kind);
    je["time"] = e.time;
    je["step"] = e.step;
    if (e.kind == TlmEvent::Kind::Discontinuity) je["magnitude"] = e.magnitude;
    arr.push_back(je);
  }
  return j;
}

void write_talon_svg(std::ostream& os, const Trajectory& traj) {
  double extent = 1e-9;
  for (const Snapshot& s : traj.snapshots)
    for (const Vec3& p : s.talons) extent = std::max({extent, std::abs(p.x), std::abs(p.z)});
  const double view = 500.0, margin = 30.0;
  const double sc = (view / 2.0 - margin) / extent;
  auto tx = [&](double x) { return view / 2.0 + sc * x; };
  auto tz = [&](double z) { return view / 2.0 - sc * z; };
  static const char* colors[4] = {"#1f4e79", "#c00000", "#2e7d32", "#7b1fa2"};

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << view << ' ' << view
     << "\">\n  <rect width=\"" << view << "\" height=\"" << view << "\" fill=\"white\"/>\n";
  for (int toe = 0; toe < 4; ++toe) {
    os << "  <polyline fill=\"none\" stroke=\"" << colors[toe] << "\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
      const Vec3& p = traj.snapshots[i].talons[static_cast<std::size_t>(toe)];
      if (i) os << ' ';
      os << svg_coord(tx(p.x)) << ',' << svg_coord(tz(p.z));
    }
    os << "\"/>\n";
  }
  os << "</svg>\n";
}

// ---- scenario tokens ----------------------------------------------------------

namespace {

std::vector<double> parse_number_list(const std::string& text, std::size_t expected,
                                      const std::string& what) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  if (out.size() != expected)
    throw ArgumentError(what + " needs " + std::to_string(expected) + " comma-separated numbers");
  return out;
}

}  // namespace

ObstacleShape parse_obstacle(const std::string& token) {
  std::size_t colon = token.find(':');
  if (colon == std::string::npos) throw ArgumentError("obstacle token needs 'shape:params'");
  std::string kind = token.substr(0, colon);
  std::string params = token.substr(colon + 1);
  if (kind == "sphere") {
    auto v = parse_number_list(params, 4, "sphere obstacle");
    if (!(v[3] > 0.0)) throw ArgumentError("sphere radius must be > 0");
    return SphereObstacle{{v[0], v[1], v[2]}, v[3]};
  }
  if (kind == "cylinder") {
    auto v = parse_number_list(params, 3, "cylinder obstacle");
    if (!(v[2] > 0.0)) throw ArgumentError("cylinder radius must be > 0");
    return CylinderObstacle{{v[2], v[0], v[1]}};
  }
  throw ArgumentError("unknown obstacle shape '" + kind + "'");
}

FreeControlFn parse_free_controls(const std::string& token, const FootSpec& foot) {
  if (token == "zero") return constant_controls(foot, 0.0);
  std::size_t colon = token.find(':');
  if (colon == std::string::npos) throw ArgumentError("free-control token needs 'kind:params'");
  std::string kind = token.substr(0, colon);
  std::string params = token.substr(colon + 1);
  if (kind == "constant") {
    auto v = parse_number_list(params, 1, "constant controls");
    if (!(v[0] >= 0.0 && v[0] <= 1.0)) throw ArgumentError("constant control must lie in [0,1]");
    return constant_controls(foot, v[0]);
  }
  if (kind == "ramp") {
    auto v = parse_number_list(params, 2, "ramp controls");
    int toe = static_cast<int>(v[0]);
    if (toe < 0 || toe > 4) throw ArgumentError("ramp toe must be 0 (all) or 1..4");
    return ramp_controls(foot, toe, v[1]);
  }
  throw ArgumentError("unknown free-control kind '" + kind + "'");
}

// ---- schema subset ----------------------------------------------------------

namespace {

bool type_matches(const nlohmann::json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "number") return v.is_number();
  if (t == "integer") return v.is_number_integer();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  return false;
}

void validate_node(const nlohmann::json& v, const nlohmann::json& schema, const std::string& path,
                   std::vector<std::string>& errors) {
  if (schema.contains("type")) {
    const auto& t = schema["type"];
    bool ok = t.is_array() ? std::any_of(t.begin(), t.end(),
                                         [&](const nlohmann::json& tt) {
                                           return type_matches(v, tt.get<std::string>());
                                         })
                           : type_matches(v, t.get<std::string>());
    if (!ok) {
      errors.push_back(path + ": expected type " + t.dump());
      return;
    }
  }
  if (schema.contains("enum")) {
    bool found = std::any_of(schema["enum"].begin(), schema["enum"].end(),
                             [&](const nlohmann::json& e) { return e == v; });
    if (!found) errors.push_back(path + ": value " + v.dump() + " not in enum");
  }
  if (v.is_number()) {
    double x = v.get<double>();
    if (schema.contains("minimum") && x < schema["minimum"].get<double>())
      errors.push_back(path + ": below minimum");
    if (schema.contains("exclusiveMinimum") && x <= schema["exclusiveMinimum"].get<double>())
      errors.push_back(path + ": must exceed " + schema["exclusiveMinimum"].dump());
    if (schema.contains("maximum") && x > schema["maximum"].get<double>())
      errors.push_back(path + ": above maximum");
  }
  if (v.is_object()) {
    const auto* props = schema.contains("properties") ? &schema["properties"] : nullptr;
    if (schema.contains("required")) {
      for (const auto& req : schema["required"]) {
        if (!v.contains(req.get<std::string>()))
          errors.push_back(path + ": missing required key '" + req.get<std::string>() + "'");
      }
    }
    bool allow_extra = !schema.contains("additionalProperties") ||
                       schema["additionalProperties"] != nlohmann::json(false);
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (props && props->contains(it.key())) {
        validate_node(it.value(), (*props)[it.key()], path + "/" + it.key(), errors);
      } else if (!allow_extra) {
        errors.push_back(path + ": unknown key '" + it.key() + "'");
      }
    }
  }
  if (v.is_array()) {
    if (schema.contains("minItems") && v.size() < schema["minItems"].get<std::size_t>())
      errors.push_back(path + ": too few items");
    if (schema.contains("maxItems") && v.size() > schema["maxItems"].get<std::size_t>())
      errors.push_back(path + ": too many items");
    if (schema.contains("items")) {
      for (std::size_t i = 0; i < v.size(); ++i)
        validate_node(v[i], schema["items"], path + "/" + std::to_string(i), errors);
    }
  }
}

}  // namespace

std::vector<std::string> validate_against_schema(const nlohmann::json& instance,
                                                 const nlohmann::json& schema) {
  std::vector<std::string> errors;
  validate_node(instance, schema, "#", errors);
  return errors;
}

}  // namespace zygo::io
