#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "zygo/foot.hpp"
#include "zygo/perch.hpp"
#include "zygo/tlm.hpp"

namespace zygo::io {

// 17 significant digits, round-trip exact for doubles.
std::string format_double(double v);

// Accepts plain radians ("0.5236", "1e-1") and rational multiples of pi
// ("pi", "pi/6", "-2pi/3", "0.5pi").
double parse_angle(const std::string& token);

// ---- point cloud files (always x,y,z) -------------------------------------

void write_cloud_csv(std::ostream& os, const PointCloud3& cloud);
PointCloud3 read_cloud_csv(std::istream& is);

void write_cloud_ply(std::ostream& os, const PointCloud3& cloud);
PointCloud3 read_cloud_ply(std::istream& is);

void write_cloud_json(std::ostream& os, const PointCloud3& cloud, int depth = -1,
                      int resolution = -1);
PointCloud3 read_cloud_json(std::istream& is);

// Scatter of the xz-projection; full-precision coordinates ride along as
// data-* attributes so the file reads back losslessly. `scale_radius` draws
// the reach bound circle.
void write_cloud_svg(std::ostream& os, const PointCloud3& cloud, double scale_radius);
PointCloud3 read_cloud_svg(std::istream& is);

// Dispatch on the file extension (.csv, .ply, .json, .svg).
void write_cloud_file(const std::filesystem::path& path, const PointCloud3& cloud,
                      double scale_radius = 0.0, int depth = -1, int resolution = -1);
PointCloud3 read_cloud_file(const std::filesystem::path& path);

// ---- structured reports ----------------------------------------------------

nlohmann::json branch_solution_to_json(const BranchSolution& sol);
nlohmann::json perch_report(const std::vector<BranchSolution>& solutions,
                            const std::string& search_mode, const std::string& ellipse_mode);

// ---- trajectories ----------------------------------------------------------

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
nlohmann::json events_to_json(const std::vector<TlmEvent>& events);
void write_talon_svg(std::ostream& os, const Trajectory& traj);

// ---- scenario tokens ---------------------------------------------------------

// "sphere:cx,cy,cz,r" or "cylinder:ax,az,r".
ObstacleShape parse_obstacle(const std::string& token);

// "zero", "constant:v", or "ramp:toe,rate" (toe 0 ramps every toe).
FreeControlFn parse_free_controls(const std::string& token, const FootSpec& foot);

// ---- config / schema -------------------------------------------------------

// Structural validator for the JSON-schema subset the shipped schemas use
// (type, properties, required, additionalProperties, items, enum, bounds).
// Returns human-readable violations; empty means valid.
std::vector<std::string> validate_against_schema(const nlohmann::json& instance,
                                                 const nlohmann::json& schema);

}  // namespace zygo::io
