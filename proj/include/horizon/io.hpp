#pragma once

// File formats: points CSV, scene JSON, observation sidecar JSON, calibration
// result JSON and sweep CSV. Doubles are written with 17 significant digits.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

#include "horizon/batch.hpp"
#include "horizon/calibrate.hpp"
#include "horizon/synth.hpp"

namespace horizon::io {

using nlohmann::json;

/// Raised for unreadable/unwritable files and malformed content.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Points: header `u,v`, one point per row.
void write_points_csv(std::ostream& out, std::span<const Eigen::Vector2d> points);
std::vector<Eigen::Vector2d> read_points_csv(std::istream& in);
std::vector<Eigen::Vector2d> read_points_csv(const std::filesystem::path& path);

json matrix_to_json(const Eigen::Matrix3d& m);  // row-major [[..],[..],[..]]
Eigen::Matrix3d matrix_from_json(const json& j);

// Scene: {body:{a_km,b_km,c_km,name}, pose:{r_P_km:[3], q_PC:[w,x,y,z]} or
// pose:{r_P_km, euler321_deg:[t3,t2,t1]}, camera?:{...}, noise_px, n_points,
// arc_deg, seed}; optional arc_start_deg, image:{width_px,height_px}, epoch.
json scene_to_json(const Scene& scene);
Scene scene_from_json(const json& j);

json camera_to_json(const CameraIntrinsics& cam);
CameraIntrinsics camera_from_json(const json& j);

// Sidecar: {C_reference:[[3x3]], C_image:[[3x3]], body, epoch, n_points}.
json observation_sidecar(const Observation& obs);
Conic sidecar_reference_conic(const json& j);

// Result: {K, f_mm, u0_px, v0_px, gamma, s, alpha, beta, warnings}, plus
// d_x, d_y, J, mu_x_mm, mu_y_mm for batch consumers.
json result_to_json(const CalibrationEstimate& est, double f_mm, double mu_x_mm,
                    double mu_y_mm);
CalibrationEstimate result_from_json(const json& j);

// Sweep: header `q,stat,target,value`.
void write_sweep_csv(std::ostream& out, std::span<const SweepResult> rows);

json stats_to_json(const SummaryStats& s);

json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

std::string format_double(double v);

}  // namespace horizon::io
