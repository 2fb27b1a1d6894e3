#pragma once

// Forward model and synthetic scene generation.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "horizon/calibrate.hpp"
#include "horizon/conic.hpp"
#include "horizon/geometry.hpp"

namespace horizon {

struct ImageBounds {
  double width_px = 1024.0;
  double height_px = 1024.0;
};

struct Scene {
  std::string body_name;
  EllipsoidShape body;
  Pose pose;
  std::optional<CameraIntrinsics> camera;
  double noise_px = 0.25;
  int n_points = 500;
  double arc_deg = 360.0;
  double arc_start_deg = 0.0;
  std::uint64_t seed = 0;
  std::optional<ImageBounds> bounds;
  std::string epoch;
};

struct Observation {
  std::vector<Eigen::Vector2d> points;
  Conic C_reference;  // horizon cone in camera coordinates
  Conic C_image;      // noise-free imaged conic under the scene camera
  std::string body_name;
  std::string epoch;
};

/// C' = K^-T C K^-1, scaled to unit Frobenius norm with trace(C'11) > 0.
Conic project_true_conic(const Conic& C_C, const CameraIntrinsics& cam);

/// Reference cone of a scene in camera coordinates.
Conic reference_conic(const Scene& scene);

/// Throws SceneRejected if the scene has no camera, the projection is not an
/// ellipse, the planet is behind the camera, or the ellipse leaves the bounds.
Observation generate_observation(const Scene& scene);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  double sample(std::mt19937_64& rng) const;
};

struct BodyPreset {
  std::string name;
  double a_km, b_km, c_km;
};

/// The six Saturnian moons used as calibration targets.
const std::vector<BodyPreset>& saturnian_moons();

struct SceneConfig {
  // Either pick from `bodies` or draw semi-axes: a from `semi_axis_km`,
  // b and c as a / ratio with ratio in `axis_ratio`.
  std::vector<BodyPreset> bodies;
  Range semi_axis_km{100.0, 2000.0};
  Range axis_ratio{1.0, 1.5};

  // Distance as a multiple of the largest semi-axis, unless
  // `apparent_radius_px` is set, in which case the distance is chosen so the
  // largest semi-axis spans that many pixels at the mean focal length.
  Range distance_radii{2.0, 20.0};
  std::optional<Range> apparent_radius_px;

  // Boresight tilt away from the planet center. When `off_nadir_margin_deg`
  // is set the limit is computed per scene as 90 deg minus the planet's
  // angular radius minus the margin.
  double off_nadir_max_deg = 0.0;
  std::optional<double> off_nadir_margin_deg;

  // Camera: either fixed or sampled.
  std::optional<CameraIntrinsics> camera;
  Range f_mm{5.0, 50.0};
  Range mu_x_mm{0.01, 0.01};
  Range mu_y_mm{0.01, 0.01};
  Range gamma{0.0, 0.0};
  Range u0_px{512.0, 512.0};
  Range v0_px{512.0, 512.0};

  std::optional<ImageBounds> bounds;
  double noise_px = 0.25;
  int n_points = 500;
  double arc_deg = 360.0;
  int max_rejections = 1000;
};

/// Rejection-sampled scene with an elliptical, in-front (and in-bounds) horizon.
/// The scene seed is drawn from rng. Throws ConfigInfeasible after
/// max_rejections failed attempts, InvalidArgument for malformed ranges.
Scene random_scene(std::mt19937_64& rng, const SceneConfig& config);

/// Cassini ISS narrow-angle camera: f = 2002.7 mm, 1024 x 1024 px over a
/// 0.35 deg field, principal point (560, 500).
CameraIntrinsics cassini_nac_camera();
double cassini_nac_pixel_pitch_mm();

/// Saturnian moons seen by the narrow-angle camera, limb 100-400 px radius,
/// fully inside the 1024 x 1024 frame.
SceneConfig cassini_nac_preset();

/// Wide random configuration: triaxial ratio up to 1.5, focal length
/// 500-5000 px, off-nadir up to 5 deg short of the ellipse limit.
SceneConfig generic_preset();

/// Uniform random rotation (normalized 4-vector of standard normals).
Eigen::Matrix3d random_rotation(std::mt19937_64& rng);

/// Deterministic 64-bit substream seed for (seed, a, b).
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace horizon
