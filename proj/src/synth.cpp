#include "horizon/synth.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Geometry>

#include "horizon/error.hpp"

namespace horizon {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Eigen::Matrix3d inverse_upper_K(const CameraIntrinsics& cam) {
  // Closed-form inverse of [[fx, g, u0], [0, fy, v0], [0, 0, 1]].
  const double fx = cam.fx_px(), fy = cam.fy_px(), g = cam.gamma;
  Eigen::Matrix3d inv;
  inv << 1.0 / fx, -g / (fx * fy), (g * cam.v0_px - fy * cam.u0_px) / (fx * fy),  //
      0.0, 1.0 / fy, -cam.v0_px / fy,                                               //
      0.0, 0.0, 1.0;
  return inv;
}

struct ProjectedHorizon {
  Conic image;
  std::string problem;  // empty when usable
};

ProjectedHorizon project_scene(const Scene& scene) {
  ProjectedHorizon out;
  if (!scene.camera) {
    out.problem = "scene has no camera";
    return out;
  }
  validate(*scene.camera);
  if (!observer_outside(scene.body, scene.pose.r_P)) {
    out.problem = "observer is inside the body";
    return out;
  }
  const Eigen::Vector3d center_C = scene.pose.R_PC * (-scene.pose.r_P);
  if (!(center_C.z() > 0.0)) {
    out.problem = "body is behind the camera";
    return out;
  }
  out.image = project_true_conic(reference_conic(scene), *scene.camera);
  if (!is_ellipse(out.image)) {
    out.problem = "horizon does not project to an ellipse";
    return out;
  }
  if (scene.bounds) {
    const EllipseParams e = ellipse_params(out.image);
    const double c = std::cos(e.orientation), s = std::sin(e.orientation);
    const double a2 = e.semi_major * e.semi_major, b2 = e.semi_minor * e.semi_minor;
    const double hx = std::sqrt(a2 * c * c + b2 * s * s);
    const double hy = std::sqrt(a2 * s * s + b2 * c * c);
    if (e.center.x() - hx < 0.0 || e.center.x() + hx > scene.bounds->width_px ||
        e.center.y() - hy < 0.0 || e.center.y() + hy > scene.bounds->height_px) {
      out.problem = "horizon ellipse leaves the image bounds";
      return out;
    }
  }
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void check_range(const Range& r, const char* name) {
  if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
    std::ostringstream msg;
    msg << "scene config: range '" << name << "' is empty or not finite";
    throw Error(ErrorKind::InvalidArgument, msg.str());
  }
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ (b * 0xD1B54A32D192ED03ULL));
}

double Range::sample(std::mt19937_64& rng) const {
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Conic project_true_conic(const Conic& C_C, const CameraIntrinsics& cam) {
  const Eigen::Matrix3d Kinv = inverse_upper_K(cam);
  Eigen::Matrix3d m = Kinv.transpose() * C_C.matrix() * Kinv;
  m /= m.norm();
  if (m(0, 0) + m(1, 1) < 0.0) m = -m;
  return Conic(m);
}

Conic reference_conic(const Scene& scene) {
  return horizon_conic_camera(horizon_conic_planet(scene.body, scene.pose.r_P), scene.pose);
}

Observation generate_observation(const Scene& scene) {
  if (scene.n_points < 6) {
    std::ostringstream msg;
    msg << "scene needs at least 6 horizon points, got " << scene.n_points;
    throw Error(ErrorKind::InsufficientPoints, msg.str());
  }
  const ProjectedHorizon proj = project_scene(scene);
  if (!proj.problem.empty()) throw Error(ErrorKind::SceneRejected, proj.problem);

  Observation obs;
  obs.C_reference = reference_conic(scene);
  obs.C_image = proj.image;
  obs.body_name = scene.body_name;
  obs.epoch = scene.epoch;

  const EllipseParams e = ellipse_params(proj.image);
  obs.points = sample_points(e, scene.n_points, Arc{scene.arc_start_deg * kDeg, scene.arc_deg * kDeg});
  if (scene.noise_px > 0.0) {
    std::mt19937_64 rng(scene.seed);
    std::normal_distribution<double> noise(0.0, scene.noise_px);
    for (auto& p : obs.points) {
      p.x() += noise(rng);
      p.y() += noise(rng);
    }
  }
  return obs;
}

const std::vector<BodyPreset>& saturnian_moons() {
  static const std::vector<BodyPreset> moons = {
      {"Mimas", 415.6, 393.4, 381.2},     {"Tethys", 1076.8, 1057.4, 1052.6},
      {"Enceladus", 513.2, 502.8, 496.6}, {"Iapetus", 1492.0, 1492.0, 1424.0},
      {"Rhea", 1532.4, 1525.6, 1524.4},   {"Dione", 1128.8, 1122.6, 1119.2},
  };
  return moons;
}

Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Eigen::Quaterniond q;
  do {
    q = Eigen::Quaterniond(n01(rng), n01(rng), n01(rng), n01(rng));
  } while (q.norm() < 1e-12);
  q.normalize();
  return q.toRotationMatrix();
}

Scene random_scene(std::mt19937_64& rng, const SceneConfig& config) {
  check_range(config.semi_axis_km, "semi_axis_km");
  check_range(config.axis_ratio, "axis_ratio");
  check_range(config.distance_radii, "distance_radii");
  check_range(config.f_mm, "f_mm");
  check_range(config.mu_x_mm, "mu_x_mm");
  check_range(config.mu_y_mm, "mu_y_mm");
  check_range(config.gamma, "gamma");
  check_range(config.u0_px, "u0_px");
  check_range(config.v0_px, "v0_px");
  if (config.apparent_radius_px) {
    check_range(*config.apparent_radius_px, "apparent_radius_px");
    if (!(config.apparent_radius_px->lo > 0.0))
      throw Error(ErrorKind::InvalidArgument, "scene config: apparent radius must be positive");
  } else if (!(config.distance_radii.lo > 1.0)) {
    throw Error(ErrorKind::InvalidArgument,
                "scene config: distances must exceed the largest semi-axis");
  }
  if (!(config.semi_axis_km.lo > 0.0) || !(config.axis_ratio.lo >= 1.0))
    throw Error(ErrorKind::InvalidArgument, "scene config: semi-axes must be positive");
  if (config.n_points < 6)
    throw Error(ErrorKind::InvalidArgument, "scene config: n_points must be at least 6");

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 0; attempt < config.max_rejections; ++attempt) {
    Scene scene;
    if (!config.bodies.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, config.bodies.size() - 1);
      const BodyPreset& b = config.bodies[pick(rng)];
      scene.body_name = b.name;
      scene.body = shape_matrix(b.a_km, b.b_km, b.c_km);
    } else {
      const double a = config.semi_axis_km.sample(rng);
      const double c = a / config.axis_ratio.sample(rng);
      const double b = c + (a - c) * unit(rng);
      scene.body_name = "synthetic";
      scene.body = shape_matrix(a, b, c);
    }

    CameraIntrinsics cam;
    if (config.camera) {
      cam = *config.camera;
    } else {
      cam.f_mm = config.f_mm.sample(rng);
      cam.mu_x_mm = config.mu_x_mm.sample(rng);
      cam.mu_y_mm = config.mu_y_mm.sample(rng);
      cam.gamma = config.gamma.sample(rng);
      cam.u0_px = config.u0_px.sample(rng);
      cam.v0_px = config.v0_px.sample(rng);
    }
    validate(cam);
    scene.camera = cam;

    const double amax = scene.body.max_semi_axis();
    double distance;
    if (config.apparent_radius_px) {
      const double f_px = 0.5 * (cam.fx_px() + cam.fy_px());
      const double r_px = config.apparent_radius_px->sample(rng);
      distance = amax / std::sin(std::atan(r_px / f_px));
    } else {
      distance = config.distance_radii.sample(rng) * amax;
    }

    Eigen::Vector3d dir;
    std::normal_distribution<double> n01(0.0, 1.0);
    do {
      dir = Eigen::Vector3d(n01(rng), n01(rng), n01(rng));
    } while (dir.norm() < 1e-12);
    dir.normalize();
    const Eigen::Vector3d r_P = distance * dir;

    const double ang_radius = std::asin(std::min(1.0, amax / distance));
    double psi_max = config.off_nadir_max_deg * kDeg;
    if (config.off_nadir_margin_deg)
      psi_max = 0.5 * std::numbers::pi - ang_radius - *config.off_nadir_margin_deg * kDeg;
    if (psi_max < 0.0) continue;

    // Boresight uniformly distributed in solid angle within psi_max of nadir.
    const double cos_psi = 1.0 - unit(rng) * (1.0 - std::cos(psi_max));
    const double sin_psi = std::sqrt(std::max(0.0, 1.0 - cos_psi * cos_psi));
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    const Eigen::Vector3d nadir = -dir;
    const Eigen::Vector3d u1 = nadir.unitOrthogonal();
    const Eigen::Vector3d u2 = nadir.cross(u1);
    const Eigen::Vector3d target =
        cos_psi * nadir + sin_psi * (std::cos(phi) * u1 + std::sin(phi) * u2);

    const Eigen::Matrix3d R0 = random_rotation(rng);
    const Eigen::Vector3d boresight0 = R0.transpose() * Eigen::Vector3d::UnitZ();
    const Eigen::Matrix3d G =
        Eigen::Quaterniond::FromTwoVectors(boresight0, target).toRotationMatrix();
    Eigen::Matrix3d R_PC = R0 * G.transpose();
    // Re-orthonormalize to keep the pose check at 1e-12.
    R_PC = Eigen::Quaterniond(R_PC).normalized().toRotationMatrix();

    scene.pose = make_pose(r_P, R_PC);
    scene.noise_px = config.noise_px;
    scene.n_points = config.n_points;
    scene.arc_deg = config.arc_deg;
    scene.bounds = config.bounds;
    scene.seed = rng();

    if (project_scene(scene).problem.empty()) return scene;
  }
  std::ostringstream msg;
  msg << "scene config: no valid scene after " << config.max_rejections << " attempts";
  throw Error(ErrorKind::ConfigInfeasible, msg.str());
}

double cassini_nac_pixel_pitch_mm() {
  // 1024 px across a 0.35 deg field at f = 2002.7 mm.
  return 2.0 * 2002.7 * std::tan(0.5 * 0.35 * kDeg) / 1024.0;
}

CameraIntrinsics cassini_nac_camera() {
  CameraIntrinsics cam;
  cam.f_mm = 2002.7;
  cam.mu_x_mm = cassini_nac_pixel_pitch_mm();
  cam.mu_y_mm = cam.mu_x_mm;
  cam.gamma = 0.0;
  cam.u0_px = 560.0;
  cam.v0_px = 500.0;
  return cam;
}

SceneConfig cassini_nac_preset() {
  SceneConfig cfg;
  cfg.bodies = saturnian_moons();
  cfg.camera = cassini_nac_camera();
  cfg.apparent_radius_px = Range{100.0, 350.0};
  cfg.off_nadir_max_deg = 0.175;
  cfg.bounds = ImageBounds{1024.0, 1024.0};
  cfg.noise_px = 0.25;
  cfg.n_points = 500;
  cfg.arc_deg = 360.0;
  return cfg;
}

SceneConfig generic_preset() {
  SceneConfig cfg;
  cfg.semi_axis_km = Range{100.0, 2000.0};
  cfg.axis_ratio = Range{1.0, 1.5};
  cfg.distance_radii = Range{1.5, 50.0};
  cfg.off_nadir_margin_deg = 5.0;
  cfg.f_mm = Range{5.25, 47.5};
  cfg.mu_x_mm = Range{0.0095, 0.0105};
  cfg.mu_y_mm = Range{0.0095, 0.0105};
  cfg.gamma = Range{-2.0, 2.0};
  cfg.u0_px = Range{300.0, 700.0};
  cfg.v0_px = Range{300.0, 700.0};
  cfg.noise_px = 0.0;
  cfg.n_points = 200;
  return cfg;
}

}  // namespace horizon
