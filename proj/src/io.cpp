#include "horizon/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "horizon/error.hpp"

namespace horizon::io {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& field, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || trim(field.substr(used)).size() != 0) {
    std::ostringstream msg;
    msg << "points csv line " << line << ": cannot parse '" << field << "' as a number";
    throw IoError(msg.str());
  }
  return v;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

std::string format_double(double v) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return out.str();
}

void write_points_csv(std::ostream& out, std::span<const Eigen::Vector2d> points) {
  out << "u,v\n";
  for (const auto& p : points) out << format_double(p.x()) << ',' << format_double(p.y()) << '\n';
}

std::vector<Eigen::Vector2d> read_points_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("points csv: empty input");
  std::string header = trim(line);
  header.erase(std::remove(header.begin(), header.end(), ' '), header.end());
  if (header != "u,v") throw IoError("points csv: expected header 'u,v'");
  std::vector<Eigen::Vector2d> pts;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      std::ostringstream msg;
      msg << "points csv line " << lineno << ": expected two comma-separated values";
      throw IoError(msg.str());
    }
    pts.emplace_back(parse_double(line.substr(0, comma), lineno),
                     parse_double(line.substr(comma + 1), lineno));
  }
  return pts;
}

std::vector<Eigen::Vector2d> read_points_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open points file " + path.string());
  return read_points_csv(in);
}

json matrix_to_json(const Eigen::Matrix3d& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2)});
  return rows;
}

Eigen::Matrix3d matrix_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw IoError("expected a 3x3 row-major matrix");
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r) {
    const auto& row = j.at(static_cast<std::size_t>(r));
    if (!row.is_array() || row.size() != 3) throw IoError("expected a 3x3 row-major matrix");
    for (int c = 0; c < 3; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

json camera_to_json(const CameraIntrinsics& cam) {
  return json{{"f_mm", cam.f_mm},   {"mu_x_mm", cam.mu_x_mm}, {"mu_y_mm", cam.mu_y_mm},
              {"gamma", cam.gamma}, {"u0_px", cam.u0_px},     {"v0_px", cam.v0_px}};
}

CameraIntrinsics camera_from_json(const json& j) {
  CameraIntrinsics cam;
  cam.f_mm = j.at("f_mm").get<double>();
  cam.mu_x_mm = j.at("mu_x_mm").get<double>();
  cam.mu_y_mm = j.at("mu_y_mm").get<double>();
  cam.gamma = get_or(j, "gamma", 0.0);
  cam.u0_px = j.at("u0_px").get<double>();
  cam.v0_px = j.at("v0_px").get<double>();
  return cam;
}

json scene_to_json(const Scene& scene) {
  const Eigen::Vector4d q = rotation_to_quaternion(scene.pose.R_PC);
  json j;
  j["body"] = {{"name", scene.body_name},
               {"a_km", scene.body.a},
               {"b_km", scene.body.b},
               {"c_km", scene.body.c}};
  j["pose"] = {{"r_P_km", {scene.pose.r_P.x(), scene.pose.r_P.y(), scene.pose.r_P.z()}},
               {"q_PC", {q(0), q(1), q(2), q(3)}}};
  if (scene.camera) j["camera"] = camera_to_json(*scene.camera);
  j["noise_px"] = scene.noise_px;
  j["n_points"] = scene.n_points;
  j["arc_deg"] = scene.arc_deg;
  if (scene.arc_start_deg != 0.0) j["arc_start_deg"] = scene.arc_start_deg;
  j["seed"] = scene.seed;
  if (scene.bounds)
    j["image"] = {{"width_px", scene.bounds->width_px}, {"height_px", scene.bounds->height_px}};
  if (!scene.epoch.empty()) j["epoch"] = scene.epoch;
  return j;
}

Scene scene_from_json(const json& j) {
  try {
    Scene scene;
    const json& body = j.at("body");
    scene.body_name = get_or<std::string>(body, "name", "");
    scene.body = shape_matrix(body.at("a_km").get<double>(), body.at("b_km").get<double>(),
                              body.at("c_km").get<double>());

    const json& pose = j.at("pose");
    const auto r = pose.at("r_P_km").get<std::vector<double>>();
    if (r.size() != 3) throw IoError("scene: pose.r_P_km must have 3 entries");
    Eigen::Matrix3d R;
    if (pose.contains("q_PC")) {
      const auto q = pose.at("q_PC").get<std::vector<double>>();
      if (q.size() != 4) throw IoError("scene: pose.q_PC must be [w, x, y, z]");
      R = quaternion_to_rotation(q[0], q[1], q[2], q[3]);
    } else if (pose.contains("euler321_deg")) {
      const auto e = pose.at("euler321_deg").get<std::vector<double>>();
      if (e.size() != 3) throw IoError("scene: pose.euler321_deg must be [t3, t2, t1]");
      R = euler321_to_rotation(e[0] * kDeg, e[1] * kDeg, e[2] * kDeg);
    } else {
      throw IoError("scene: pose needs q_PC or euler321_deg");
    }
    scene.pose = make_pose(Eigen::Vector3d(r[0], r[1], r[2]), R);

    if (j.contains("camera") && !j.at("camera").is_null())
      scene.camera = camera_from_json(j.at("camera"));
    scene.noise_px = get_or(j, "noise_px", 0.25);
    scene.n_points = get_or(j, "n_points", 500);
    scene.arc_deg = get_or(j, "arc_deg", 360.0);
    scene.arc_start_deg = get_or(j, "arc_start_deg", 0.0);
    scene.seed = get_or<std::uint64_t>(j, "seed", 0);
    if (j.contains("image")) {
      const json& img = j.at("image");
      scene.bounds = ImageBounds{img.at("width_px").get<double>(), img.at("height_px").get<double>()};
    }
    scene.epoch = get_or<std::string>(j, "epoch", "");
    return scene;
  } catch (const json::exception& e) {
    throw IoError(std::string("scene: ") + e.what());
  }
}

json observation_sidecar(const Observation& obs) {
  return json{{"C_reference", matrix_to_json(obs.C_reference.matrix())},
              {"C_image", matrix_to_json(obs.C_image.matrix())},
              {"body", obs.body_name},
              {"epoch", obs.epoch},
              {"n_points", obs.points.size()}};
}

Conic sidecar_reference_conic(const json& j) {
  try {
    return Conic(matrix_from_json(j.at("C_reference")));
  } catch (const json::exception& e) {
    throw IoError(std::string("sidecar: ") + e.what());
  }
}

json result_to_json(const CalibrationEstimate& est, double f_mm, double mu_x_mm, double mu_y_mm) {
  return json{{"K", matrix_to_json(est.K())},
              {"f_mm", f_mm},
              {"u0_px", est.K12.x()},
              {"v0_px", est.K12.y()},
              {"gamma", est.gamma()},
              {"s", est.s},
              {"alpha", est.alpha},
              {"beta", est.beta},
              {"d_x", est.d_x},
              {"d_y", est.d_y},
              {"J", {est.J.x(), est.J.y()}},
              {"mu_x_mm", mu_x_mm},
              {"mu_y_mm", mu_y_mm},
              {"warnings", est.warnings}};
}

CalibrationEstimate result_from_json(const json& j) {
  try {
    CalibrationEstimate est;
    const Eigen::Matrix3d K = matrix_from_json(j.at("K"));
    est.K11 = K.topLeftCorner<2, 2>();
    est.K12 = K.topRightCorner<2, 1>();
    est.J = est.K12;
    if (j.contains("J")) {
      const auto J = j.at("J").get<std::vector<double>>();
      if (J.size() == 2) est.J = Eigen::Vector2d(J[0], J[1]);
    }
    est.d_x = get_or(j, "d_x", K(0, 0));
    est.d_y = get_or(j, "d_y", K(1, 1));
    est.s = get_or(j, "s", 1.0);
    est.alpha = get_or(j, "alpha", 1);
    est.beta = get_or(j, "beta", 1);
    est.warnings = get_or<std::vector<std::string>>(j, "warnings", {});
    if (!std::isfinite(est.d_x) || !std::isfinite(est.d_y) || !est.J.allFinite())
      throw IoError("result: non-finite estimate");
    return est;
  } catch (const json::exception& e) {
    throw IoError(std::string("result: ") + e.what());
  }
}

void write_sweep_csv(std::ostream& out, std::span<const SweepResult> rows) {
  out << "q,stat,target,value\n";
  for (const auto& r : rows) {
    const std::pair<const char*, const SummaryStats*> targets[] = {
        {"f_mm", &r.f_mm}, {"u0_px", &r.u0_px}, {"v0_px", &r.v0_px}};
    for (const auto& [name, s] : targets) {
      out << r.q << ",sigma," << name << ',' << format_double(s->sigma) << '\n';
      out << r.q << ",mad," << name << ',' << format_double(s->mad) << '\n';
    }
  }
}

json stats_to_json(const SummaryStats& s) {
  return json{{"count", s.count},   {"mean", s.mean},
              {"median", s.median}, {"sigma", s.sigma},
              {"mad", s.mad},       {"mean_error", s.mean_error},
              {"median_error", s.median_error}};
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

void write_json(const std::filesystem::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

}  // namespace horizon::io
