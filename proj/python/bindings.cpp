#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numbers>
#include <vector>

#include "horizon/batch.hpp"
#include "horizon/calibrate.hpp"
#include "horizon/conic.hpp"
#include "horizon/error.hpp"
#include "horizon/geometry.hpp"
#include "horizon/synth.hpp"

namespace py = pybind11;
using namespace horizon;

namespace {

using PointArray = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;

std::vector<Eigen::Vector2d> to_points(const PointArray& a) {
  std::vector<Eigen::Vector2d> pts(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) pts[static_cast<std::size_t>(i)] = a.row(i).transpose();
  return pts;
}

PointArray from_points(const std::vector<Eigen::Vector2d>& pts) {
  PointArray a(static_cast<Eigen::Index>(pts.size()), 2);
  for (std::size_t i = 0; i < pts.size(); ++i) a.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
  return a;
}

FitMethod parse_method(const std::string& name) {
  if (name == "taubin") return FitMethod::Taubin;
  if (name == "semi-hyper") return FitMethod::SemiHyper;
  throw Error(ErrorKind::InvalidArgument, "unknown fit method '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Camera intrinsic calibration from imaged ellipsoid horizons";
  m.attr("__version__") = HORIZON_CALIB_VERSION;

  static py::exception<Error> calib_error(m, "CalibrationError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = calib_error;
      py::object exc = err(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(err.ptr(), exc.ptr());
    }
  });

  py::class_<Conic>(m, "Conic")
      .def(py::init<const Eigen::Matrix3d&>(), py::arg("matrix"))
      .def_static("from_coeffs", &Conic::from_coeffs, py::arg("A"), py::arg("B"), py::arg("C"),
                  py::arg("D"), py::arg("E"), py::arg("F"))
      .def("matrix", &Conic::matrix)
      .def("coeffs", &Conic::coeffs)
      .def("evaluate", py::overload_cast<double, double>(&Conic::evaluate, py::const_), py::arg("u"), py::arg("v"))
      .def("__repr__", [](const Conic& c) {
        const auto k = c.coeffs();
        return "Conic(A=" + std::to_string(k[0]) + ", B=" + std::to_string(k[1]) + ", C=" +
               std::to_string(k[2]) + ", D=" + std::to_string(k[3]) + ", E=" +
               std::to_string(k[4]) + ", F=" + std::to_string(k[5]) + ")";
      });

  py::class_<EllipseParams>(m, "EllipseParams")
      .def(py::init([](const Eigen::Vector2d& center, double a, double b, double theta) {
             return EllipseParams{center, a, b, theta};
           }),
           py::arg("center"), py::arg("semi_major"), py::arg("semi_minor"), py::arg("orientation") = 0.0)
      .def_readwrite("center", &EllipseParams::center)
      .def_readwrite("semi_major", &EllipseParams::semi_major)
      .def_readwrite("semi_minor", &EllipseParams::semi_minor)
      .def_readwrite("orientation", &EllipseParams::orientation);

  m.def("is_ellipse", &is_ellipse, py::arg("conic"));
  m.def("ellipse_params", &ellipse_params, py::arg("conic"));
  m.def("conic_from_ellipse", &conic_from_ellipse, py::arg("ellipse"));
  m.def(
      "sample_points",
      [](const EllipseParams& e, int count, double start, double extent) {
        return from_points(sample_points(e, count, Arc{start, extent}));
      },
      py::arg("ellipse"), py::arg("count"), py::arg("arc_start") = 0.0,
      py::arg("arc_extent") = 2.0 * std::numbers::pi);
  m.def(
      "fit_conic",
      [](const PointArray& pts, const std::string& method) {
        return fit_conic(to_points(pts), parse_method(method));
      },
      py::arg("points"), py::arg("method") = "taubin");
  m.def("conic_distance", &conic_distance, py::arg("a"), py::arg("b"));

  py::class_<EllipsoidShape>(m, "EllipsoidShape")
      .def(py::init(&shape_matrix), py::arg("a_km"), py::arg("b_km"), py::arg("c_km"))
      .def_readonly("a", &EllipsoidShape::a)
      .def_readonly("b", &EllipsoidShape::b)
      .def_readonly("c", &EllipsoidShape::c)
      .def_readonly("A", &EllipsoidShape::A);
  py::class_<Pose>(m, "Pose")
      .def(py::init(&make_pose), py::arg("r_P_km"), py::arg("R_PC"))
      .def_readonly("r_P", &Pose::r_P)
      .def_readonly("R_PC", &Pose::R_PC);

  m.def("horizon_conic_planet", &horizon_conic_planet, py::arg("shape"), py::arg("r_P_km"));
  m.def("horizon_conic_camera", &horizon_conic_camera, py::arg("C_P"), py::arg("pose"));
  m.def("euler321_to_rotation", &euler321_to_rotation, py::arg("theta3"), py::arg("theta2"),
        py::arg("theta1"));
  m.def("quaternion_to_rotation", &quaternion_to_rotation, py::arg("w"), py::arg("x"),
        py::arg("y"), py::arg("z"));

  py::class_<CameraIntrinsics>(m, "CameraIntrinsics")
      .def(py::init([](double f, double mx, double my, double g, double u0, double v0) {
             CameraIntrinsics c{f, mx, my, g, u0, v0};
             validate(c);
             return c;
           }),
           py::arg("f_mm"), py::arg("mu_x_mm"), py::arg("mu_y_mm"), py::arg("gamma") = 0.0,
           py::arg("u0_px") = 0.0, py::arg("v0_px") = 0.0)
      .def_readwrite("f_mm", &CameraIntrinsics::f_mm)
      .def_readwrite("mu_x_mm", &CameraIntrinsics::mu_x_mm)
      .def_readwrite("mu_y_mm", &CameraIntrinsics::mu_y_mm)
      .def_readwrite("gamma", &CameraIntrinsics::gamma)
      .def_readwrite("u0_px", &CameraIntrinsics::u0_px)
      .def_readwrite("v0_px", &CameraIntrinsics::v0_px)
      .def("K", &CameraIntrinsics::K);

  py::class_<CalibrationEstimate>(m, "CalibrationEstimate")
      .def("K", &CalibrationEstimate::K)
      .def_readonly("K11", &CalibrationEstimate::K11)
      .def_readonly("K12", &CalibrationEstimate::K12)
      .def_readonly("s", &CalibrationEstimate::s)
      .def_readonly("alpha", &CalibrationEstimate::alpha)
      .def_readonly("beta", &CalibrationEstimate::beta)
      .def_readonly("J", &CalibrationEstimate::J)
      .def_readonly("d_x", &CalibrationEstimate::d_x)
      .def_readonly("d_y", &CalibrationEstimate::d_y)
      .def_readonly("warnings", &CalibrationEstimate::warnings)
      .def_property_readonly("gamma", &CalibrationEstimate::gamma);

  m.def("calibrate_single", &calibrate_single, py::arg("C"), py::arg("C_image"));
  m.def("focal_from_k", &focal_from_k, py::arg("estimate"), py::arg("mu_x_mm"), py::arg("mu_y_mm"));
  m.def(
      "batch_focal",
      [](const std::vector<CalibrationEstimate>& e, double mx, double my) {
        return batch_focal(e, mx, my);
      },
      py::arg("estimates"), py::arg("mu_x_mm"), py::arg("mu_y_mm"));
  m.def(
      "batch_principal",
      [](const std::vector<CalibrationEstimate>& e) { return batch_principal(e); },
      py::arg("estimates"));

  m.def("project_true_conic", &project_true_conic, py::arg("C_camera"), py::arg("camera"));
  m.def(
      "simulate_horizon",
      [](const EllipsoidShape& body, const Pose& pose, const CameraIntrinsics& cam, double noise_px,
         int n_points, double arc_deg, std::uint64_t seed) {
        Scene s;
        s.body_name = "body";
        s.body = body;
        s.pose = pose;
        s.camera = cam;
        s.noise_px = noise_px;
        s.n_points = n_points;
        s.arc_deg = arc_deg;
        s.seed = seed;
        const Observation obs = generate_observation(s);
        return py::make_tuple(from_points(obs.points), obs.C_reference, obs.C_image);
      },
      py::arg("body"), py::arg("pose"), py::arg("camera"), py::arg("noise_px") = 0.0,
      py::arg("n_points") = 500, py::arg("arc_deg") = 360.0, py::arg("seed") = 0);
}
