#include "horizon/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Geometry>

#include "horizon/error.hpp"

namespace horizon {

double EllipsoidShape::max_semi_axis() const { return std::max({a, b, c}); }

EllipsoidShape shape_matrix(double a_km, double b_km, double c_km) {
  for (double v : {a_km, b_km, c_km}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream msg;
      msg << "semi-axes must be positive and finite, got (" << a_km << ", " << b_km << ", "
          << c_km << ")";
      throw Error(ErrorKind::InvalidShape, msg.str());
    }
  }
  EllipsoidShape shape;
  shape.a = a_km;
  shape.b = b_km;
  shape.c = c_km;
  shape.A = Eigen::Vector3d(1.0 / (a_km * a_km), 1.0 / (b_km * b_km), 1.0 / (c_km * c_km))
                .asDiagonal();
  return shape;
}

bool is_rotation(const Eigen::Matrix3d& R, double tol) {
  if (!R.allFinite()) return false;
  const double orth = (R * R.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  return orth <= tol && std::abs(R.determinant() - 1.0) <= tol;
}

Pose make_pose(const Eigen::Vector3d& r_P_km, const Eigen::Matrix3d& R_PC) {
  if (!r_P_km.allFinite()) throw Error(ErrorKind::InvalidPose, "observer position is not finite");
  if (!is_rotation(R_PC)) throw Error(ErrorKind::InvalidPose, "R_PC is not a proper rotation");
  return Pose{r_P_km, R_PC};
}

double quadric_value(const EllipsoidShape& shape, const Eigen::Vector3d& r_P) {
  return r_P.dot(shape.A * r_P);
}

bool observer_outside(const EllipsoidShape& shape, const Eigen::Vector3d& r_P) {
  return quadric_value(shape, r_P) > 1.0 + 1e-12;
}

RayIntersection intersect_ray(const EllipsoidShape& shape, const Eigen::Vector3d& r_P,
                              const Eigen::Vector3d& e_hat) {
  if (std::abs(e_hat.norm() - 1.0) > 1e-12)
    throw Error(ErrorKind::InvalidArgument, "line-of-sight direction must be a unit vector");

  const Eigen::Vector3d Ae = shape.A * e_hat;
  const double qa = e_hat.dot(Ae);
  const double qb = r_P.dot(Ae);  // half the linear coefficient
  const double qc = quadric_value(shape, r_P) - 1.0;

  RayIntersection out;
  out.discriminant = qb * qb - qa * qc;
  const double tol = 1e-9 * std::max(1.0, qb * qb);
  if (std::abs(out.discriminant) <= tol) {
    out.root_count = 1;
    out.lambdas = {-qb / qa, -qb / qa};
  } else if (out.discriminant > 0.0) {
    // Stable form: avoid cancellation between -qb and sqrt(disc).
    const double root = std::sqrt(out.discriminant);
    const double q = -(qb + std::copysign(root, qb));
    double l1 = q / qa;
    double l2 = (q != 0.0) ? qc / q : -l1;
    if (l1 > l2) std::swap(l1, l2);
    out.root_count = 2;
    out.lambdas = {l1, l2};
  }
  return out;
}

Conic horizon_conic_planet(const EllipsoidShape& shape, const Eigen::Vector3d& r_P) {
  const double rAr = quadric_value(shape, r_P);
  if (!(rAr > 1.0 + 1e-12))
    throw Error(ErrorKind::NoHorizon, "observer is on or inside the ellipsoid");
  const Eigen::Vector3d Ar = shape.A * r_P;
  const Eigen::Matrix3d C = Ar * Ar.transpose() - (rAr - 1.0) * shape.A;
  return Conic(C);
}

Conic horizon_conic_camera(const Conic& C_P, const Pose& pose) {
  return Conic(pose.R_PC * C_P.matrix() * pose.R_PC.transpose());
}

namespace {

Eigen::Matrix3d rot_x(double t) {
  const double c = std::cos(t), s = std::sin(t);
  Eigen::Matrix3d R;
  R << 1, 0, 0, 0, c, -s, 0, s, c;
  return R;
}

Eigen::Matrix3d rot_y(double t) {
  const double c = std::cos(t), s = std::sin(t);
  Eigen::Matrix3d R;
  R << c, 0, s, 0, 1, 0, -s, 0, c;
  return R;
}

Eigen::Matrix3d rot_z(double t) {
  const double c = std::cos(t), s = std::sin(t);
  Eigen::Matrix3d R;
  R << c, -s, 0, s, c, 0, 0, 0, 1;
  return R;
}

}  // namespace

Eigen::Matrix3d euler321_to_rotation(double theta3, double theta2, double theta1) {
  return rot_x(theta1) * rot_y(theta2) * rot_z(theta3);
}

Eigen::Matrix3d quaternion_to_rotation(double w, double x, double y, double z) {
  Eigen::Quaterniond q(w, x, y, z);
  const double n = q.norm();
  if (!(n > 0.0) || !std::isfinite(n))
    throw Error(ErrorKind::InvalidArgument, "quaternion must be nonzero and finite");
  q.coeffs() /= n;
  return q.toRotationMatrix();
}

Eigen::Vector4d rotation_to_quaternion(const Eigen::Matrix3d& R) {
  Eigen::Quaterniond q(R);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() *= -1.0;
  return {q.w(), q.x(), q.y(), q.z()};
}

}  // namespace horizon
