#pragma once

// Test-only reference computations. Nothing here calls into the code paths
// it is used to check: inverses are general LU inverses, horizon directions
// come from bisection on the raw quadratic, ellipse points from the
// parametric equation.

#include <cmath>
#include <random>

#include <Eigen/Dense>

namespace oracle {

inline double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / b.norm();
}

/// C' = K^-T C K^-1 with a general inverse.
inline Eigen::Matrix3d image_conic(const Eigen::Matrix3d& C, const Eigen::Matrix3d& K) {
  const Eigen::Matrix3d Kinv = K.fullPivLu().inverse();
  return Kinv.transpose() * C * Kinv;
}

inline Eigen::Matrix3d camera_matrix(double fx, double fy, double gamma, double u0, double v0) {
  Eigen::Matrix3d K;
  K << fx, gamma, u0, 0, fy, v0, 0, 0, 1;
  return K;
}

/// Does the line r + l e (l > 0) meet the ellipsoid diag(1/a^2, 1/b^2, 1/c^2)?
inline bool ray_hits(const Eigen::Vector3d& axes, const Eigen::Vector3d& r, const Eigen::Vector3d& e) {
  const Eigen::Vector3d w = axes.cwiseInverse().cwiseAbs2();
  double qa = 0, qb = 0, qc = -1;
  for (int i = 0; i < 3; ++i) {
    qa += w(i) * e(i) * e(i);
    qb += 2 * w(i) * r(i) * e(i);
    qc += w(i) * r(i) * r(i);
  }
  return qb * qb - 4 * qa * qc >= 0 && qb < 0;
}

/// Limb direction at azimuth phi around the nadir, by bisection on the
/// off-nadir angle between "hits" and "misses".
inline Eigen::Vector3d limb_direction(const Eigen::Vector3d& axes, const Eigen::Vector3d& r,
                                      double phi) {
  const Eigen::Vector3d nadir = -r.normalized();
  const Eigen::Vector3d u1 = nadir.unitOrthogonal();
  const Eigen::Vector3d u2 = nadir.cross(u1);
  const Eigen::Vector3d side = std::cos(phi) * u1 + std::sin(phi) * u2;
  double lo = 0.0, hi = M_PI / 2;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const Eigen::Vector3d e = std::cos(mid) * nadir + std::sin(mid) * side;
    if (ray_hits(axes, r, e)) lo = mid; else hi = mid;
  }
  const double t = 0.5 * (lo + hi);
  return std::cos(t) * nadir + std::sin(t) * side;
}

inline Eigen::Vector2d ellipse_point(const Eigen::Vector2d& c, double a, double b, double theta,
                                     double t) {
  return {c.x() + a * std::cos(t) * std::cos(theta) - b * std::sin(t) * std::sin(theta),
          c.y() + a * std::cos(t) * std::sin(theta) + b * std::sin(t) * std::cos(theta)};
}

/// x^2/a^2 + y^2/b^2 - 1 rotated by theta and translated to c, as a matrix.
inline Eigen::Matrix3d ellipse_matrix(const Eigen::Vector2d& c, double a, double b, double theta) {
  Eigen::Matrix3d base = Eigen::Vector3d(1 / (a * a), 1 / (b * b), -1).asDiagonal();
  Eigen::Matrix3d T;  // maps ellipse-frame points to image points
  T << std::cos(theta), -std::sin(theta), c.x(), std::sin(theta), std::cos(theta), c.y(), 0, 0, 1;
  const Eigen::Matrix3d Tinv = T.inverse();
  return Tinv.transpose() * base * Tinv;
}

}  // namespace oracle
