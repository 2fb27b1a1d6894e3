#pragma once

// Quadric-surface geometry for triaxial ellipsoids.
//
// Units: kilometers for positions and semi-axes, 1/km^2 for shape matrices.
// Rotations are 3x3 matrices; R_PC maps planet-principal-frame vectors into
// the camera frame (v_C = R_PC * v_P).

#include <array>

#include <Eigen/Core>

#include "horizon/conic.hpp"

namespace horizon {

struct EllipsoidShape {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  Eigen::Matrix3d A = Eigen::Matrix3d::Identity();

  Eigen::Vector3d semi_axes() const { return {a, b, c}; }
  double max_semi_axis() const;
};

/// Builds diag(1/a^2, 1/b^2, 1/c^2). Throws InvalidShape unless a, b, c > 0.
EllipsoidShape shape_matrix(double a_km, double b_km, double c_km);

struct Pose {
  Eigen::Vector3d r_P = Eigen::Vector3d::Zero();
  Eigen::Matrix3d R_PC = Eigen::Matrix3d::Identity();
};

/// Checks that R_PC is a proper rotation (orthonormal, det +1, within 1e-12).
/// Throws InvalidPose otherwise.
Pose make_pose(const Eigen::Vector3d& r_P_km, const Eigen::Matrix3d& R_PC);

/// r^T A r, the quadric value of the observer position.
double quadric_value(const EllipsoidShape& shape, const Eigen::Vector3d& r_P);

/// True when r^T A r > 1 + 1e-12.
bool observer_outside(const EllipsoidShape& shape, const Eigen::Vector3d& r_P);

struct RayIntersection {
  int root_count = 0;
  std::array<double, 2> lambdas{0.0, 0.0};
  // Reduced discriminant (r^T A e)^2 - (e^T A e)(r^T A r - 1). It equals
  // e^T C_P e for the horizon cone C_P of the same observer.
  double discriminant = 0.0;
};

/// Real roots of (e^T A e) l^2 + 2 (r^T A e) l + (r^T A r - 1) = 0.
/// A single (tangent) root is reported when |disc| <= 1e-9 * max(1, (r^T A e)^2).
/// Throws InvalidArgument when e_hat is not unit length within 1e-12.
RayIntersection intersect_ray(const EllipsoidShape& shape, const Eigen::Vector3d& r_P,
                              const Eigen::Vector3d& e_hat);

/// Horizon cone in the planet frame: C_P = A r r^T A - (r^T A r - 1) A.
/// Throws NoHorizon if the observer is on or inside the ellipsoid.
Conic horizon_conic_planet(const EllipsoidShape& shape, const Eigen::Vector3d& r_P);

/// Expresses a planet-frame cone in camera coordinates: R_PC C_P R_PC^T.
Conic horizon_conic_camera(const Conic& C_P, const Pose& pose);

/// R = R1(theta1) * R2(theta2) * R3(theta3), built from right-handed active
/// elementary rotations (R3(pi/2) maps x to y).
Eigen::Matrix3d euler321_to_rotation(double theta3, double theta2, double theta1);

/// Rotation matrix of a unit quaternion given scalar-first (Hamilton).
/// The quaternion is renormalized; a zero quaternion throws InvalidArgument.
Eigen::Matrix3d quaternion_to_rotation(double w, double x, double y, double z);

/// Inverse of quaternion_to_rotation, returned as (w, x, y, z) with w >= 0.
Eigen::Vector4d rotation_to_quaternion(const Eigen::Matrix3d& R);

bool is_rotation(const Eigen::Matrix3d& R, double tol = 1e-12);

}  // namespace horizon
