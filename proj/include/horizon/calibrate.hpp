#pragma once

// Single-image calibration of a pinhole camera from the horizon of an
// ellipsoid: given the reference cone C (camera frame, directions) and the
// imaged conic C' (pixels), recover K with s K^T C' K = C.

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "horizon/conic.hpp"

namespace horizon {

/// f in mm, pixel pitches in mm/px, skew and principal point in px.
struct CameraIntrinsics {
  double f_mm = 1.0;
  double mu_x_mm = 1.0;
  double mu_y_mm = 1.0;
  double gamma = 0.0;
  double u0_px = 0.0;
  double v0_px = 0.0;

  double fx_px() const { return f_mm / mu_x_mm; }
  double fy_px() const { return f_mm / mu_y_mm; }

  Eigen::Matrix3d K() const;
  Eigen::Matrix2d K11() const;
  Eigen::Vector2d K12() const { return {u0_px, v0_px}; }
};

/// Throws InvalidSensor unless f, mu_x, mu_y are positive and finite.
void validate(const CameraIntrinsics& cam);

struct CalibrationEstimate {
  Eigen::Matrix2d K11 = Eigen::Matrix2d::Identity();
  Eigen::Vector2d K12 = Eigen::Vector2d::Zero();
  double s = 1.0;
  int alpha = 1;
  int beta = 1;
  Eigen::Matrix2d L_C = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d L_Cp = Eigen::Matrix2d::Identity();
  Eigen::Vector2d J = Eigen::Vector2d::Zero();
  double d_x = 1.0;
  double d_y = 1.0;
  std::vector<std::string> warnings;

  Eigen::Matrix3d K() const;
  double gamma() const { return K11(0, 1); }
};

/// Flips the conic so that its upper-left block has positive trace.
/// Throws IndefiniteBlock when |trace(C11)| <= 1e-14 * max|C11_ij|.
std::pair<Conic, int> normalize_sign(const Conic& c);

/// s = det(C) det(C'11) / (det(C') det(C11)) on sign-normalized conics.
/// Throws DegenerateConic on a zero denominator.
double scale_factor(const Conic& C, const Conic& Cp);

/// Lower-triangular Cholesky factor of a 2x2 SPD matrix, positive diagonal.
/// Throws NumericalDefiniteness when the matrix is not positive definite.
Eigen::Matrix2d cholesky2(const Eigen::Matrix2d& m);

struct K11Solution {
  Eigen::Matrix2d K11;
  Eigen::Matrix2d L_C;
  Eigen::Matrix2d L_Cp;
};

/// K11 = L_C'^-T L_C^T with C11 = L_C L_C^T and s C'11 = L_C' L_C'^T.
K11Solution solve_k11(const Conic& C, const Conic& Cp, double s);

/// J = (L_C L_C'^T)^-1 C12 - C'11^-1 C'12, with C'11^-1 taken from the
/// factor of s C'11.
Eigen::Vector2d solve_k12(const Conic& C, const Conic& Cp, const Eigen::Matrix2d& L_C,
                          const Eigen::Matrix2d& L_Cp, double s);

/// Full estimate from a reference cone C and an imaged conic C'. Both may
/// carry arbitrary nonzero scale. Errors name the algorithm step that failed.
CalibrationEstimate calibrate_single(const Conic& C, const Conic& Cp);

/// f = (mu_x d_x + mu_y d_y) / 2. Throws InvalidSensor for non-positive pitch.
double focal_from_k(const CalibrationEstimate& est, double mu_x_mm, double mu_y_mm);

/// s^3 det(K)^2 det(C') - det(C), relative to |det(C)|, on the sign-normalized
/// conics used by the estimate.
double determinant_identity_residual(const CalibrationEstimate& est, const Conic& C,
                                     const Conic& Cp);

}  // namespace horizon
