#pragma once

// Homogeneous conics, ellipse parameters, and algebraic conic fitting.
//
// A conic is the symmetric matrix
//   M = [[A, B/2, D/2], [B/2, C, E/2], [D/2, E/2, F]]
// of A u^2 + B uv + C v^2 + D u + E v + F = 0. Image conics are in pixels.

#include <array>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace horizon {

class Conic {
public:
  Conic() = default;

  /// Takes the upper triangle of m; the lower triangle is ignored.
  explicit Conic(const Eigen::Matrix3d& m);

  static Conic from_coeffs(double A, double B, double C, double D, double E, double F);

  Eigen::Matrix3d matrix() const;

  /// (A, B, C, D, E, F)
  Eigen::Matrix<double, 6, 1> coeffs() const;

  Eigen::Matrix2d block11() const;
  Eigen::Vector2d block12() const;
  double block22() const { return m22_; }

  double trace11() const { return m00_ + m11_; }
  double det11() const { return m00_ * m11_ - m01_ * m01_; }
  double det() const;
  double norm() const;  // Frobenius

  Conic scaled(double k) const;

  /// Value of x^T M x for homogeneous x = (u, v, 1).
  double evaluate(double u, double v) const;
  double evaluate(const Eigen::Vector3d& x) const;

  /// Conic transported by a homography H acting on points (x' = H x):
  /// returns H^-T M H^-1 given Hinv = H^-1.
  Conic transformed_by_inverse(const Eigen::Matrix3d& Hinv) const;

private:
  // upper triangle of M
  double m00_ = 0, m01_ = 0, m02_ = 0, m11_ = 0, m12_ = 0, m22_ = 0;
};

/// Throws DegenerateConic when all six coefficients are zero.
Conic conic_from_coeffs(double A, double B, double C, double D, double E, double F);

/// Real, non-degenerate ellipse test: det(C11) > 0, and after flipping the sign
/// so that trace(C11) > 0 the value at the center is strictly negative.
bool is_ellipse(const Conic& c);

struct EllipseParams {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double semi_major = 1.0;
  double semi_minor = 1.0;
  double orientation = 0.0;  // radians, major axis angle in (-pi/2, pi/2]
};

/// Throws NotEllipse unless is_ellipse(c).
EllipseParams ellipse_params(const Conic& c);

/// Conic with interior negative: ((R^T(p - c))_x / a)^2 + (..._y / b)^2 - 1.
Conic conic_from_ellipse(const EllipseParams& e);

/// Angular range of eccentric anomaly, [start, start + extent).
struct Arc {
  double start = 0.0;
  double extent = 2.0 * std::numbers::pi;
};

/// Points at uniformly spaced eccentric anomalies over a half-open arc.
/// Throws InsufficientPoints when count < 6.
std::vector<Eigen::Vector2d> sample_points(const EllipseParams& e, int count, Arc arc = {});

enum class FitMethod {
  Taubin,
  SemiHyper,  // Taubin weight plus the second-order bias correction term
};

/// Algebraic conic fit on conditioned data (centered, RMS radius sqrt(2)).
/// The returned coefficient vector has unit norm and A + C > 0.
///
/// Throws InsufficientPoints (< 6 points), DegenerateData (coincident or
/// collinear points, rank-deficient design) or NonEllipticalFit.
Conic fit_conic(std::span<const Eigen::Vector2d> points, FitMethod method = FitMethod::Taubin);

/// Same fit without the ellipse check; used where the caller classifies.
Conic fit_conic_unchecked(std::span<const Eigen::Vector2d> points,
                          FitMethod method = FitMethod::Taubin);

/// min over t of ||t*a - b|| / ||b||, Frobenius; the scale-free conic distance.
double conic_distance(const Conic& a, const Conic& b);

}  // namespace horizon
