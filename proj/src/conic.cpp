#include "horizon/conic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "horizon/error.hpp"

namespace horizon {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

Conic::Conic(const Eigen::Matrix3d& m)
    : m00_(m(0, 0)), m01_(m(0, 1)), m02_(m(0, 2)), m11_(m(1, 1)), m12_(m(1, 2)), m22_(m(2, 2)) {}

Conic Conic::from_coeffs(double A, double B, double C, double D, double E, double F) {
  Conic c;
  c.m00_ = A;
  c.m01_ = 0.5 * B;
  c.m02_ = 0.5 * D;
  c.m11_ = C;
  c.m12_ = 0.5 * E;
  c.m22_ = F;
  return c;
}

Eigen::Matrix3d Conic::matrix() const {
  Eigen::Matrix3d m;
  m << m00_, m01_, m02_, m01_, m11_, m12_, m02_, m12_, m22_;
  return m;
}

Eigen::Matrix<double, 6, 1> Conic::coeffs() const {
  Vector6d t;
  t << m00_, 2.0 * m01_, m11_, 2.0 * m02_, 2.0 * m12_, m22_;
  return t;
}

Eigen::Matrix2d Conic::block11() const {
  Eigen::Matrix2d b;
  b << m00_, m01_, m01_, m11_;
  return b;
}

Eigen::Vector2d Conic::block12() const { return {m02_, m12_}; }

double Conic::det() const {
  return m00_ * (m11_ * m22_ - m12_ * m12_) - m01_ * (m01_ * m22_ - m12_ * m02_) +
         m02_ * (m01_ * m12_ - m11_ * m02_);
}

double Conic::norm() const { return matrix().norm(); }

Conic Conic::scaled(double k) const { return Conic(k * matrix()); }

double Conic::evaluate(double u, double v) const { return evaluate(Eigen::Vector3d(u, v, 1.0)); }

double Conic::evaluate(const Eigen::Vector3d& x) const { return x.dot(matrix() * x); }

Conic Conic::transformed_by_inverse(const Eigen::Matrix3d& Hinv) const {
  return Conic(Hinv.transpose() * matrix() * Hinv);
}

Conic conic_from_coeffs(double A, double B, double C, double D, double E, double F) {
  if (A == 0.0 && B == 0.0 && C == 0.0 && D == 0.0 && E == 0.0 && F == 0.0)
    throw Error(ErrorKind::DegenerateConic, "all six conic coefficients are zero");
  return Conic::from_coeffs(A, B, C, D, E, F);
}

namespace {

// Center value F - C12^T C11^-1 C12 and the magnitude it is compared against.
struct CenterValue {
  Eigen::Vector2d center;
  double value;
  double scale;
};

CenterValue center_value(const Conic& c) {
  const Eigen::Matrix2d C11 = c.block11();
  const Eigen::Vector2d C12 = c.block12();
  const double d = c.det11();
  Eigen::Matrix2d adj;
  adj << C11(1, 1), -C11(0, 1), -C11(1, 0), C11(0, 0);
  const Eigen::Vector2d center = -(adj * C12) / d;
  const double quad = -C12.dot(center);  // C12^T C11^-1 C12
  return {center, c.block22() - quad, std::abs(c.block22()) + std::abs(quad)};
}

}  // namespace

bool is_ellipse(const Conic& c) {
  const Eigen::Matrix3d m = c.matrix();
  if (!m.allFinite()) return false;
  const double d11 = c.det11();
  if (!(d11 > 0.0)) return false;
  const double tr = c.trace11();
  if (tr == 0.0) return false;
  const CenterValue cv = center_value(c);
  const double k = (tr > 0.0 ? 1.0 : -1.0) * cv.value;
  return k < -1e-12 * cv.scale;
}

EllipseParams ellipse_params(const Conic& c) {
  if (!is_ellipse(c)) throw Error(ErrorKind::NotEllipse, "conic is not a real ellipse");
  const CenterValue cv = center_value(c);
  // C11 / (-k) has eigenvalues 1/a^2 and 1/b^2.
  const Eigen::Matrix2d S = c.block11() / (-cv.value);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(S);
  const Eigen::Vector2d ev = eig.eigenvalues();  // ascending
  const Eigen::Vector2d major_dir = eig.eigenvectors().col(0);

  EllipseParams e;
  e.center = cv.center;
  e.semi_major = 1.0 / std::sqrt(ev(0));
  e.semi_minor = 1.0 / std::sqrt(ev(1));
  double theta = std::atan2(major_dir.y(), major_dir.x());
  if (theta <= -std::numbers::pi / 2) theta += std::numbers::pi;
  if (theta > std::numbers::pi / 2) theta -= std::numbers::pi;
  e.orientation = theta;
  return e;
}

Conic conic_from_ellipse(const EllipseParams& e) {
  const double c = std::cos(e.orientation), s = std::sin(e.orientation);
  Eigen::Matrix2d R;
  R << c, -s, s, c;
  const Eigen::Matrix2d D =
      Eigen::Vector2d(1.0 / (e.semi_major * e.semi_major), 1.0 / (e.semi_minor * e.semi_minor))
          .asDiagonal();
  const Eigen::Matrix2d C11 = R * D * R.transpose();
  const Eigen::Vector2d C12 = -C11 * e.center;
  Eigen::Matrix3d m;
  m.topLeftCorner<2, 2>() = C11;
  m.topRightCorner<2, 1>() = C12;
  m.bottomLeftCorner<1, 2>() = C12.transpose();
  m(2, 2) = e.center.dot(C11 * e.center) - 1.0;
  return Conic(m);
}

std::vector<Eigen::Vector2d> sample_points(const EllipseParams& e, int count, Arc arc) {
  if (count < 6) {
    std::ostringstream msg;
    msg << "at least 6 points are needed to determine a conic, got " << count;
    throw Error(ErrorKind::InsufficientPoints, msg.str());
  }
  const double c = std::cos(e.orientation), s = std::sin(e.orientation);
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double t = arc.start + arc.extent * static_cast<double>(i) / count;
    const double x = e.semi_major * std::cos(t);
    const double y = e.semi_minor * std::sin(t);
    pts.emplace_back(e.center.x() + c * x - s * y, e.center.y() + s * x + c * y);
  }
  return pts;
}

namespace {

Vector6d carrier(double x, double y) {
  Vector6d xi;
  xi << x * x, x * y, y * y, x, y, 1.0;
  return xi;
}

// Jacobian of the carrier with respect to (x, y).
Eigen::Matrix<double, 6, 2> carrier_jacobian(double x, double y) {
  Eigen::Matrix<double, 6, 2> J;
  J << 2 * x, 0, y, x, 0, 2 * y, 1, 0, 0, 1, 0, 0;
  return J;
}

Vector6d solve_taubin(const Matrix6d& M, const Matrix6d& N) {
  // The constant term has zero gradient weight; eliminate F = -mean(z)^T theta5
  // and solve the reduced 5x5 definite problem.
  const Eigen::Matrix<double, 5, 1> zbar = M.block<5, 1>(0, 5);
  const Eigen::Matrix<double, 5, 5> M5 = M.topLeftCorner<5, 5>() - zbar * zbar.transpose();
  const Eigen::Matrix<double, 5, 5> N5 = N.topLeftCorner<5, 5>();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix<double, 5, 5>> ges(M5, N5);
  if (ges.info() != Eigen::Success)
    throw Error(ErrorKind::DegenerateData, "conic fit: gradient weight matrix is singular");
  const Eigen::Matrix<double, 5, 1> t5 = ges.eigenvectors().col(0);
  Vector6d theta;
  theta.head<5>() = t5;
  theta(5) = -zbar.dot(t5);
  return theta;
}

Vector6d solve_general(const Matrix6d& M, const Matrix6d& N) {
  Eigen::GeneralizedEigenSolver<Matrix6d> ges(M, N, true);
  if (ges.info() != Eigen::Success)
    throw Error(ErrorKind::DegenerateData, "conic fit: generalized eigenproblem failed");
  const auto alphas = ges.alphas();
  const auto betas = ges.betas();
  const double bscale = betas.cwiseAbs().maxCoeff();
  int best = -1;
  double best_abs = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 6; ++i) {
    if (std::abs(betas(i)) <= 1e-14 * bscale) continue;
    const std::complex<double> lambda = alphas(i) / betas(i);
    if (std::abs(lambda.imag()) > 1e-9 * std::max(1.0, std::abs(lambda.real()))) continue;
    if (std::abs(lambda.real()) < best_abs) {
      best_abs = std::abs(lambda.real());
      best = i;
    }
  }
  if (best < 0) throw Error(ErrorKind::DegenerateData, "conic fit: no finite real eigenvalue");
  Vector6d theta = ges.eigenvectors().col(best).real();
  return theta / theta.norm();
}

}  // namespace

Conic fit_conic_unchecked(std::span<const Eigen::Vector2d> points, FitMethod method) {
  const auto n = points.size();
  if (n < 6) {
    std::ostringstream msg;
    msg << "at least 6 points are needed to fit a conic, got " << n;
    throw Error(ErrorKind::InsufficientPoints, msg.str());
  }

  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(n);
  double ms = 0.0;
  for (const auto& p : points) ms += (p - centroid).squaredNorm();
  const double rms = std::sqrt(ms / static_cast<double>(n));
  if (!(rms > 0.0) || !std::isfinite(rms))
    throw Error(ErrorKind::DegenerateData, "conic fit: points are coincident or not finite");
  const double k = std::sqrt(2.0) / rms;

  Matrix6d M = Matrix6d::Zero();
  Matrix6d N = Matrix6d::Zero();
  Vector6d xi_mean = Vector6d::Zero();
  for (const auto& p : points) {
    const Eigen::Vector2d q = k * (p - centroid);
    const Vector6d xi = carrier(q.x(), q.y());
    const auto J = carrier_jacobian(q.x(), q.y());
    M.noalias() += xi * xi.transpose();
    N.noalias() += J * J.transpose();
    xi_mean += xi;
  }
  M /= static_cast<double>(n);
  N /= static_cast<double>(n);
  xi_mean /= static_cast<double>(n);

  // Points on a line (or pair of lines through few points) leave a null space
  // of dimension > 1 in the scatter.
  Eigen::SelfAdjointEigenSolver<Matrix6d> scatter(M, Eigen::EigenvaluesOnly);
  const auto ev = scatter.eigenvalues();
  if (!(ev(1) > 1e-10 * ev(5)))
    throw Error(ErrorKind::DegenerateData, "conic fit: design matrix is rank deficient");

  Vector6d theta;
  if (method == FitMethod::Taubin) {
    theta = solve_taubin(M, N);
  } else {
    Vector6d e = Vector6d::Zero();
    e(0) = 1.0;
    e(2) = 1.0;
    const Matrix6d Nh = N + xi_mean * e.transpose() + e * xi_mean.transpose();
    theta = solve_general(M, Nh);
  }

  Eigen::Matrix3d H;
  H << k, 0, -k * centroid.x(), 0, k, -k * centroid.y(), 0, 0, 1;
  const Conic normalized = Conic::from_coeffs(theta(0), theta(1), theta(2), theta(3), theta(4),
                                              theta(5));
  Conic out(H.transpose() * normalized.matrix() * H);
  Vector6d c = out.coeffs();
  c /= c.norm();
  if (c(0) + c(2) < 0.0) c = -c;
  return Conic::from_coeffs(c(0), c(1), c(2), c(3), c(4), c(5));
}

Conic fit_conic(std::span<const Eigen::Vector2d> points, FitMethod method) {
  Conic c = fit_conic_unchecked(points, method);
  if (!is_ellipse(c))
    throw Error(ErrorKind::NonEllipticalFit, "fitted conic is not a real ellipse");
  return c;
}

double conic_distance(const Conic& a, const Conic& b) {
  const Eigen::Matrix3d A = a.matrix(), B = b.matrix();
  const double aa = A.squaredNorm();
  if (aa == 0.0) return 1.0;
  const double t = (A.array() * B.array()).sum() / aa;
  return (t * A - B).norm() / B.norm();
}

}  // namespace horizon
