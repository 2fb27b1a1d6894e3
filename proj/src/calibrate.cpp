#include "horizon/calibrate.hpp"

#include <cmath>
#include <sstream>

#include "horizon/error.hpp"

namespace horizon {

Eigen::Matrix3d CameraIntrinsics::K() const {
  Eigen::Matrix3d k;
  k << fx_px(), gamma, u0_px, 0, fy_px(), v0_px, 0, 0, 1;
  return k;
}

Eigen::Matrix2d CameraIntrinsics::K11() const {
  Eigen::Matrix2d k;
  k << fx_px(), gamma, 0, fy_px();
  return k;
}

void validate(const CameraIntrinsics& cam) {
  const auto ok = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!ok(cam.f_mm)) throw Error(ErrorKind::InvalidSensor, "focal length must be positive");
  if (!ok(cam.mu_x_mm) || !ok(cam.mu_y_mm))
    throw Error(ErrorKind::InvalidSensor, "pixel pitch must be positive");
  if (!std::isfinite(cam.gamma) || !std::isfinite(cam.u0_px) || !std::isfinite(cam.v0_px))
    throw Error(ErrorKind::InvalidSensor, "skew and principal point must be finite");
}

Eigen::Matrix3d CalibrationEstimate::K() const {
  Eigen::Matrix3d k = Eigen::Matrix3d::Identity();
  k.topLeftCorner<2, 2>() = K11;
  k.topRightCorner<2, 1>() = K12;
  return k;
}

std::pair<Conic, int> normalize_sign(const Conic& c) {
  const Eigen::Matrix2d C11 = c.block11();
  const double tr = c.trace11();
  if (!(std::abs(tr) > 1e-14 * C11.cwiseAbs().maxCoeff()) || !std::isfinite(tr))
    throw Error(ErrorKind::IndefiniteBlock, "trace of the 2x2 conic block is zero");
  if (tr > 0.0) return {c, 1};
  return {c.scaled(-1.0), -1};
}

double scale_factor(const Conic& C, const Conic& Cp) {
  const double den = Cp.det() * C.det11();
  if (den == 0.0 || !std::isfinite(den))
    throw Error(ErrorKind::DegenerateConic, "scale factor: det(C') det(C11) is zero");
  return C.det() * Cp.det11() / den;
}

Eigen::Matrix2d cholesky2(const Eigen::Matrix2d& m) {
  const double a = m(0, 0);
  if (!(a > 0.0))
    throw Error(ErrorKind::NumericalDefiniteness, "cholesky: matrix is not positive definite");
  const double l00 = std::sqrt(a);
  const double l10 = m(1, 0) / l00;
  const double d = m(1, 1) - l10 * l10;
  if (!(d > 0.0))
    throw Error(ErrorKind::NumericalDefiniteness, "cholesky: matrix is not positive definite");
  Eigen::Matrix2d L;
  L << l00, 0.0, l10, std::sqrt(d);
  return L;
}

namespace {

// x solving L x = b, L lower triangular.
Eigen::Vector2d forward_sub(const Eigen::Matrix2d& L, const Eigen::Vector2d& b) {
  const double x0 = b(0) / L(0, 0);
  return {x0, (b(1) - L(1, 0) * x0) / L(1, 1)};
}

// x solving L^T x = b, L lower triangular.
Eigen::Vector2d back_sub_transposed(const Eigen::Matrix2d& L, const Eigen::Vector2d& b) {
  const double x1 = b(1) / L(1, 1);
  return {(b(0) - L(1, 0) * x1) / L(0, 0), x1};
}

std::string step_message(int step, const std::string& what) {
  std::ostringstream msg;
  msg << "calibration step " << step << ": " << what;
  return msg.str();
}

}  // namespace

K11Solution solve_k11(const Conic& C, const Conic& Cp, double s) {
  K11Solution out;
  out.L_Cp = cholesky2(s * Cp.block11());
  out.L_C = cholesky2(C.block11());
  // L_C'^T K11 = L_C^T, column by column.
  const Eigen::Matrix2d rhs = out.L_C.transpose();
  out.K11.col(0) = back_sub_transposed(out.L_Cp, rhs.col(0));
  out.K11.col(1) = back_sub_transposed(out.L_Cp, rhs.col(1));
  out.K11(1, 0) = 0.0;
  return out;
}

Eigen::Vector2d solve_k12(const Conic& C, const Conic& Cp, const Eigen::Matrix2d& L_C,
                          const Eigen::Matrix2d& L_Cp, double s) {
  if (L_Cp(0, 0) == 0.0 || L_Cp(1, 1) == 0.0 || L_C(0, 0) == 0.0 || L_C(1, 1) == 0.0)
    throw Error(ErrorKind::DegenerateConic, "principal point: singular conic block");
  const Eigen::Vector2d first = back_sub_transposed(L_Cp, forward_sub(L_C, C.block12()));
  // (s C'11)^-1 = L_C'^-T L_C'^-1, so C'11^-1 C'12 = s L_C'^-T L_C'^-1 C'12.
  const Eigen::Vector2d second = s * back_sub_transposed(L_Cp, forward_sub(L_Cp, Cp.block12()));
  return first - second;
}

CalibrationEstimate calibrate_single(const Conic& C_in, const Conic& Cp_in) {
  CalibrationEstimate est;

  if (!(Cp_in.det11() > 0.0))
    throw Error(ErrorKind::NotEllipse, step_message(1, "imaged conic is not an ellipse"));
  if (!(C_in.det11() > 0.0))
    throw Error(ErrorKind::NotEllipse, step_message(2, "reference conic block is not definite"));

  Conic Cp, C;
  try {
    std::tie(Cp, est.alpha) = normalize_sign(Cp_in);
  } catch (const Error& e) {
    throw Error(e.kind(), step_message(1, e.what()));
  }
  try {
    std::tie(C, est.beta) = normalize_sign(C_in);
  } catch (const Error& e) {
    throw Error(e.kind(), step_message(2, e.what()));
  }

  try {
    est.s = scale_factor(C, Cp);
  } catch (const Error& e) {
    throw Error(e.kind(), step_message(5, e.what()));
  }
  if (!(est.s > 0.0) || !std::isfinite(est.s))
    throw Error(ErrorKind::NumericalDefiniteness,
                step_message(5, "scale factor is not positive; conics are not a real horizon pair"));

  try {
    est.L_Cp = cholesky2(est.s * Cp.block11());
  } catch (const Error& e) {
    throw Error(e.kind(), step_message(6, e.what()));
  }
  try {
    est.L_C = cholesky2(C.block11());
  } catch (const Error& e) {
    throw Error(e.kind(), step_message(7, e.what()));
  }

  const Eigen::Matrix2d rhs = est.L_C.transpose();
  est.K11.col(0) = back_sub_transposed(est.L_Cp, rhs.col(0));
  est.K11.col(1) = back_sub_transposed(est.L_Cp, rhs.col(1));
  est.K11(1, 0) = 0.0;

  est.J = solve_k12(C, Cp, est.L_C, est.L_Cp, est.s);
  est.K12 = est.J;
  est.d_x = est.K11(0, 0);
  est.d_y = est.K11(1, 1);

  const double tr = Cp.trace11(), dt = Cp.det11();
  const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * dt));
  const double lmin = 0.5 * (tr - disc), lmax = 0.5 * (tr + disc);
  if (!(lmin > 0.0) || lmax / lmin > 1e8) {
    std::ostringstream msg;
    msg << "imaged conic block is ill-conditioned (cond = " << (lmin > 0.0 ? lmax / lmin : INFINITY)
        << "); the projection is close to a parabola";
    est.warnings.push_back(msg.str());
  }
  return est;
}

double focal_from_k(const CalibrationEstimate& est, double mu_x_mm, double mu_y_mm) {
  if (!(mu_x_mm > 0.0) || !(mu_y_mm > 0.0) || !std::isfinite(mu_x_mm) || !std::isfinite(mu_y_mm))
    throw Error(ErrorKind::InvalidSensor, "pixel pitch must be positive");
  return 0.5 * (mu_x_mm * est.d_x + mu_y_mm * est.d_y);
}

double determinant_identity_residual(const CalibrationEstimate& est, const Conic& C,
                                     const Conic& Cp) {
  const double detC = est.beta * C.det();
  const double detCp = est.alpha * Cp.det();
  const double detK = est.K11(0, 0) * est.K11(1, 1) - est.K11(0, 1) * est.K11(1, 0);
  return std::abs(est.s * est.s * est.s * detK * detK * detCp - detC) / std::abs(detC);
}

}  // namespace horizon
