#include <cmath>
#include <random>

#include "doctest.h"

#include <Eigen/Eigenvalues>

#include "horizon/error.hpp"
#include "horizon/geometry.hpp"
#include "horizon/synth.hpp"
#include "oracles.hpp"

using namespace horizon;

TEST_SUITE("geometry") {

TEST_CASE("shape_matrix builds diag(1/a^2, 1/b^2, 1/c^2)") {
  const auto mimas = shape_matrix(415.6, 393.4, 381.2);
  CHECK(mimas.A(0, 0) == doctest::Approx(1.0 / (415.6 * 415.6)).epsilon(1e-15));
  CHECK(mimas.A(1, 1) == doctest::Approx(1.0 / (393.4 * 393.4)).epsilon(1e-15));
  CHECK(mimas.A(2, 2) == doctest::Approx(1.0 / (381.2 * 381.2)).epsilon(1e-15));
  CHECK(mimas.A(0, 1) == 0.0);

  CHECK(shape_matrix(1, 1, 1).A == Eigen::Matrix3d::Identity());
  CHECK(shape_matrix(2, 1, 1).A.diagonal() == Eigen::Vector3d(0.25, 1, 1));

  for (const Eigen::Vector3d p : {Eigen::Vector3d(415.6, 0, 0), Eigen::Vector3d(0, 393.4, 0),
                                  Eigen::Vector3d(0, 0, 381.2)})
    CHECK(p.dot(mimas.A * p) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mimas.semi_axes() == Eigen::Vector3d(415.6, 393.4, 381.2));
}

TEST_CASE("shape_matrix rejects non-positive semi-axes") {
  for (auto [a, b, c] : {std::tuple{0.0, 1.0, 1.0}, {1.0, -2.0, 1.0}, {1.0, 1.0, NAN}}) {
    try {
      shape_matrix(a, b, c);
      FAIL("expected InvalidShape");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidShape);
    }
  }
}

TEST_CASE("intersect_ray on the unit sphere") {
  const auto sphere = shape_matrix(1, 1, 1);
  const Eigen::Vector3d r(0, 0, 2);

  const auto chord = intersect_ray(sphere, r, Eigen::Vector3d(0, 0, -1));
  REQUIRE(chord.root_count == 2);
  CHECK(chord.lambdas[0] == doctest::Approx(1.0));
  CHECK(chord.lambdas[1] == doctest::Approx(3.0));

  CHECK(intersect_ray(sphere, r, Eigen::Vector3d(1, 0, 0)).root_count == 0);

  // Tangent line from distance 2 to a unit circle: half-angle asin(1/2),
  // tangent length sqrt(3).
  const double t = std::asin(0.5);
  const auto tangent = intersect_ray(sphere, r, Eigen::Vector3d(std::sin(t), 0, -std::cos(t)));
  CHECK(tangent.root_count == 1);
  CHECK(std::abs(tangent.discriminant) < 1e-12);
  CHECK(tangent.lambdas[0] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("intersect_ray rejects non-unit directions") {
  CHECK_THROWS_AS(intersect_ray(shape_matrix(1, 1, 1), {0, 0, 2}, {0, 0, -2}), Error);
}

TEST_CASE("every intersect_ray root lies on the surface") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1, 1);
  const auto body = shape_matrix(3, 2, 1.5);
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    const Eigen::Vector3d r(6 * U(rng), 6 * U(rng), 6 * U(rng));
    if (!observer_outside(body, r)) continue;
    const Eigen::Vector3d e = Eigen::Vector3d(U(rng), U(rng), U(rng)).normalized();
    const auto hit = intersect_ray(body, r, e);
    for (int k = 0; k < hit.root_count; ++k) {
      const Eigen::Vector3d p = r + hit.lambdas[k] * e;
      CHECK(p.dot(body.A * p) == doctest::Approx(1.0).epsilon(1e-9));
      ++checked;
    }
    if (hit.root_count == 2) CHECK(hit.lambdas[0] <= hit.lambdas[1]);
  }
  CHECK(checked > 100);
}

TEST_CASE("horizon_conic_planet hand-expanded sphere case") {
  const auto C = horizon_conic_planet(shape_matrix(1, 1, 1), {0, 0, 2}).matrix();
  CHECK(oracle::rel_err(C, Eigen::Vector3d(-3, -3, 1).asDiagonal().toDenseMatrix()) < 1e-15);
}

TEST_CASE("horizon_conic_planet axis-aligned Mimas view is diagonal") {
  const auto mimas = shape_matrix(415.6, 393.4, 381.2);
  const auto C = horizon_conic_planet(mimas, {0, 0, 10000}).matrix();
  CHECK(C(0, 1) == 0.0);
  CHECK(C(0, 2) == 0.0);
  CHECK(C(1, 2) == 0.0);
  CHECK(C(2, 2) > 0.0);
  CHECK(C(2, 2) == doctest::Approx(1.0 / (381.2 * 381.2)));
}

TEST_CASE("horizon_conic_planet approaches A r r^T A at the surface") {
  const auto body = shape_matrix(3, 2, 1);
  const Eigen::Vector3d dir = Eigen::Vector3d(1, 1, 1).normalized();
  const double surface = 1.0 / std::sqrt(dir.dot(body.A * dir));
  const Eigen::Vector3d r = (surface * (1 + 1e-9)) * dir;
  const Eigen::Vector3d Ar = body.A * r;
  const Eigen::Matrix3d rank1 = Ar * Ar.transpose();
  CHECK(oracle::rel_err(horizon_conic_planet(body, r).matrix(), rank1) < 1e-7);
}

TEST_CASE("horizon_conic_planet rejects observers on or inside the body") {
  const auto body = shape_matrix(2, 2, 2);
  for (const Eigen::Vector3d r : {Eigen::Vector3d(0, 0, 2), Eigen::Vector3d(0.5, 0.5, 0)}) {
    try {
      horizon_conic_planet(body, r);
      FAIL("expected NoHorizon");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NoHorizon);
    }
  }
}

TEST_CASE("horizon cone agrees with the discriminant-zero limb") {
  // Limb directions found by bisection on hit/miss satisfy e^T C_P e = 0,
  // and intersect_ray along them reports a tangent discriminant.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Vector3d axes(1.5 + U(rng) * 0.4, 1.2 + U(rng) * 0.2, 1.0);
    const auto body = shape_matrix(axes.x(), axes.y(), axes.z());
    const Eigen::Vector3d r = (3.0 + 2.0 * (U(rng) + 1)) *
                              Eigen::Vector3d(U(rng), U(rng), U(rng)).normalized();
    const auto C = horizon_conic_planet(body, r).matrix();
    const double scale = C.norm();
    for (int k = 0; k < 12; ++k) {
      const Eigen::Vector3d e = oracle::limb_direction(axes, r, 2 * M_PI * k / 12.0);
      CHECK(std::abs(e.dot(C * e)) < 1e-9 * scale);
      const auto hit = intersect_ray(body, r, e);
      CHECK(std::abs(hit.discriminant) < 1e-9 * std::max(1.0, scale));
    }
  }
}

TEST_CASE("horizon_conic_camera is an orthogonal similarity") {
  const auto C_P = horizon_conic_planet(shape_matrix(3, 2, 1.5), {4, -5, 6});
  CHECK(horizon_conic_camera(C_P, Pose{{4, -5, 6}, Eigen::Matrix3d::Identity()}).matrix() ==
        C_P.matrix());

  const auto diag = horizon_conic_planet(shape_matrix(1, 1, 1), {0, 0, 2});
  const Pose flip{{0, 0, 2}, euler321_to_rotation(M_PI, 0, 0)};
  CHECK(oracle::rel_err(horizon_conic_camera(diag, flip).matrix(), diag.matrix()) < 1e-15);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const Pose pose{{4, -5, 6}, random_rotation(rng)};
    const Eigen::Matrix3d C_C = horizon_conic_camera(C_P, pose).matrix();
    CHECK(C_C == C_C.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> a(C_P.matrix()), b(C_C);
    CHECK((a.eigenvalues() - b.eigenvalues()).norm() < 1e-10 * a.eigenvalues().norm());
  }
}

TEST_CASE("euler321_to_rotation conventions") {
  CHECK(euler321_to_rotation(0, 0, 0) == Eigen::Matrix3d::Identity());
  const Eigen::Matrix3d Rz = euler321_to_rotation(M_PI / 2, 0, 0);
  CHECK((Rz * Eigen::Vector3d::UnitX() - Eigen::Vector3d::UnitY()).norm() < 1e-15);
  CHECK((Rz * Eigen::Vector3d::UnitZ() - Eigen::Vector3d::UnitZ()).norm() < 1e-15);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-M_PI, M_PI);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Matrix3d R = euler321_to_rotation(U(rng), U(rng), U(rng));
    CHECK(is_rotation(R));
    CHECK((R.transpose() * R - Eigen::Matrix3d::Identity()).norm() < 1e-12);
  }

  // The appendix camera mounting angles compose into a proper rotation.
  const double d = M_PI / 180.0;
  CHECK(is_rotation(euler321_to_rotation(89.93 * d, -0.04 * d, -89.99 * d)));
}

TEST_CASE("quaternion round trip and pose validation") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 50; ++i) {
    const Eigen::Matrix3d R = random_rotation(rng);
    const Eigen::Vector4d q = rotation_to_quaternion(R);
    CHECK((quaternion_to_rotation(q(0), q(1), q(2), q(3)) - R).norm() < 1e-14);
  }
  // 90 degrees about z, scalar first.
  const Eigen::Matrix3d Rq = quaternion_to_rotation(std::sqrt(0.5), 0, 0, std::sqrt(0.5));
  CHECK((Rq - euler321_to_rotation(M_PI / 2, 0, 0)).norm() < 1e-15);

  Eigen::Matrix3d bad = Eigen::Matrix3d::Identity();
  bad(0, 0) = -1;  // reflection
  CHECK_THROWS_AS(make_pose({0, 0, 10}, bad), Error);
  CHECK_THROWS_AS(quaternion_to_rotation(0, 0, 0, 0), Error);
}

}
