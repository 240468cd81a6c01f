#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Geometry>
#include <cmath>

#include "mimu/lie.hpp"
#include "mimu/rng.hpp"

using namespace mimu;

namespace {

// Independent oracle: truncated matrix-exponential series, 20 terms.
Mat3 series_exp(const Vec3& theta, int terms = 20) {
  const Mat3 k = hat(theta);
  Mat3 acc = Mat3::Identity();
  Mat3 pow = Mat3::Identity();
  double fact = 1.0;
  for (int n = 1; n <= terms; ++n) {
    pow = pow * k;
    fact *= n;
    acc += pow / fact;
  }
  return acc;
}

Vec3 random_axis_angle(RngStream& rng, double max_angle) {
  Vec3 axis = rng.gaussian3();
  while (axis.norm() < 1e-6) axis = rng.gaussian3();
  axis.normalize();
  return rng.uniform(0.0, max_angle) * axis;
}

Rotation random_rotation(RngStream& rng) {
  return exp_so3(random_axis_angle(rng, M_PI - 0.02));
}

}  // namespace

TEST_CASE("hat produces the expected skew layout") {
  CHECK(hat(Vec3::Zero()).isZero(0.0));

  Mat3 expected;
  // clang-format off
  expected <<  0, -3,  2,
               3,  0, -1,
              -2,  1,  0;
  // clang-format on
  CHECK((hat(Vec3(1, 2, 3)) - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hat(v)*w equals the cross product") {
  RngStream rng(11);
  for (int i = 0; i < 100; ++i) {
    const Vec3 v = rng.gaussian3();
    const Vec3 w = rng.gaussian3();
    CHECK((hat(v) * w - v.cross(w)).norm() < 1e-14);
  }
}

TEST_CASE("hat is linear") {
  RngStream rng(12);
  for (int i = 0; i < 50; ++i) {
    const Vec3 u = rng.gaussian3();
    const Vec3 v = rng.gaussian3();
    const double a = rng.uniform(-2, 2);
    const double b = rng.uniform(-2, 2);
    CHECK((hat(a * u + b * v) - (a * hat(u) + b * hat(v))).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("exp_so3 identity and quarter turn") {
  CHECK((exp_so3(Vec3::Zero()).m - Mat3::Identity()).cwiseAbs().maxCoeff() == 0.0);

  // 90 degrees about x maps y to z.
  const Rotation r = exp_so3(Vec3(M_PI / 2, 0, 0));
  CHECK((r * Vec3(0, 1, 0) - Vec3(0, 0, 1)).norm() < 1e-12);
}

TEST_CASE("exp_so3 matches the truncated series oracle") {
  RngStream rng(13);
  // 20 terms suffice up to ~pi/2; wider sweep with a longer series.
  for (int i = 0; i < 200; ++i) {
    const Vec3 theta = random_axis_angle(rng, M_PI / 2);
    CHECK((exp_so3(theta).m - series_exp(theta, 20)).cwiseAbs().maxCoeff() < 1e-12);
  }
  for (int i = 0; i < 200; ++i) {
    const Vec3 theta = random_axis_angle(rng, 3.0);
    CHECK((exp_so3(theta).m - series_exp(theta, 40)).cwiseAbs().maxCoeff() < 1e-12);
  }
  // Small-angle branch against the same oracle.
  for (int i = 0; i < 50; ++i) {
    const Vec3 theta = random_axis_angle(rng, 1e-9);
    CHECK((exp_so3(theta).m - series_exp(theta)).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("exp_so3 satisfies the adjoint identity") {
  RngStream rng(14);
  for (int i = 0; i < 100; ++i) {
    const Rotation R = random_rotation(rng);
    const Vec3 theta = random_axis_angle(rng, 2.5);
    const Mat3 lhs = exp_so3(R * theta).m;
    const Mat3 rhs = R.m * exp_so3(theta).m * R.m.transpose();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("exp_so3 output is orthonormal") {
  RngStream rng(15);
  for (int i = 0; i < 100; ++i) {
    CHECK(exp_so3(random_axis_angle(rng, 3.1)).is_valid(1e-12));
  }
}

TEST_CASE("log_so3 of identity is zero") {
  CHECK(log_so3(Rotation::identity()).norm() == 0.0);
}

TEST_CASE("exp/log roundtrip over 10000 random axis-angles") {
  RngStream rng(16);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Vec3 theta = random_axis_angle(rng, M_PI - 0.01);
    const Vec3 back = log_so3(exp_so3(theta));
    worst = std::max(worst, (back - theta).norm());
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("log_so3 pi rotation about x") {
  Mat3 m = Vec3(1, -1, -1).asDiagonal();
  const Vec3 theta = log_so3(Rotation(m));
  CHECK((theta - Vec3(M_PI, 0, 0)).norm() < 1e-12);
}

TEST_CASE("log_so3 near-pi branch roundtrips") {
  RngStream rng(17);
  for (int i = 0; i < 500; ++i) {
    const double angle = M_PI - rng.uniform(1e-9, 1e-4);
    Vec3 axis = rng.gaussian3().normalized();
    const Vec3 theta = angle * axis;
    const Rotation r = exp_so3(theta);
    CHECK(geodesic_distance(r, exp_so3(log_so3(r))) < 1e-9);
  }
}

TEST_CASE("roundtrip determinant stays one") {
  RngStream rng(18);
  for (int i = 0; i < 200; ++i) {
    const Rotation r = random_rotation(rng);
    CHECK(std::abs(exp_so3(log_so3(r)).m.determinant() - 1.0) < 1e-12);
  }
}

TEST_CASE("conjugation identity for hat") {
  RngStream rng(19);
  for (int i = 0; i < 100; ++i) {
    const Rotation R = random_rotation(rng);
    const Vec3 w = rng.gaussian3();
    CHECK((hat(R * w) - R.m * hat(w) * R.m.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("right_jacobian matches its first-order definition") {
  RngStream rng(20);
  const double h = 1e-7;
  for (int i = 0; i < 50; ++i) {
    const Vec3 theta = random_axis_angle(rng, 2.8);
    const Mat3 jr = right_jacobian(theta);
    for (int c = 0; c < 3; ++c) {
      Vec3 d = Vec3::Zero();
      d[c] = h;
      // Exp(theta + d) ~ Exp(theta) Exp(Jr d)
      const Vec3 lhs = log_so3(exp_so3(theta).transposed() * exp_so3(theta + d)) / h;
      CHECK((lhs - jr.col(c)).norm() < 1e-5);
    }
    CHECK((right_jacobian_inverse(theta) * jr - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("rotation_mean of a constant list") {
  RngStream rng(21);
  const Rotation r = random_rotation(rng);
  std::vector<Rotation> rs{r, r, r};
  CHECK(geodesic_distance(rotation_mean(rs), r) < 1e-12);
}

TEST_CASE("rotation_mean of two coaxial rotations bisects the angle") {
  const Vec3 axis(0, 0, 1);
  const double alpha = 0.3, beta = 0.9;
  std::vector<Rotation> rs{exp_so3(alpha * axis), exp_so3(beta * axis)};
  const Rotation mean = rotation_mean(rs);
  CHECK(geodesic_distance(mean, exp_so3(0.5 * (alpha + beta) * axis)) < 1e-10);
}

TEST_CASE("rotation_mean of small perturbations stays near the center") {
  RngStream rng(22);
  const Rotation center = random_rotation(rng);
  std::vector<Rotation> rs;
  for (int i = 0; i < 5; ++i) {
    rs.push_back(center * exp_so3(0.01 * rng.gaussian3()));
  }
  CHECK(geodesic_distance(rotation_mean(rs), center) < 0.02);
}

TEST_CASE("rotation_mean fixed point condition") {
  RngStream rng(23);
  const Rotation center = random_rotation(rng);
  std::vector<Rotation> rs;
  for (int i = 0; i < 7; ++i) {
    rs.push_back(center * exp_so3(0.2 * rng.gaussian3()));
  }
  const Rotation mean = rotation_mean(rs);
  Vec3 residual = Vec3::Zero();
  for (const Rotation& r : rs) residual += log_so3(mean.transposed() * r);
  CHECK(residual.norm() / static_cast<double>(rs.size()) < 1e-10);
}

TEST_CASE("rotation_mean rejects dispersed input") {
  std::vector<Rotation> rs{exp_so3(Vec3(0, 0, 0)), exp_so3(Vec3(2.0, 0, 0))};
  CHECK_THROWS_AS(rotation_mean(rs), NumericalError);
  CHECK_THROWS_AS(rotation_mean(std::vector<Rotation>{}), std::invalid_argument);
}

TEST_CASE("Rotation constructor repairs drift and rejects garbage") {
  RngStream rng(24);
  const Rotation r = random_rotation(rng);
  Mat3 drifted = r.m;
  drifted(0, 0) += 3e-5;
  const Rotation repaired(drifted);
  CHECK(repaired.is_valid(1e-12));
  CHECK(geodesic_distance(repaired, r) < 1e-4);

  Mat3 garbage = Mat3::Constant(0.7);
  CHECK_THROWS_AS(Rotation(garbage), std::invalid_argument);
}
