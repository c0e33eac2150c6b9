// Tests for the limit covariance formulas and their finite-record scaling.
#include <cmath>
#include <random>
#include <vector>

#include "chirpfit/asymptotics.hpp"
#include "chirpfit/errors.hpp"
#include "chirpfit/estimators.hpp"
#include "chirpfit/signal.hpp"
#include "doctest.h"

using namespace chirpfit;

namespace {
double max_abs_diff(const Mat3& a, const Mat3& b) {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      worst = std::max(worst, std::abs(a[i][j] - b[i][j]));
  return worst;
}

Mat3 matmul(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a[i][k] * b[k][j];
      c[i][j] = s;
    }
  return c;
}

constexpr Mat3 kIdentity{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
}  // namespace

TEST_CASE("information matrix for a real amplitude") {
  auto s = sigma_matrix({5.0, 0.0, 0.5});
  const Mat3 expect{{{2.0, 0.0, 0.0},
                     {0.0, 2.0, 10.0 / 3.0},
                     {0.0, 10.0 / 3.0, 10.0}}};
  CHECK(max_abs_diff(s, expect) < 1e-12);
}

TEST_CASE("inverse matrix frozen values for axis-aligned and rotated amplitudes") {
  // Hand-evaluated from the closed form (1/(8r)) [[4r+5q^2, -5pq, 15q],
  // [-5pq, 4r+5p^2, -15p], [15q, -15p, 45]].
  auto real5 = sigma_inv_matrix({5.0, 0.0, 0.5});
  const Mat3 expect_real{{{0.5, 0.0, 0.0},
                          {0.0, 1.125, -0.375},
                          {0.0, -0.375, 0.225}}};
  CHECK(max_abs_diff(real5, expect_real) < 1e-12);

  auto imag5 = sigma_inv_matrix({0.0, 5.0, 0.5});
  const Mat3 expect_imag{{{1.125, 0.0, 0.375},
                          {0.0, 0.5, 0.0},
                          {0.375, 0.0, 0.225}}};
  CHECK(max_abs_diff(imag5, expect_imag) < 1e-12);

  auto mixed = sigma_inv_matrix({3.0, 4.0, 1.0});
  const Mat3 expect_mixed{{{0.9, -0.3, 0.3},
                           {-0.3, 0.725, -0.225},
                           {0.3, -0.225, 0.225}}};
  CHECK(max_abs_diff(mixed, expect_mixed) < 1e-12);
}

TEST_CASE("matrix and inverse multiply to the identity over random amplitudes") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    ChirpComponent a{u(rng), u(rng), 0.3};
    if (std::abs(a.amplitude()) < 1e-3) continue;
    worst = std::max(
        worst, max_abs_diff(matmul(sigma_matrix(a), sigma_inv_matrix(a)),
                            kIdentity));
    worst = std::max(
        worst, max_abs_diff(matmul(sigma_inv_matrix(a), sigma_matrix(a)),
                            kIdentity));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("inverse is symmetric positive definite") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int k = 0; k < 50; ++k) {
    ChirpComponent a{u(rng), u(rng), 1.0};
    if (std::abs(a.amplitude()) < 1e-2) continue;
    auto m = sigma_inv_matrix(a);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(m[i][j] == doctest::Approx(m[j][i]).epsilon(1e-12));
    // Leading principal minors of a positive definite matrix are positive.
    const double m1 = m[0][0];
    const double m2 = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    const double m3 = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                      m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                      m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    CHECK(m1 > 0.0);
    CHECK(m2 > 0.0);
    CHECK(m3 > 0.0);
  }
}

TEST_CASE("rate variance entry depends only on the amplitude magnitude") {
  const double expect = 45.0 / (8.0 * 25.0);
  CHECK(sigma_inv_matrix({5.0, 0.0, 0.1})[2][2] ==
        doctest::Approx(expect).epsilon(1e-12));
  CHECK(sigma_inv_matrix({0.0, 5.0, 0.1})[2][2] ==
        doctest::Approx(expect).epsilon(1e-12));
  CHECK(sigma_inv_matrix({3.0, 4.0, 0.1})[2][2] ==
        doctest::Approx(expect).epsilon(1e-12));
  CHECK(sigma_inv_matrix({7.0, 0.0, 0.1})[2][2] ==
        doctest::Approx(45.0 / (8.0 * 49.0)).epsilon(1e-12));
}

TEST_CASE("finite-record variances carry the documented rates and scales") {
  ChirpComponent a{7.0, 0.0, 0.501};
  auto v = finite_n_variances(a, 1.0, 300);
  const double n5 = 300.0 * 300.0 * 300.0 * 300.0 * 300.0;
  CHECK(v[2] == doctest::Approx(45.0 / (8.0 * 49.0 * n5)).epsilon(1e-12));
  auto inv = sigma_inv_matrix(a);
  CHECK(v[0] == doctest::Approx(inv[0][0] / 300.0).epsilon(1e-12));
  CHECK(v[1] == doctest::Approx(inv[1][1] / 300.0).epsilon(1e-12));

  // Linear in the noise variance.
  auto v2 = finite_n_variances(a, 2.0, 300);
  for (int i = 0; i < 3; ++i)
    CHECK(v2[i] == doctest::Approx(2.0 * v[i]).epsilon(1e-12));

  // Doubling the record length divides the rate variance by 32.
  auto vh = finite_n_variances(a, 1.0, 600);
  CHECK(v[2] / vh[2] == doctest::Approx(32.0).epsilon(1e-12));
  CHECK(v[0] / vh[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("per-component covariance blocks for a model") {
  ChirpModel m;
  m.components.push_back({7.0, 0.0, 1.0});
  m.components.push_back({3.0, 4.0, 0.5});
  auto blocks = multi_covariance(m, 2.0, 201);
  REQUIRE(blocks.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    auto v = finite_n_variances(m.components[k], 2.0, 201);
    CHECK(blocks[k][0][0] == doctest::Approx(v[0]).epsilon(1e-12));
    CHECK(blocks[k][1][1] == doctest::Approx(v[1]).epsilon(1e-12));
    CHECK(blocks[k][2][2] == doctest::Approx(v[2]).epsilon(1e-12));
  }
}

TEST_CASE("bundle carries both the shape and the scaled diagonal") {
  ChirpComponent a{3.0, 4.0, 0.9};
  auto bundle = asymptotic_covariance(a, 1.5, 101);
  CHECK(max_abs_diff(bundle.sigma_inv, sigma_inv_matrix(a)) == 0.0);
  auto v = finite_n_variances(a, 1.5, 101);
  for (int i = 0; i < 3; ++i)
    CHECK(bundle.scaled[i] == doctest::Approx(v[i]).epsilon(1e-12));
}

TEST_CASE("covariance attaches to a fit from its own amplitudes") {
  ChirpModel m;
  m.components.push_back({5.0, 0.0, 0.5});
  NoiseSpec ns;
  ns.sigma2 = 1.0;
  ns.seed = 8;
  auto y = add(synthesize_clean(m, 101), generate_noise(ns, 101));
  auto fit = lse_one(y);
  attach_covariance(fit, 1.0, 101);
  REQUIRE(fit.covariance.size() == 1);
  const double mag2 = std::norm(fit.components[0].amplitude());
  const double n5 = std::pow(101.0, 5.0);
  CHECK(fit.covariance[0][2][2] ==
        doctest::Approx(45.0 / (8.0 * mag2 * n5)).epsilon(1e-9));
  CHECK(fit.covariance[0][0][0] > 0.0);
}

TEST_CASE("degenerate amplitudes and parameters are rejected") {
  CHECK_THROWS_AS((void)sigma_matrix({0.0, 0.0, 0.5}), DataError);
  CHECK_THROWS_AS((void)sigma_inv_matrix({0.0, 0.0, 0.5}), DataError);
  const double nan = std::nan("");
  CHECK_THROWS_AS((void)sigma_matrix({nan, 1.0, 0.5}), DataError);
  CHECK_THROWS_AS((void)finite_n_variances({5.0, 0.0, 0.5}, 0.0, 101), DataError);
  CHECK_THROWS_AS((void)finite_n_variances({5.0, 0.0, 0.5}, -1.0, 101), DataError);
  CHECK_THROWS_AS((void)finite_n_variances({5.0, 0.0, 0.5}, 1.0, 0), DataError);

  FitResult fit;
  fit.components.push_back({0.0, 0.0, 0.5});
  CHECK_THROWS_AS(attach_covariance(fit, 1.0, 101), DataError);
}
