// Tests for signal synthesis, noise generation, and angle utilities.
#include <cmath>
#include <complex>
#include <vector>

#include "chirpfit/errors.hpp"
#include "chirpfit/signal.hpp"
#include "doctest.h"

using namespace chirpfit;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

ChirpModel one(double re, double im, double beta) {
  ChirpModel m;
  m.components.push_back({re, im, beta});
  return m;
}
}  // namespace

TEST_CASE("wrap_angle maps onto [0, 2pi)") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(1.25) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(wrap_angle(kTwoPi) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(wrap_angle(-0.5) == doctest::Approx(kTwoPi - 0.5).epsilon(1e-15));
  CHECK(wrap_angle(7.0) == doctest::Approx(7.0 - kTwoPi).epsilon(1e-15));
  // Idempotent on already wrapped values.
  for (double b : {0.1, 3.0, 6.2}) CHECK(wrap_angle(wrap_angle(b)) == wrap_angle(b));
  for (double b : {-9.7, 0.0, 2.5, 13.1}) {
    double w = wrap_angle(b);
    CHECK(w >= 0.0);
    CHECK(w < kTwoPi);
  }
}

TEST_CASE("angle_distance is a circular metric bounded by pi") {
  CHECK(angle_distance(0.3, 0.3) == 0.0);
  CHECK(angle_distance(0.1, kTwoPi - 0.1) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(angle_distance(0.0, 3.14159265358979) ==
        doctest::Approx(3.14159265358979).epsilon(1e-12));
  for (double a : {0.0, 1.0, 4.0})
    for (double b : {0.5, 2.5, 6.0}) {
      CHECK(angle_distance(a, b) == angle_distance(b, a));
      CHECK(angle_distance(a, b) <= 3.1415926535897932 + 1e-12);
      CHECK(angle_distance(a, b) >= 0.0);
    }
}

TEST_CASE("synthesize_clean produces A*exp(i*beta*t^2) at t = 1..n") {
  const Complex a{2.0, 1.0};
  const double beta = 0.3;
  auto y = synthesize_clean(one(a.real(), a.imag(), beta), 6);
  REQUIRE(y.size() == 6);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double t = static_cast<double>(i + 1);
    const Complex expect = a * std::polar(1.0, beta * t * t);
    CHECK(std::abs(y[i] - expect) < 1e-12);
    CHECK(std::abs(y[i]) == doctest::Approx(std::abs(a)).epsilon(1e-12));
  }
  // Phase increments follow beta*(2t+1).
  for (std::size_t i = 0; i + 1 < y.size(); ++i) {
    const double t = static_cast<double>(i + 1);
    const double inc = std::arg(y[i + 1] * std::conj(y[i]));
    CHECK(angle_distance(inc < 0 ? inc + kTwoPi : inc,
                         wrap_angle(beta * (2.0 * t + 1.0))) < 1e-12);
  }
}

TEST_CASE("synthesize_clean is additive over components") {
  ChirpModel m;
  m.components.push_back({7.0, -1.0, 1.2});
  m.components.push_back({3.0, 4.0, 0.4});
  auto both = synthesize_clean(m, 50);
  auto first = synthesize_clean(one(7.0, -1.0, 1.2), 50);
  auto second = synthesize_clean(one(3.0, 4.0, 0.4), 50);
  auto sum = add(first, second);
  for (std::size_t i = 0; i < both.size(); ++i)
    CHECK(std::abs(both[i] - sum[i]) < 1e-12);
}

TEST_CASE("rates are equivalent modulo 2pi because t^2 is an integer") {
  auto base = synthesize_clean(one(5.0, 0.0, 0.8), 40);
  auto shifted = synthesize_clean(one(5.0, 0.0, 0.8 + kTwoPi), 40);
  for (std::size_t i = 0; i < base.size(); ++i)
    CHECK(std::abs(base[i] - shifted[i]) < 1e-9);
}

TEST_CASE("synthesize_clean rejects degenerate input") {
  CHECK_THROWS_AS((void)synthesize_clean(one(5.0, 0.0, 0.5), 0), DataError);
  CHECK_THROWS_AS((void)synthesize_clean(ChirpModel{}, 10), DataError);
  CHECK_THROWS_AS((void)synthesize_clean(one(0.0, 0.0, 0.5), 10), DataError);
}

TEST_CASE("generate_noise is deterministic in the seed") {
  NoiseSpec spec;
  spec.sigma2 = 2.0;
  spec.seed = 31;
  auto a = generate_noise(spec, 256);
  auto b = generate_noise(spec, 256);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

  spec.seed = 32;
  auto c = generate_noise(spec, 256);
  std::size_t differing = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != c[i]) ++differing;
  CHECK(differing > 200);
}

TEST_CASE("iid noise has the documented marginal moments") {
  NoiseSpec spec;
  spec.sigma2 = 3.0;
  spec.seed = 7;
  const std::size_t n = 40000;
  auto e = generate_noise(spec, n);
  double p2 = 0.0, re2 = 0.0, im2 = 0.0, cross = 0.0;
  for (const auto& v : e.samples) {
    p2 += std::norm(v);
    re2 += v.real() * v.real();
    im2 += v.imag() * v.imag();
    cross += v.real() * v.imag();
  }
  const double dn = static_cast<double>(n);
  CHECK(p2 / dn == doctest::Approx(3.0).epsilon(0.05));
  CHECK(re2 / dn == doctest::Approx(1.5).epsilon(0.07));
  CHECK(im2 / dn == doctest::Approx(1.5).epsilon(0.07));
  CHECK(std::abs(cross / dn) < 0.1);
}

TEST_CASE("linear-process noise scales the marginal variance by sum of squared taps") {
  NoiseSpec spec;
  spec.kind = NoiseKind::LinearProcess;
  spec.sigma2 = 2.0;
  spec.coeffs = {1.0, 0.5};
  spec.seed = 9;
  const std::size_t n = 40000;
  auto e = generate_noise(spec, n);
  double p2 = 0.0;
  for (const auto& v : e.samples) p2 += std::norm(v);
  // sigma2 * (1^2 + 0.5^2) = 2.5
  CHECK(p2 / static_cast<double>(n) == doctest::Approx(2.5).epsilon(0.07));

  // Lag-1 autocovariance of the filter output: sigma2 * c0*c1 = 1.0.
  Complex acv{0.0, 0.0};
  for (std::size_t i = 0; i + 1 < e.size(); ++i) acv += e[i + 1] * std::conj(e[i]);
  CHECK(acv.real() / static_cast<double>(n) == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("generate_noise validates its inputs") {
  NoiseSpec spec;
  CHECK_THROWS_AS((void)generate_noise(spec, 0), DataError);
  spec.sigma2 = 0.0;
  CHECK_THROWS_AS((void)generate_noise(spec, 8), DataError);
  spec.sigma2 = -1.0;
  CHECK_THROWS_AS((void)generate_noise(spec, 8), DataError);
  spec.sigma2 = 1.0;
  spec.kind = NoiseKind::LinearProcess;
  spec.coeffs.clear();
  CHECK_THROWS_AS((void)generate_noise(spec, 8), DataError);
}

TEST_CASE("add requires equal lengths and sums elementwise") {
  ComplexSignal a(3), b(3), c(4);
  a[0] = {1, 2};
  b[0] = {3, -1};
  auto s = add(a, b);
  CHECK(s[0] == Complex{4, 1});
  CHECK_THROWS_AS((void)add(a, c), DataError);
}

TEST_CASE("snr_db and norm2 follow their definitions") {
  ChirpComponent comp{5.0, 0.0, 0.5};
  CHECK(snr_db(comp, 0.5) == doctest::Approx(10.0 * std::log10(50.0)).epsilon(1e-12));
  ChirpComponent rot{3.0, 4.0, 1.0};
  CHECK(snr_db(rot, 1.0) == doctest::Approx(10.0 * std::log10(25.0)).epsilon(1e-12));
  CHECK_THROWS_AS((void)snr_db(comp, 0.0), DataError);

  ComplexSignal y(2);
  y[0] = {3.0, 4.0};
  y[1] = {1.0, -1.0};
  CHECK(norm2(y) == doctest::Approx(27.0).epsilon(1e-15));
}

TEST_CASE("component amplitude helpers") {
  ChirpComponent c{3.0, -4.0, 0.7};
  CHECK(c.amplitude() == Complex{3.0, -4.0});
  CHECK(c.magnitude() == doctest::Approx(5.0).epsilon(1e-15));
  ChirpModel m;
  m.components.assign(3, c);
  CHECK(m.order() == 3);
}
