#include "chirpfit/signal.hpp"

#include <cmath>
#include <random>

#include "chirpfit/errors.hpp"

namespace chirpfit {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Deterministic standard-normal stream: mt19937_64 (bit-exact sequence fixed
// by the standard) through an explicit Box-Muller transform, so the draws do
// not depend on any library's normal_distribution implementation.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1], u2 in [0, 1): 53-bit mantissas from the top engine bits.
    const double u1 =
        (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = kTwoPi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  Complex next_complex(double std_per_part) {
    const double re = next();
    const double im = next();
    return {std_per_part * re, std_per_part * im};
  }

 private:
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace

double wrap_angle(double beta) {
  double w = std::fmod(beta, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;  // fmod rounding can land exactly on 2*pi
  return w;
}

double angle_distance(double a, double b) {
  double d = std::fabs(wrap_angle(a) - wrap_angle(b));
  if (d > kTwoPi / 2.0) d = kTwoPi - d;
  return d;
}

ComplexSignal synthesize_clean(const ChirpModel& model, std::size_t n) {
  if (n == 0) throw DataError("synthesize_clean: record length must be positive");
  if (model.components.empty())
    throw DataError("synthesize_clean: model has no components");
  for (const ChirpComponent& c : model.components) {
    if (!(std::isfinite(c.a_re) && std::isfinite(c.a_im) && std::isfinite(c.beta)))
      throw DataError("synthesize_clean: non-finite component parameter");
    if (c.a_re == 0.0 && c.a_im == 0.0)
      throw DataError("synthesize_clean: zero amplitude component");
  }

  ComplexSignal y(n);
  for (const ChirpComponent& c : model.components) {
    const double beta = wrap_angle(c.beta);
    const Complex a = c.amplitude();
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i + 1);
      const double phase = beta * (t * t);
      y.samples[i] += a * Complex(std::cos(phase), std::sin(phase));
    }
  }
  return y;
}

ComplexSignal generate_noise(const NoiseSpec& spec, std::size_t n) {
  if (n == 0) throw DataError("generate_noise: record length must be positive");
  if (!(spec.sigma2 > 0.0) || !std::isfinite(spec.sigma2))
    throw DataError("generate_noise: sigma2 must be positive and finite");

  const double std_per_part = std::sqrt(spec.sigma2 / 2.0);
  GaussianSource gauss(spec.seed);
  ComplexSignal eps(n);

  switch (spec.kind) {
    case NoiseKind::IidGaussian: {
      for (std::size_t i = 0; i < n; ++i)
        eps.samples[i] = gauss.next_complex(std_per_part);
      return eps;
    }
    case NoiseKind::LinearProcess: {
      const std::size_t taps = spec.coeffs.size();
      if (taps == 0)
        throw DataError("generate_noise: linear process needs at least one tap");
      for (double c : spec.coeffs)
        if (!std::isfinite(c))
          throw DataError("generate_noise: non-finite filter tap");
      // Innovations e(1-L) .. e(n); index j holds time t = j - L + 1.
      std::vector<Complex> innov(n + taps);
      for (Complex& e : innov) e = gauss.next_complex(std_per_part);
      for (std::size_t i = 0; i < n; ++i) {
        // time t = i + 1; eps(t) = sum_l coeffs[l] * e(t - l)
        Complex acc{0.0, 0.0};
        for (std::size_t l = 0; l < taps; ++l)
          acc += spec.coeffs[l] * innov[i + taps - l];
        eps.samples[i] = acc;
      }
      return eps;
    }
  }
  throw DataError("generate_noise: unknown noise kind");
}

ComplexSignal add(const ComplexSignal& a, const ComplexSignal& b) {
  if (a.size() != b.size())
    throw DataError("add: signal lengths differ");
  ComplexSignal out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    out.samples[i] = a.samples[i] + b.samples[i];
  return out;
}

double snr_db(const ChirpComponent& component, double sigma2) {
  if (!(sigma2 > 0.0))
    throw DataError("snr_db: sigma2 must be positive");
  const double power = component.a_re * component.a_re + component.a_im * component.a_im;
  return 10.0 * std::log10(power / sigma2);
}

double norm2(const ComplexSignal& y) {
  double acc = 0.0;
  for (const Complex& v : y.samples) acc += std::norm(v);
  return acc;
}

}  // namespace chirpfit
