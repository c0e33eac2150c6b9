#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace chirpfit {

using Complex = std::complex<double>;

// A finite complex-valued record sampled at t = 1, 2, ..., N.
// samples[i] holds the value at time t = i + 1.
struct ComplexSignal {
  std::vector<Complex> samples;

  ComplexSignal() = default;
  explicit ComplexSignal(std::size_t n) : samples(n) {}
  explicit ComplexSignal(std::vector<Complex> s) : samples(std::move(s)) {}

  [[nodiscard]] std::size_t size() const { return samples.size(); }
  [[nodiscard]] Complex& operator[](std::size_t i) { return samples[i]; }
  [[nodiscard]] const Complex& operator[](std::size_t i) const { return samples[i]; }
};

// One elementary chirp component A * exp(i * beta * t^2), with complex
// amplitude A = a_re + i*a_im and frequency rate beta in radians per t^2.
struct ChirpComponent {
  double a_re = 0.0;
  double a_im = 0.0;
  double beta = 0.0;

  [[nodiscard]] Complex amplitude() const { return {a_re, a_im}; }
  [[nodiscard]] double magnitude() const { return std::abs(amplitude()); }
};

// A sum of elementary chirp components. By convention components are listed
// in descending amplitude magnitude; estimators report them in the order the
// stages recovered them.
struct ChirpModel {
  std::vector<ChirpComponent> components;

  [[nodiscard]] std::size_t order() const { return components.size(); }
};

enum class NoiseKind {
  IidGaussian,    // independent complex Gaussian samples
  LinearProcess,  // finite real filter applied to complex Gaussian innovations
};

// Additive complex noise description. sigma2 is E|eps(t)|^2 for the i.i.d.
// case: each of the real and imaginary parts is Gaussian with variance
// sigma2 / 2, independent of the other. For LinearProcess the innovations
// carry that same variance and are convolved with the real taps `coeffs`
// (lags 0 .. L-1), so the marginal variance becomes sigma2 * sum(coeffs^2).
// A warm-up of L extra innovations before t = 1 makes the output exactly
// stationary.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::IidGaussian;
  double sigma2 = 1.0;
  std::vector<double> coeffs;  // LinearProcess taps; ignored for IidGaussian
  std::uint64_t seed = 0;
};

// Wraps an angle into [0, 2*pi).
[[nodiscard]] double wrap_angle(double beta);

// Circular distance between two angles, in [0, pi].
[[nodiscard]] double angle_distance(double a, double b);

// Noise-free synthesis of the model at t = 1..n. Phases beta * t^2 are
// evaluated in double precision; for n beyond ~1e4 the t^2 argument grows
// past 1e8 and the phase carries only ~1e-8 rad absolute accuracy, so keep
// records at or below that scale. Rates are wrapped into [0, 2*pi) first
// (t^2 is an integer, so adding 2*pi to beta does not change the signal).
// Throws DataError for n == 0, an empty model, or a zero amplitude.
[[nodiscard]] ComplexSignal synthesize_clean(const ChirpModel& model, std::size_t n);

// Draws n noise samples according to spec. Deterministic: the same spec
// (including seed) always produces the same samples, bit for bit.
// Throws DataError for n == 0, sigma2 <= 0 or non-finite, or a LinearProcess
// spec with empty coeffs.
[[nodiscard]] ComplexSignal generate_noise(const NoiseSpec& spec, std::size_t n);

// Elementwise sum; throws DataError on length mismatch.
[[nodiscard]] ComplexSignal add(const ComplexSignal& a, const ComplexSignal& b);

// Per-component signal-to-noise ratio 10*log10(|A|^2 / sigma2).
// Throws DataError if sigma2 <= 0.
[[nodiscard]] double snr_db(const ChirpComponent& component, double sigma2);

// Sum of squared magnitudes, sum_t |y(t)|^2.
[[nodiscard]] double norm2(const ComplexSignal& y);

}  // namespace chirpfit
