#include "chirpfit/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "chirpfit/errors.hpp"

namespace chirpfit {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

// sum_t z(t) exp(+i 2 beta t), t = 1..len(z).
Complex tone_sum(const ComplexSignal& z, double beta) {
  double sr = 0.0, si = 0.0;
  const std::size_t m = z.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double t = static_cast<double>(i + 1);
    const double phase = 2.0 * beta * t;
    const double c = std::cos(phase), s = std::sin(phase);
    const double zr = z.samples[i].real(), zi = z.samples[i].imag();
    sr += zr * c - zi * s;
    si += zr * s + zi * c;
  }
  return Complex(sr, si);
}

double tone_power(const ComplexSignal& z, double beta) {
  return std::norm(tone_sum(z, beta)) / static_cast<double>(z.size());
}

// Folds a band-limited rate estimate into [0, pi).
double fold_half_band(double beta) {
  double b = wrap_angle(beta);
  if (b >= kPi) b -= kPi;
  return b;
}

struct AliasPick {
  double beta = 0.0;
  bool ambiguous = false;
};

// The lag-product and quadratic kernels see rates modulo pi; pick between
// raw and raw + pi by the rate periodogram of the original record, and flag
// the estimate when the shifted candidate wins or the winning periodogram
// value falls below half the level the kernel magnitude implies.
AliasPick resolve_rate_alias(const ComplexSignal& y, double raw,
                             double implied_peak) {
  const double c1 = raw, c2 = raw + kPi;
  const double i1 = ptf_value(y, c1), i2 = ptf_value(y, c2);
  AliasPick pick;
  pick.beta = wrap_angle(i2 > i1 ? c2 : c1);
  pick.ambiguous = (i2 > i1) || (std::max(i1, i2) < 0.5 * implied_peak);
  return pick;
}

std::vector<std::size_t> default_times(std::size_t n) {
  auto t1 = static_cast<std::size_t>(std::lround(0.4 * static_cast<double>(n)));
  t1 = std::max<std::size_t>(1, std::min(t1, n));
  return {t1, (n + 1) / 2};
}

}  // namespace

CpfWindow cpf_window(std::size_t n, std::size_t t) {
  if (n == 0) throw DataError("cpf_window: empty record");
  if (t < 1 || t > n) throw DataError("cpf_window: time outside [1, N]");
  const std::size_t full = (n - 1) / 2;
  CpfWindow w;
  w.halfwidth = std::min(full, std::min(t - 1, n - t));
  w.clipped = (n % 2 == 0) || w.halfwidth < full;
  return w;
}

ComplexSignal dechirp_transform(const ComplexSignal& y) {
  const std::size_t n = y.size();
  if (n < 2) throw DataError("dechirp_transform: need at least 2 samples");
  ComplexSignal z;
  z.samples.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    z.samples[i] = y.samples[i] * std::conj(y.samples[i + 1]);
  return z;
}

ScanResult dechirp_power_scan(const ComplexSignal& z, std::size_t stride) {
  if (z.size() == 0) throw DataError("dechirp_power_scan: empty lag product");
  const GridSpec grid{GridKind::Fourier, z.size() + 1};
  return scan_custom(
      grid, [&z](double beta) { return tone_power(z, beta); }, stride);
}

DechirpFit dechirp_estimate(const ComplexSignal& y, const SimplexConfig& cfg) {
  const std::size_t n = y.size();
  if (n < 8) throw DataError("dechirp_estimate: need at least 8 samples");
  const ComplexSignal z = dechirp_transform(y);
  const ScanResult scan = dechirp_power_scan(z);
  const double beta0 = scan.locations[scan.argmax()];

  auto objective = [&z](const std::vector<double>& x) {
    return -tone_power(z, x[0]);
  };
  SimplexConfig c = cfg;
  if (c.init_step.empty()) c.init_step = {scan.grid.spacing()};
  const OptimResult res = minimize(objective, {beta0}, c);

  DechirpFit fit;
  fit.refine = res;
  fit.beta_raw = fold_half_band(res.argmin[0]);
  const Complex b = tone_sum(z, fit.beta_raw) / static_cast<double>(z.size());
  fit.b_re = b.real();
  fit.b_im = b.imag();
  fit.rss = std::max(
      norm2(z) - static_cast<double>(z.size()) * std::norm(b), 0.0);
  const AliasPick pick = resolve_rate_alias(
      y, fit.beta_raw, static_cast<double>(n) * std::abs(b));
  fit.beta = pick.beta;
  fit.alias_ambiguous = pick.ambiguous;
  return fit;
}

Complex cpf_value(const ComplexSignal& y, std::size_t t, double omega) {
  const std::size_t n = y.size();
  const CpfWindow w = cpf_window(n, t);
  double sr = 0.0, si = 0.0;
  for (std::size_t m = 0; m <= w.halfwidth; ++m) {
    const Complex prod = y.samples[t + m - 1] * y.samples[t - m - 1];
    const double phase = omega * static_cast<double>(m) * static_cast<double>(m);
    const double c = std::cos(phase), s = std::sin(phase);
    sr += prod.real() * c + prod.imag() * s;
    si += prod.imag() * c - prod.real() * s;
  }
  return Complex(sr, si);
}

ScanResult cpf_scan(const ComplexSignal& y, std::size_t t, std::size_t stride) {
  cpf_window(y.size(), t);  // validates t against the record
  const GridSpec grid{GridKind::CpfHalf, y.size()};
  return scan_custom(
      grid, [&y, t](double om) { return std::norm(cpf_value(y, t, om)); },
      stride);
}

ScanResult pcpf_scan(const ComplexSignal& y,
                     const std::vector<std::size_t>& times,
                     std::size_t stride) {
  if (times.empty()) throw DataError("pcpf_scan: no evaluation times");
  for (std::size_t t : times) cpf_window(y.size(), t);
  const GridSpec grid{GridKind::CpfHalf, y.size()};
  auto kernel = [&y, &times](double om) {
    double acc = 0.0;
    for (std::size_t t : times) {
      const double m2 = std::norm(cpf_value(y, t, om));
      if (!(m2 > 0.0)) return -std::numeric_limits<double>::infinity();
      acc += std::log(m2);
    }
    return acc;
  };
  return scan_custom(grid, kernel, stride);
}

CpfFit cpf_estimate(const ComplexSignal& y, const CpfConfig& ccfg,
                    const SimplexConfig& cfg) {
  const std::size_t n = y.size();
  if (n < 8) throw DataError("cpf_estimate: need at least 8 samples");
  const std::size_t tc = ccfg.t_center != 0 ? ccfg.t_center : (n + 1) / 2;
  const CpfWindow w = cpf_window(n, tc);

  const ScanResult scan = cpf_scan(y, tc);
  const double om0 = scan.locations[scan.argmax()];
  auto objective = [&y, tc](const std::vector<double>& x) {
    return -std::norm(cpf_value(y, tc, x[0]));
  };
  SimplexConfig c = cfg;
  if (c.init_step.empty()) c.init_step = {scan.grid.spacing()};
  const OptimResult res = minimize(objective, {om0}, c);

  CpfFit fit;
  fit.refine = res;
  fit.window_clipped = w.clipped;
  fit.omega_hat = wrap_angle(res.argmin[0]);
  fit.beta_raw = fit.omega_hat / 2.0;
  const double kernel_mag = std::abs(cpf_value(y, tc, fit.omega_hat));
  const double implied =
      static_cast<double>(n) * kernel_mag /
      static_cast<double>(w.halfwidth + 1);
  const AliasPick pick = resolve_rate_alias(y, fit.beta_raw, implied);
  fit.beta = pick.beta;
  fit.alias_ambiguous = pick.ambiguous;
  return fit;
}

CpfFit pcpf_estimate(const ComplexSignal& y, const CpfConfig& ccfg,
                     const SimplexConfig& cfg) {
  const std::size_t n = y.size();
  if (n < 8) throw DataError("pcpf_estimate: need at least 8 samples");
  const std::vector<std::size_t> times =
      ccfg.times.empty() ? default_times(n) : ccfg.times;

  const ScanResult scan = pcpf_scan(y, times);
  const double om0 = scan.locations[scan.argmax()];
  auto objective = [&y, &times](const std::vector<double>& x) {
    double acc = 0.0;
    for (std::size_t t : times) acc += std::log(std::norm(cpf_value(y, t, x[0])));
    return -acc;
  };
  SimplexConfig c = cfg;
  if (c.init_step.empty()) c.init_step = {scan.grid.spacing()};
  const OptimResult res = minimize(objective, {om0}, c);

  CpfFit fit;
  fit.refine = res;
  fit.omega_hat = wrap_angle(res.argmin[0]);
  fit.beta_raw = fit.omega_hat / 2.0;
  double implied = std::numeric_limits<double>::infinity();
  for (std::size_t t : times) {
    const CpfWindow w = cpf_window(n, t);
    fit.window_clipped = fit.window_clipped || w.clipped;
    const double level = std::abs(cpf_value(y, t, fit.omega_hat)) /
                         static_cast<double>(w.halfwidth + 1);
    implied = std::min(implied, level);
  }
  const AliasPick pick =
      resolve_rate_alias(y, fit.beta_raw, static_cast<double>(n) * implied);
  fit.beta = pick.beta;
  fit.alias_ambiguous = pick.ambiguous;
  return fit;
}

FitResult sequential_baseline(const ComplexSignal& y, std::size_t p,
                              BaselineFlavor flavor, const CpfConfig& ccfg,
                              const SimplexConfig& cfg) {
  const std::size_t n = y.size();
  if (p < 1 || 4 * p >= n)
    throw DataError("sequential_baseline: order must satisfy 1 <= p < N/4");
  if (flavor == BaselineFlavor::Cpf && p != 1)
    throw DataError(
        "sequential_baseline: the single-kernel flavor fits one component; "
        "use the product form for more");

  FitResult fit;
  switch (flavor) {
    case BaselineFlavor::Dechirp: fit.method = "dechirp"; break;
    case BaselineFlavor::Cpf: fit.method = "cpf"; break;
    case BaselineFlavor::Pcpf: fit.method = "pcpf"; break;
  }

  ComplexSignal working = y;
  for (std::size_t k = 0; k < p; ++k) {
    const std::string stage_tag = "stage " + std::to_string(k + 1);
    double beta = 0.0;
    OptimResult refine;
    try {
      if (flavor == BaselineFlavor::Dechirp) {
        const DechirpFit d = dechirp_estimate(working, cfg);
        beta = d.beta;
        refine = d.refine;
        if (d.alias_ambiguous)
          fit.warnings.push_back(stage_tag + ": alias-ambiguous rate estimate");
      } else {
        const CpfFit cf = flavor == BaselineFlavor::Cpf
                              ? cpf_estimate(working, ccfg, cfg)
                              : pcpf_estimate(working, ccfg, cfg);
        beta = cf.beta;
        refine = cf.refine;
        if (cf.alias_ambiguous)
          fit.warnings.push_back(stage_tag + ": alias-ambiguous rate estimate");
        if (cf.window_clipped)
          fit.warnings.push_back(stage_tag + ": kernel window clipped");
      }
    } catch (const std::exception& e) {
      fit.warnings.push_back(stage_tag + " failed: " + e.what());
      break;
    }
    const Complex amp = profile_amplitudes(working, {beta})[0];
    const ChirpComponent comp{amp.real(), amp.imag(), beta};
    fit.components.push_back(comp);
    fit.stages.push_back(refine);
    subtract_component(working, comp);
    fit.rss_trajectory.push_back(norm2(working));
  }
  return fit;
}

}  // namespace chirpfit
