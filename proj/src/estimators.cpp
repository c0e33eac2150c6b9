#include "chirpfit/estimators.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "chirpfit/errors.hpp"
#include "chirpfit/periodogram.hpp"

namespace chirpfit {

namespace {

constexpr double kGramConditionLimit = 1e8;
constexpr double kCollapseTol = 1e-8;       // rate coincidence during joint fits
constexpr double kInitSeparationCells = 10; // initializer peak separation

void check_profile_inputs(const ComplexSignal& y,
                          const std::vector<double>& betas) {
  if (betas.empty()) throw DataError("profile: need at least one rate");
  if (betas.size() >= y.size())
    throw DataError("profile: at least as many rates as samples");
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!std::isfinite(betas[i]))
      throw DataError("profile: rates must be finite");
    for (std::size_t j = i + 1; j < betas.size(); ++j)
      if (betas[i] == betas[j]) throw DataError("profile: duplicate rates");
  }
}

// S = sum_t y(t) exp(-i beta t^2), t = 1..N.
void coherent_sum(const ComplexSignal& y, double beta, double& sr_out,
                  double& si_out) {
  double sr = 0.0, si = 0.0;
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i + 1);
    const double phase = beta * (t * t);
    const double c = std::cos(phase), s = std::sin(phase);
    const double yr = y.samples[i].real(), yi = y.samples[i].imag();
    sr += yr * c + yi * s;
    si += yi * c - yr * s;
  }
  sr_out = sr;
  si_out = si;
}

struct NormalEq {
  Eigen::MatrixXcd gram;  // Z^H Z
  Eigen::VectorXcd rhs;   // Z^H Y
  double ynorm2 = 0.0;
};

NormalEq build_normal_equations(const ComplexSignal& y,
                                const std::vector<double>& betas) {
  const std::size_t n = y.size();
  const auto p = static_cast<Eigen::Index>(betas.size());
  NormalEq eq;
  eq.gram = Eigen::MatrixXcd::Zero(p, p);
  eq.rhs = Eigen::VectorXcd::Zero(p);
  std::vector<Complex> z(static_cast<std::size_t>(p));
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i + 1);
    const double t2 = t * t;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double phase = betas[static_cast<std::size_t>(j)] * t2;
      z[static_cast<std::size_t>(j)] = Complex(std::cos(phase), std::sin(phase));
    }
    const Complex yt = y.samples[i];
    eq.ynorm2 += std::norm(yt);
    for (Eigen::Index j = 0; j < p; ++j) {
      const Complex zj = std::conj(z[static_cast<std::size_t>(j)]);
      eq.rhs(j) += yt * zj;
      for (Eigen::Index k = j; k < p; ++k)
        eq.gram(j, k) += zj * z[static_cast<std::size_t>(k)];
    }
  }
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index k = 0; k < j; ++k)
      eq.gram(j, k) = std::conj(eq.gram(k, j));
  return eq;
}

Eigen::VectorXcd solve_normal_equations(const NormalEq& eq) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(eq.gram);
  if (es.info() != Eigen::Success)
    throw NumericalError("profile: normal-equation eigensolve failed");
  const Eigen::VectorXd& ev = es.eigenvalues();  // ascending
  const double lo = ev(0), hi = ev(ev.size() - 1);
  if (!(lo > 0.0) || hi / lo > kGramConditionLimit)
    throw DegeneracyError(
        "profile: rates nearly coincident (normal matrix condition number "
        "exceeds 1e8)");
  Eigen::VectorXcd w = es.eigenvectors().adjoint() * eq.rhs;
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) /= ev(i);
  return es.eigenvectors() * w;
}

double grid_argmax_location(const ComplexSignal& y, const GridSpec& grid) {
  ScanResult scan = ptf_scan(y, grid);
  return scan.locations[scan.argmax()];
}

SimplexConfig with_default_step(const SimplexConfig& cfg, double step) {
  SimplexConfig c = cfg;
  if (c.init_step.empty()) c.init_step = {step};
  return c;
}

void flag_nonconvergence(FitResult& fit, const OptimResult& res) {
  if (!res.converged)
    fit.warnings.push_back(
        "optimizer reached its iteration limit; best-found point reported");
}

}  // namespace

std::vector<Complex> profile_amplitudes(const ComplexSignal& y,
                                        const std::vector<double>& betas) {
  check_profile_inputs(y, betas);
  const std::size_t p = betas.size();
  if (p == 1) {
    double sr, si;
    coherent_sum(y, betas[0], sr, si);
    const double inv_n = 1.0 / static_cast<double>(y.size());
    return {Complex(sr * inv_n, si * inv_n)};
  }
  const NormalEq eq = build_normal_equations(y, betas);
  const Eigen::VectorXcd a = solve_normal_equations(eq);
  return std::vector<Complex>(a.data(), a.data() + a.size());
}

double profile_rss(const ComplexSignal& y, const std::vector<double>& betas) {
  check_profile_inputs(y, betas);
  if (betas.size() == 1) {
    double sr, si;
    coherent_sum(y, betas[0], sr, si);
    const double rss =
        norm2(y) - (sr * sr + si * si) / static_cast<double>(y.size());
    return std::max(rss, 0.0);
  }
  const NormalEq eq = build_normal_equations(y, betas);
  const Eigen::VectorXcd a = solve_normal_equations(eq);
  const double rss = eq.ynorm2 - eq.rhs.dot(a).real();
  return std::max(rss, 0.0);
}

FitResult lse_one(const ComplexSignal& y, std::optional<double> init_beta,
                  const SimplexConfig& cfg) {
  const std::size_t n = y.size();
  if (n < 8) throw DataError("lse_one: need at least 8 samples");
  const GridSpec grid{GridKind::PtfFull, n};
  const double beta0 =
      init_beta ? wrap_angle(*init_beta) : grid_argmax_location(y, grid);

  const double ynorm2 = norm2(y);
  const double inv_n = 1.0 / static_cast<double>(n);
  // The residual sum for one component is ||Y||^2 - I(beta) (projection
  // identity), so the norm is hoisted out of the optimization loop and the
  // coherent sum at the best point is kept for the closing amplitude.
  double best_f = std::numeric_limits<double>::infinity();
  double best_beta = beta0, best_sr = 0.0, best_si = 0.0;
  auto objective = [&](const std::vector<double>& x) {
    double sr, si;
    coherent_sum(y, x[0], sr, si);
    const double f = ynorm2 - (sr * sr + si * si) * inv_n;
    if (f < best_f) {
      best_f = f;
      best_beta = x[0];
      best_sr = sr;
      best_si = si;
    }
    return f;
  };

  const OptimResult res =
      minimize(objective, {beta0}, with_default_step(cfg, grid.spacing()));
  const double bhat = res.argmin[0];
  double ar, ai;
  if (bhat == best_beta) {
    ar = best_sr * inv_n;
    ai = best_si * inv_n;
  } else {
    double sr, si;
    coherent_sum(y, bhat, sr, si);
    ar = sr * inv_n;
    ai = si * inv_n;
  }

  FitResult fit;
  fit.method = "lse";
  fit.components.push_back({ar, ai, wrap_angle(bhat)});
  fit.rss_trajectory.push_back(std::max(res.value, 0.0));
  fit.stages.push_back(res);
  flag_nonconvergence(fit, res);
  return fit;
}

FitResult alse_one(const ComplexSignal& y, std::optional<double> init_beta,
                   const SimplexConfig& cfg) {
  const std::size_t n = y.size();
  if (n < 8) throw DataError("alse_one: need at least 8 samples");
  const GridSpec grid{GridKind::PtfFull, n};
  const double beta0 =
      init_beta ? wrap_angle(*init_beta) : grid_argmax_location(y, grid);

  auto objective = [&](const std::vector<double>& x) {
    return -ptf_value(y, x[0]);
  };
  const OptimResult res =
      minimize(objective, {beta0}, with_default_step(cfg, grid.spacing()));
  const double bhat = res.argmin[0];

  // Amplitude parts by the real/imaginary-decomposition regression formulas.
  double ar = 0.0, ai = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i + 1);
    const double phase = bhat * (t * t);
    const double c = std::cos(phase), s = std::sin(phase);
    const double yr = y.samples[i].real(), yi = y.samples[i].imag();
    ar += yr * c + yi * s;
    ai += yi * c - yr * s;
  }
  ar /= static_cast<double>(n);
  ai /= static_cast<double>(n);

  // Residual sum evaluated directly from the fitted model.
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i + 1);
    const double phase = bhat * (t * t);
    const double c = std::cos(phase), s = std::sin(phase);
    const double dr = y.samples[i].real() - (ar * c - ai * s);
    const double di = y.samples[i].imag() - (ar * s + ai * c);
    rss += dr * dr + di * di;
  }

  FitResult fit;
  fit.method = "alse";
  fit.components.push_back({ar, ai, wrap_angle(bhat)});
  fit.rss_trajectory.push_back(rss);
  fit.stages.push_back(res);
  flag_nonconvergence(fit, res);
  return fit;
}

FitResult lse_joint(const ComplexSignal& y, std::size_t p,
                    const std::vector<double>& init_betas,
                    const SimplexConfig& cfg) {
  const std::size_t n = y.size();
  if (p < 1 || 4 * p >= n)
    throw DataError("lse_joint: order must satisfy 1 <= p < N/4");
  const GridSpec grid{GridKind::PtfFull, n};
  const double cell = grid.spacing();

  FitResult fit;
  fit.method = "lse_joint";

  std::vector<double> inits;
  if (!init_betas.empty()) {
    if (init_betas.size() != p)
      throw DataError("lse_joint: initial rate count must equal the order");
    inits.reserve(p);
    for (double b : init_betas) inits.push_back(wrap_angle(b));
    bool crowded = false;
    for (std::size_t i = 0; i < p && !crowded; ++i)
      for (std::size_t j = i + 1; j < p && !crowded; ++j)
        crowded =
            angle_distance(inits[i], inits[j]) < kInitSeparationCells * cell;
    if (crowded)
      fit.warnings.push_back(
          "initial rates closer than 10 grid cells; the joint fit may not "
          "resolve them");
  } else {
    const ScanResult scan = ptf_scan(y, grid);
    const TopPeaks peaks = top_peaks(scan, p, kInitSeparationCells * cell);
    if (peaks.shortfall)
      throw NumericalError(
          "lse_joint: found fewer separated periodogram peaks than requested "
          "components; fit the components sequentially instead");
    inits = peaks.locations;
  }

  auto objective = [&](const std::vector<double>& x) {
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = i + 1; j < x.size(); ++j)
        if (angle_distance(x[i], x[j]) < kCollapseTol)
          throw DegeneracyError(
              "lse_joint: rates collapsed during optimization");
    if (x.size() == 1) {
      double sr, si;
      coherent_sum(y, x[0], sr, si);
      return norm2(y) - (sr * sr + si * si) / static_cast<double>(n);
    }
    const NormalEq eq = build_normal_equations(y, x);
    const Eigen::VectorXcd a = solve_normal_equations(eq);
    return eq.ynorm2 - eq.rhs.dot(a).real();
  };

  const OptimResult res =
      minimize(objective, inits, with_default_step(cfg, cell));

  std::vector<double> betas(res.argmin);
  for (double& b : betas) b = wrap_angle(b);
  const std::vector<Complex> amps = profile_amplitudes(y, betas);
  for (std::size_t k = 0; k < p; ++k)
    fit.components.push_back({amps[k].real(), amps[k].imag(), betas[k]});
  fit.rss_trajectory.push_back(std::max(res.value, 0.0));
  fit.stages.push_back(res);
  flag_nonconvergence(fit, res);
  return fit;
}

FitResult sequential_fit(const ComplexSignal& y, std::size_t p,
                         SequentialFlavor flavor,
                         const std::vector<double>& init_betas,
                         const SimplexConfig& cfg) {
  const std::size_t n = y.size();
  if (p < 1 || 4 * p >= n)
    throw DataError("sequential_fit: order must satisfy 1 <= p < N/4");
  if (!init_betas.empty() && init_betas.size() != p)
    throw DataError("sequential_fit: initial rate count must equal the order");

  FitResult fit;
  fit.method = flavor == SequentialFlavor::Lse ? "seq_lse" : "seq_alse";
  ComplexSignal working = y;

  for (std::size_t k = 0; k < p; ++k) {
    std::optional<double> init;
    if (!init_betas.empty()) init = init_betas[k];
    FitResult stage;
    try {
      stage = flavor == SequentialFlavor::Lse ? lse_one(working, init, cfg)
                                              : alse_one(working, init, cfg);
    } catch (const std::exception& e) {
      fit.warnings.push_back("stage " + std::to_string(k + 1) +
                             " failed: " + e.what());
      break;
    }
    const ChirpComponent comp = stage.components[0];
    fit.components.push_back(comp);
    fit.rss_trajectory.push_back(stage.rss_trajectory[0]);
    fit.stages.push_back(stage.stages[0]);
    for (const std::string& w : stage.warnings)
      fit.warnings.push_back("stage " + std::to_string(k + 1) + ": " + w);

    subtract_component(working, comp);
  }
  return fit;
}

void subtract_component(ComplexSignal& y, const ChirpComponent& comp) {
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i + 1);
    const double phase = comp.beta * (t * t);
    const double c = std::cos(phase), s = std::sin(phase);
    y.samples[i] -= Complex(comp.a_re * c - comp.a_im * s,
                            comp.a_re * s + comp.a_im * c);
  }
}

ComplexSignal residual(const ComplexSignal& y, const FitResult& fit) {
  if (fit.components.empty())
    throw DataError("residual: fit has no components");
  ComplexSignal r = y;
  for (const ChirpComponent& comp : fit.components) subtract_component(r, comp);
  return r;
}

}  // namespace chirpfit
