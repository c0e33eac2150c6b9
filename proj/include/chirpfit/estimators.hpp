#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "chirpfit/signal.hpp"
#include "chirpfit/simplex.hpp"

namespace chirpfit {

/// Result of a model fit: estimated components in estimation order, the
/// residual sum of squares after each stage (a single entry for joint fits),
/// per-stage optimizer reports, and any non-fatal warnings. The covariance
/// blocks stay empty until attach_covariance fills them (one 3x3 real matrix
/// per component, parameter order a_re, a_im, beta).
struct FitResult {
  std::string method;
  std::vector<ChirpComponent> components;
  std::vector<double> rss_trajectory;
  std::vector<OptimResult> stages;
  std::vector<std::string> warnings;
  std::vector<std::array<std::array<double, 3>, 3>> covariance;

  std::size_t order() const { return components.size(); }
};

/// Least-squares amplitudes for fixed rates: solves the p x p normal
/// equations (Z^H Z) A = Z^H Y where Z has columns exp(i beta_k t^2),
/// t = 1..N. For p = 1 this reduces to A = (1/N) sum_t y(t) exp(-i beta t^2).
///
/// Throws DataError when betas is empty, has exact duplicates, or p >= N;
/// DegeneracyError when the normal matrix has condition number > 1e8
/// (rates nearly coincident).
std::vector<Complex> profile_amplitudes(const ComplexSignal& y,
                                        const std::vector<double>& betas);

/// Residual sum of squares at the profiled amplitudes:
/// sum_t |y(t) - sum_k A_k exp(i beta_k t^2)|^2 with A from
/// profile_amplitudes, computed via the projection identity
/// ||Y||^2 - Re[(Z^H Y)^H A] and clamped at 0. For p = 1 it equals
/// ||Y||^2 - I(beta) with I the rate periodogram.
///
/// Errors as profile_amplitudes.
double profile_rss(const ComplexSignal& y, const std::vector<double>& betas);

/// One-component least-squares fit: starts from init_beta (default: argmax
/// of the full-grid rate periodogram scan), minimizes the profiled residual
/// sum R(beta) with the simplex method, and reports the amplitude profiled
/// at the minimizer. rss_trajectory holds the single final R value.
///
/// When cfg.init_step is empty the refinement step defaults to the scan's
/// grid spacing. Optimizer non-convergence attaches a warning rather than
/// throwing; the best-found point is still reported.
///
/// Throws DataError when the signal has fewer than 8 samples.
FitResult lse_one(const ComplexSignal& y,
                  std::optional<double> init_beta = std::nullopt,
                  const SimplexConfig& cfg = SimplexConfig{});

/// One-component approximate fit: maximizes the rate periodogram I(beta)
/// (simplex on -I) from the same grid initializer, then recovers the
/// amplitude parts by the real/imaginary-decomposition regression formulas
///   a_re = (1/N) sum_t [y_re cos(bt^2) + y_im sin(bt^2)]
///   a_im = (1/N) sum_t [y_im cos(bt^2) - y_re sin(bt^2)].
/// rss_trajectory holds the directly evaluated residual sum at the fit.
/// For one component this estimator agrees with lse_one to optimizer
/// tolerance (projection identity). Errors as lse_one.
FitResult alse_one(const ComplexSignal& y,
                   std::optional<double> init_beta = std::nullopt,
                   const SimplexConfig& cfg = SimplexConfig{});

/// Joint p-component fit: simplex-minimizes the p-dimensional profiled
/// residual sum over (beta_1..beta_p); amplitudes are profiled out exactly.
/// Initial rates default to the p strongest separated periodogram peaks
/// (separation radius 10 grid cells); user-supplied rates closer than that
/// radius attach a warning.
///
/// Throws DataError unless 1 <= p < N/4 (and init size p when given);
/// NumericalError when the peak initializer finds fewer than p separated
/// peaks (sequential fitting is the recommended remedy); DegeneracyError
/// when rates collapse within 1e-8 of each other during optimization.
FitResult lse_joint(const ComplexSignal& y, std::size_t p,
                    const std::vector<double>& init_betas = {},
                    const SimplexConfig& cfg = SimplexConfig{});

/// Which one-component estimator a sequential fit applies at each stage.
enum class SequentialFlavor { Lse, Alse };

/// Sequential p-component fit: for k = 1..p, fit one component to the
/// current working signal (full grid initialization on that signal, or
/// init_betas[k-1] when provided), subtract the fitted component, and
/// record the residual sum after the stage. Components come back in
/// estimation order (decreasing fitted magnitude under well-separated
/// dominant components). A failed stage stops the loop and attaches a
/// warning; earlier stages' results are kept.
///
/// Throws DataError unless 1 <= p < N/4 (and init size p when given).
FitResult sequential_fit(const ComplexSignal& y, std::size_t p,
                         SequentialFlavor flavor,
                         const std::vector<double>& init_betas = {},
                         const SimplexConfig& cfg = SimplexConfig{});

/// y minus every fitted component, elementwise.
/// Throws DataError when the fit has no components.
ComplexSignal residual(const ComplexSignal& y, const FitResult& fit);

/// Subtracts one component from y in place (the working-signal update of
/// the sequential procedures).
void subtract_component(ComplexSignal& y, const ChirpComponent& comp);

}  // namespace chirpfit
