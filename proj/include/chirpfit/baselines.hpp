#pragma once

#include <cstddef>
#include <vector>

#include "chirpfit/estimators.hpp"
#include "chirpfit/periodogram.hpp"
#include "chirpfit/signal.hpp"
#include "chirpfit/simplex.hpp"

namespace chirpfit {

/// Dechirping-method fit. The lag product z(t) = y(t)conj(y(t+1)) of a
/// single chirp is a pure tone B0 exp(-i 2 beta t) with B0 = |A|^2 e^{-i
/// beta}, so the tone frequency determines beta only modulo pi: beta_raw is
/// the scan-band estimate in [0, pi), and beta is the candidate from
/// {beta_raw, beta_raw + pi} with the larger rate-periodogram value.
/// alias_ambiguous is set when the shifted candidate wins or when the
/// periodogram value at the winner falls below half the level the fitted
/// tone amplitude implies (the estimate then rests on aliasing assumptions
/// the data do not clearly support).
struct DechirpFit {
  double b_re = 0.0;   // fitted tone amplitude, real part
  double b_im = 0.0;   // fitted tone amplitude, imaginary part
  double beta = 0.0;   // resolved rate, in [0, 2*pi)
  double beta_raw = 0.0;         // scan-band rate, in [0, pi)
  bool alias_ambiguous = false;  // see above
  double rss = 0.0;    // residual sum of the profiled tone fit on z
  OptimResult refine;  // report of the scan-peak refinement
};

/// Evaluation times for the quadratic-kernel estimators.
/// t_center = 0 means the default (N+1)/2 (integer division); an empty
/// times vector means the default pair {round(0.4*N), (N+1)/2}.
struct CpfConfig {
  std::size_t t_center = 0;
  std::vector<std::size_t> times;
};

/// Quadratic-kernel fit (single- or product-form). The kernel peaks where
/// its argument matches 2*beta modulo 2*pi, and the scan covers (0, pi), so
/// rates are identifiable only up to the {omega/2, omega/2 + pi} pair;
/// resolution and flag semantics are as in DechirpFit. Rates whose doubled
/// value falls outside the scanned band produce spurious peaks, which the
/// consistency guard flags.
struct CpfFit {
  double beta = 0.0;      // resolved rate, in [0, 2*pi)
  double beta_raw = 0.0;  // omega_hat / 2, in [0, pi)
  double omega_hat = 0.0; // refined kernel argmax
  bool alias_ambiguous = false;
  bool window_clipped = false;  // kernel window shortened at a record edge
  OptimResult refine;
};

/// Half-width and edge behavior of the kernel window at time t: the sum
/// runs over m = 0..halfwidth. The full half-width floor((N-1)/2) applies
/// when t sits at the exact center of an odd-length record; otherwise the
/// window clips to min(t-1, N-t) and the flag is set (even-length records
/// have no exact center and always flag).
struct CpfWindow {
  std::size_t halfwidth = 0;
  bool clipped = false;
};

/// Throws DataError when t is outside [1, n] or n == 0.
CpfWindow cpf_window(std::size_t n, std::size_t t);

/// Lag product z(t) = y(t) * conj(y(t+1)), t = 1..N-1.
/// Throws DataError when N < 2.
ComplexSignal dechirp_transform(const ComplexSignal& y);

/// Fitted tone power of the lag product over the fourier grid of candidate
/// rates: value(beta) = |sum_t z(t) exp(i 2 beta t)|^2 / (N-1) where z has
/// length N-1. The grid is built for the original record length N =
/// z.size() + 1. Throws DataError when z is empty or too short for a grid.
ScanResult dechirp_power_scan(const ComplexSignal& z, std::size_t stride = 1);

/// Dechirping estimate: transform, scan the fitted tone power over the
/// fourier grid, refine the peak with the simplex method, profile the tone
/// amplitude at the refined rate, and resolve the modulo-pi alias against
/// the rate periodogram of the original signal.
/// Throws DataError when N < 8.
DechirpFit dechirp_estimate(const ComplexSignal& y,
                            const SimplexConfig& cfg = SimplexConfig{});

/// Quadratic-kernel value sum_{m=0}^{M} y(t+m) y(t-m) exp(-i omega m^2)
/// with M = cpf_window(N, t).halfwidth.
/// Throws DataError when t is outside [1, N].
Complex cpf_value(const ComplexSignal& y, std::size_t t, double omega);

/// |cpf_value(y, t, .)|^2 over the half-range quadratic grid.
/// Throws DataError when y is empty or t is out of range.
ScanResult cpf_scan(const ComplexSignal& y, std::size_t t,
                    std::size_t stride = 1);

/// Sum over evaluation times of log |cpf_value(y, t_l, .)|^2 (the product
/// kernel in log scale; a zero factor scores -infinity). Magnitudes in the
/// result are on this log scale.
ScanResult pcpf_scan(const ComplexSignal& y,
                     const std::vector<std::size_t>& times,
                     std::size_t stride = 1);

/// Single-kernel rate estimate at the configured center time: scan, refine
/// |kernel|^2, halve the refined argmax, and resolve the alias pair against
/// the rate periodogram. Throws DataError when N < 8 or the center time is
/// out of range.
CpfFit cpf_estimate(const ComplexSignal& y, const CpfConfig& ccfg = {},
                    const SimplexConfig& cfg = SimplexConfig{});

/// Product-kernel rate estimate over the configured evaluation times,
/// computed and refined on the log scale. Errors as cpf_estimate.
CpfFit pcpf_estimate(const ComplexSignal& y, const CpfConfig& ccfg = {},
                     const SimplexConfig& cfg = SimplexConfig{});

/// Which rate estimator a sequential baseline fit applies at each stage.
enum class BaselineFlavor { Dechirp, Cpf, Pcpf };

/// Sequential multi-component fit with a baseline rate estimator: stage k
/// estimates a rate on the current working signal, takes the amplitude from
/// profile_amplitudes at that rate, subtracts the component, and records
/// the residual sum. Alias or window flags from any stage are attached as
/// warnings. The single-kernel flavor handles one component only (the
/// product form is the multi-component variant).
/// Throws DataError unless 1 <= p < N/4 (and p == 1 for the Cpf flavor).
FitResult sequential_baseline(const ComplexSignal& y, std::size_t p,
                              BaselineFlavor flavor,
                              const CpfConfig& ccfg = {},
                              const SimplexConfig& cfg = SimplexConfig{});

}  // namespace chirpfit
