#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chirpfit/estimators.hpp"
#include "chirpfit/signal.hpp"

namespace chirpfit {

/// Estimation methods the Monte Carlo harness can run.
enum class Method { Lse, Alse, LseJoint, SeqLse, SeqAlse, Dechirp, Cpf, Pcpf };

/// Canonical method name used in tables and on the command line.
std::string method_name(Method m);

/// Parses a method name; accepts '-' or '_' as the separator.
std::optional<Method> parse_method(const std::string& token);

/// Monte Carlo experiment description. Replication r draws its noise from
/// seed base_seed + r, so the configuration pins the whole experiment.
/// oracle_init restricts each rate initializer to the 11 grid cells around
/// the true rate (truth knowledge, clearly labeled in outputs); it applies
/// to the least-squares-family methods, which take explicit initial rates.
/// output_path is carried for manifests; run_experiment itself writes
/// nothing.
struct ExperimentConfig {
  ChirpModel model;
  std::vector<std::size_t> n_values;
  std::vector<double> sigma2_values;
  std::vector<Method> methods;
  std::size_t replications = 500;
  std::uint64_t base_seed = 1;
  bool oracle_init = false;
  std::string output_path;
};

/// One row of the Monte Carlo summary: the mean squared error of one
/// parameter of one true component under one method at one (N, sigma2)
/// cell, alongside the matching theoretical variance (NaN when no closed
/// form is in scope, e.g. the kernel-based baselines), the mean wall-clock
/// runtime of one replication of the method, and the replication
/// accounting. Failed replications are excluded from the averages and
/// counted, never imputed.
struct MseRow {
  std::string method;
  std::size_t component = 1;  // 1-based index into the true model
  std::string parameter;      // "a_re", "a_im", or "beta"
  std::size_t n = 0;
  double sigma2 = 0.0;
  double mse = 0.0;
  double theoretical_var = 0.0;
  double mean_runtime_s = 0.0;
  std::size_t replications_used = 0;
  std::size_t failures = 0;
};

struct MseTable {
  std::vector<MseRow> rows;
};

/// Writes the table as CSV with header
/// method,component,parameter,n,sigma2,mse,theoretical_var,mean_runtime_s,
/// replications_used,failures; NaN cells print as "n/a".
void write_mse_csv(const std::string& path, const MseTable& table);

/// Runs the configured Monte Carlo experiment. Replications run
/// concurrently but are reduced in replication order, so every statistic
/// except the measured runtimes is bit-identical whatever the worker count.
/// Rate errors are attributed by greedy one-to-one nearest-rate matching
/// between estimated and true components (circular distance); amplitude
/// rows are emitted for the least-squares-family methods only. A
/// replication fails when the method throws or returns fewer components
/// than the model order.
///
/// Throws DataError on an invalid configuration (empty model/methods/grids,
/// zero replications, single-component methods against a multi-component
/// model, or an order too large for some record length).
MseTable run_experiment(const ExperimentConfig& cfg);

/// Residual sum after each sequential stage up to max_order (the order
/// probe of the real-data workflow). A failed stage truncates the
/// trajectory. Errors as sequential_fit.
std::vector<double> rss_trajectory(const ComplexSignal& y,
                                   std::size_t max_order,
                                   SequentialFlavor flavor);

/// Order chosen from a residual-sum trajectory: the smallest k such that
/// every later stage's relative drop (rss[j-1]-rss[j])/rss[j-1] stays below
/// tau. A stage whose predecessor is numerically exhausted (below 1e-12 of
/// the first entry) counts as flat. When even the final drop is steep the
/// trajectory never flattened: the last probed order is returned with
/// saturated set.
struct OrderSelection {
  std::size_t order = 0;
  bool saturated = false;
};
OrderSelection select_order(const std::vector<double>& rss, double tau = 0.01);

/// Portmanteau whiteness statistic on a real sequence:
/// Q = N(N+2) sum_{k=1..h} rho_k^2/(N-k) on the mean-centered data, with
/// the p-value from the upper tail of chi-square(h).
/// Throws DataError unless the sequence is longer than h >= 1 and has
/// positive variance.
struct LjungBoxResult {
  double q = 0.0;
  std::size_t lags = 0;
  double p_value = 1.0;
};
LjungBoxResult ljung_box(const std::vector<double>& x, std::size_t h);

/// Diagnostics of a sequential fit to recorded data: the order-probe
/// trajectory, the selected order, and whiteness tests on the real and
/// imaginary residual parts (lb_applicable is false when a residual part
/// had zero variance, e.g. on noiseless input).
struct DiagnosticsReport {
  std::vector<double> rss_trajectory;
  std::size_t selected_order = 0;
  bool saturated = false;
  bool lb_applicable = false;
  LjungBoxResult lb_real;
  LjungBoxResult lb_imag;
};

/// Fit of recorded data at the diagnosed order, with the fitted and
/// residual series ready for export.
struct RealDataFit {
  FitResult fit;
  DiagnosticsReport report;
  ComplexSignal fitted;
  ComplexSignal residual_signal;
};

/// Real-data workflow: probe max_order sequential stages, select the order
/// at threshold tau, keep the fit truncated to that order (sequential
/// stages only depend on earlier stages, so the prefix equals a fresh
/// refit), and test the residual parts for whiteness at lag h.
RealDataFit fit_real(const ComplexSignal& y, std::size_t max_order,
                     double tau = 0.01, std::size_t h = 20,
                     SequentialFlavor flavor = SequentialFlavor::Lse);

}  // namespace chirpfit
