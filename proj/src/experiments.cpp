#include "chirpfit/experiments.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>

#include <boost/math/special_functions/gamma.hpp>

#include "chirpfit/asymptotics.hpp"
#include "chirpfit/baselines.hpp"
#include "chirpfit/errors.hpp"
#include "chirpfit/parallel.hpp"
#include "chirpfit/periodogram.hpp"

namespace chirpfit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool lse_family(Method m) {
  switch (m) {
    case Method::Lse:
    case Method::Alse:
    case Method::LseJoint:
    case Method::SeqLse:
    case Method::SeqAlse:
      return true;
    default:
      return false;
  }
}

bool single_component_only(Method m) {
  return m == Method::Lse || m == Method::Alse || m == Method::Cpf;
}

/// Initial rates restricted to the 11 grid cells around each true rate:
/// the argmax of the rate periodogram over cells k0-5..k0+5 (clamped to
/// the grid), where k0 is the cell nearest the true rate.
std::vector<double> oracle_window_inits(const ComplexSignal& y,
                                        const ChirpModel& model) {
  const GridSpec grid{GridKind::PtfFull, y.size()};
  const double cell = grid.spacing();
  const long count = static_cast<long>(grid.count());
  std::vector<double> inits;
  inits.reserve(model.components.size());
  for (const ChirpComponent& c : model.components) {
    long k0 = std::lround(wrap_angle(c.beta) / cell);
    k0 = std::clamp(k0, 1L, count);
    const long lo = std::max(1L, k0 - 5);
    const long hi = std::min(count, k0 + 5);
    double best_val = -1.0;
    double best_loc = static_cast<double>(k0) * cell;
    for (long k = lo; k <= hi; ++k) {
      const double loc = static_cast<double>(k) * cell;
      const double val = ptf_value(y, loc);
      if (val > best_val) {
        best_val = val;
        best_loc = loc;
      }
    }
    inits.push_back(best_loc);
  }
  return inits;
}

struct RepMethodOutcome {
  bool failed = false;
  std::vector<ChirpComponent> comps;
  double runtime_s = 0.0;
};

RepMethodOutcome run_method(Method m, const ComplexSignal& y,
                            const ExperimentConfig& cfg) {
  RepMethodOutcome out;
  const std::size_t p = cfg.model.components.size();
  const auto t0 = std::chrono::steady_clock::now();
  try {
    std::vector<double> inits;
    if (cfg.oracle_init && lse_family(m)) {
      inits = oracle_window_inits(y, cfg.model);
    }
    FitResult fit;
    switch (m) {
      case Method::Lse:
        fit = inits.empty() ? lse_one(y) : lse_one(y, inits[0]);
        break;
      case Method::Alse:
        fit = inits.empty() ? alse_one(y) : alse_one(y, inits[0]);
        break;
      case Method::LseJoint:
        fit = lse_joint(y, p, inits);
        break;
      case Method::SeqLse:
        fit = sequential_fit(y, p, SequentialFlavor::Lse, inits);
        break;
      case Method::SeqAlse:
        fit = sequential_fit(y, p, SequentialFlavor::Alse, inits);
        break;
      case Method::Dechirp:
        fit = sequential_baseline(y, p, BaselineFlavor::Dechirp);
        break;
      case Method::Cpf:
        fit = sequential_baseline(y, 1, BaselineFlavor::Cpf);
        break;
      case Method::Pcpf:
        fit = sequential_baseline(y, p, BaselineFlavor::Pcpf);
        break;
    }
    out.comps = std::move(fit.components);
    if (out.comps.size() < p) out.failed = true;
  } catch (const std::exception&) {
    out.failed = true;
  }
  const auto t1 = std::chrono::steady_clock::now();
  out.runtime_s = std::chrono::duration<double>(t1 - t0).count();
  return out;
}

/// Greedy one-to-one matching of estimated to true components by circular
/// rate distance: repeatedly pair the globally closest unmatched pair.
/// Independent of component ordering on either side (up to exact ties).
std::vector<std::size_t> match_components(
    const std::vector<ChirpComponent>& est,
    const std::vector<ChirpComponent>& truth) {
  const std::size_t p = truth.size();
  std::vector<std::size_t> est_for_truth(p, est.size());
  std::vector<bool> truth_done(p, false);
  std::vector<bool> est_done(est.size(), false);
  const std::size_t pairs = std::min(p, est.size());
  for (std::size_t round = 0; round < pairs; ++round) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bk = p, be = est.size();
    for (std::size_t k = 0; k < p; ++k) {
      if (truth_done[k]) continue;
      for (std::size_t e = 0; e < est.size(); ++e) {
        if (est_done[e]) continue;
        const double d = angle_distance(truth[k].beta, est[e].beta);
        if (d < best) {
          best = d;
          bk = k;
          be = e;
        }
      }
    }
    truth_done[bk] = true;
    est_done[be] = true;
    est_for_truth[bk] = be;
  }
  return est_for_truth;
}

std::string format_cell(double v) {
  if (std::isnan(v)) return "n/a";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::Lse:
      return "lse";
    case Method::Alse:
      return "alse";
    case Method::LseJoint:
      return "lse_joint";
    case Method::SeqLse:
      return "seq_lse";
    case Method::SeqAlse:
      return "seq_alse";
    case Method::Dechirp:
      return "dechirp";
    case Method::Cpf:
      return "cpf";
    case Method::Pcpf:
      return "pcpf";
  }
  return "unknown";
}

std::optional<Method> parse_method(const std::string& token) {
  std::string t = token;
  std::replace(t.begin(), t.end(), '-', '_');
  if (t == "lse") return Method::Lse;
  if (t == "alse") return Method::Alse;
  if (t == "lse_joint") return Method::LseJoint;
  if (t == "seq_lse") return Method::SeqLse;
  if (t == "seq_alse") return Method::SeqAlse;
  if (t == "dechirp") return Method::Dechirp;
  if (t == "cpf") return Method::Cpf;
  if (t == "pcpf") return Method::Pcpf;
  return std::nullopt;
}

void write_mse_csv(const std::string& path, const MseTable& table) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open output file: " + path);
  out << "method,component,parameter,n,sigma2,mse,theoretical_var,"
         "mean_runtime_s,replications_used,failures\n";
  for (const MseRow& r : table.rows) {
    out << r.method << ',' << r.component << ',' << r.parameter << ','
        << r.n << ',' << format_cell(r.sigma2) << ',' << format_cell(r.mse)
        << ',' << format_cell(r.theoretical_var) << ','
        << format_cell(r.mean_runtime_s) << ',' << r.replications_used << ','
        << r.failures << '\n';
  }
  if (!out) throw DataError("failed while writing: " + path);
}

MseTable run_experiment(const ExperimentConfig& cfg) {
  const std::size_t p = cfg.model.components.size();
  if (p == 0) throw DataError("experiment: model has no components");
  if (cfg.n_values.empty()) throw DataError("experiment: no record lengths");
  if (cfg.sigma2_values.empty())
    throw DataError("experiment: no noise levels");
  if (cfg.methods.empty()) throw DataError("experiment: no methods");
  if (cfg.replications == 0)
    throw DataError("experiment: need at least one replication");
  for (double s2 : cfg.sigma2_values) {
    if (!(s2 >= 0.0) || !std::isfinite(s2))
      throw DataError("experiment: noise variance must be finite and >= 0");
  }
  for (std::size_t n : cfg.n_values) {
    if (4 * p >= n)
      throw DataError(
          "experiment: model order too large for record length " +
          std::to_string(n));
  }
  for (Method m : cfg.methods) {
    if (single_component_only(m) && p != 1)
      throw DataError("experiment: method " + method_name(m) +
                      " fits a single component; use its sequential or "
                      "product form for higher orders");
  }

  MseTable table;
  for (std::size_t n : cfg.n_values) {
    for (double s2 : cfg.sigma2_values) {
      // Run every replication of every method, concurrently over
      // replications; slot storage keeps the later reduction independent
      // of the execution order.
      std::vector<std::vector<RepMethodOutcome>> slots(cfg.replications);
      parallel_for(cfg.replications, [&](std::size_t r) {
        ComplexSignal y = synthesize_clean(cfg.model, n);
        if (s2 > 0.0) {
          NoiseSpec spec;
          spec.kind = NoiseKind::IidGaussian;
          spec.sigma2 = s2;
          spec.seed = cfg.base_seed + r;
          y = add(y, generate_noise(spec, n));
        }
        std::vector<RepMethodOutcome> outs;
        outs.reserve(cfg.methods.size());
        for (Method m : cfg.methods) outs.push_back(run_method(m, y, cfg));
        slots[r] = std::move(outs);
      });

      // Serial reduction in replication order: bit-identical statistics
      // whatever the worker count (runtimes excepted; the clock itself is
      // not reproducible).
      for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
        const Method m = cfg.methods[mi];
        const bool with_amp = lse_family(m);
        std::vector<std::array<double, 3>> err(
            p, std::array<double, 3>{0.0, 0.0, 0.0});
        std::size_t used = 0;
        std::size_t failures = 0;
        double runtime_sum = 0.0;
        for (std::size_t r = 0; r < cfg.replications; ++r) {
          const RepMethodOutcome& out = slots[r][mi];
          if (out.failed) {
            ++failures;
            continue;
          }
          ++used;
          runtime_sum += out.runtime_s;
          const std::vector<std::size_t> pick =
              match_components(out.comps, cfg.model.components);
          for (std::size_t k = 0; k < p; ++k) {
            const ChirpComponent& truth = cfg.model.components[k];
            const ChirpComponent& hat = out.comps[pick[k]];
            const double db = angle_distance(truth.beta, hat.beta);
            err[k][0] += (hat.a_re - truth.a_re) * (hat.a_re - truth.a_re);
            err[k][1] += (hat.a_im - truth.a_im) * (hat.a_im - truth.a_im);
            err[k][2] += db * db;
          }
        }
        const double mean_rt =
            used > 0 ? runtime_sum / static_cast<double>(used) : kNaN;
        for (std::size_t k = 0; k < p; ++k) {
          std::array<double, 3> theo{kNaN, kNaN, kNaN};
          if (with_amp && s2 > 0.0) {
            theo = finite_n_variances(cfg.model.components[k], s2, n);
          }
          const char* names[3] = {"a_re", "a_im", "beta"};
          for (int pi = 0; pi < 3; ++pi) {
            if (pi < 2 && !with_amp) continue;
            MseRow row;
            row.method = method_name(m);
            row.component = k + 1;
            row.parameter = names[pi];
            row.n = n;
            row.sigma2 = s2;
            row.mse = used > 0
                          ? err[k][static_cast<std::size_t>(pi)] /
                                static_cast<double>(used)
                          : kNaN;
            row.theoretical_var = theo[static_cast<std::size_t>(pi)];
            row.mean_runtime_s = mean_rt;
            row.replications_used = used;
            row.failures = failures;
            table.rows.push_back(std::move(row));
          }
        }
      }
    }
  }
  return table;
}

std::vector<double> rss_trajectory(const ComplexSignal& y,
                                   std::size_t max_order,
                                   SequentialFlavor flavor) {
  return sequential_fit(y, max_order, flavor).rss_trajectory;
}

OrderSelection select_order(const std::vector<double>& rss, double tau) {
  if (rss.empty()) throw DataError("select_order: empty trajectory");
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw DataError("select_order: threshold must be positive and finite");
  const std::size_t stages = rss.size();
  const double floor = 1e-12 * std::max(rss[0], 0.0);
  std::size_t last_steep = 0;  // stage index whose entry still dropped fast
  for (std::size_t j = 1; j < stages; ++j) {
    if (rss[j - 1] <= floor) continue;  // nothing left: flat by definition
    const double drop = (rss[j - 1] - rss[j]) / rss[j - 1];
    if (drop >= tau) last_steep = j;
  }
  OrderSelection sel;
  sel.order = last_steep + 1;
  sel.saturated = stages > 1 && last_steep == stages - 1;
  return sel;
}

LjungBoxResult ljung_box(const std::vector<double>& x, std::size_t h) {
  const std::size_t n = x.size();
  if (h < 1) throw DataError("ljung_box: need at least one lag");
  if (n <= h)
    throw DataError("ljung_box: series must be longer than the lag count");
  for (double v : x) {
    if (!std::isfinite(v))
      throw DataError("ljung_box: series contains non-finite values");
  }
  const double mean =
      std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double denom = 0.0;
  for (double v : x) denom += (v - mean) * (v - mean);
  if (denom <= 0.0)
    throw DataError("ljung_box: zero-variance series");
  double q = 0.0;
  for (std::size_t k = 1; k <= h; ++k) {
    double num = 0.0;
    for (std::size_t t = k; t < n; ++t) {
      num += (x[t] - mean) * (x[t - k] - mean);
    }
    const double rho = num / denom;
    q += rho * rho / static_cast<double>(n - k);
  }
  q *= static_cast<double>(n) * static_cast<double>(n + 2);
  LjungBoxResult res;
  res.q = q;
  res.lags = h;
  res.p_value = boost::math::gamma_q(static_cast<double>(h) / 2.0, q / 2.0);
  return res;
}

RealDataFit fit_real(const ComplexSignal& y, std::size_t max_order,
                     double tau, std::size_t h, SequentialFlavor flavor) {
  FitResult probe = sequential_fit(y, max_order, flavor);
  if (probe.components.empty())
    throw NumericalError("fit_real: no stage produced a component");

  RealDataFit out;
  out.report.rss_trajectory = probe.rss_trajectory;
  const OrderSelection sel = select_order(probe.rss_trajectory, tau);
  out.report.selected_order = sel.order;
  out.report.saturated = sel.saturated;

  // A sequential stage depends only on the stages before it, so the fit at
  // the selected order is the probe's prefix.
  out.fit = std::move(probe);
  out.fit.components.resize(sel.order);
  out.fit.rss_trajectory.resize(sel.order);
  if (out.fit.stages.size() > sel.order) out.fit.stages.resize(sel.order);

  out.residual_signal = residual(y, out.fit);
  out.fitted.samples.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    out.fitted.samples[i] = y[i] - out.residual_signal[i];
  }

  std::vector<double> re(y.size());
  std::vector<double> im(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    re[i] = out.residual_signal[i].real();
    im[i] = out.residual_signal[i].imag();
  }
  try {
    out.report.lb_real = ljung_box(re, h);
    out.report.lb_imag = ljung_box(im, h);
    out.report.lb_applicable = true;
  } catch (const DataError&) {
    out.report.lb_applicable = false;
  }
  return out;
}

}  // namespace chirpfit
