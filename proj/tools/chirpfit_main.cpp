// chirpfit: command-line front end for elementary chirp synthesis,
// estimation, Monte Carlo experiments, and diagnostics.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
// Every run writes (or prints) a manifest echoing the effective parameters
// and seed; re-running the recorded command reproduces the outputs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "chirpfit/asymptotics.hpp"
#include "chirpfit/baselines.hpp"
#include "chirpfit/errors.hpp"
#include "chirpfit/estimators.hpp"
#include "chirpfit/experiments.hpp"
#include "chirpfit/io.hpp"
#include "chirpfit/parallel.hpp"
#include "chirpfit/periodogram.hpp"
#include "chirpfit/signal.hpp"

namespace {

using namespace chirpfit;

// Command-line level mistakes (malformed flag values, inconsistent flag
// combinations). Distinct from DataError so they map to exit code 1.
struct UsageError {
  std::string msg;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError{"cannot parse '" + s + "' as a number in " + what};
  }
}

std::uint64_t parse_count(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError{"cannot parse '" + s + "' as a count in " + what};
  }
}

// "a_re:a_im:beta[,a_re:a_im:beta...]" -> model.
ChirpModel parse_components(const std::string& text) {
  ChirpModel model;
  for (const std::string& item : split(text, ',')) {
    const std::vector<std::string> f = split(item, ':');
    if (f.size() != 3)
      throw UsageError{"component '" + item +
                       "' must have the form a_re:a_im:beta"};
    ChirpComponent c;
    c.a_re = parse_double(f[0], "--components");
    c.a_im = parse_double(f[1], "--components");
    c.beta = parse_double(f[2], "--components");
    model.components.push_back(c);
  }
  if (model.components.empty())
    throw UsageError{"--components needs at least one component"};
  return model;
}

std::vector<double> parse_double_list(const std::string& text,
                                      const std::string& what) {
  std::vector<double> out;
  for (const std::string& item : split(text, ','))
    out.push_back(parse_double(trim(item), what));
  return out;
}

std::vector<std::size_t> parse_count_list(const std::string& text,
                                          const std::string& what) {
  std::vector<std::size_t> out;
  for (const std::string& item : split(text, ','))
    out.push_back(static_cast<std::size_t>(parse_count(trim(item), what)));
  return out;
}

std::string fmt(double v, int precision = 12) {
  if (std::isnan(v)) return "n/a";
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

std::string model_text(const ChirpModel& model) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t k = 0; k < model.components.size(); ++k) {
    const ChirpComponent& c = model.components[k];
    if (k) os << ',';
    os << c.a_re << ':' << c.a_im << ':' << c.beta;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Manifests. Each entry is a (key, value) pair; flag entries reconstruct the
// command line, info entries are written as comments. For `mc` the manifest
// doubles as a config file: its key=value lines are the experiment schema.

struct Manifest {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> flags;  // --key value
  std::vector<std::pair<std::string, std::string>> info;   // comment-only

  void flag(const std::string& k, const std::string& v) {
    flags.emplace_back(k, v);
  }
  void note(const std::string& k, const std::string& v) {
    info.emplace_back(k, v);
  }

  [[nodiscard]] std::string command() const {
    std::string cmd = "chirpfit " + subcommand;
    for (const auto& [k, v] : flags) {
      cmd += " --" + k;
      if (!v.empty()) cmd += " " + v;
    }
    return cmd;
  }

  [[nodiscard]] std::string text(bool keys_as_config) const {
    std::ostringstream os;
    os << "# chirpfit run manifest\n";
    os << "# subcommand = " << subcommand << "\n";
    os << "# command = " << command() << "\n";
    os << "# threads = " << worker_count() << "\n";
    for (const auto& [k, v] : info) os << "# " << k << " = " << v << "\n";
    if (keys_as_config) {
      for (const auto& [k, v] : flags)
        os << k << " = " << (v.empty() ? "true" : v) << "\n";
    } else {
      for (const auto& [k, v] : flags)
        os << "# " << k << " = " << (v.empty() ? "true" : v) << "\n";
    }
    return os.str();
  }
};

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open output file: " + path);
  out << text;
  if (!out) throw DataError("failed while writing: " + path);
}

// File outputs get `<file>.manifest`; directory outputs get
// `<dir>/manifest.txt`; commands with no file output print the manifest.
void emit_manifest(const Manifest& m, const std::string& out_file,
                   bool keys_as_config = false) {
  if (out_file.empty()) {
    std::cout << m.text(keys_as_config);
  } else {
    write_text_file(out_file, m.text(keys_as_config));
  }
}

// ---------------------------------------------------------------------------
// Fit output writers.

void write_fit_csv(const std::string& path, const FitResult& fit) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open output file: " + path);
  out << "k,a_re,a_im,beta,rss_after_stage\n";
  out.precision(17);
  for (std::size_t k = 0; k < fit.components.size(); ++k) {
    const ChirpComponent& c = fit.components[k];
    out << (k + 1) << ',' << c.a_re << ',' << c.a_im << ',' << c.beta << ',';
    if (k < fit.rss_trajectory.size())
      out << fit.rss_trajectory[k];
    else
      out << "n/a";
    out << '\n';
  }
  if (!out) throw DataError("failed while writing: " + path);
}

void write_cov_csv(const std::string& path, const FitResult& fit) {
  static const char* names[3] = {"a_re", "a_im", "beta"};
  std::ofstream out(path);
  if (!out) throw DataError("cannot open output file: " + path);
  out << "component,row,col,value\n";
  out.precision(17);
  for (std::size_t k = 0; k < fit.covariance.size(); ++k) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        out << (k + 1) << ',' << names[i] << ',' << names[j] << ','
            << fit.covariance[k][static_cast<std::size_t>(i)]
                              [static_cast<std::size_t>(j)]
            << '\n';
      }
    }
  }
  if (!out) throw DataError("failed while writing: " + path);
}

void print_fit(const FitResult& fit, std::size_t n) {
  std::cout << "method: " << fit.method << "\n";
  for (std::size_t k = 0; k < fit.components.size(); ++k) {
    const ChirpComponent& c = fit.components[k];
    std::cout << "component " << (k + 1) << ": a_re = " << fmt(c.a_re)
              << "  a_im = " << fmt(c.a_im) << "  beta = " << fmt(c.beta)
              << "  |A| = " << fmt(c.magnitude()) << "\n";
  }
  if (!fit.rss_trajectory.empty()) {
    const double rss = fit.rss_trajectory.back();
    std::cout << "rss = " << fmt(rss) << "  (residual variance "
              << fmt(rss / static_cast<double>(n)) << ")\n";
  }
  for (std::size_t k = 0; k < fit.covariance.size(); ++k) {
    const auto& m = fit.covariance[k];
    std::cout << "component " << (k + 1)
              << " theoretical variances: a_re = " << fmt(m[0][0])
              << "  a_im = " << fmt(m[1][1]) << "  beta = " << fmt(m[2][2])
              << "\n";
  }
  for (const std::string& w : fit.warnings)
    std::cout << "warning: " << w << "\n";
}

// ---------------------------------------------------------------------------
// Experiment config files: flat `key = value` lines, '#' comments, lists
// comma-separated. A written mc manifest is itself a valid config.

void apply_config_line(ExperimentConfig& cfg, const std::string& key,
                       const std::string& value) {
  if (key == "components") {
    try {
      cfg.model = parse_components(value);
    } catch (const UsageError& e) {
      throw DataError("config: " + e.msg);
    }
  } else if (key == "n_values") {
    cfg.n_values = parse_count_list(value, "n_values");
  } else if (key == "sigma2_values") {
    cfg.sigma2_values = parse_double_list(value, "sigma2_values");
  } else if (key == "methods") {
    cfg.methods.clear();
    for (const std::string& item : split(value, ',')) {
      const std::optional<Method> m = parse_method(trim(item));
      if (!m) throw DataError("config: unknown method '" + trim(item) + "'");
      cfg.methods.push_back(*m);
    }
  } else if (key == "replications") {
    cfg.replications =
        static_cast<std::size_t>(parse_count(value, "replications"));
  } else if (key == "base_seed") {
    cfg.base_seed = parse_count(value, "base_seed");
  } else if (key == "oracle_init") {
    if (value == "true" || value == "1")
      cfg.oracle_init = true;
    else if (value == "false" || value == "0")
      cfg.oracle_init = false;
    else
      throw DataError("config: oracle_init must be true/false/1/0");
  } else {
    throw DataError("config: unknown key '" + key + "'");
  }
}

void load_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw DataError("config: line " + std::to_string(lineno) +
                      " is not 'key = value'");
    try {
      apply_config_line(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    } catch (const UsageError& e) {
      throw DataError("config: line " + std::to_string(lineno) + ": " +
                      e.msg);
    }
  }
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig cfg;
  cfg.replications = 500;
  cfg.base_seed = 1;
  auto comp = [](double re, double im, double b) {
    ChirpComponent c;
    c.a_re = re;
    c.a_im = im;
    c.beta = b;
    return c;
  };
  if (name == "4a") {
    cfg.model.components = {comp(5, 0, 0.5)};
    cfg.n_values = {101, 201, 301, 401, 501};
    cfg.sigma2_values = {1, 2, 3};
    cfg.methods = {Method::Lse, Method::Alse, Method::Dechirp, Method::Cpf};
  } else if (name == "4b") {
    cfg.model.components = {comp(7, 0, 1.0), comp(5, 0, 0.5)};
    cfg.n_values = {101, 201, 301, 401, 501};
    cfg.sigma2_values = {1, 2, 3};
    cfg.methods = {Method::SeqLse, Method::SeqAlse, Method::Dechirp,
                   Method::Pcpf};
  } else if (name == "4c-1" || name == "4c-2" || name == "4c-3") {
    const double b1 = name == "4c-1" ? 0.51 : name == "4c-2" ? 0.502 : 0.501;
    cfg.model.components = {comp(7, 0, b1), comp(5, 0, 0.5)};
    cfg.n_values = {100, 200, 300, 400, 500};
    cfg.sigma2_values = {1};
    cfg.methods = {Method::LseJoint, Method::SeqLse, Method::SeqAlse};
  } else {
    throw UsageError{"unknown preset '" + name +
                     "' (expected 4a, 4b, 4c-1, 4c-2, or 4c-3)"};
  }
  return cfg;
}

std::string methods_text(const std::vector<Method>& methods) {
  std::string out;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (i) out += ',';
    out += method_name(methods[i]);
  }
  return out;
}

std::string counts_text(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

std::string doubles_text(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    os << v[i];
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Subcommand bodies.

struct SynthArgs {
  std::string components;
  std::size_t n = 0;
  double sigma2 = 0.0;
  std::uint64_t seed = 1;
  std::string noise = "iid";
  std::string coeffs;
  std::string out;
};

void run_synth(const SynthArgs& a) {
  const ChirpModel model = parse_components(a.components);
  if (a.sigma2 < 0.0 || !std::isfinite(a.sigma2))
    throw UsageError{"--sigma2 must be finite and >= 0"};
  if (a.noise != "iid" && a.noise != "linear")
    throw UsageError{"--noise must be iid or linear"};
  if (a.noise == "linear" && trim(a.coeffs).empty())
    throw UsageError{"--noise linear requires --coeffs"};

  ComplexSignal y = synthesize_clean(model, a.n);
  if (a.sigma2 > 0.0) {
    NoiseSpec spec;
    spec.kind =
        a.noise == "linear" ? NoiseKind::LinearProcess : NoiseKind::IidGaussian;
    spec.sigma2 = a.sigma2;
    spec.seed = a.seed;
    if (a.noise == "linear")
      spec.coeffs = parse_double_list(a.coeffs, "--coeffs");
    y = add(y, generate_noise(spec, a.n));
  }
  write_signal_csv(a.out, y);

  Manifest m;
  m.subcommand = "synth";
  m.flag("components", a.components);
  m.flag("n", std::to_string(a.n));
  m.flag("sigma2", fmt(a.sigma2, 17));
  m.flag("seed", std::to_string(a.seed));
  m.flag("noise", a.noise);
  if (!a.coeffs.empty()) m.flag("coeffs", a.coeffs);
  m.flag("out", a.out);
  emit_manifest(m, a.out + ".manifest");

  std::cout << "wrote " << a.out << ": n = " << a.n
            << ", components = " << model.components.size()
            << ", sigma2 = " << fmt(a.sigma2) << "\n";
  if (a.sigma2 > 0.0) {
    for (std::size_t k = 0; k < model.components.size(); ++k) {
      std::cout << "component " << (k + 1) << " snr = "
                << fmt(snr_db(model.components[k], a.sigma2), 6) << " dB\n";
    }
  }
}

struct ScanArgs {
  std::string in;
  std::string kernel;
  std::string out;
  std::size_t stride = 1;
  std::size_t t = 0;
  std::string times;
};

void run_scan(const ScanArgs& a) {
  const ComplexSignal y = read_signal_csv(a.in);
  ScanResult res;
  if (a.kernel == "ptf") {
    GridSpec grid;
    grid.kind = GridKind::PtfFull;
    grid.n = y.size();
    res = ptf_scan(y, grid, a.stride);
  } else if (a.kernel == "cpf") {
    const std::size_t t = a.t != 0 ? a.t : (y.size() + 1) / 2;
    res = cpf_scan(y, t, a.stride);
  } else if (a.kernel == "pcpf") {
    std::vector<std::size_t> times;
    if (!trim(a.times).empty())
      times = parse_count_list(a.times, "--times");
    else
      times = {static_cast<std::size_t>(std::lround(
                   0.4 * static_cast<double>(y.size()))),
               (y.size() + 1) / 2};
    res = pcpf_scan(y, times, a.stride);
  } else if (a.kernel == "dechirp") {
    res = dechirp_power_scan(dechirp_transform(y), a.stride);
  } else {
    throw UsageError{"--kernel must be ptf, cpf, pcpf, or dechirp"};
  }
  write_scan_csv(a.out, res);

  Manifest m;
  m.subcommand = "scan";
  m.flag("in", a.in);
  m.flag("kernel", a.kernel);
  if (a.stride != 1) m.flag("stride", std::to_string(a.stride));
  if (a.t != 0) m.flag("t", std::to_string(a.t));
  if (!a.times.empty()) m.flag("times", a.times);
  m.flag("out", a.out);
  m.note("points", std::to_string(res.locations.size()));
  emit_manifest(m, a.out + ".manifest");

  const std::size_t i = res.argmax();
  std::cout << "wrote " << a.out << ": " << res.locations.size()
            << " points\n";
  std::cout << "peak: location = " << fmt(res.locations[i])
            << ", magnitude = " << fmt(res.magnitudes[i]) << "\n";
  if (a.kernel == "pcpf")
    std::cout << "note: pcpf magnitudes are summed log kernel powers\n";
}

struct EstimateArgs {
  std::string in;
  std::string method;
  std::size_t p = 1;
  std::string init_beta;
  std::string out;
};

void run_estimate(const EstimateArgs& a) {
  const ComplexSignal y = read_signal_csv(a.in);
  const std::optional<Method> mopt = parse_method(a.method);
  if (!mopt)
    throw UsageError{"unknown method '" + a.method +
                     "' (expected lse, alse, lse-joint, seq-lse, seq-alse, "
                     "dechirp, cpf, or pcpf)"};
  const Method method = *mopt;
  if (a.p == 0) throw UsageError{"--p must be at least 1"};
  if (method == Method::Cpf && a.p != 1)
    throw UsageError{
        "cpf fits a single component; use --method pcpf for --p > 1"};
  if ((method == Method::Lse || method == Method::Alse) && a.p != 1)
    throw UsageError{"lse/alse fit a single component; use seq-lse, "
                     "seq-alse, or lse-joint for --p > 1"};

  std::vector<double> inits;
  if (!trim(a.init_beta).empty())
    inits = parse_double_list(a.init_beta, "--init-beta");
  const std::size_t expected_inits =
      (method == Method::Lse || method == Method::Alse) ? 1 : a.p;
  if (!inits.empty() && inits.size() != expected_inits)
    throw UsageError{"--init-beta needs " + std::to_string(expected_inits) +
                     " value(s) for this method"};

  FitResult fit;
  switch (method) {
    case Method::Lse:
      fit = inits.empty() ? lse_one(y) : lse_one(y, inits[0]);
      break;
    case Method::Alse:
      fit = inits.empty() ? alse_one(y) : alse_one(y, inits[0]);
      break;
    case Method::LseJoint:
      fit = lse_joint(y, a.p, inits);
      break;
    case Method::SeqLse:
      fit = sequential_fit(y, a.p, SequentialFlavor::Lse, inits);
      break;
    case Method::SeqAlse:
      fit = sequential_fit(y, a.p, SequentialFlavor::Alse, inits);
      break;
    case Method::Dechirp:
      fit = sequential_baseline(y, a.p, BaselineFlavor::Dechirp);
      break;
    case Method::Cpf:
      fit = sequential_baseline(y, 1, BaselineFlavor::Cpf);
      break;
    case Method::Pcpf:
      fit = sequential_baseline(y, a.p, BaselineFlavor::Pcpf);
      break;
  }

  // Theoretical covariance at the plug-in residual variance; the closed
  // forms cover the least-squares-family estimators only.
  const bool ls_family = method == Method::Lse || method == Method::Alse ||
                         method == Method::LseJoint ||
                         method == Method::SeqLse || method == Method::SeqAlse;
  bool cov_attached = false;
  if (ls_family && !fit.components.empty() && !fit.rss_trajectory.empty()) {
    const double sigma2_hat =
        fit.rss_trajectory.back() / static_cast<double>(y.size());
    if (sigma2_hat > 0.0) {
      attach_covariance(fit, sigma2_hat, y.size());
      cov_attached = true;
    }
  }

  print_fit(fit, y.size());
  if (ls_family && !cov_attached)
    std::cout << "note: residual variance is zero; covariance omitted\n";
  if (!ls_family)
    std::cout << "note: no closed-form covariance for this method\n";

  if (!a.out.empty()) {
    write_fit_csv(a.out, fit);
    std::cout << "wrote " << a.out << "\n";
    if (cov_attached) {
      write_cov_csv(a.out + ".cov.csv", fit);
      std::cout << "wrote " << a.out << ".cov.csv\n";
    }
  }

  Manifest m;
  m.subcommand = "estimate";
  m.flag("in", a.in);
  m.flag("method", a.method);
  m.flag("p", std::to_string(a.p));
  if (!a.init_beta.empty()) m.flag("init-beta", a.init_beta);
  if (!a.out.empty()) m.flag("out", a.out);
  emit_manifest(m, a.out.empty() ? std::string{} : a.out + ".manifest");
}

struct McArgs {
  std::string config;
  std::string preset;
  std::string out = ".";
};

void run_mc(const McArgs& a) {
  if (a.config.empty() && a.preset.empty())
    throw UsageError{"mc needs --preset and/or --config"};
  ExperimentConfig cfg;
  if (!a.preset.empty()) cfg = preset_config(a.preset);
  if (!a.config.empty()) load_config_file(cfg, a.config);

  std::filesystem::create_directories(a.out);
  const std::string table_path =
      (std::filesystem::path(a.out) / "mse_table.csv").string();
  cfg.output_path = table_path;

  std::size_t cells = cfg.n_values.size() * cfg.sigma2_values.size();
  std::cout << "running " << cfg.methods.size() << " method(s) x " << cells
            << " cell(s) x " << cfg.replications << " replication(s), seed "
            << cfg.base_seed << " ...\n"
            << std::flush;
  const MseTable table = run_experiment(cfg);
  write_mse_csv(table_path, table);

  Manifest m;
  m.subcommand = "mc";
  if (!a.preset.empty()) m.note("preset", a.preset);
  if (!a.config.empty()) m.note("config", a.config);
  m.note("out", a.out);
  m.note("output", table_path);
  // The key=value section is a complete, rerunnable experiment config.
  m.flag("components", model_text(cfg.model));
  m.flag("n_values", counts_text(cfg.n_values));
  m.flag("sigma2_values", doubles_text(cfg.sigma2_values));
  m.flag("methods", methods_text(cfg.methods));
  m.flag("replications", std::to_string(cfg.replications));
  m.flag("base_seed", std::to_string(cfg.base_seed));
  m.flag("oracle_init", cfg.oracle_init ? "true" : "false");
  emit_manifest(m, (std::filesystem::path(a.out) / "manifest.txt").string(),
                /*keys_as_config=*/true);

  std::cout << "wrote " << table_path << " (" << table.rows.size()
            << " rows)\n";
}

struct AvarArgs {
  std::string components;
  double sigma2 = 1.0;
  std::size_t n = 0;
  std::string out;
};

void run_avar(const AvarArgs& a) {
  const ChirpModel model = parse_components(a.components);
  std::ostringstream table;
  table << "component,parameter,variance\n";
  table.precision(17);
  for (std::size_t k = 0; k < model.components.size(); ++k) {
    const std::array<double, 3> v =
        finite_n_variances(model.components[k], a.sigma2, a.n);
    table << (k + 1) << ",a_re," << v[0] << "\n";
    table << (k + 1) << ",a_im," << v[1] << "\n";
    table << (k + 1) << ",beta," << v[2] << "\n";
  }

  Manifest m;
  m.subcommand = "avar";
  m.flag("components", a.components);
  m.flag("sigma2", fmt(a.sigma2, 17));
  m.flag("n", std::to_string(a.n));
  if (!a.out.empty()) m.flag("out", a.out);

  if (a.out.empty()) {
    emit_manifest(m, "");
    std::cout << table.str();
  } else {
    write_text_file(a.out, table.str());
    emit_manifest(m, a.out + ".manifest");
    std::cout << "wrote " << a.out << "\n";
  }
}

struct FitRealArgs {
  std::string in;
  std::size_t max_order = 0;
  double tau = 0.01;
  std::size_t lb_lags = 20;
  std::string flavor = "lse";
  std::string out;
};

void run_fit_real(const FitRealArgs& a) {
  if (a.max_order == 0) throw UsageError{"--max-order must be at least 1"};
  if (a.flavor != "lse" && a.flavor != "alse")
    throw UsageError{"--flavor must be lse or alse"};
  const ComplexSignal y = read_signal_csv(a.in);
  const SequentialFlavor flavor =
      a.flavor == "alse" ? SequentialFlavor::Alse : SequentialFlavor::Lse;

  const RealDataFit rd = fit_real(y, a.max_order, a.tau, a.lb_lags, flavor);

  std::filesystem::create_directories(a.out);
  const auto path = [&](const char* name) {
    return (std::filesystem::path(a.out) / name).string();
  };
  write_fit_csv(path("fit.csv"), rd.fit);
  write_signal_csv(path("fitted.csv"), rd.fitted);
  write_signal_csv(path("residuals.csv"), rd.residual_signal);

  std::ostringstream rep;
  rep.precision(12);
  rep << "order probe (sequential " << a.flavor << ", max order "
      << a.max_order << ")\n";
  for (std::size_t k = 0; k < rd.report.rss_trajectory.size(); ++k) {
    rep << "  rss after stage " << (k + 1) << " = "
        << rd.report.rss_trajectory[k] << "\n";
  }
  rep << "selected order = " << rd.report.selected_order
      << "  (relative-drop threshold tau = " << a.tau << ")\n";
  rep << "saturated = " << (rd.report.saturated ? "yes" : "no") << "\n";
  rep << "whiteness of residual parts (portmanteau, " << a.lb_lags
      << " lags)\n";
  if (rd.report.lb_applicable) {
    rep << "  real part: Q = " << rd.report.lb_real.q
        << ", p = " << rd.report.lb_real.p_value << "\n";
    rep << "  imag part: Q = " << rd.report.lb_imag.q
        << ", p = " << rd.report.lb_imag.p_value << "\n";
  } else {
    rep << "  not applicable (a residual part has zero variance)\n";
  }
  if (rd.fit.warnings.empty()) {
    rep << "fit warnings: none\n";
  } else {
    rep << "fit warnings:\n";
    for (const std::string& w : rd.fit.warnings) rep << "  " << w << "\n";
  }
  write_text_file(path("report.txt"), rep.str());

  Manifest m;
  m.subcommand = "fit-real";
  m.flag("in", a.in);
  m.flag("max-order", std::to_string(a.max_order));
  m.flag("tau", fmt(a.tau, 17));
  m.flag("lb-lags", std::to_string(a.lb_lags));
  m.flag("flavor", a.flavor);
  m.flag("out", a.out);
  emit_manifest(m, path("manifest.txt"));

  std::cout << "selected order = " << rd.report.selected_order
            << (rd.report.saturated ? " (saturated)" : "") << "\n";
  if (rd.report.lb_applicable) {
    std::cout << "whiteness p-values: real = " << fmt(rd.report.lb_real.p_value, 6)
              << ", imag = " << fmt(rd.report.lb_imag.p_value, 6) << "\n";
  } else {
    std::cout << "whiteness test not applicable (zero-variance residual)\n";
  }
  std::cout << "wrote " << path("fit.csv") << ", " << path("fitted.csv")
            << ", " << path("residuals.csv") << ", " << path("report.txt")
            << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"elementary chirp model estimation toolkit"};
  app.set_version_flag("--version", "chirpfit 1.0.0");
  app.require_subcommand(1);

  SynthArgs synth;
  CLI::App* s = app.add_subcommand(
      "synth", "synthesize a chirp signal, optionally with noise");
  s->add_option("--components", synth.components,
                "a_re:a_im:beta[,a_re:a_im:beta...]")
      ->required();
  s->add_option("--n", synth.n, "record length")->required();
  s->add_option("--sigma2", synth.sigma2, "noise variance E|eps|^2 (0 = none)");
  s->add_option("--seed", synth.seed, "noise seed (default 1)");
  s->add_option("--noise", synth.noise, "noise kind: iid or linear");
  s->add_option("--coeffs", synth.coeffs,
                "linear-process taps, comma-separated");
  s->add_option("--out", synth.out, "output CSV (t,re,im)")->required();
  s->callback([&] { run_synth(synth); });

  ScanArgs scan;
  CLI::App* c = app.add_subcommand(
      "scan", "evaluate an estimator kernel over its candidate grid");
  c->add_option("--in", scan.in, "input CSV (t,re,im)")->required();
  c->add_option("--kernel", scan.kernel, "ptf, cpf, pcpf, or dechirp")
      ->required();
  c->add_option("--out", scan.out, "output CSV (location,magnitude)")
      ->required();
  c->add_option("--stride", scan.stride, "evaluate every k-th grid point");
  c->add_option("--t", scan.t, "cpf evaluation time (default (N+1)/2)");
  c->add_option("--times", scan.times,
                "pcpf evaluation times, comma-separated");
  c->callback([&] { run_scan(scan); });

  EstimateArgs est;
  CLI::App* e = app.add_subcommand("estimate", "fit chirp components");
  e->add_option("--in", est.in, "input CSV (t,re,im)")->required();
  e->add_option("--method", est.method,
                "lse, alse, lse-joint, seq-lse, seq-alse, dechirp, cpf, pcpf")
      ->required();
  e->add_option("--p", est.p, "number of components (default 1)");
  e->add_option("--init-beta", est.init_beta,
                "initial rate(s), comma-separated");
  e->add_option("--out", est.out, "fit table CSV");
  e->callback([&] { run_estimate(est); });

  McArgs mc;
  CLI::App* mcc = app.add_subcommand("mc", "Monte Carlo MSE experiment");
  mcc->add_option("--config", mc.config, "key = value experiment config");
  mcc->add_option("--preset", mc.preset, "4a, 4b, 4c-1, 4c-2, or 4c-3");
  mcc->add_option("--out", mc.out, "output directory (default .)");
  mcc->callback([&] { run_mc(mc); });

  AvarArgs avar;
  CLI::App* av = app.add_subcommand(
      "avar", "theoretical finite-N parameter variances");
  av->add_option("--components", avar.components,
                 "a_re:a_im:beta[,a_re:a_im:beta...]")
      ->required();
  av->add_option("--sigma2", avar.sigma2, "noise variance")->required();
  av->add_option("--n", avar.n, "record length")->required();
  av->add_option("--out", avar.out, "optional output CSV");
  av->callback([&] { run_avar(avar); });

  FitRealArgs fr;
  CLI::App* fit = app.add_subcommand(
      "fit-real", "order-diagnosed sequential fit of a recorded signal");
  fit->add_option("--in", fr.in, "input CSV (t,re,im or re-only rows)")
      ->required();
  fit->add_option("--max-order", fr.max_order, "largest order to probe")
      ->required();
  fit->add_option("--tau", fr.tau, "relative-drop threshold (default 0.01)");
  fit->add_option("--lb-lags", fr.lb_lags, "whiteness-test lags (default 20)");
  fit->add_option("--flavor", fr.flavor, "stage estimator: lse or alse");
  fit->add_option("--out", fr.out, "output directory")->required();
  fit->callback([&] { run_fit_real(fr); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e2) {
    return app.exit(e2);
  } catch (const CLI::CallForAllHelp& e2) {
    return app.exit(e2);
  } catch (const CLI::CallForVersion& e2) {
    return app.exit(e2);
  } catch (const CLI::ParseError& e2) {
    app.exit(e2);
    return 1;
  } catch (const UsageError& e2) {
    std::cerr << "usage error: " << e2.msg << "\n";
    return 1;
  } catch (const DataError& e2) {
    std::cerr << "data error: " << e2.what() << "\n";
    return 2;
  } catch (const std::exception& e2) {
    std::cerr << "numerical error: " << e2.what() << "\n";
    return 3;
  }
  return 0;
}
