#include "chirpfit/periodogram.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "chirpfit/errors.hpp"
#include "chirpfit/parallel.hpp"

namespace chirpfit {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr std::size_t kScanBlock = 4096;  // fixed unit of deterministic work

}  // namespace

std::size_t GridSpec::count() const {
  switch (kind) {
    case GridKind::PtfFull:
    case GridKind::CpfHalf:
      if (n < 2) throw DataError("GridSpec: record too short for a rate grid");
      return n * n - 1;
    case GridKind::Fourier:
      if (n < 3) throw DataError("GridSpec: record too short for a Fourier grid");
      return n - 2;
  }
  throw DataError("GridSpec: unknown grid kind");
}

double GridSpec::spacing() const {
  switch (kind) {
    case GridKind::PtfFull:
      return 2.0 * kPi / (static_cast<double>(n) * static_cast<double>(n));
    case GridKind::CpfHalf:
      return kPi / (static_cast<double>(n) * static_cast<double>(n));
    case GridKind::Fourier:
      return kPi / static_cast<double>(n - 1);
  }
  throw DataError("GridSpec: unknown grid kind");
}

double GridSpec::location(std::size_t i) const {
  if (i >= count()) throw DataError("GridSpec: index out of range");
  return spacing() * static_cast<double>(i + 1);
}

std::size_t ScanResult::argmax() const {
  if (magnitudes.empty()) throw DataError("ScanResult: empty scan");
  return static_cast<std::size_t>(
      std::max_element(magnitudes.begin(), magnitudes.end()) -
      magnitudes.begin());
}

double ptf_value(const ComplexSignal& y, double beta) {
  const std::size_t n = y.size();
  if (n == 0) throw DataError("ptf_value: empty signal");
  double sr = 0.0, si = 0.0;
  if (n < 10000) {
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i + 1);
      const double phase = beta * (t * t);
      const double c = std::cos(phase), s = std::sin(phase);
      const double yr = y.samples[i].real(), yi = y.samples[i].imag();
      // y(t) * exp(-i*phase)
      sr += yr * c + yi * s;
      si += yi * c - yr * s;
    }
  } else {
    // Compensated accumulation for long records.
    double cr = 0.0, ci = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i + 1);
      const double phase = beta * (t * t);
      const double c = std::cos(phase), s = std::sin(phase);
      const double yr = y.samples[i].real(), yi = y.samples[i].imag();
      double term = yr * c + yi * s - cr;
      double tmp = sr + term;
      cr = (tmp - sr) - term;
      sr = tmp;
      term = yi * c - yr * s - ci;
      tmp = si + term;
      ci = (tmp - si) - term;
      si = tmp;
    }
  }
  return (sr * sr + si * si) / static_cast<double>(n);
}

ScanResult ptf_scan(const ComplexSignal& y, const GridSpec& grid,
                    std::size_t stride) {
  const std::size_t n = y.size();
  if (n == 0) throw DataError("ptf_scan: empty signal");
  if (grid.n != n)
    throw DataError("ptf_scan: grid was built for a different record length");
  if (stride == 0) throw DataError("ptf_scan: stride must be positive");

  const std::size_t total = grid.count();
  const std::size_t points = (total + stride - 1) / stride;
  const double delta = grid.spacing() * static_cast<double>(stride);

  ScanResult out;
  out.grid = grid;
  out.stride = stride;
  out.locations.resize(points);
  out.magnitudes.resize(points);
  for (std::size_t j = 0; j < points; ++j)
    out.locations[j] = grid.location(j * stride);

  const std::size_t blocks = (points + kScanBlock - 1) / kScanBlock;
  const double inv_n = 1.0 / static_cast<double>(n);

  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t j0 = b * kScanBlock;
    const std::size_t j1 = std::min(points, j0 + kScanBlock);
    const std::size_t len = j1 - j0;
    std::vector<double> accr(len, 0.0), acci(len, 0.0);
    const double beta0 = out.locations[j0];
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i + 1);
      const double t2 = t * t;
      // z = y(t) * exp(-i * beta0 * t^2), advanced by exp(-i * delta * t^2)
      // per grid step inside the block.
      const double p0 = beta0 * t2;
      double zr, zi;
      {
        const double c = std::cos(p0), s = std::sin(p0);
        const double yr = y.samples[i].real(), yi = y.samples[i].imag();
        zr = yr * c + yi * s;
        zi = yi * c - yr * s;
      }
      const double dshift = delta * t2;
      const double wr = std::cos(dshift), wi = -std::sin(dshift);
      for (std::size_t j = 0; j < len; ++j) {
        accr[j] += zr;
        acci[j] += zi;
        const double nzr = zr * wr - zi * wi;
        zi = zr * wi + zi * wr;
        zr = nzr;
      }
    }
    for (std::size_t j = 0; j < len; ++j)
      out.magnitudes[j0 + j] = (accr[j] * accr[j] + acci[j] * acci[j]) * inv_n;
  });

  return out;
}

ScanResult scan_custom(const GridSpec& grid,
                       const std::function<double(double)>& kernel,
                       std::size_t stride) {
  if (stride == 0) throw DataError("scan_custom: stride must be positive");
  const std::size_t total = grid.count();
  const std::size_t points = (total + stride - 1) / stride;

  ScanResult out;
  out.grid = grid;
  out.stride = stride;
  out.locations.resize(points);
  out.magnitudes.resize(points);
  for (std::size_t j = 0; j < points; ++j)
    out.locations[j] = grid.location(j * stride);

  const std::size_t blocks = (points + kScanBlock - 1) / kScanBlock;
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t j0 = b * kScanBlock;
    const std::size_t j1 = std::min(points, j0 + kScanBlock);
    for (std::size_t j = j0; j < j1; ++j)
      out.magnitudes[j] = kernel(out.locations[j]);
  });
  return out;
}

TopPeaks top_peaks(const ScanResult& scan, std::size_t count,
                   double min_separation) {
  if (count == 0) throw DataError("top_peaks: count must be positive");
  if (!(min_separation >= 0.0))
    throw DataError("top_peaks: min_separation must be nonnegative");
  const std::size_t m = scan.magnitudes.size();
  if (m == 0) throw DataError("top_peaks: empty scan");

  // Candidate local maxima; rising plateaus credit their left edge.
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < m; ++i) {
    const double v = scan.magnitudes[i];
    const bool left_ok = (i == 0) || scan.magnitudes[i - 1] < v;
    const bool right_ok = (i + 1 == m) || scan.magnitudes[i + 1] <= v;
    if (left_ok && right_ok) candidates.push_back(i);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t a, std::size_t b) {
                     return scan.magnitudes[a] > scan.magnitudes[b];
                   });

  TopPeaks out;
  for (std::size_t idx : candidates) {
    if (out.locations.size() == count) break;
    const double loc = scan.locations[idx];
    bool suppressed = false;
    for (double chosen : out.locations)
      if (std::fabs(loc - chosen) < min_separation) { suppressed = true; break; }
    if (suppressed) continue;
    out.locations.push_back(loc);
    out.magnitudes.push_back(scan.magnitudes[idx]);
    if (idx == 0 || idx + 1 == m) out.boundary = true;
  }
  out.shortfall = out.locations.size() < count;
  return out;
}

void write_scan_csv(const std::string& path, const ScanResult& scan) {
  std::ofstream out(path);
  if (!out) throw DataError("write_scan_csv: cannot open " + path);
  out << "location,magnitude\n";
  out.precision(17);
  for (std::size_t i = 0; i < scan.locations.size(); ++i)
    out << scan.locations[i] << ',' << scan.magnitudes[i] << '\n';
  if (!out) throw DataError("write_scan_csv: write failed for " + path);
}

}  // namespace chirpfit
