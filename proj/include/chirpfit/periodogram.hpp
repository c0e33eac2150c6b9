#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "chirpfit/signal.hpp"

namespace chirpfit {

enum class GridKind {
  PtfFull,  // 2*pi*k / N^2, k = 1 .. N^2-1: chirp-rate candidates in (0, 2*pi)
  CpfHalf,  //   pi*k / N^2, k = 1 .. N^2-1: quadratic-kernel rates in (0, pi)
  Fourier,  //   pi*k / (N-1), k = 1 .. N-2: sinusoid frequencies in (0, pi)
};

// A uniform candidate grid derived from the record length n.
struct GridSpec {
  GridKind kind = GridKind::PtfFull;
  std::size_t n = 0;

  // Number of grid points. Throws DataError when n is too small for the kind.
  [[nodiscard]] std::size_t count() const;
  [[nodiscard]] double spacing() const;
  // i = 0 .. count()-1 maps to grid index k = i + 1.
  [[nodiscard]] double location(std::size_t i) const;
};

// Kernel magnitudes evaluated over a grid. locations are strictly
// increasing; magnitudes are nonnegative.
struct ScanResult {
  GridSpec grid;
  std::size_t stride = 1;
  std::vector<double> locations;
  std::vector<double> magnitudes;

  // Index of the largest magnitude (first one on ties).
  [[nodiscard]] std::size_t argmax() const;
};

// Chirp periodogram I(beta) = (1/N) |sum_t y(t) exp(-i beta t^2)|^2.
// Uses compensated accumulation for records of 1e4 samples or more.
[[nodiscard]] double ptf_value(const ComplexSignal& y, double beta);

// Evaluates I(beta) at every stride-th grid point (stride 1 = the full grid,
// the default everywhere; coarse scans are opt-in). The sweep runs as fixed
// 4096-point blocks, each starting from exactly evaluated phases and advancing
// by per-sample phase rotations, so results are bit-identical regardless of
// how many threads execute the blocks. Cost O(N * count / stride).
[[nodiscard]] ScanResult ptf_scan(const ComplexSignal& y, const GridSpec& grid,
                                  std::size_t stride = 1);

// Evaluates an arbitrary nonnegative kernel over the grid, one call per
// point. Used by the quadratic-kernel and dechirp scans, which delegate each
// point to their contracted evaluators.
[[nodiscard]] ScanResult scan_custom(const GridSpec& grid,
                                     const std::function<double(double)>& kernel,
                                     std::size_t stride = 1);

// The top local maxima of a scan, strongest first, greedily suppressing any
// candidate within min_separation of an already selected peak. Grid
// endpoints count as peaks when the curve descends away from them.
// `shortfall` is set when fewer than `count` peaks exist; `boundary` when any
// returned peak sits on the first or last grid point.
struct TopPeaks {
  std::vector<double> locations;
  std::vector<double> magnitudes;
  bool shortfall = false;
  bool boundary = false;
};
[[nodiscard]] TopPeaks top_peaks(const ScanResult& scan, std::size_t count,
                                 double min_separation);

// Writes `location,magnitude` rows with a header.
void write_scan_csv(const std::string& path, const ScanResult& scan);

}  // namespace chirpfit
