#pragma once

#include <string>

#include "chirpfit/signal.hpp"

namespace chirpfit {

// Writes `t,re,im` rows with a header, t starting at 1, full double
// precision (17 significant digits, round-trip exact).
void write_signal_csv(const std::string& path, const ComplexSignal& y);

// Reads a signal written by write_signal_csv. Tolerant of real-valued
// recordings: rows with a single numeric field are treated as `re` with
// im = 0, rows with two fields as `t,re`, three or more as `t,re,im`.
// A non-numeric first row is treated as a header and skipped.
// Throws DataError on unreadable files, unparseable rows, or empty records.
[[nodiscard]] ComplexSignal read_signal_csv(const std::string& path);

}  // namespace chirpfit
