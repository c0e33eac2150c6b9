#include "chirpfit/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "chirpfit/errors.hpp"

namespace chirpfit {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (*(e - 1) == ' ' || *(e - 1) == '\t')) --e;
  if (b == e) return false;
  auto [ptr, ec] = std::from_chars(b, e, out);
  return ec == std::errc{} && ptr == e;
}

}  // namespace

void write_signal_csv(const std::string& path, const ComplexSignal& y) {
  std::ofstream out(path);
  if (!out) throw DataError("write_signal_csv: cannot open " + path);
  out << "t,re,im\n";
  out.precision(17);
  for (std::size_t i = 0; i < y.size(); ++i)
    out << (i + 1) << ',' << y.samples[i].real() << ',' << y.samples[i].imag() << '\n';
  if (!out) throw DataError("write_signal_csv: write failed for " + path);
}

ComplexSignal read_signal_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("read_signal_csv: cannot open " + path);

  ComplexSignal y;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // Skip blank lines.
    bool blank = true;
    for (char ch : line)
      if (ch != ' ' && ch != '\t' && ch != '\r') { blank = false; break; }
    if (blank) continue;

    const std::vector<std::string> fields = split_fields(line);
    double first = 0.0;
    if (!parse_double(fields[0], first)) {
      if (lineno == 1) continue;  // header row
      throw DataError("read_signal_csv: unparseable row " + std::to_string(lineno) +
                      " in " + path);
    }

    double re = 0.0, im = 0.0;
    if (fields.size() == 1) {
      re = first;
    } else {
      if (!parse_double(fields[1], re))
        throw DataError("read_signal_csv: bad re field on row " +
                        std::to_string(lineno) + " in " + path);
      if (fields.size() >= 3 && !fields[2].empty() &&
          !parse_double(fields[2], im))
        throw DataError("read_signal_csv: bad im field on row " +
                        std::to_string(lineno) + " in " + path);
    }
    y.samples.emplace_back(re, im);
  }
  if (y.samples.empty())
    throw DataError("read_signal_csv: no samples in " + path);
  return y;
}

}  // namespace chirpfit
