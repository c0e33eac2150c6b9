#pragma once

#include <stdexcept>
#include <string>

namespace chirpfit {

// Malformed or unusable input: bad files, empty records, inconsistent
// lengths, parameters outside their documented domain.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical breakdown while computing: non-finite objective values,
// optimizer failure, unsolvable systems.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Near-singular design: frequency rates too close for the normal equations
// to separate their amplitudes.
class DegeneracyError : public NumericalError {
 public:
  explicit DegeneracyError(const std::string& what) : NumericalError(what) {}
};

}  // namespace chirpfit
