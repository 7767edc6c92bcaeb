#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace ime {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Error taxonomy. The CLI maps these onto process exit codes
// (invalid-argument 2, io 3, numerical 4, ground-truth 5).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// I/O failures: unreadable or unwritable paths.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents. The message names the byte offset or line.
class ParseError : public IoError {
 public:
  using IoError::IoError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// Referential problems in ground-truth data (unknown ids, empty sets).
class GroundTruthError : public Error {
 public:
  using Error::Error;
};

namespace detail {

// Deterministic random source. mt19937_64 has a standard-pinned stream;
// the distributions are hand-rolled because std::uniform_real_distribution
// and friends are not bit-stable across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1), 53 random mantissa bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n), n >= 1.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via Box-Muller; one draw per call, no cached state.
  double gauss() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace detail
}  // namespace ime
