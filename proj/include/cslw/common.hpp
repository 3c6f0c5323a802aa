#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace cslw {

struct SourceSpan {
  int line = 0;   // 1-based; 0 = unknown
  int col = 0;    // 1-based
  int len = 0;
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, SourceSpan where)
      : Error(format(msg, where)), span(where) {}
  SourceSpan span;

 private:
  static std::string format(const std::string& msg, SourceSpan s) {
    if (s.line <= 0) return msg;
    return "line " + std::to_string(s.line) + ", col " + std::to_string(s.col) +
           ": " + msg;
  }
};

class ModelError : public Error {
 public:
  using Error::Error;
};

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent seeds for parallel
// replications and per-row fill streams so results don't depend on scheduling.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return mix64(base ^ mix64(index + 0x9e3779b97f4a7c15ull));
}

// Neumaier compensated accumulator; estimator reductions use this so results
// are independent of summation grouping mishaps and stable across runs.
struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace cslw
