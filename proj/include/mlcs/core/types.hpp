#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlcs {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;
using RVec = std::vector<double>;
using Index = std::size_t;

enum class Errc {
  InvalidSpec,
  DimensionMismatch,
  IndexOutOfRange,
  PartitionOutOfRange,
  BudgetExceeded,
  TruncationTooSmall,
  NotFoundWithinLimit,
  InvalidDepth,
  TooManySamples,
  InvalidParams,
  Unreachable,
  ConfigError,
  IoError,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline bool is_power_of_two(Index n) { return n != 0 && (n & (n - 1)) == 0; }

inline unsigned log2_exact(Index n) {
  unsigned l = 0;
  while ((Index{1} << l) < n) ++l;
  return l;
}

double norm2(std::span<const cplx> x);
double norm1(std::span<const cplx> x);
double norm_inf(std::span<const cplx> x);
CVec to_complex(std::span<const double> x);
RVec real_part(std::span<const cplx> x);
RVec modulus(std::span<const cplx> x);

}  // namespace mlcs
