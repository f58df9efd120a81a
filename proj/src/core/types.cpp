#include "mlcs/core/types.hpp"

#include <algorithm>
#include <cmath>

namespace mlcs {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::PartitionOutOfRange: return "PartitionOutOfRange";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::TruncationTooSmall: return "TruncationTooSmall";
    case Errc::NotFoundWithinLimit: return "NotFoundWithinLimit";
    case Errc::InvalidDepth: return "InvalidDepth";
    case Errc::TooManySamples: return "TooManySamples";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::Unreachable: return "Unreachable";
    case Errc::ConfigError: return "ConfigError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

// Scaled accumulation so that very large or small entries do not overflow.
double norm2(std::span<const cplx> x) {
  double scale = 0.0;
  double ssq = 1.0;
  for (const cplx& v : x) {
    for (double c : {v.real(), v.imag()}) {
      if (c == 0.0) continue;
      const double a = std::abs(c);
      if (scale < a) {
        ssq = 1.0 + ssq * (scale / a) * (scale / a);
        scale = a;
      } else {
        ssq += (a / scale) * (a / scale);
      }
    }
  }
  return scale * std::sqrt(ssq);
}

double norm1(std::span<const cplx> x) {
  double s = 0.0;
  for (const cplx& v : x) s += std::abs(v);
  return s;
}

double norm_inf(std::span<const cplx> x) {
  double m = 0.0;
  for (const cplx& v : x) m = std::max(m, std::abs(v));
  return m;
}

CVec to_complex(std::span<const double> x) { return CVec(x.begin(), x.end()); }

RVec real_part(std::span<const cplx> x) {
  RVec out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [](const cplx& v) { return v.real(); });
  return out;
}

RVec modulus(std::span<const cplx> x) {
  RVec out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [](const cplx& v) { return std::abs(v); });
  return out;
}

}  // namespace mlcs
