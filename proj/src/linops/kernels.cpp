#include "mlcs/linops/kernels.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mlcs::kernels {

namespace {

// FFTW planning is not thread safe; execution with new arrays is.
std::mutex g_plan_mutex;

fftw_plan cached_plan(int rank, Index n, bool inverse) {
  static std::map<std::tuple<int, Index, bool>, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto key = std::make_tuple(rank, n, inverse);
  auto it = plans.find(key);
  if (it != plans.end()) return it->second;
  const Index total = rank == 1 ? n : n * n;
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
  const int sign = inverse ? FFTW_BACKWARD : FFTW_FORWARD;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fftw_plan p = rank == 1 ? fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign, flags)
                          : fftw_plan_dft_2d(static_cast<int>(n), static_cast<int>(n), buf, buf,
                                             sign, flags);
  fftw_free(buf);
  plans.emplace(key, p);
  return p;
}

void scale(std::span<cplx> x, double s) {
  for (auto& v : x) v *= s;
}

unsigned bit_reverse(Index v, unsigned bits) {
  Index r = 0;
  for (unsigned b = 0; b < bits; ++b) {
    r = (r << 1) | (v & 1);
    v >>= 1;
  }
  return static_cast<unsigned>(r);
}

void analysis_step(const cplx* x, cplx* a, cplx* d, Index n, const QmfPair& f) {
  const Index half = n / 2;
  const Index taps = f.lo.size();
  for (Index k = 0; k < half; ++k) {
    cplx sa = 0.0, sd = 0.0;
    const Index base = 2 * k;
    if (base + taps <= n) {
      for (Index t = 0; t < taps; ++t) {
        sa += f.lo[t] * x[base + t];
        sd += f.hi[t] * x[base + t];
      }
    } else {
      for (Index t = 0; t < taps; ++t) {
        const cplx v = x[(base + t) % n];
        sa += f.lo[t] * v;
        sd += f.hi[t] * v;
      }
    }
    a[k] = sa;
    d[k] = sd;
  }
}

void synthesis_step(const cplx* a, const cplx* d, cplx* x, Index n, const QmfPair& f) {
  const Index half = n / 2;
  const Index taps = f.lo.size();
  for (Index i = 0; i < n; ++i) x[i] = 0.0;
  for (Index k = 0; k < half; ++k) {
    const Index base = 2 * k;
    if (base + taps <= n) {
      for (Index t = 0; t < taps; ++t) x[base + t] += f.lo[t] * a[k] + f.hi[t] * d[k];
    } else {
      for (Index t = 0; t < taps; ++t) x[(base + t) % n] += f.lo[t] * a[k] + f.hi[t] * d[k];
    }
  }
}

// One separable level on the top-left m×m block of an n-stride array.
void level_2d(cplx* img, Index stride, Index m, const QmfPair& f, bool forward) {
  const Index half = m / 2;
  const auto sm = static_cast<std::ptrdiff_t>(m);
  auto rows = [&] {
#pragma omp parallel
    {
      std::vector<cplx> in(m), out(m);
#pragma omp for schedule(static)
      for (std::ptrdiff_t r = 0; r < sm; ++r) {
        cplx* row = img + static_cast<Index>(r) * stride;
        std::copy(row, row + m, in.begin());
        if (forward) {
          analysis_step(in.data(), out.data(), out.data() + half, m, f);
        } else {
          synthesis_step(in.data(), in.data() + half, out.data(), m, f);
        }
        std::copy(out.begin(), out.end(), row);
      }
    }
  };
  auto cols = [&] {
#pragma omp parallel
    {
      std::vector<cplx> in(m), out(m);
#pragma omp for schedule(static)
      for (std::ptrdiff_t c = 0; c < sm; ++c) {
        for (Index r = 0; r < m; ++r) in[r] = img[r * stride + static_cast<Index>(c)];
        if (forward) {
          analysis_step(in.data(), out.data(), out.data() + half, m, f);
        } else {
          synthesis_step(in.data(), in.data() + half, out.data(), m, f);
        }
        for (Index r = 0; r < m; ++r) img[r * stride + static_cast<Index>(c)] = out[r];
      }
    }
  };
  if (forward) {
    rows();
    cols();
  } else {
    cols();
    rows();
  }
}

}  // namespace

void dft_1d(std::span<cplx> x, bool inverse) {
  const Index n = x.size();
  fftw_plan p = cached_plan(1, n, inverse);
  auto* ptr = reinterpret_cast<fftw_complex*>(x.data());
  fftw_execute_dft(p, ptr, ptr);
  scale(x, 1.0 / std::sqrt(static_cast<double>(n)));
}

void dft_2d(std::span<cplx> x, Index n, bool inverse) {
  fftw_plan p = cached_plan(2, n, inverse);
  auto* ptr = reinterpret_cast<fftw_complex*>(x.data());
  fftw_execute_dft(p, ptr, ptr);
  scale(x, 1.0 / static_cast<double>(n));
}

void fwht_natural_unscaled(std::span<cplx> x) {
  const Index n = x.size();
  for (Index len = 1; len < n; len <<= 1) {
    for (Index i = 0; i < n; i += 2 * len) {
      for (Index j = i; j < i + len; ++j) {
        const cplx a = x[j];
        const cplx b = x[j + len];
        x[j] = a + b;
        x[j + len] = a - b;
      }
    }
  }
}

Index sequency_to_natural(Index s, unsigned log2n) { return bit_reverse(s ^ (s >> 1), log2n); }

void fwht_sequency_1d(std::span<cplx> x, bool adjoint) {
  const Index n = x.size();
  const unsigned bits = log2_exact(n);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<cplx> tmp(n);
  if (!adjoint) {
    fwht_natural_unscaled(x);
    for (Index k = 0; k < n; ++k) tmp[k] = x[sequency_to_natural(k, bits)] * s;
    std::copy(tmp.begin(), tmp.end(), x.begin());
  } else {
    for (Index k = 0; k < n; ++k) tmp[sequency_to_natural(k, bits)] = x[k];
    fwht_natural_unscaled(tmp);
    for (Index k = 0; k < n; ++k) x[k] = tmp[k] * s;
  }
}

void fwht_sequency_2d(std::span<cplx> x, Index n, bool adjoint) {
  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < sn; ++r) {
    fwht_sequency_1d(x.subspan(static_cast<Index>(r) * n, n), adjoint);
  }
#pragma omp parallel
  {
    std::vector<cplx> col(n);
#pragma omp for schedule(static)
    for (std::ptrdiff_t c = 0; c < sn; ++c) {
      for (Index r = 0; r < n; ++r) col[r] = x[r * n + static_cast<Index>(c)];
      fwht_sequency_1d(col, adjoint);
      for (Index r = 0; r < n; ++r) x[r * n + static_cast<Index>(c)] = col[r];
    }
  }
}

QmfPair make_qmf(const std::vector<double>& lowpass) {
  QmfPair f;
  f.lo = lowpass;
  const Index L = lowpass.size();
  f.hi.resize(L);
  for (Index t = 0; t < L; ++t) f.hi[t] = ((t % 2) ? -1.0 : 1.0) * lowpass[L - 1 - t];
  return f;
}

void dwt_1d_forward(std::span<const cplx> in, std::span<cplx> out, const QmfPair& f, int levels) {
  const Index n = in.size();
  std::vector<cplx> work(in.begin(), in.end());
  std::vector<cplx> tmp(n);
  std::copy(in.begin(), in.end(), out.begin());
  Index m = n;
  for (int l = 0; l < levels; ++l) {
    analysis_step(work.data(), tmp.data(), tmp.data() + m / 2, m, f);
    std::copy(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(m), out.begin());
    std::copy(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(m / 2), work.begin());
    m /= 2;
  }
}

void dwt_1d_inverse(std::span<const cplx> in, std::span<cplx> out, const QmfPair& f, int levels) {
  const Index n = in.size();
  std::vector<cplx> work(in.begin(), in.end());
  std::vector<cplx> tmp(n);
  Index m = n >> levels;
  for (int l = 0; l < levels; ++l) {
    synthesis_step(work.data(), work.data() + m, tmp.data(), 2 * m, f);
    std::copy(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(2 * m), work.begin());
    m *= 2;
  }
  std::copy(work.begin(), work.end(), out.begin());
}

void pyramid_to_scale_order(std::span<const cplx> pyr, std::span<cplx> out, Index n, int levels) {
  Index h = n >> levels;
  Index pos = 0;
  auto block = [&](Index r0, Index c0, Index size) {
    for (Index r = 0; r < size; ++r)
      for (Index c = 0; c < size; ++c) out[pos++] = pyr[(r0 + r) * n + c0 + c];
  };
  block(0, 0, h);
  for (; h < n; h *= 2) {
    block(0, h, h);
    block(h, 0, h);
    block(h, h, h);
  }
}

void scale_order_to_pyramid(std::span<const cplx> in, std::span<cplx> pyr, Index n, int levels) {
  Index h = n >> levels;
  Index pos = 0;
  auto block = [&](Index r0, Index c0, Index size) {
    for (Index r = 0; r < size; ++r)
      for (Index c = 0; c < size; ++c) pyr[(r0 + r) * n + c0 + c] = in[pos++];
  };
  block(0, 0, h);
  for (; h < n; h *= 2) {
    block(0, h, h);
    block(h, 0, h);
    block(h, h, h);
  }
}

void dwt_2d_forward(std::span<const cplx> in, std::span<cplx> out, Index n, const QmfPair& f,
                    int levels) {
  std::vector<cplx> pyr(in.begin(), in.end());
  Index m = n;
  for (int l = 0; l < levels; ++l, m /= 2) level_2d(pyr.data(), n, m, f, true);
  pyramid_to_scale_order(pyr, out, n, levels);
}

void dwt_2d_inverse(std::span<const cplx> in, std::span<cplx> out, Index n, const QmfPair& f,
                    int levels) {
  std::vector<cplx> pyr(n * n);
  scale_order_to_pyramid(in, pyr, n, levels);
  if (levels == 0) {
    std::copy(pyr.begin(), pyr.end(), out.begin());
    return;
  }
  Index m = n >> (levels - 1);
  for (int l = 0; l < levels; ++l, m *= 2) level_2d(pyr.data(), n, m, f, false);
  std::copy(pyr.begin(), pyr.end(), out.begin());
}

}  // namespace mlcs::kernels

namespace mlcs::reference {

CVec dft_1d(std::span<const cplx> x, bool inverse) {
  const Index n = x.size();
  const double sign = inverse ? 1.0 : -1.0;
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  CVec y(n);
  for (Index k = 0; k < n; ++k) {
    cplx acc = 0.0;
    for (Index j = 0; j < n; ++j) {
      const double ang = sign * 2.0 * M_PI * static_cast<double>((j * k) % n) / static_cast<double>(n);
      acc += x[j] * cplx(std::cos(ang), std::sin(ang));
    }
    y[k] = acc * s;
  }
  return y;
}

CVec dft_2d(std::span<const cplx> x, Index n, bool inverse) {
  CVec tmp(n * n), out(n * n);
  for (Index r = 0; r < n; ++r) {
    CVec row = dft_1d(x.subspan(r * n, n), inverse);
    std::copy(row.begin(), row.end(), tmp.begin() + static_cast<std::ptrdiff_t>(r * n));
  }
  CVec col(n);
  for (Index c = 0; c < n; ++c) {
    for (Index r = 0; r < n; ++r) col[r] = tmp[r * n + c];
    CVec y = dft_1d(col, inverse);
    for (Index r = 0; r < n; ++r) out[r * n + c] = y[r];
  }
  return out;
}

CVec fwht_sequency_1d(std::span<const cplx> x) {
  const Index n = x.size();
  const unsigned bits = log2_exact(n);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  CVec y(n);
  for (Index k = 0; k < n; ++k) {
    const Index row = kernels::sequency_to_natural(k, bits);
    cplx acc = 0.0;
    for (Index j = 0; j < n; ++j) acc += (__builtin_popcountll(row & j) % 2 ? -1.0 : 1.0) * x[j];
    y[k] = acc * s;
  }
  return y;
}

namespace {

void analysis_mod(const CVec& x, CVec& a, CVec& d, const std::vector<double>& h) {
  const Index n = x.size();
  const Index L = h.size();
  a.assign(n / 2, 0.0);
  d.assign(n / 2, 0.0);
  for (Index k = 0; k < n / 2; ++k) {
    for (Index t = 0; t < L; ++t) {
      const double g = ((t % 2) ? -1.0 : 1.0) * h[L - 1 - t];
      a[k] += h[t] * x[(2 * k + t) % n];
      d[k] += g * x[(2 * k + t) % n];
    }
  }
}

}  // namespace

CVec dwt_1d_forward(std::span<const cplx> x, const std::vector<double>& lowpass, int levels) {
  CVec approx(x.begin(), x.end());
  std::vector<CVec> details;
  for (int l = 0; l < levels; ++l) {
    CVec a, d;
    analysis_mod(approx, a, d, lowpass);
    details.push_back(d);
    approx = a;
  }
  CVec out = approx;
  for (auto it = details.rbegin(); it != details.rend(); ++it) out.insert(out.end(), it->begin(), it->end());
  return out;
}

CVec dwt_2d_forward(std::span<const cplx> x, Index n, const std::vector<double>& lowpass, int levels) {
  CVec pyr(x.begin(), x.end());
  Index m = n;
  for (int l = 0; l < levels; ++l, m /= 2) {
    CVec line(m), a, d;
    for (Index r = 0; r < m; ++r) {
      for (Index c = 0; c < m; ++c) line[c] = pyr[r * n + c];
      analysis_mod(line, a, d, lowpass);
      for (Index c = 0; c < m / 2; ++c) {
        pyr[r * n + c] = a[c];
        pyr[r * n + m / 2 + c] = d[c];
      }
    }
    for (Index c = 0; c < m; ++c) {
      for (Index r = 0; r < m; ++r) line[r] = pyr[r * n + c];
      analysis_mod(line, a, d, lowpass);
      for (Index r = 0; r < m / 2; ++r) {
        pyr[r * n + c] = a[r];
        pyr[(m / 2 + r) * n + c] = d[r];
      }
    }
  }
  CVec out(n * n);
  kernels::pyramid_to_scale_order(pyr, out, n, levels);
  return out;
}

}  // namespace mlcs::reference
