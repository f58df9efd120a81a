#include "mlcs/continuum/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mlcs/linops/daubechies.hpp"

namespace mlcs {

namespace {

constexpr double kPi = std::numbers::pi;

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// (1/sqrt2) sum_k c_k e^{-ik w}
cplx filter_symbol(const std::vector<double>& c, double w) {
  const cplx z = std::polar(1.0, -w);
  cplx acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * z + c[k];
  return acc / std::numbers::sqrt2;
}

// e^{2 pi i num / den} with num reduced modulo den first
cplx unit_phase(long long num, long long den) {
  long long r = num % den;
  if (r < 0) r += den;
  return std::polar(1.0, 2.0 * kPi * static_cast<double>(r) / static_cast<double>(den));
}

}  // namespace

WaveletSystem make_wavelet_system(int family) {
  if (family < 1 || family > 4) throw Error(Errc::InvalidParams, "continuum wavelet family must be DB1..DB4");
  WaveletSystem s;
  s.family = family;
  s.h = daubechies_lowpass(family);
  const std::size_t L = s.h.size();
  s.g.resize(L);
  for (std::size_t k = 0; k < L; ++k) s.g[k] = ((k % 2) ? -1.0 : 1.0) * s.h[L - 1 - k];
  s.a = static_cast<double>(L - 1);
  s.ceil_a = static_cast<int>(L - 1);
  s.v = family;
  s.alpha = family - 0.5 * std::log2(binomial(2 * family - 1, family));
  double m = 0.0;
  for (std::size_t k = 0; k < L; ++k) m += static_cast<double>(k) * s.h[k];
  s.first_moment = m / std::numbers::sqrt2;
  return s;
}

int product_depth(double xi) {
  const double ax = std::abs(xi);
  if (ax < 1.0) return 30;
  return std::max(30, static_cast<int>(std::ceil(std::log2(ax))) + 26);
}

cplx scaling_fourier(const WaveletSystem& sys, double xi) {
  const int J = product_depth(xi);
  double w = xi;
  cplx prod = 1.0;
  for (int j = 1; j <= J; ++j) {
    w *= 0.5;
    prod *= filter_symbol(sys.h, w);
  }
  return prod * std::polar(1.0, -sys.first_moment * w);
}

cplx wavelet_fourier(const WaveletSystem& sys, double xi) {
  return filter_symbol(sys.g, 0.5 * xi) * scaling_fourier(sys, 0.5 * xi);
}

Index wavelet_count(int R, int ceil_a) {
  if (R < 0) throw Error(Errc::InvalidParams, "negative resolution");
  return (Index{1} << R) * ceil_a + static_cast<Index>(R + 1) * (ceil_a - 1);
}

Index default_omega_inv(const WaveletSystem& sys) {
  const int T = (sys.ceil_a - 1) + (2 * sys.ceil_a - 1);
  return static_cast<Index>(T) + 1;
}

ContinuumGrid make_grid(const WaveletSystem& sys, int R_max, Index omega_inv) {
  if (R_max < 0 || R_max > 24) throw Error(Errc::InvalidParams, "R_max out of range");
  ContinuumGrid g;
  g.omega_inv = omega_inv ? omega_inv : default_omega_inv(sys);
  if (g.omega_inv < default_omega_inv(sys))
    throw Error(Errc::InvalidParams, "omega too large for the wavelet support");
  g.R_max = R_max;
  const long ca = sys.ceil_a;
  for (long k = -(ca - 1); k <= ca - 1; ++k) g.columns.push_back({true, 0, k});
  for (int j = 0; j < R_max; ++j) {
    const long hi = (1L << j) * ca;
    for (long k = -ca + 1; k < hi; ++k) g.columns.push_back({false, j, k});
  }
  return g;
}

long fourier_frequency(Index row) {
  const long r = static_cast<long>(row);
  return (r % 2) ? (r + 1) / 2 : -(r / 2);
}

cplx infinite_matrix_entry(const ContinuumGrid& grid, const WaveletSystem& sys, Index row, Index col) {
  if (col >= grid.columns.size()) throw Error(Errc::IndexOutOfRange, "column beyond grid");
  const ColumnInfo& c = grid.columns[col];
  const long k = fourier_frequency(row);
  const double om = grid.omega();
  const long long q = static_cast<long long>(grid.omega_inv);
  if (c.scaling) {
    return std::sqrt(om) * scaling_fourier(sys, -2.0 * kPi * om * k) * unit_phase(1LL * k * c.shift, q);
  }
  const double scale = std::ldexp(1.0, c.scale);
  return std::sqrt(om / scale) * wavelet_fourier(sys, -2.0 * kPi * om * k / scale) *
         unit_phase(1LL * k * c.shift, q << c.scale);
}

ContinuumOp::ContinuumOp(const ContinuumGrid& grid, const WaveletSystem& sys, Index n_rows, Index n_cols)
    : LinearOperator(n_rows, n_cols), omega_inv_(grid.omega_inv) {
  if (n_cols > grid.columns.size()) throw Error(Errc::DimensionMismatch, "more columns than the grid holds");
  if (n_rows == 0 || n_cols == 0) throw Error(Errc::DimensionMismatch, "empty truncation");
  cols_.assign(grid.columns.begin(), grid.columns.begin() + n_cols);
  scales_ = 0;
  for (const auto& c : cols_) scales_ = std::max(scales_, c.scale + 1);
  freq_.resize(n_rows);
  for (Index i = 0; i < n_rows; ++i) freq_[i] = fourier_frequency(i);
  psi_.resize(n_rows, scales_);
  phi_.resize(n_rows);
  const double om = grid.omega();
#pragma omp parallel for schedule(dynamic, 64)
  for (Index i = 0; i < n_rows; ++i) {
    const double xi = -2.0 * kPi * om * freq_[i];
    phi_[i] = std::sqrt(om) * scaling_fourier(sys, xi);
    for (int r = 0; r < scales_; ++r) {
      const double scale = std::ldexp(1.0, r);
      psi_(i, r) = std::sqrt(om / scale) * wavelet_fourier(sys, xi / scale);
    }
  }
}

cplx ContinuumOp::do_entry(Index i, Index j) const {
  const ColumnInfo& c = cols_[j];
  const long long q = static_cast<long long>(omega_inv_);
  const long long num = 1LL * freq_[i] * c.shift;
  if (c.scaling) return phi_[i] * unit_phase(num, q);
  return psi_(i, c.scale) * unit_phase(num, q << c.scale);
}

void ContinuumOp::do_column(Index j, std::span<cplx> out) const {
  for (Index i = 0; i < rows(); ++i) out[i] = do_entry(i, j);
}

void ContinuumOp::do_apply(std::span<const cplx> x, std::span<cplx> y) const {
  const Index n = cols();
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < rows(); ++i) {
    cplx acc = 0.0;
    for (Index j = 0; j < n; ++j)
      if (x[j] != 0.0) acc += do_entry(i, j) * x[j];
    y[i] = acc;
  }
}

void ContinuumOp::do_adjoint(std::span<const cplx> y, std::span<cplx> x) const {
  const Index m = rows();
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < cols(); ++j) {
    cplx acc = 0.0;
    for (Index i = 0; i < m; ++i)
      if (y[i] != 0.0) acc += std::conj(do_entry(i, j)) * y[i];
    x[j] = acc;
  }
}

Eigen::MatrixXcd truncated_U(const ContinuumGrid& grid, const WaveletSystem& sys, Index n_rows, Index n_cols) {
  ContinuumOp op(grid, sys, n_rows, n_cols);
  return op.to_dense();
}

double theta_psi_sup(const WaveletSystem& sys, double zmax, Index samples) {
  double best = 0.0;
  for (Index t = 1; t <= samples; ++t) {
    const double z = zmax * static_cast<double>(t) / static_cast<double>(samples);
    best = std::max(best, std::abs(wavelet_fourier(sys, z)) / std::pow(z, sys.v));
  }
  return best;
}

// ---- phantom ----

double bessel_j1(double x) {
  const double ax = std::abs(x);
  const double sign = x < 0 ? -1.0 : 1.0;
  if (ax < 17.0) {
    const long double h = 0.5L * ax;
    const long double h2 = h * h;
    long double term = h, sum = h;
    for (int m = 1; m < 200; ++m) {
      term *= -h2 / (static_cast<long double>(m) * (m + 1));
      sum += term;
      if (std::abs(term) < 1e-22L * std::abs(sum) && m > 4) break;
    }
    return sign * static_cast<double>(sum);
  }
  // Hankel expansion with mu = 4
  const double mu = 4.0;
  double P = 0.0, Q = 0.0, term = 1.0, last = 1e300;
  for (int k = 0; k < 60; ++k) {
    if (k > 0) term *= (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * ax);
    if (std::abs(term) > last) break;
    last = std::abs(term);
    const int r = k % 4;
    if (r == 0) P += term;
    else if (r == 1) Q += term;
    else if (r == 2) P -= term;
    else Q -= term;
    if (std::abs(term) < 1e-18) break;
  }
  const double chi = ax - 0.75 * kPi;
  return sign * std::sqrt(2.0 / (kPi * ax)) * (P * std::cos(chi) - Q * std::sin(chi));
}

std::vector<Ellipse> shepp_logan() {
  const double d = kPi / 180.0;
  // y points down the image, so centres and angles are mirrored
  return {
      {0.0, 0.0, 0.69, 0.92, 0.0, 1.0},
      {0.0, 0.0184, 0.6624, 0.874, 0.0, -0.8},
      {0.22, 0.0, 0.11, 0.31, 18.0 * d, -0.2},
      {-0.22, 0.0, 0.16, 0.41, -18.0 * d, -0.2},
      {0.0, -0.35, 0.21, 0.25, 0.0, 0.1},
      {0.0, -0.1, 0.046, 0.046, 0.0, 0.1},
      {0.0, 0.1, 0.046, 0.046, 0.0, 0.1},
      {-0.08, 0.605, 0.046, 0.023, 0.0, 0.1},
      {0.0, 0.606, 0.023, 0.023, 0.0, 0.1},
      {0.06, 0.605, 0.023, 0.046, 0.0, 0.1},
  };
}

cplx ellipse_phantom_fourier(const std::vector<Ellipse>& phantom, double xi_x, double xi_y) {
  cplx total = 0.0;
  for (const auto& e : phantom) {
    const double c = std::cos(e.angle), s = std::sin(e.angle);
    const double u = e.ax * (xi_x * c + xi_y * s);
    const double v = e.ay * (-xi_x * s + xi_y * c);
    const double q = std::hypot(u, v);
    const double shape = q < 1e-8 ? kPi * (1.0 - q * q / 8.0) : 2.0 * kPi * bessel_j1(q) / q;
    total += e.amplitude * e.ax * e.ay * shape * std::polar(1.0, -(xi_x * e.cx + xi_y * e.cy));
  }
  return total;
}

double ellipse_phantom_value(const std::vector<Ellipse>& phantom, double x, double y) {
  double val = 0.0;
  for (const auto& e : phantom) {
    const double c = std::cos(e.angle), s = std::sin(e.angle);
    const double dx = x - e.cx, dy = y - e.cy;
    const double u = (dx * c + dy * s) / e.ax;
    const double v = (-dx * s + dy * c) / e.ay;
    if (u * u + v * v <= 1.0) val += e.amplitude;
  }
  return val;
}

CVec phantom_dft_samples(const std::vector<Ellipse>& phantom, Index N) {
  if (N < 2 || N % 2) throw Error(Errc::InvalidParams, "phantom grid must be even");
  CVec out(N * N);
  const long n = static_cast<long>(N);
  const double scale = static_cast<double>(N) / 4.0;
#pragma omp parallel for schedule(dynamic, 8)
  for (long r = 0; r < n; ++r) {
    const long k1 = r < n / 2 ? r : r - n;
    for (long c = 0; c < n; ++c) {
      const long k2 = c < n / 2 ? c : c - n;
      const double sgn = ((r + c) % 2) ? -1.0 : 1.0;
      out[r * N + c] = sgn * scale * ellipse_phantom_fourier(phantom, kPi * k2, kPi * k1);
    }
  }
  return out;
}

}  // namespace mlcs
