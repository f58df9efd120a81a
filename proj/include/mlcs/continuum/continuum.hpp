#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mlcs/linops/operator.hpp"

namespace mlcs {

// Daubechies scaling function and wavelet on the real line, supp = [0, a].
struct WaveletSystem {
  int family = 1;        // vanishing moments p, DB1..DB4
  std::vector<double> h; // refinement low-pass taps, sum sqrt(2)
  std::vector<double> g; // g_k = (-1)^k h_{L-1-k}
  double a = 1.0;        // support length, taps - 1
  int ceil_a = 1;
  double alpha = 1.0;    // decay exponent, |Phi^(xi)| <= C (1+|xi|)^-alpha
  int v = 1;             // vanishing moments
  double first_moment = 0.0;
};

WaveletSystem make_wavelet_system(int family);

// Phi^(xi) = int Phi(x) e^{-i x xi} dx by the refinement product. The number of
// factors grows with log2|xi| so the neglected tail stays below 1e-15.
cplx scaling_fourier(const WaveletSystem& sys, double xi);
cplx wavelet_fourier(const WaveletSystem& sys, double xi);
int product_depth(double xi);

// Number of functions in the basis with resolution below R.
Index wavelet_count(int R, int ceil_a);

struct ColumnInfo {
  bool scaling = false;
  int scale = 0;
  long shift = 0;
};

struct ContinuumGrid {
  Index omega_inv = 2;  // 1/omega
  int R_max = 0;        // columns cover the resolutions below R_max
  std::vector<ColumnInfo> columns;

  double omega() const { return 1.0 / static_cast<double>(omega_inv); }
  Index max_cols() const { return columns.size(); }
};

// Largest omega with 1/omega integral and omega < 1/(T1+T2), T1 = ceil(a)-1, T2 = 2 ceil(a)-1.
Index default_omega_inv(const WaveletSystem& sys);

// omega_inv = 0 selects default_omega_inv.
ContinuumGrid make_grid(const WaveletSystem& sys, int R_max, Index omega_inv = 0);

// Signed frequency of row i in the order 0, 1, -1, 2, -2, ...
long fourier_frequency(Index row);

// <column function, Fourier vector of row>: sqrt(omega/2^R) Psi^(-2 pi k omega/2^R) e^{2 pi i omega k j/2^R}.
cplx infinite_matrix_entry(const ContinuumGrid& grid, const WaveletSystem& sys, Index row, Index col);

class ContinuumOp final : public LinearOperator {
 public:
  ContinuumOp(const ContinuumGrid& grid, const WaveletSystem& sys, Index n_rows, Index n_cols);
  std::string kind() const override { return "continuum"; }

 protected:
  void do_apply(std::span<const cplx> x, std::span<cplx> y) const override;
  void do_adjoint(std::span<const cplx> y, std::span<cplx> x) const override;
  cplx do_entry(Index i, Index j) const override;
  void do_column(Index j, std::span<cplx> out) const override;

 private:
  Index omega_inv_;
  std::vector<ColumnInfo> cols_;
  std::vector<long> freq_;
  int scales_;
  Eigen::MatrixXcd psi_;  // rows x scales: sqrt(omega/2^R) Psi^(-2 pi omega k / 2^R)
  Eigen::VectorXcd phi_;  // sqrt(omega) Phi^(-2 pi omega k)
};

Eigen::MatrixXcd truncated_U(const ContinuumGrid& grid, const WaveletSystem& sys, Index n_rows, Index n_cols);

// sup over a sampled grid of |Psi^(z) / (-i z)^v|.
double theta_psi_sup(const WaveletSystem& sys, double zmax, Index samples);

// ---- analytic ellipse phantom ----

struct Ellipse {
  double cx = 0.0, cy = 0.0;  // centre (x along columns, y along rows, downwards)
  double ax = 1.0, ay = 1.0;  // semi-axes
  double angle = 0.0;         // radians
  double amplitude = 1.0;
};

double bessel_j1(double x);

// Modified Shepp-Logan head on [-1,1]^2 in image orientation.
std::vector<Ellipse> shepp_logan();

// Continuous transform int f(x,y) e^{-i(xi_x x + xi_y y)} dx dy.
cplx ellipse_phantom_fourier(const std::vector<Ellipse>& phantom, double xi_x, double xi_y);

// Pointwise value of the phantom at (x, y).
double ellipse_phantom_value(const std::vector<Ellipse>& phantom, double x, double y);

// Samples (F g)_k for an N×N grid on [-1,1)^2, where g is the phantom on the
// pixel lattice and F the unitary 2D DFT: (N/4)(-1)^{k1+k2} f^(pi k).
// Returned in DFT index order, row-major.
CVec phantom_dft_samples(const std::vector<Ellipse>& phantom, Index N);

}  // namespace mlcs
