#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>

#include "helpers.hpp"
#include "mlcs/coherence/coherence.hpp"
#include "mlcs/continuum/continuum.hpp"

using namespace mlcs;
using namespace mlcs::test;

namespace {

constexpr double kPi = std::numbers::pi;

double j1_series(double x) {
  using big = boost::multiprecision::cpp_dec_float_50;
  const big h = big(x) / 2;
  big term = h, sum = h;
  for (int m = 1; m < 200; ++m) {
    term *= -(h * h) / (big(m) * big(m + 1));
    sum += term;
  }
  return sum.convert_to<double>();
}

// Slice oracle for one ellipse: the y-integral is closed form, x is integrated by adaptive Gauss-Kronrod.
cplx ellipse_quadrature(const Ellipse& e, double xi_x, double xi_y) {
  const double c = std::cos(e.angle), s = std::sin(e.angle);
  const double qa = s * s / (e.ax * e.ax) + c * c / (e.ay * e.ay);
  const double qb = 2.0 * c * s * (1.0 / (e.ax * e.ax) - 1.0 / (e.ay * e.ay));
  const double qc = c * c / (e.ax * e.ax) + s * s / (e.ay * e.ay);
  const double w = 1.0 / std::sqrt(qc - qb * qb / (4.0 * qa));
  auto slice = [&](double dx) -> cplx {
    const double disc = std::max(0.0, qb * qb * dx * dx - 4.0 * qa * (qc * dx * dx - 1.0));
    const double lo = (-qb * dx - std::sqrt(disc)) / (2.0 * qa), hi = (-qb * dx + std::sqrt(disc)) / (2.0 * qa);
    const cplx inner = std::abs(xi_y) < 1e-14
                           ? cplx(hi - lo)
                           : (std::exp(cplx(0, -xi_y * lo)) - std::exp(cplx(0, -xi_y * hi))) / cplx(0, xi_y);
    return inner * std::exp(cplx(0, -xi_x * dx));
  };
  using boost::math::quadrature::gauss_kronrod;
  auto part = [&](auto f) {
    return gauss_kronrod<double, 61>::integrate(f, -kPi / 2, kPi / 2, 15, 1e-13);
  };
  const double re = part([&](double t) { return (slice(w * std::sin(t)) * w * std::cos(t)).real(); });
  const double im = part([&](double t) { return (slice(w * std::sin(t)) * w * std::cos(t)).imag(); });
  return e.amplitude * cplx(re, im) * std::exp(cplx(0, -(xi_x * e.cx + xi_y * e.cy)));
}

double op_norm(const Eigen::MatrixXcd& m) { return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0); }

}  // namespace

TEST(Wavelet, HaarScalingClosedForm) {
  const auto sys = make_wavelet_system(1);
  for (double xi : {-40.0, -3.0, 0.7, 2.0 * kPi, 11.0, 1000.0}) {
    const cplx exact = (1.0 - std::exp(cplx(0, -xi))) / cplx(0, xi);
    EXPECT_LT(std::abs(scaling_fourier(sys, xi) - exact), 1e-12) << xi;
  }
  EXPECT_LT(std::abs(scaling_fourier(sys, 2.0 * kPi)), 1e-12);
}

TEST(Wavelet, ScalingUnitIntegralAndWaveletZeroMean) {
  for (int p = 1; p <= 4; ++p) {
    const auto sys = make_wavelet_system(p);
    EXPECT_NEAR(std::abs(scaling_fourier(sys, 0.0) - 1.0), 0.0, 1e-15) << p;
    EXPECT_LT(std::abs(wavelet_fourier(sys, 0.0)), 1e-15) << p;
    EXPECT_EQ(sys.a, 2.0 * p - 1.0);
    EXPECT_EQ(sys.v, p);
  }
  EXPECT_THROW(make_wavelet_system(5), Error);
}

TEST(Wavelet, HaarWaveletModulus) {
  const auto sys = make_wavelet_system(1);
  for (double xi : {2.0 * kPi, 1.0, 9.5, -30.0}) {
    const double env = 4.0 * std::pow(std::sin(xi / 4.0), 2) / std::abs(xi);
    EXPECT_NEAR(std::abs(wavelet_fourier(sys, xi)), env, 1e-12) << xi;
  }
}

TEST(Wavelet, Db2DecaySweep) {
  const auto sys = make_wavelet_system(2);
  double worst = 0.0;
  for (double xi = 0.0; xi <= 1e4; xi += 0.37) worst = std::max(worst, std::abs(scaling_fourier(sys, xi)) * (1.0 + xi));
  EXPECT_LT(worst, 3.0);
  EXPECT_GT(sys.alpha, 1.0);
}

TEST(Wavelet, ProductConvergedOnWideRange) {
  // Doubling the argument equals one more refinement factor: Phi^(2 xi) = m0(xi) Phi^(xi).
  for (int p = 1; p <= 4; ++p) {
    const auto sys = make_wavelet_system(p);
    for (double xi : {0.3, 17.0, 1234.5, 40000.0, 65536.0}) {
      cplx m0 = 0.0;
      for (Index k = 0; k < sys.h.size(); ++k) m0 += sys.h[k] * std::exp(cplx(0, -double(k) * xi));
      m0 /= std::sqrt(2.0);
      EXPECT_LT(std::abs(scaling_fourier(sys, 2 * xi) - m0 * scaling_fourier(sys, xi)), 1e-10) << p << ' ' << xi;
    }
  }
}

TEST(Wavelet, ThetaBounded) {
  for (int p = 1; p <= 4; ++p) {
    const double t = theta_psi_sup(make_wavelet_system(p), 200.0, 20001);
    EXPECT_TRUE(std::isfinite(t));
    EXPECT_GT(t, 0.0);
    EXPECT_LT(t, 10.0);
  }
}

TEST(Continuum, WaveletCountExamples) {
  EXPECT_EQ(wavelet_count(5, 1), 32u);
  EXPECT_EQ(wavelet_count(2, 3), 18u);
  EXPECT_EQ(wavelet_count(0, 1), 1u);
}

TEST(Continuum, CountMatchesOrdering) {
  for (int p = 1; p <= 4; ++p) {
    const auto sys = make_wavelet_system(p);
    for (int R = 0; R <= 10; ++R) {
      const auto g = make_grid(sys, R);
      EXPECT_EQ(g.max_cols(), wavelet_count(R, sys.ceil_a));
      Index scaling = 0;
      for (const auto& c : g.columns) scaling += c.scaling;
      EXPECT_EQ(scaling, Index(2 * sys.ceil_a - 1));
    }
  }
}

TEST(Continuum, DefaultOmega) {
  EXPECT_EQ(default_omega_inv(make_wavelet_system(1)), 2u);
  const auto sys = make_wavelet_system(2);
  const auto g = make_grid(sys, 3);
  const int T = (sys.ceil_a - 1) + (2 * sys.ceil_a - 1);
  EXPECT_LT(g.omega(), 1.0 / T);
  EXPECT_GE(1.0 / double(g.omega_inv - 1), 1.0 / T);
  EXPECT_THROW(make_grid(sys, 3, 4), Error);
}

TEST(Continuum, FirstEntryAndCoherenceFloor) {
  const auto sys = make_wavelet_system(1);
  const auto g = make_grid(sys, 6);
  EXPECT_NEAR(std::abs(infinite_matrix_entry(g, sys, 0, 0) - std::sqrt(g.omega())), 0.0, 1e-15);
  const auto U = truncated_U(g, sys, 128, g.max_cols());
  EXPECT_GE(U.cwiseAbs2().maxCoeff(), g.omega() - 1e-15);
  EXPECT_THROW(infinite_matrix_entry(g, sys, 0, g.max_cols()), Error);
}

TEST(Continuum, OperatorMatchesEntries) {
  const auto sys = make_wavelet_system(2);
  const auto g = make_grid(sys, 4);
  const Index rows = 70, cols = g.max_cols();
  const ContinuumOp op(g, sys, rows, cols);
  const auto D = truncated_U(g, sys, rows, cols);
  for (Index i = 0; i < rows; i += 7)
    for (Index j = 0; j < cols; j += 3) EXPECT_LT(std::abs(D(i, j) - infinite_matrix_entry(g, sys, i, j)), 1e-14);
  const CVec x = random_cvec(cols, 5), y = random_cvec(rows, 6);
  const CVec ax = op.apply(x), aty = op.adjoint(y);
  Eigen::VectorXcd xe(cols), ye(rows);
  for (Index j = 0; j < cols; ++j) xe(j) = x[j];
  for (Index i = 0; i < rows; ++i) ye(i) = y[i];
  const Eigen::VectorXcd r1 = D * xe, r2 = D.adjoint() * ye;
  for (Index i = 0; i < rows; ++i) EXPECT_LT(std::abs(ax[i] - r1(i)), 1e-12);
  for (Index j = 0; j < cols; ++j) EXPECT_LT(std::abs(aty[j] - r2(j)), 1e-12);
}

TEST(ContinuumProperty, ColumnNormsApproachOne) {
  for (int p : {1, 2}) {
    const auto sys = make_wavelet_system(p);
    const auto g = make_grid(sys, 3);
    std::vector<double> prev(8, 0.0);
    for (Index rows = 64; rows <= 4096; rows *= 2) {
      const auto U = truncated_U(g, sys, rows, 8);
      for (Index j = 0; j < 8; ++j) {
        const double n = U.col(j).norm();
        EXPECT_LE(n, 1.0 + 1e-8);
        EXPECT_GE(n, prev[j] - 1e-14);
        prev[j] = n;
      }
    }
    for (double n : prev) EXPECT_GT(n, 0.999) << p;
  }
}

TEST(ContinuumProperty, HaarTailCoherenceDecaysLikeInverseK) {
  const auto sys = make_wavelet_system(1);
  const auto g = make_grid(sys, 12);
  const ContinuumOp U(g, sys, 8192, g.max_cols());
  double lo = 1e300, hi = 0.0;
  for (Index K = 16; K <= 1024; K *= 2) {
    const double v = double(K) * tail_coherence(U, K, Side::Rows);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_GT(lo, 0.05);
  EXPECT_LT(hi, 5.0);
  EXPECT_LT(hi / lo, 1.5);
}

TEST(Continuum, FourierRangeNeededForScale) {
  // ||P_N^perp U P_M|| with M = W_R and N = L 2^R / omega, from the isometry 1 - sigma_min^2.
  for (int p : {1, 2}) {
    const auto sys = make_wavelet_system(p);
    const int R = 4;
    const auto g = make_grid(sys, R);
    double prev = 2.0;
    for (Index L : {1u, 2u, 4u, 8u}) {
      const Index N = L * g.omega_inv * (Index(1) << R);
      const auto U = truncated_U(g, sys, N, g.max_cols());
      const double smin = Eigen::JacobiSVD<Eigen::MatrixXcd>(U).singularValues().minCoeff();
      const double tail = std::sqrt(std::max(0.0, 1.0 - smin * smin));
      EXPECT_LT(tail, prev) << p << ' ' << L;
      prev = tail;
    }
    EXPECT_LT(prev, 0.5);
  }
}

TEST(Continuum, FineScalesInvisibleAtLowFrequency) {
  // ||P_N U P_{M2}^{M1}|| for columns at scales R1..R2-1 and N = gamma 2^{R1} / omega shrinks with gamma.
  for (int p : {1, 2}) {
    const auto sys = make_wavelet_system(p);
    const int R1 = 6, R2 = 8;
    const auto g = make_grid(sys, R2);
    const Index c0 = wavelet_count(R1, sys.ceil_a);
    std::vector<double> norms;
    for (double gamma : {0.5, 0.25, 0.125}) {
      const Index N = Index(gamma * double(g.omega_inv) * double(Index(1) << R1));
      const auto U = truncated_U(g, sys, N, g.max_cols());
      norms.push_back(op_norm(U.rightCols(g.max_cols() - c0)));
      EXPECT_LT(norms.back() / std::pow(2 * kPi * gamma, double(sys.v)), 1.0) << p << ' ' << gamma;
    }
    for (int i = 0; i < 2; ++i) EXPECT_GT(norms[i] / norms[i + 1], 0.8 * std::pow(2.0, sys.v)) << p;
  }
}

TEST(Continuum, MTildeFiniteAndScalesWithN) {
  const auto sys = make_wavelet_system(1);
  const auto g = make_grid(sys, 16);
  const ContinuumOp U256(g, sys, 256, g.max_cols());
  const ContinuumOp U512(g, sys, 512, g.max_cols());
  const Index m1 = m_tilde(U256, 256, 4.0, 16, g.max_cols());
  const Index m2 = m_tilde(U512, 512, 4.0, 16, g.max_cols());
  EXPECT_GT(m1, 256u);
  EXPECT_LT(m1, g.max_cols());
  EXPECT_LE(double(m2), 2.5 * double(m1));
}

TEST(Bessel, MatchesSeries) {
  double worst = 0.0;
  for (double x = 0.0; x <= 50.0; x += 0.0625) worst = std::max(worst, std::abs(bessel_j1(x) - j1_series(x)));
  EXPECT_LT(worst, 1e-12);
  EXPECT_NEAR(bessel_j1(-2.5), -bessel_j1(2.5), 1e-16);
}

TEST(Phantom, UnitDiskArea) {
  const std::vector<Ellipse> disk{{0.0, 0.0, 1.0, 1.0, 0.0, 1.0}};
  EXPECT_NEAR(std::abs(ellipse_phantom_fourier(disk, 0.0, 0.0) - kPi), 0.0, 1e-15);
  const auto sl = shepp_logan();
  double area = 0.0;
  for (const auto& e : sl) area += kPi * e.ax * e.ay * e.amplitude;
  EXPECT_NEAR(ellipse_phantom_fourier(sl, 0.0, 0.0).real(), area, 1e-13);
}

TEST(Phantom, ShiftTheorem) {
  const auto base = shepp_logan();
  const double tx = 0.13, ty = -0.07;
  auto shifted = base;
  for (auto& e : shifted) {
    e.cx += tx;
    e.cy += ty;
  }
  for (auto [a, b] : std::vector<std::pair<double, double>>{{3.0, -1.0}, {0.5, 20.0}, {-60.0, 41.0}}) {
    const cplx expect = ellipse_phantom_fourier(base, a, b) * std::exp(cplx(0, -(a * tx + b * ty)));
    EXPECT_LT(std::abs(ellipse_phantom_fourier(shifted, a, b) - expect), 1e-12);
  }
}

TEST(Phantom, MatchesQuadrature) {
  const auto sl = shepp_logan();
  Rng rng(2024);
  for (int t = 0; t < 20; ++t) {
    const double a = 60.0 * (rng.uniform01() - 0.5), b = 60.0 * (rng.uniform01() - 0.5);
    cplx q = 0.0;
    for (const auto& e : sl) q += ellipse_quadrature(e, a, b);
    EXPECT_LT(std::abs(ellipse_phantom_fourier(sl, a, b) - q), 1e-6) << a << ' ' << b;
  }
}

TEST(Phantom, ValueMatchesQuadrature) {
  // The slice oracle describes the same set as the pointwise indicator.
  const Ellipse e{0.1, -0.2, 0.5, 0.2, 0.6, 1.0};
  Rng rng(3);
  const Index n = 400;
  double sum = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) sum += ellipse_phantom_value({e}, -1.0 + (j + 0.5) * 2.0 / n, -1.0 + (i + 0.5) * 2.0 / n);
  sum *= 4.0 / double(n * n);
  EXPECT_NEAR(sum, ellipse_quadrature(e, 0.0, 0.0).real(), 2e-3);
}

TEST(Phantom, DftSamplesScaling) {
  const auto sl = shepp_logan();
  const Index N = 16;
  const auto s = phantom_dft_samples(sl, N);
  ASSERT_EQ(s.size(), N * N);
  EXPECT_NEAR(std::abs(s[0] - double(N) / 4.0 * ellipse_phantom_fourier(sl, 0, 0)), 0.0, 1e-12);
  // Row r=1, column c=N-1 correspond to k1 = 1, k2 = -1.
  const cplx v = s[1 * N + (N - 1)];
  EXPECT_NEAR(std::abs(v - double(N) / 4.0 * ellipse_phantom_fourier(sl, -kPi, kPi)), 0.0, 1e-12);
  EXPECT_THROW(phantom_dft_samples(sl, 7), Error);
}
