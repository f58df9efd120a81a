#include "mlcs/linops/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mlcs/core/rng.hpp"
#include "mlcs/linops/daubechies.hpp"

namespace mlcs {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(Errc::InvalidSpec, msg);
}

Index total_size(Index side, int dim) { return dim == 1 ? side : side * side; }

void check_transform(Index side, int dim, const char* what) {
  require(dim == 1 || dim == 2, std::string(what) + ": dimension must be 1 or 2");
  require(is_power_of_two(side), std::string(what) + ": size must be a power of 2, got " +
                                     std::to_string(side));
}

}  // namespace

void IdentityOp::do_apply(std::span<const cplx> x, std::span<cplx> y) const {
  std::copy(x.begin(), x.end(), y.begin());
}
void IdentityOp::do_adjoint(std::span<const cplx> y, std::span<cplx> x) const {
  std::copy(y.begin(), y.end(), x.begin());
}

DftOp::DftOp(Index side, int dimension)
    : LinearOperator((check_transform(side, dimension, "dft"), total_size(side, dimension)),
                     total_size(side, dimension)),
      side_(side),
      dim_(dimension) {}

void DftOp::do_apply(std::span<const cplx> x, std::span<cplx> y) const {
  std::copy(x.begin(), x.end(), y.begin());
  if (dim_ == 1) {
    kernels::dft_1d(y, false);
  } else {
    kernels::dft_2d(y, side_, false);
  }
}

void DftOp::do_adjoint(std::span<const cplx> y, std::span<cplx> x) const {
  std::copy(y.begin(), y.end(), x.begin());
  if (dim_ == 1) {
    kernels::dft_1d(x, true);
  } else {
    kernels::dft_2d(x, side_, true);
  }
}

cplx DftOp::do_entry(Index i, Index j) const {
  const auto n = side_;
  auto phase = [n](Index a, Index b) {
    const double ang = -2.0 * M_PI * static_cast<double>((a * b) % n) / static_cast<double>(n);
    return cplx(std::cos(ang), std::sin(ang)) / std::sqrt(static_cast<double>(n));
  };
  if (dim_ == 1) return phase(i, j);
  return phase(i / n, j / n) * phase(i % n, j % n);
}

FwhtOp::FwhtOp(Index side, int dimension)
    : LinearOperator((check_transform(side, dimension, "fwht"), total_size(side, dimension)),
                     total_size(side, dimension)),
      side_(side),
      dim_(dimension),
      bits_(log2_exact(side)) {}

void FwhtOp::do_apply(std::span<const cplx> x, std::span<cplx> y) const {
  std::copy(x.begin(), x.end(), y.begin());
  if (dim_ == 1) {
    kernels::fwht_sequency_1d(y, false);
  } else {
    kernels::fwht_sequency_2d(y, side_, false);
  }
}

void FwhtOp::do_adjoint(std::span<const cplx> y, std::span<cplx> x) const {
  std::copy(y.begin(), y.end(), x.begin());
  if (dim_ == 1) {
    kernels::fwht_sequency_1d(x, true);
  } else {
    kernels::fwht_sequency_2d(x, side_, true);
  }
}

cplx FwhtOp::do_entry(Index i, Index j) const {
  auto w = [this](Index s, Index k) {
    const Index row = kernels::sequency_to_natural(s, bits_);
    return (__builtin_popcountll(row & k) % 2 ? -1.0 : 1.0) / std::sqrt(static_cast<double>(side_));
  };
  if (dim_ == 1) return w(i, j);
  return w(i / side_, j / side_) * w(i % side_, j % side_);
}

DwtOp::DwtOp(int family, int levels, Index side, int dimension)
    : LinearOperator((check_transform(side, dimension, "dwt"), total_size(side, dimension)),
                     total_size(side, dimension)),
      family_(family),
      levels_(levels),
      side_(side),
      dim_(dimension),
      qmf_(kernels::make_qmf(daubechies_lowpass(family))) {
  require(levels >= 0 && (Index{1} << levels) <= side,
          "dwt: levels must satisfy 0 <= J <= log2(size), got " + std::to_string(levels));
}

void DwtOp::do_apply(std::span<const cplx> x, std::span<cplx> y) const {
  if (dim_ == 1) {
    kernels::dwt_1d_forward(x, y, qmf_, levels_);
  } else {
    kernels::dwt_2d_forward(x, y, side_, qmf_, levels_);
  }
}

void DwtOp::do_adjoint(std::span<const cplx> y, std::span<cplx> x) const {
  if (dim_ == 1) {
    kernels::dwt_1d_inverse(y, x, qmf_, levels_);
  } else {
    kernels::dwt_2d_inverse(y, x, side_, qmf_, levels_);
  }
}

DenseRandomOp::DenseRandomOp(RandomDist dist, Index rows, Index cols, std::uint64_t seed)
    : LinearOperator(rows, cols), dist_(dist), scale_(1.0 / std::sqrt(static_cast<double>(rows))) {
  require(rows > 0 && cols > 0, "dense_random: rows and cols must be positive");
  Rng rng(seed);
  const Index total = rows * cols;
  if (dist == RandomDist::Bernoulli) {
    signs_.resize(total);
    std::uint64_t bits = 0;
    for (Index k = 0; k < total; ++k) {
      if (k % 64 == 0) bits = rng.next();
      signs_[k] = (bits & 1) ? std::int8_t{-1} : std::int8_t{1};
      bits >>= 1;
    }
  } else {
    gauss_.resize(total);
    for (auto& v : gauss_) v = rng.normal();
  }
}

double DenseRandomOp::value(Index i, Index j) const {
  const Index k = i * cols() + j;
  return scale_ * (dist_ == RandomDist::Bernoulli ? static_cast<double>(signs_[k]) : gauss_[k]);
}

cplx DenseRandomOp::do_entry(Index i, Index j) const { return value(i, j); }

namespace {

template <class T>
void real_matvec(const T* a, Index rows, Index cols, const double* x, double* y, double s) {
  const auto sr = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < sr; ++i) {
    const T* row = a + static_cast<Index>(i) * cols;
    double acc = 0.0;
#pragma omp simd reduction(+ : acc)
    for (Index j = 0; j < cols; ++j) acc += static_cast<double>(row[j]) * x[j];
    y[i] = acc * s;
  }
}

// Transposed product, parallel over column chunks so each output entry has a
// fixed summation order regardless of thread count.
template <class T>
void real_matvec_t(const T* a, Index rows, Index cols, const double* y, double* x, double s) {
  constexpr Index chunk = 1024;
  const auto nchunks = static_cast<std::ptrdiff_t>((cols + chunk - 1) / chunk);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < nchunks; ++c) {
    const Index j0 = static_cast<Index>(c) * chunk;
    const Index j1 = std::min(cols, j0 + chunk);
    for (Index j = j0; j < j1; ++j) x[j] = 0.0;
    for (Index i = 0; i < rows; ++i) {
      const T* row = a + i * cols;
      const double yi = y[i];
#pragma omp simd
      for (Index j = j0; j < j1; ++j) x[j] += static_cast<double>(row[j]) * yi;
    }
    for (Index j = j0; j < j1; ++j) x[j] *= s;
  }
}

template <class F>
void complex_via_real(std::span<const cplx> in, std::span<cplx> out, Index n_in, Index n_out, F&& f) {
  std::vector<double> re(n_in), im(n_in), ore(n_out), oim(n_out, 0.0);
  bool has_imag = false;
  for (Index k = 0; k < n_in; ++k) {
    re[k] = in[k].real();
    im[k] = in[k].imag();
    has_imag = has_imag || im[k] != 0.0;
  }
  f(re.data(), ore.data());
  if (has_imag) f(im.data(), oim.data());
  for (Index k = 0; k < n_out; ++k) out[k] = cplx(ore[k], oim[k]);
}

}  // namespace

void DenseRandomOp::do_apply(std::span<const cplx> x, std::span<cplx> y) const {
  complex_via_real(x, y, cols(), rows(), [this](const double* in, double* out) {
    if (dist_ == RandomDist::Bernoulli) {
      real_matvec(signs_.data(), rows(), cols(), in, out, scale_);
    } else {
      real_matvec(gauss_.data(), rows(), cols(), in, out, scale_);
    }
  });
}

void DenseRandomOp::do_adjoint(std::span<const cplx> y, std::span<cplx> x) const {
  complex_via_real(y, x, rows(), cols(), [this](const double* in, double* out) {
    if (dist_ == RandomDist::Bernoulli) {
      real_matvec_t(signs_.data(), rows(), cols(), in, out, scale_);
    } else {
      real_matvec_t(gauss_.data(), rows(), cols(), in, out, scale_);
    }
  });
}

DenseMatrixOp::DenseMatrixOp(Eigen::MatrixXcd m, bool unitary)
    : LinearOperator(static_cast<Index>(m.rows()), static_cast<Index>(m.cols())),
      m_(std::move(m)),
      unitary_(unitary),
      real_(m_.imag().cwiseAbs().maxCoeff() == 0.0) {}

void DenseMatrixOp::do_apply(std::span<const cplx> x, std::span<cplx> y) const {
  Eigen::Map<const Eigen::VectorXcd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::Map<Eigen::VectorXcd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  yv.noalias() = m_ * xv;
}

void DenseMatrixOp::do_adjoint(std::span<const cplx> y, std::span<cplx> x) const {
  Eigen::Map<const Eigen::VectorXcd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  Eigen::Map<Eigen::VectorXcd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  xv.noalias() = m_.adjoint() * yv;
}

cplx DenseMatrixOp::do_entry(Index i, Index j) const {
  return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

void DenseMatrixOp::do_column(Index j, std::span<cplx> out) const {
  for (Index i = 0; i < rows(); ++i) out[i] = do_entry(i, j);
}

KroneckerOp::KroneckerOp(OperatorPtr left, OperatorPtr right)
    : LinearOperator(left->rows() * right->rows(), left->cols() * right->cols()),
      l_(std::move(left)),
      r_(std::move(right)) {}

void KroneckerOp::do_apply(std::span<const cplx> x, std::span<cplx> y) const {
  const Index lr = l_->rows(), lc = l_->cols(), rr = r_->rows(), rc = r_->cols();
  CVec t(lc * rr);
  for (Index c = 0; c < lc; ++c) r_->apply(x.subspan(c * rc, rc), std::span<cplx>(t).subspan(c * rr, rr));
  CVec in(lc), out(lr);
  for (Index b = 0; b < rr; ++b) {
    for (Index c = 0; c < lc; ++c) in[c] = t[c * rr + b];
    l_->apply(in, out);
    for (Index a = 0; a < lr; ++a) y[a * rr + b] = out[a];
  }
}

void KroneckerOp::do_adjoint(std::span<const cplx> y, std::span<cplx> x) const {
  const Index lr = l_->rows(), lc = l_->cols(), rr = r_->rows(), rc = r_->cols();
  CVec t(lr * rc);
  for (Index a = 0; a < lr; ++a) r_->adjoint(y.subspan(a * rr, rr), std::span<cplx>(t).subspan(a * rc, rc));
  CVec in(lr), out(lc);
  for (Index d = 0; d < rc; ++d) {
    for (Index a = 0; a < lr; ++a) in[a] = t[a * rc + d];
    l_->adjoint(in, out);
    for (Index c = 0; c < lc; ++c) x[c * rc + d] = out[c];
  }
}

cplx KroneckerOp::do_entry(Index i, Index j) const {
  return l_->entry(i / r_->rows(), j / r_->cols()) * r_->entry(i % r_->rows(), j % r_->cols());
}

static Index sum_rows(const std::vector<OperatorPtr>& blocks) {
  require(!blocks.empty(), "block_diag: needs at least one block");
  Index r = 0;
  for (const auto& b : blocks) r += b->rows();
  return r;
}

static Index sum_cols(const std::vector<OperatorPtr>& blocks) {
  Index c = 0;
  for (const auto& b : blocks) c += b->cols();
  return c;
}

BlockDiagOp::BlockDiagOp(std::vector<OperatorPtr> blocks)
    : LinearOperator(sum_rows(blocks), sum_cols(blocks)), blocks_(std::move(blocks)) {
  Index r = 0, c = 0;
  for (const auto& b : blocks_) {
    row_off_.push_back(r);
    col_off_.push_back(c);
    r += b->rows();
    c += b->cols();
  }
  row_off_.push_back(r);
  col_off_.push_back(c);
}

void BlockDiagOp::do_apply(std::span<const cplx> x, std::span<cplx> y) const {
  for (Index k = 0; k < blocks_.size(); ++k) {
    blocks_[k]->apply(x.subspan(col_off_[k], blocks_[k]->cols()),
                      y.subspan(row_off_[k], blocks_[k]->rows()));
  }
}

void BlockDiagOp::do_adjoint(std::span<const cplx> y, std::span<cplx> x) const {
  for (Index k = 0; k < blocks_.size(); ++k) {
    blocks_[k]->adjoint(y.subspan(row_off_[k], blocks_[k]->rows()),
                        x.subspan(col_off_[k], blocks_[k]->cols()));
  }
}

cplx BlockDiagOp::do_entry(Index i, Index j) const {
  const auto bi = static_cast<Index>(std::upper_bound(row_off_.begin(), row_off_.end(), i) - row_off_.begin()) - 1;
  if (j < col_off_[bi] || j >= col_off_[bi + 1]) return 0.0;
  return blocks_[bi]->entry(i - row_off_[bi], j - col_off_[bi]);
}

bool BlockDiagOp::is_unitary() const {
  return std::all_of(blocks_.begin(), blocks_.end(), [](const OperatorPtr& b) { return b->is_unitary(); });
}

bool BlockDiagOp::is_real() const {
  return std::all_of(blocks_.begin(), blocks_.end(), [](const OperatorPtr& b) { return b->is_real(); });
}

ComposeOp::ComposeOp(OperatorPtr outer, OperatorPtr inner)
    : LinearOperator(outer->rows(), inner->rows()), outer_(std::move(outer)), inner_(std::move(inner)) {
  require(inner_->is_unitary(), "compose: inner operator must be unitary");
  require(outer_->cols() == inner_->rows(),
          "compose: outer has " + std::to_string(outer_->cols()) + " columns but inner has " +
              std::to_string(inner_->rows()) + " rows");
}

void ComposeOp::do_apply(std::span<const cplx> x, std::span<cplx> y) const {
  CVec t(inner_->cols());
  inner_->adjoint(x, t);
  outer_->apply(t, y);
}

void ComposeOp::do_adjoint(std::span<const cplx> y, std::span<cplx> x) const {
  CVec t(outer_->cols());
  outer_->adjoint(y, t);
  inner_->apply(t, x);
}

void FlipOp::do_apply(std::span<const cplx> x, std::span<cplx> y) const {
  std::reverse_copy(x.begin(), x.end(), y.begin());
}
void FlipOp::do_adjoint(std::span<const cplx> y, std::span<cplx> x) const {
  std::reverse_copy(y.begin(), y.end(), x.begin());
}

RowSubsetOp::RowSubsetOp(OperatorPtr base, std::vector<Index> indices)
    : LinearOperator(indices.size(), base->cols()), base_(std::move(base)), idx_(std::move(indices)) {
  for (Index k = 0; k < idx_.size(); ++k) {
    if (idx_[k] >= base_->rows()) throw Error(Errc::IndexOutOfRange, "row subset index " + std::to_string(idx_[k]));
    if (k > 0 && idx_[k] <= idx_[k - 1]) throw Error(Errc::InvalidSpec, "row subset indices must be sorted and distinct");
  }
}

void RowSubsetOp::do_apply(std::span<const cplx> x, std::span<cplx> y) const {
  CVec full = base_->apply(x);
  for (Index k = 0; k < idx_.size(); ++k) y[k] = full[idx_[k]];
}

void RowSubsetOp::do_adjoint(std::span<const cplx> y, std::span<cplx> x) const {
  CVec full(base_->rows(), 0.0);
  for (Index k = 0; k < idx_.size(); ++k) full[idx_[k]] = y[k];
  base_->adjoint(full, x);
}

CVec flip_vector(std::span<const cplx> x) { return CVec(x.rbegin(), x.rend()); }
RVec flip_vector(std::span<const double> x) { return RVec(x.rbegin(), x.rend()); }

}  // namespace mlcs
