#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mlcs/linops/kernels.hpp"
#include "mlcs/linops/operator.hpp"

namespace mlcs {

class IdentityOp final : public LinearOperator {
 public:
  explicit IdentityOp(Index n) : LinearOperator(n, n) {}
  bool is_unitary() const override { return true; }
  bool is_real() const override { return true; }
  std::string kind() const override { return "identity"; }

 protected:
  void do_apply(std::span<const cplx> x, std::span<cplx> y) const override;
  void do_adjoint(std::span<const cplx> y, std::span<cplx> x) const override;
  cplx do_entry(Index i, Index j) const override { return i == j ? 1.0 : 0.0; }
};

// Unitary DFT, u_kj = exp(-2 pi i k j / n) / sqrt(n). The 2D version acts on
// row-major side×side arrays.
class DftOp final : public LinearOperator {
 public:
  DftOp(Index side, int dimension);
  Index side() const { return side_; }
  int dimension() const { return dim_; }
  bool is_unitary() const override { return true; }
  std::string kind() const override { return dim_ == 1 ? "dft1d" : "dft2d"; }

 protected:
  void do_apply(std::span<const cplx> x, std::span<cplx> y) const override;
  void do_adjoint(std::span<const cplx> y, std::span<cplx> x) const override;
  cplx do_entry(Index i, Index j) const override;

 private:
  Index side_;
  int dim_;
};

// Sequency-ordered Walsh-Hadamard.
class FwhtOp final : public LinearOperator {
 public:
  FwhtOp(Index side, int dimension);
  bool is_unitary() const override { return true; }
  bool is_real() const override { return true; }
  std::string kind() const override { return "fwht"; }

 protected:
  void do_apply(std::span<const cplx> x, std::span<cplx> y) const override;
  void do_adjoint(std::span<const cplx> y, std::span<cplx> x) const override;
  cplx do_entry(Index i, Index j) const override;

 private:
  Index side_;
  int dim_;
  unsigned bits_;
};

// Periodic orthogonal Daubechies analysis transform (signal -> coefficients).
class DwtOp final : public LinearOperator {
 public:
  DwtOp(int family, int levels, Index side, int dimension);
  int family() const { return family_; }
  int levels() const { return levels_; }
  Index side() const { return side_; }
  int dimension() const { return dim_; }
  bool is_unitary() const override { return true; }
  bool is_real() const override { return true; }
  std::string kind() const override { return "dwt"; }

 protected:
  void do_apply(std::span<const cplx> x, std::span<cplx> y) const override;
  void do_adjoint(std::span<const cplx> y, std::span<cplx> x) const override;

 private:
  int family_;
  int levels_;
  Index side_;
  int dim_;
  kernels::QmfPair qmf_;
};

enum class RandomDist { Bernoulli, Gaussian };

// Bernoulli entries are ±1/sqrt(rows), Gaussian entries N(0, 1/rows). The
// matrix is filled row-major from Rng(seed).
class DenseRandomOp final : public LinearOperator {
 public:
  DenseRandomOp(RandomDist dist, Index rows, Index cols, std::uint64_t seed);
  bool is_real() const override { return true; }
  std::string kind() const override { return "dense_random"; }
  RandomDist dist() const { return dist_; }

 protected:
  void do_apply(std::span<const cplx> x, std::span<cplx> y) const override;
  void do_adjoint(std::span<const cplx> y, std::span<cplx> x) const override;
  cplx do_entry(Index i, Index j) const override;

 private:
  double value(Index i, Index j) const;
  RandomDist dist_;
  double scale_;
  std::vector<std::int8_t> signs_;
  std::vector<double> gauss_;
};

class DenseMatrixOp final : public LinearOperator {
 public:
  explicit DenseMatrixOp(Eigen::MatrixXcd m, bool unitary = false);
  const Eigen::MatrixXcd& matrix() const { return m_; }
  bool is_unitary() const override { return unitary_; }
  bool is_real() const override { return real_; }
  std::string kind() const override { return "dense"; }

 protected:
  void do_apply(std::span<const cplx> x, std::span<cplx> y) const override;
  void do_adjoint(std::span<const cplx> y, std::span<cplx> x) const override;
  cplx do_entry(Index i, Index j) const override;
  void do_column(Index j, std::span<cplx> out) const override;

 private:
  Eigen::MatrixXcd m_;
  bool unitary_;
  bool real_;
};

// left ⊗ right. Row index a*right.rows() + b, column index c*right.cols() + d.
class KroneckerOp final : public LinearOperator {
 public:
  KroneckerOp(OperatorPtr left, OperatorPtr right);
  bool is_unitary() const override { return l_->is_unitary() && r_->is_unitary(); }
  bool is_real() const override { return l_->is_real() && r_->is_real(); }
  std::string kind() const override { return "kronecker"; }

 protected:
  void do_apply(std::span<const cplx> x, std::span<cplx> y) const override;
  void do_adjoint(std::span<const cplx> y, std::span<cplx> x) const override;
  cplx do_entry(Index i, Index j) const override;

 private:
  OperatorPtr l_, r_;
};

class BlockDiagOp final : public LinearOperator {
 public:
  explicit BlockDiagOp(std::vector<OperatorPtr> blocks);
  const std::vector<OperatorPtr>& blocks() const { return blocks_; }
  bool is_unitary() const override;
  bool is_real() const override;
  std::string kind() const override { return "block_diag"; }

 protected:
  void do_apply(std::span<const cplx> x, std::span<cplx> y) const override;
  void do_adjoint(std::span<const cplx> y, std::span<cplx> x) const override;
  cplx do_entry(Index i, Index j) const override;

 private:
  std::vector<OperatorPtr> blocks_;
  std::vector<Index> row_off_, col_off_;
};

// outer · inner^{-1}; inner must be square unitary so its inverse is its adjoint.
class ComposeOp final : public LinearOperator {
 public:
  ComposeOp(OperatorPtr outer, OperatorPtr inner);
  const OperatorPtr& outer() const { return outer_; }
  const OperatorPtr& inner() const { return inner_; }
  bool is_unitary() const override { return outer_->is_unitary(); }
  bool has_orthonormal_rows() const override { return outer_->has_orthonormal_rows(); }
  bool is_real() const override { return outer_->is_real() && inner_->is_real(); }
  std::string kind() const override { return "compose"; }

 protected:
  void do_apply(std::span<const cplx> x, std::span<cplx> y) const override;
  void do_adjoint(std::span<const cplx> y, std::span<cplx> x) const override;

 private:
  OperatorPtr outer_, inner_;
};

// Index reversal, x_k -> x_{n-1-k}.
class FlipOp final : public LinearOperator {
 public:
  explicit FlipOp(Index n) : LinearOperator(n, n) {}
  bool is_unitary() const override { return true; }
  bool is_real() const override { return true; }
  std::string kind() const override { return "flip"; }

 protected:
  void do_apply(std::span<const cplx> x, std::span<cplx> y) const override;
  void do_adjoint(std::span<const cplx> y, std::span<cplx> x) const override;
  cplx do_entry(Index i, Index j) const override { return i + j + 1 == rows() ? 1.0 : 0.0; }
};

// P_Omega A: the rows of A listed in indices (sorted, distinct).
class RowSubsetOp final : public LinearOperator {
 public:
  RowSubsetOp(OperatorPtr base, std::vector<Index> indices);
  const std::vector<Index>& indices() const { return idx_; }
  const OperatorPtr& base() const { return base_; }
  bool has_orthonormal_rows() const override { return base_->has_orthonormal_rows(); }
  bool is_unitary() const override { return rows() == cols() && base_->is_unitary(); }
  bool is_real() const override { return base_->is_real(); }
  std::string kind() const override { return "row_subset"; }

 protected:
  void do_apply(std::span<const cplx> x, std::span<cplx> y) const override;
  void do_adjoint(std::span<const cplx> y, std::span<cplx> x) const override;
  cplx do_entry(Index i, Index j) const override { return base_->entry(idx_[i], j); }

 private:
  OperatorPtr base_;
  std::vector<Index> idx_;
};

template <class Op, class... Args>
OperatorPtr make_op(Args&&... args) {
  return std::make_shared<const Op>(std::forward<Args>(args)...);
}

CVec flip_vector(std::span<const cplx> x);
RVec flip_vector(std::span<const double> x);

}  // namespace mlcs
