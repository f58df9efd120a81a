#pragma once

#include <memory>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "mlcs/core/types.hpp"

namespace mlcs {

// Matrix-free linear map C^cols -> C^rows. Indices are 0-based.
// Implementations are immutable after construction, so one instance can be
// shared by any number of threads.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }

  void apply(std::span<const cplx> x, std::span<cplx> y) const;
  void adjoint(std::span<const cplx> y, std::span<cplx> x) const;
  CVec apply(std::span<const cplx> x) const;
  CVec adjoint(std::span<const cplx> y) const;

  cplx entry(Index i, Index j) const;
  // Column j written into out (length rows()).
  void column(Index j, std::span<cplx> out) const;

  virtual bool is_unitary() const { return false; }
  // A A* = I.
  virtual bool has_orthonormal_rows() const { return is_unitary(); }
  // All entries real.
  virtual bool is_real() const { return false; }
  virtual std::string kind() const = 0;

  Eigen::MatrixXcd to_dense() const;

 protected:
  LinearOperator(Index rows, Index cols) : rows_(rows), cols_(cols) {}

  virtual void do_apply(std::span<const cplx> x, std::span<cplx> y) const = 0;
  virtual void do_adjoint(std::span<const cplx> y, std::span<cplx> x) const = 0;
  virtual cplx do_entry(Index i, Index j) const;
  virtual void do_column(Index j, std::span<cplx> out) const;

 private:
  Index rows_;
  Index cols_;
};

using OperatorPtr = std::shared_ptr<const LinearOperator>;

}  // namespace mlcs
