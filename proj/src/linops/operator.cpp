#include "mlcs/linops/operator.hpp"

#include <string>

namespace mlcs {

namespace {
void check_len(Index got, Index want, const char* what) {
  if (got != want) {
    throw Error(Errc::DimensionMismatch, std::string(what) + ": expected length " +
                                             std::to_string(want) + ", got " + std::to_string(got));
  }
}
}  // namespace

void LinearOperator::apply(std::span<const cplx> x, std::span<cplx> y) const {
  check_len(x.size(), cols_, "apply input");
  check_len(y.size(), rows_, "apply output");
  do_apply(x, y);
}

void LinearOperator::adjoint(std::span<const cplx> y, std::span<cplx> x) const {
  check_len(y.size(), rows_, "adjoint input");
  check_len(x.size(), cols_, "adjoint output");
  do_adjoint(y, x);
}

CVec LinearOperator::apply(std::span<const cplx> x) const {
  CVec y(rows_);
  apply(x, y);
  return y;
}

CVec LinearOperator::adjoint(std::span<const cplx> y) const {
  CVec x(cols_);
  adjoint(y, x);
  return x;
}

cplx LinearOperator::entry(Index i, Index j) const {
  if (i >= rows_ || j >= cols_) {
    throw Error(Errc::IndexOutOfRange, "entry (" + std::to_string(i) + ", " + std::to_string(j) +
                                           ") outside " + std::to_string(rows_) + "x" +
                                           std::to_string(cols_));
  }
  return do_entry(i, j);
}

void LinearOperator::column(Index j, std::span<cplx> out) const {
  if (j >= cols_) throw Error(Errc::IndexOutOfRange, "column " + std::to_string(j));
  check_len(out.size(), rows_, "column output");
  do_column(j, out);
}

cplx LinearOperator::do_entry(Index i, Index j) const {
  CVec col(rows_);
  do_column(j, col);
  return col[i];
}

void LinearOperator::do_column(Index j, std::span<cplx> out) const {
  CVec e(cols_, 0.0);
  e[j] = 1.0;
  do_apply(e, out);
}

Eigen::MatrixXcd LinearOperator::to_dense() const {
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
  CVec col(rows_);
  for (Index j = 0; j < cols_; ++j) {
    do_column(j, col);
    for (Index i = 0; i < rows_; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
  }
  return m;
}

}  // namespace mlcs
