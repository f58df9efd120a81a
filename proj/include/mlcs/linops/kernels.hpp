#pragma once

#include <span>
#include <vector>

#include "mlcs/core/types.hpp"

// Fast transform kernels. All are unitary-normalized and operate in place
// unless stated otherwise. Two-dimensional data is row-major n×n.
namespace mlcs::kernels {

void dft_1d(std::span<cplx> x, bool inverse);
void dft_2d(std::span<cplx> x, Index n, bool inverse);

// Natural (Sylvester) order Walsh-Hadamard, unnormalized butterflies.
void fwht_natural_unscaled(std::span<cplx> x);

// Row s of the sequency-ordered matrix is natural row sequency_to_natural(s).
Index sequency_to_natural(Index s, unsigned log2n);

void fwht_sequency_1d(std::span<cplx> x, bool adjoint);
void fwht_sequency_2d(std::span<cplx> x, Index n, bool adjoint);

struct QmfPair {
  std::vector<double> lo;
  std::vector<double> hi;
};
QmfPair make_qmf(const std::vector<double>& lowpass);

// Periodic orthogonal DWT. 1D output: [approx, coarsest detail, ..., finest].
void dwt_1d_forward(std::span<const cplx> in, std::span<cplx> out, const QmfPair& f, int levels);
void dwt_1d_inverse(std::span<const cplx> in, std::span<cplx> out, const QmfPair& f, int levels);

// 2D output is scale ordered: approx block, then per scale coarse to fine the
// three detail subbands (horizontal-high, vertical-high, diagonal), each row-major.
void dwt_2d_forward(std::span<const cplx> in, std::span<cplx> out, Index n, const QmfPair& f, int levels);
void dwt_2d_inverse(std::span<const cplx> in, std::span<cplx> out, Index n, const QmfPair& f, int levels);

// Mallat pyramid layout <-> scale-ordered vector.
void pyramid_to_scale_order(std::span<const cplx> pyr, std::span<cplx> out, Index n, int levels);
void scale_order_to_pyramid(std::span<const cplx> in, std::span<cplx> pyr, Index n, int levels);

}  // namespace mlcs::kernels

// Straightforward serial versions, kept as test oracles and benchmark baselines.
namespace mlcs::reference {

CVec dft_1d(std::span<const cplx> x, bool inverse);
CVec dft_2d(std::span<const cplx> x, Index n, bool inverse);
CVec fwht_sequency_1d(std::span<const cplx> x);
CVec dwt_1d_forward(std::span<const cplx> x, const std::vector<double>& lowpass, int levels);
CVec dwt_2d_forward(std::span<const cplx> x, Index n, const std::vector<double>& lowpass, int levels);

}  // namespace mlcs::reference
