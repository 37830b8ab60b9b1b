#pragma once

#include <complex>

#include "kslab/grid.hpp"

namespace kslab::detail {

// Unnormalized d-dimensional complex DFTs over the full n^d array.
// Plans are created once per (d, n, direction) and reused; execution is
// reentrant, so concurrent callers only contend on first use.
void dft_forward(const GridSpec& g, const cplx* in, cplx* out);
void dft_backward(const GridSpec& g, const cplx* in, cplx* out);

}  // namespace kslab::detail
