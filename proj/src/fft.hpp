#pragma once

#include <cstddef>
#include <span>

#include "nlslab/field.hpp"

namespace nlslab::detail {

enum class Direction { forward = -1, backward = +1 };

// Unnormalized in-place DFT, Σ_j a_j e^{∓2πi jk/N}, over a row-major array of
// shape counts[0] x counts[1] (dim 2) or counts[0] (dim 1). Reentrant.
void dft(std::span<cplx> data, int dim, std::size_t n0, std::size_t n1, Direction dir);

inline void dft(std::span<cplx> data, const GridDescriptor& g, Direction dir) {
  dft(data, g.dim(), g.axis(0).count, g.dim() == 2 ? g.axis(1).count : 1, dir);
}

}  // namespace nlslab::detail
