#pragma once

#include <vector>

#include "nlslab/field.hpp"
#include "nlslab/sign.hpp"

namespace nlslab {

struct GaugeParams {
  double lambda = 0.0;
  Sign sign = Sign::plus;
};

// A field together with the time it represents; Ψ couples the two.
struct SnapshotAtTime {
  ComplexField field;
  double time = 0.0;
};

// Pseudo-conformal transform. With t = −1/s.time the input is u(−1/t, ·) and
// the output is (Ψu)(t, ·) = M_t D_t u(−1/t, ·), on the grid dilated by |t|.
// Throws std::invalid_argument when s.time == 0.
SnapshotAtTime pseudo_conformal(const SnapshotAtTime& s);

// Same, but D_t u is resampled onto target before the (pointwise) M_t, so the
// result can be compared with fields living on target.
SnapshotAtTime pseudo_conformal(const SnapshotAtTime& s, const GridDescriptor& target);

// (R f)(x) = f(−x) on the centered periodic grid: index k ↦ (N − k) mod N.
ComplexField reflect(const ComplexField& f);

// Pointwise complex conjugate.
ComplexField conjugate(const ComplexField& f);

// ∫_{x0}^{x} |f|² by cumulative trapezoid from the left grid edge (1D).
std::vector<double> cumulative_mass(const ComplexField& f);

// N±^λ f = f · exp(±iλ ∫_{-∞}^x |f|²). One-dimensional position fields only;
// throws NumericalError when the boundary mass fraction exceeds 1e-6, since
// the left-infinite integral is then not represented on the grid.
ComplexField gauge(const ComplexField& f, const GaugeParams& g);

}  // namespace nlslab
