#pragma once

#include "nlslab/field.hpp"

namespace nlslab {

// Continuum-convention transform
//   F f(ξ) = (2π)^{-n/2} ∫ f(x) e^{-ix·ξ} dx
// discretized on the centered grid; the result lives on grid.dual().
// Plancherel holds exactly: l2(F f) == l2(f) up to roundoff.
ComplexField forward_fourier(const ComplexField& f);
ComplexField inverse_fourier(const ComplexField& f);

// U₀(t) = e^{i t Δ/2}: spectral multiplier e^{-i t |ξ|²/2}. Exact for every t.
ComplexField free_propagate(const ComplexField& f, double t);

// U₀(t) with its multiplier precomputed for one grid; reused across time steps.
class FreeFlow {
 public:
  FreeFlow(const GridDescriptor& grid, double t);

  double time() const { return t_; }
  const GridDescriptor& grid() const { return grid_; }

  // f must be a position field on grid().
  void apply_in_place(ComplexField& f) const;
  ComplexField apply(ComplexField f) const {
    apply_in_place(f);
    return f;
  }

 private:
  GridDescriptor grid_;
  double t_ = 0.0;
  std::vector<cplx> multiplier_;  // e^{-it|ξ|²/2}/N in centered DFT order
};

// Spectral derivative along axis 0 of a position field (1D use: ∂_x).
ComplexField spectral_derivative(const ComplexField& f);
// Spectral Laplacian of a position field.
ComplexField spectral_laplacian(const ComplexField& f);

// M_t: multiplication by e^{i|x|²/(2t)}, using the field's own grid coordinates
// whatever its tag. Throws std::invalid_argument for t == 0.
ComplexField quadratic_phase(const ComplexField& f, double t);

// Multiplication by e^{i s |x|²/2}; equals quadratic_phase(f, 1/s) for s != 0 and
// the identity at s == 0.
ComplexField chirp(const ComplexField& f, double s);

// D_t f(x) = (it)^{-n/2} f(x/t), returned on the grid with spacing h|t|. The
// power uses the principal branch: (it)^{-n/2} = |t|^{-n/2} e^{-inπ/4·sign t}.
// For t < 0 the samples are reflected. Tag is preserved.
ComplexField dilate(const ComplexField& f, double t);

// (it)^{-n/2} with the principal branch.
cplx dilation_prefactor(int dim, double t);

// Band-limited (trigonometric) interpolation of a position field onto target.
// Points of target outside the source domain receive zero. Throws NumericalError
// when more than 1e-6 of the mass of f lies outside the interior 7/8 band of
// target (the part that would be truncated or land in target's monitored edge).
ComplexField resample(const ComplexField& f, const GridDescriptor& target);

// U₀(t) through the factorization M_t D_t F M_t. The result carries the
// dilated dual grid (spacing |t|·2π/(N h)); the outer M_t is applied pointwise.
ComplexField factorized_free_propagate(const ComplexField& f, double t);

// Same factorization, with D_t F M_t f resampled onto target before the outer
// M_t, so the result can be compared sample-by-sample with free_propagate.
ComplexField factorized_free_propagate(const ComplexField& f, double t,
                                       const GridDescriptor& target);

struct Norms {
  double l2 = 0.0;
  double h1_seminorm = 0.0;  // ‖|ξ| F f‖
  double weighted_x = 0.0;   // ‖|x| f‖
  double linf = 0.0;
};

// l2 = (hⁿ Σ|f|²)^{1/2} on the field's own grid. h1_seminorm transforms
// position fields; for frequency fields it uses the inverse transform's
// variable, so the four numbers always describe the sampled function.
Norms norms(const ComplexField& f);
double l2_norm(const ComplexField& f);
// ‖a − b‖ for fields of identical layout.
double l2_distance(const ComplexField& a, const ComplexField& b);

struct FieldDiagnostics {
  double l2 = 0.0;
  // Fractions of ‖f‖² carried where |ξ_a| ≥ 7/8 ξ_max (resp. |x_a| ≥ 7/8 of the
  // half-width) on any axis a.
  double spectral_tail_fraction = 0.0;
  double boundary_mass_fraction = 0.0;
};

FieldDiagnostics diagnostics(const ComplexField& f);

// Mass fraction of f (any tag) in the outer band |x_a| ≥ 7/8 of half-width.
double edge_mass_fraction(const ComplexField& f);

}  // namespace nlslab
