#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "nlslab/field.hpp"
#include "nlslab/report.hpp"
#include "nlslab/scattering.hpp"
#include "nlslab/sign.hpp"

namespace nlslab {

// Composite 10-point Gauss–Legendre rule on [0, T_max].
//
// Without a singular weight the panel breakpoints are graded,
//   t_k = τ((1 + T_max/τ)^{k/P} − 1),  τ = grading,
// so panels are short near 0 and long (but of fixed ratio) at large t. With a
// weight t^a, a ∈ (−1, 0), the segment [0, min(1, T_max)] is integrated in
// s = t^{1+a} (t^a dt = ds/(1+a)) on panels halving toward s = 0, and the
// rest is graded as above.
//
// The integral beyond T_max is estimated by fitting the weighted integrand at
// the last tail_terms breakpoints to t^{-p} Σ_j C_j t^{-j} and integrating the
// fit; p defaults to the theoretical decay exponent of each integrand.
struct QuadratureSpec {
  double T_max = 400.0;
  int panels = 32;
  double grading = 1.0;
  double singular_exponent = 0.0;  // a
  double tail_exponent_hint = std::numeric_limits<double>::quiet_NaN();
  int tail_terms = 3;
  bool tail = true;
  bool refine = true;            // also run 2·panels and report the difference
  double max_refinement = 1e-3;  // relative; larger differences throw
  // Integrands are evaluated literally for |t| ≤ switch_time and through the
  // factorization U₀(t) = M_t D_t F M_t beyond it.
  double switch_time = 1.0;
  bool parallel = false;
  unsigned threads = 0;  // 0: hardware concurrency (at least 2)
};

inline constexpr int kGaussNodes = 10;

struct QuadratureNode {
  double t = 0.0;
  double weight = 0.0;  // includes t^a
};

// Nodes of each panel, in ascending t.
std::vector<std::vector<QuadratureNode>> quadrature_panels(double T, int panels, double a,
                                                           double grading);

// ∫_0^T t^a f(t) dt with the panel layout above (no tail).
double integrate_scalar(const std::function<double(double)>& f, double T, int panels, double a,
                        double grading = 1.0);

struct QuadratureResult {
  ComplexField field;
  double refinement_delta = 0.0;  // ‖I(2P) − I(P)‖
  double tail_bound = 0.0;        // ‖estimated integral beyond T_max‖
  std::size_t evaluations = 0;
};

// ∫_0^{T_max} t^a f(t) dt + tail, for a field-valued f. The weighted integrand
// is assumed to decay like t^{-tail_exponent}. Panel partial sums are added in
// ascending order in both sequential and parallel mode.
QuadratureResult integrate_field(const std::function<ComplexField(double)>& f,
                                 const QuadratureSpec& q, double tail_exponent);

// |U₀(t)φ|^{2σ} U₀(t)φ
ComplexField nonlinear_flow(const ComplexField& phi, double t, double sigma);

// U₀(−t) G(U₀(t)φ).
ComplexField born_integrand(const ComplexField& phi, double t, double sigma, double switch_time);

// e^{it|x|²/2} F G(U₀(t)φ), returned on the dual grid as a function of x.
ComplexField fourier_side_integrand(const ComplexField& phi, double t, double sigma,
                                    double switch_time);

// U₀(t) G(U₀(−t)ψ), for ψ given on the dual grid (ψ = F φ as a function of x).
ComplexField free_side_integrand(const ComplexField& psi, double t, double sigma,
                                 double switch_time);

// I± = ∫_0^{±∞} U₀(−t) G(U₀(t)φ) dt (signed). Needs nσ > 1.
QuadratureResult born_integral(const ComplexField& phi, Sign sign, double sigma,
                               const QuadratureSpec& q);

struct SidePair {
  QuadratureResult lhs;
  QuadratureResult rhs;
};

// ∫_0^{±∞} e^{it|x|²/2} F G(U₀(t)φ) dt and ∫_0^{±∞} U₀(t) G(U₀(−t)φ̂) dt at σ = 2/n.
SidePair corollary2_sides(const ComplexField& phi, Sign sign, const QuadratureSpec& q);

// The two weighted identities for 1/n < σ < 2/n (n ≤ 2), weight |t|^{nσ−2}:
// first has the weight on the right-hand side, second on the left.
struct SubcriticalSides {
  SidePair first;
  SidePair second;
};

SubcriticalSides subcritical_sides(const ComplexField& phi, Sign sign, int n, double sigma,
                                   const QuadratureSpec& q);

VerificationReport verify_corollary2(const ComplexField& phi, const QuadratureSpec& q,
                                     double tolerance = 1e-4, double refinement_tol = 1e-6);

VerificationReport verify_subcritical(const ComplexField& phi, double sigma,
                                      const QuadratureSpec& q, double tolerance = 1e-4,
                                      double refinement_tol = 1e-6);

// Scalar checks of the singular-weight rule: ∫_0^1 t^a dt = 1/(1+a) and
// ∫_0^∞ t^a e^{−t} dt = Γ(1+a), for each a.
VerificationReport verify_singular_rule(const std::vector<double>& exponents,
                                        double tolerance = 1e-10);

// First-order expansion of W±, W±⁻¹ at data δφ against δ^{1+4/n} I±.
VerificationReport verify_proposition(const ComplexField& phi, const std::vector<double>& deltas,
                                      const NLSParams& p, const ScatteringConfig& cfg,
                                      const QuadratureSpec& q);

}  // namespace nlslab
