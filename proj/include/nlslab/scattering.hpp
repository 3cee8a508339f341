#pragma once

#include <vector>

#include "nlslab/field.hpp"
#include "nlslab/report.hpp"
#include "nlslab/sign.hpp"
#include "nlslab/solvers.hpp"

namespace nlslab {

enum class Initializer { free, born };

const char* to_string(Initializer i);

struct ScatteringConfig {
  double horizon = 200.0;
  double ladder_factor = 2.0;
  int rungs = 3;
  double tol = 1e-4;
  Initializer initializer = Initializer::born;
  // |t| ≤ switch_time is integrated with the split-step solver at step near_dt;
  // beyond it the interaction-picture profile is advanced by RK4 with steps
  // step_growth·|t|.
  double switch_time = 1.0;
  double near_dt = 1e-3;
  double step_growth = 0.02;
  double small_data = 0.5;  // largest admitted L² norm of the data
  bool strict = true;       // throw NumericalError when the ladder does not converge
};

struct LadderRung {
  double horizon = 0.0;
  double change = 0.0;  // L² distance to the result of the previous rung
};

struct ScatteringResult {
  ComplexField field;                    // result at the largest horizon
  std::vector<double> horizons;          // one per rung
  std::vector<ComplexField> rung_fields; // one per rung
  std::vector<LadderRung> horizon_ladder;  // from the second rung on
  bool converged = false;
  double fitted_rate = 0.0;  // q in change ∼ C T^{-q}; NaN when not fittable
  double tail_estimate = 0.0;
};

// Right-hand side of the interaction-picture equation for z(t) = U₀(−t)u(t),
//   z' = −iμ U₀(−t) G(U₀(t) z),  G(f) = |f|^{2σ} f,
// evaluated in the equivalent form −iμ |t|^{−nσ} M_{−t} F⁻¹ G(F M_t z), which
// needs no domain growth with t. t must be nonzero.
ComplexField interaction_rhs(const ComplexField& z, double t, const NLSParams& p);

// Classical RK4 on z from t_from to t_to (same sign, both nonzero) with
// geometrically growing steps.
ComplexField interaction_evolve(const ComplexField& z, double t_from, double t_to,
                                const NLSParams& p, double step_growth);

// u(0) = W± u± from the ladder of horizons T·factor^k.
ScatteringResult wave_operator(const ComplexField& u_pm, Sign sign, const NLSParams& p,
                               const ScatteringConfig& cfg);

// u± = W±⁻¹ u0 = lim U₀(∓T)u(±T). With the born initializer the leading
// algebraic tail beyond each horizon is added.
ScatteringResult inverse_wave_operator(const ComplexField& u0, Sign sign, const NLSParams& p,
                                       const ScatteringConfig& cfg);

VerificationReport ladder_report(const ScatteringResult& r, const std::string& name);

// F W±⁻¹ u0 against W∓ F u0, both signs, one residual per ladder rung.
VerificationReport verify_theorem1(const ComplexField& u0, const NLSParams& p,
                                   const ScatteringConfig& cfg, double tolerance = 1e-3);

// W±⁻¹ = (CF)⁻¹ W± (CF) and W± = C W∓ C, both signs.
VerificationReport verify_conjugation(const ComplexField& u0, const NLSParams& p,
                                      const ScatteringConfig& cfg, double tolerance = 1e-3);

struct LensFrameOptions {
  std::vector<double> decay_times{1.0, 2.0, 4.0, 8.0};
  // u is evolved to ±S and mapped by Ψ to v(∓1/S).
  std::vector<double> state_times{2.0, 4.0, 8.0};
};

VerificationReport verify_lemma23(const ComplexField& u0, const NLSParams& p,
                                  const ScatteringConfig& cfg, const LensFrameOptions& o = {});

}  // namespace nlslab
