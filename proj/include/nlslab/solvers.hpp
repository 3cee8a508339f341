#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "nlslab/field.hpp"
#include "nlslab/transforms.hpp"

namespace nlslab {

// i ∂_t u + ½ Δu = μ |u|^{2σ} u
struct NLSParams {
  int dim = 1;
  double sigma = 2.0;
  double mu = 1.0;

  // σ = 2/n.
  static NLSParams critical(int dim, double mu) { return {dim, 2.0 / dim, mu}; }
};

// i ∂_t ψ + ½ ∂_x² ψ = i λ ∂_x(|ψ|²) ψ
struct DNLSParams {
  double lambda = 0.0;
};

struct StepControl {
  double dt = 1e-3;
  std::size_t max_steps = 10'000'000;
  double mass_drift_tol = 1e-8;
  double tail_tol = 1e-6;
  double boundary_tol = 1e-6;
};

struct HealthReport {
  double mass_drift = 0.0;  // |‖u(t1)‖² − ‖u0‖²| / ‖u0‖²
  double spectral_tail = 0.0;
  double boundary_mass = 0.0;
  std::size_t steps = 0;
  double dt_used = 0.0;
};

struct Evolution {
  ComplexField field;
  HealthReport health;
};

// Receives the state at t0, after every stride-th step, and at t1.
using Observer = std::function<void(const SnapshotAtTime&)>;

// One Strang step: half nonlinear phase, free flow over dt, half nonlinear phase.
ComplexField nls_step(const ComplexField& u, double dt, const NLSParams& p);

// Steps of size c.dt (signed by t1 − t0) plus one exact partial step. Throws
// std::invalid_argument if more than c.max_steps steps would be needed, and
// NumericalError("solvers") when the final state breaks a health monitor.
Evolution nls_evolve(const ComplexField& u0, double t0, double t1, const NLSParams& p,
                     const StepControl& c, const Observer& observer = {},
                     std::size_t stride = 1);

// Integrating-factor RK4 in the interaction picture. On a mass-drift violation
// the whole run is repeated with dt halved, at most four times.
Evolution dnls_evolve(const ComplexField& psi0, double t0, double t1, const DNLSParams& p,
                      const StepControl& c, const Observer& observer = {},
                      std::size_t stride = 1);

// Right-hand sides ∂_t u of the two equations.
ComplexField nls_rhs(const ComplexField& u, const NLSParams& p);
ComplexField dnls_rhs(const ComplexField& psi, const DNLSParams& p);

// max over interior snapshots of ‖(u_{i+1} − u_{i−1})/(2Δt) − rhs(u_i)‖.
// Needs at least three equispaced snapshots of one layout.
double residual(std::span<const SnapshotAtTime> trajectory, const NLSParams& p);
double residual(std::span<const SnapshotAtTime> trajectory, const DNLSParams& p);

}  // namespace nlslab
