#include "nlslab/solvers.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nlslab/error.hpp"
#include "nlslab/spectral.hpp"

namespace nlslab {

namespace {

double mass(const ComplexField& f) {
  const double n = l2_norm(f);
  return n * n;
}

void nonlinear_phase(ComplexField& u, double dt, const NLSParams& p) {
  if (p.mu == 0.0) return;
  for (cplx& z : u.values()) {
    const double a2 = std::norm(z);
    z *= std::polar(1.0, -p.mu * std::pow(a2, p.sigma) * dt);
  }
}

std::size_t step_count(double t0, double t1, double dt, std::size_t max_steps) {
  if (!(dt > 0.0)) throw std::invalid_argument("solvers: dt must be positive");
  const double span = std::abs(t1 - t0);
  const double full = std::floor(span / dt);
  if (full > static_cast<double>(max_steps)) {
    throw std::invalid_argument("solvers: horizon needs more than max_steps steps");
  }
  return static_cast<std::size_t>(full);
}

HealthReport assess(const ComplexField& u, double m0, const StepControl& c, std::size_t steps,
                    double dt, const char* what) {
  HealthReport h;
  h.steps = steps;
  h.dt_used = dt;
  const FieldDiagnostics d = diagnostics(u);
  h.mass_drift = m0 > 0.0 ? std::abs(d.l2 * d.l2 - m0) / m0 : 0.0;
  h.spectral_tail = d.spectral_tail_fraction;
  h.boundary_mass = d.boundary_mass_fraction;
  std::ostringstream msg;
  if (!u.all_finite()) {
    msg << what << ": non-finite samples";
  } else if (h.mass_drift > c.mass_drift_tol) {
    msg << what << ": mass drift " << h.mass_drift << " exceeds " << c.mass_drift_tol;
  } else if (h.spectral_tail > c.tail_tol) {
    msg << what << ": spectral tail fraction " << h.spectral_tail << " exceeds " << c.tail_tol;
  } else if (h.boundary_mass > c.boundary_tol) {
    msg << what << ": boundary mass fraction " << h.boundary_mass << " exceeds "
        << c.boundary_tol;
  } else {
    return h;
  }
  throw NumericalError("solvers", msg.str());
}

// ∂_x(|ψ|²) ψ
ComplexField dnls_nonlinearity(const ComplexField& psi, double lambda) {
  ComplexField rho(psi.grid(), Space::position);
  for (std::size_t j = 0; j < psi.size(); ++j) rho[j] = std::norm(psi[j]);
  ComplexField out = spectral_derivative(rho);
  for (std::size_t j = 0; j < psi.size(); ++j) out[j] = lambda * out[j].real() * psi[j];
  return out;
}

// One Lawson RK4 step of size h; half and full are U₀(h/2).
ComplexField lawson_rk4(const ComplexField& psi, double h, double lambda, const FreeFlow& half) {
  ComplexField a = half.apply(psi);
  ComplexField k1 = half.apply(dnls_nonlinearity(psi, lambda));
  ComplexField k2 = dnls_nonlinearity(ComplexField(a).axpy(0.5 * h, k1), lambda);
  ComplexField k3 = dnls_nonlinearity(ComplexField(a).axpy(0.5 * h, k2), lambda);
  ComplexField k4 = dnls_nonlinearity(half.apply(ComplexField(a).axpy(h, k3)), lambda);
  a.axpy(h / 6.0, k1).axpy(h / 3.0, k2).axpy(h / 3.0, k3);
  half.apply_in_place(a);
  a.axpy(h / 6.0, k4);
  return a;
}

template <class Step>
ComplexField march(const ComplexField& u0, double t0, double t1, double dt, std::size_t n,
                   const Observer& observer, std::size_t stride, Step&& step) {
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  ComplexField u = u0;
  if (observer) observer({u, t0});
  for (std::size_t k = 1; k <= n; ++k) {
    u = step(u, dir * dt, false);
    if (observer && k % stride == 0 && (k < n || t0 + dir * n * dt != t1)) {
      observer({u, t0 + dir * static_cast<double>(k) * dt});
    }
  }
  const double rest = t1 - (t0 + dir * static_cast<double>(n) * dt);
  if (rest != 0.0) u = step(u, rest, true);
  if (observer) observer({u, t1});
  return u;
}

void require_position(const ComplexField& f, const char* op) {
  if (f.space() != Space::position) {
    throw std::invalid_argument(std::string("solvers: ") + op + " expects a position field");
  }
}

}  // namespace

ComplexField nls_step(const ComplexField& u, double dt, const NLSParams& p) {
  require_position(u, "nls_step");
  ComplexField out = u;
  nonlinear_phase(out, 0.5 * dt, p);
  out = free_propagate(out, dt);
  nonlinear_phase(out, 0.5 * dt, p);
  return out;
}

Evolution nls_evolve(const ComplexField& u0, double t0, double t1, const NLSParams& p,
                     const StepControl& c, const Observer& observer, std::size_t stride) {
  require_position(u0, "nls_evolve");
  if (stride == 0) throw std::invalid_argument("solvers: stride must be positive");
  const std::size_t n = step_count(t0, t1, c.dt, c.max_steps);
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  const FreeFlow flow(u0.grid(), dir * c.dt);
  auto step = [&](const ComplexField& u, double h, bool partial) {
    ComplexField out = u;
    nonlinear_phase(out, 0.5 * h, p);
    if (partial) {
      FreeFlow(u.grid(), h).apply_in_place(out);
    } else {
      flow.apply_in_place(out);
    }
    nonlinear_phase(out, 0.5 * h, p);
    return out;
  };
  ComplexField u = march(u0, t0, t1, c.dt, n, observer, stride, step);
  HealthReport h = assess(u, mass(u0), c, n, c.dt, "nls_evolve");
  return {std::move(u), h};
}

Evolution dnls_evolve(const ComplexField& psi0, double t0, double t1, const DNLSParams& p,
                      const StepControl& c, const Observer& observer, std::size_t stride) {
  require_position(psi0, "dnls_evolve");
  if (psi0.grid().dim() != 1) throw std::invalid_argument("solvers: dnls_evolve is 1D only");
  if (stride == 0) throw std::invalid_argument("solvers: stride must be positive");
  const double m0 = mass(psi0);
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  double dt = c.dt;
  for (int attempt = 0;; ++attempt) {
    const std::size_t n = step_count(t0, t1, dt, c.max_steps);
    const FreeFlow half(psi0.grid(), 0.5 * dir * dt);
    auto step = [&](const ComplexField& psi, double h, bool partial) {
      if (partial) return lawson_rk4(psi, h, p.lambda, FreeFlow(psi.grid(), 0.5 * h));
      return lawson_rk4(psi, h, p.lambda, half);
    };
    // The observer only sees the accepted attempt.
    std::vector<SnapshotAtTime> seen;
    Observer record;
    if (observer) record = [&](const SnapshotAtTime& s) { seen.push_back(s); };
    ComplexField psi = march(psi0, t0, t1, dt, n, record, stride, step);
    const bool drifted =
        !psi.all_finite() || (m0 > 0.0 && std::abs(mass(psi) - m0) / m0 > c.mass_drift_tol);
    if (drifted && attempt < 4) {
      dt *= 0.5;
      continue;
    }
    HealthReport h = assess(psi, m0, c, n, dt, "dnls_evolve");
    for (const SnapshotAtTime& s : seen) observer(s);
    return {std::move(psi), h};
  }
}

ComplexField nls_rhs(const ComplexField& u, const NLSParams& p) {
  require_position(u, "nls_rhs");
  ComplexField out = spectral_laplacian(u);
  for (std::size_t j = 0; j < u.size(); ++j) {
    const cplx nl = p.mu * std::pow(std::norm(u[j]), p.sigma) * u[j];
    out[j] = cplx(0.0, 1.0) * (0.5 * out[j] - nl);
  }
  return out;
}

ComplexField dnls_rhs(const ComplexField& psi, const DNLSParams& p) {
  require_position(psi, "dnls_rhs");
  ComplexField out = dnls_nonlinearity(psi, p.lambda);
  out.axpy(cplx(0.0, 0.5), spectral_laplacian(psi));
  return out;
}

namespace {

template <class Rhs>
double residual_impl(std::span<const SnapshotAtTime> tr, Rhs&& rhs) {
  if (tr.size() < 3) throw std::invalid_argument("solvers: residual needs at least 3 snapshots");
  const double step = tr[1].time - tr[0].time;
  if (step == 0.0) throw std::invalid_argument("solvers: residual needs distinct times");
  for (std::size_t i = 1; i < tr.size(); ++i) {
    if (std::abs((tr[i].time - tr[i - 1].time) - step) > 1e-9 * std::abs(step)) {
      throw std::invalid_argument("solvers: residual needs equispaced snapshots");
    }
    if (!tr[i].field.same_layout(tr[0].field)) {
      throw std::invalid_argument("solvers: residual snapshots differ in layout");
    }
  }
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < tr.size(); ++i) {
    ComplexField d = tr[i + 1].field - tr[i - 1].field;
    d *= 1.0 / (2.0 * step);
    d -= rhs(tr[i].field);
    worst = std::max(worst, l2_norm(d));
  }
  return worst;
}

}  // namespace

double residual(std::span<const SnapshotAtTime> trajectory, const NLSParams& p) {
  return residual_impl(trajectory, [&](const ComplexField& u) { return nls_rhs(u, p); });
}

double residual(std::span<const SnapshotAtTime> trajectory, const DNLSParams& p) {
  return residual_impl(trajectory, [&](const ComplexField& u) { return dnls_rhs(u, p); });
}

}  // namespace nlslab
