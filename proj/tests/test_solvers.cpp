#include <doctest.h>

#include <cmath>
#include <vector>

#include "nlslab/error.hpp"
#include "nlslab/solvers.hpp"
#include "nlslab/spectral.hpp"
#include "nlslab/transforms.hpp"
#include "test_helpers.hpp"

using namespace nlslab;
using nlslab::testing::gaussian;
using nlslab::testing::random_smooth;
using nlslab::testing::rel_err;

namespace {

ComplexField sech(const GridDescriptor& g, double a, double k0 = 0.0) {
  return ComplexField::sample(g, Space::position, [=](std::span<const double> x) {
    return a / std::cosh(x[0]) * std::polar(1.0, k0 * x[0]);
  });
}

double mass(const ComplexField& f) { return std::pow(l2_norm(f), 2); }

}  // namespace

TEST_CASE("nls_step linear limit and uniform-state oracle") {
  const auto g = GridDescriptor::line(256, 0.1);
  const ComplexField u = random_smooth(g, 3);
  CHECK(rel_err(nls_step(u, 0.37, {1, 2.0, 0.0}), free_propagate(u, 0.37)) == 0.0);

  // u ≡ c solves u' = −iμ|c|^{2σ}u exactly on the periodic grid.
  const cplx c(0.6, -0.3);
  const ComplexField flat(g, std::vector<cplx>(g.size(), c), Space::position);
  for (auto [sigma, mu] : {std::pair{2.0, 1.0}, std::pair{1.0, -1.0}, std::pair{1.5, 0.5}}) {
    const double dt = 0.05;
    const cplx exact = c * std::polar(1.0, -mu * std::pow(std::norm(c), sigma) * dt);
    const ComplexField stepped = nls_step(flat, dt, {1, sigma, mu});
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(std::abs(stepped[j] - exact) < 1e-14);
  }

  const ComplexField v = nls_step(u, 0.01, {1, 2.0, 1.0});
  CHECK(mass(v) == doctest::Approx(mass(u)).epsilon(1e-14));
}

TEST_CASE("nls_evolve: linear limit, reversibility, observer and step budget") {
  const auto g = GridDescriptor::line(512, 0.1);
  const ComplexField u0 = gaussian(g, 0.5);
  StepControl c;
  c.dt = 0.013;
  const Evolution free = nls_evolve(u0, 0.0, 1.0, {1, 2.0, 0.0}, c);
  CHECK(rel_err(free.field, free_propagate(u0, 1.0)) < 1e-12);
  CHECK(free.health.steps == 76);

  std::vector<double> times;
  const NLSParams p{1, 2.0, 1.0};
  const Evolution fwd = nls_evolve(u0, 0.0, 1.0, p, c,
                                   [&](const SnapshotAtTime& s) { times.push_back(s.time); }, 10);
  CHECK(times.front() == 0.0);
  CHECK(times.back() == 1.0);
  CHECK(times.size() == 9);
  CHECK(fwd.health.mass_drift < 1e-12);

  // The final partial step breaks exact symmetry, so reversal is only O(dt²).
  const Evolution back = nls_evolve(fwd.field, 1.0, 0.0, p, c);
  CHECK(rel_err(back.field, u0) < 1e-3);
  c.dt = 0.01;
  const Evolution fwd2 = nls_evolve(u0, 0.0, 1.0, p, c);
  CHECK(rel_err(nls_evolve(fwd2.field, 1.0, 0.0, p, c).field, u0) < 1e-12);

  c.max_steps = 50;
  CHECK_THROWS_AS(nls_evolve(u0, 0.0, 1.0, p, c), std::invalid_argument);
}

TEST_CASE("nls_evolve health monitor aborts on boundary mass") {
  const auto g = GridDescriptor::line(128, 0.1);
  StepControl c;
  c.dt = 0.01;
  CHECK_THROWS_AS(nls_evolve(gaussian(g, 0.5), 0.0, 10.0, {1, 2.0, 1.0}, c), NumericalError);
}

TEST_CASE("split-step mass drift over 10^4 steps") {
  const auto g = GridDescriptor::line(1024, 0.05);
  const ComplexField u0 = gaussian(g, 0.8, 1.0, 0.0, 0.5);
  StepControl c;
  c.dt = 1e-4;
  const Evolution e = nls_evolve(u0, 0.0, 1.0, {1, 2.0, 1.0}, c);
  CHECK(e.health.steps == 10000);
  CHECK(e.health.mass_drift < 1e-11);
}

TEST_CASE("split-step is second order") {
  const auto g = GridDescriptor::line(512, 0.08);
  const ComplexField u0 = gaussian(g, 0.8);
  const NLSParams p{1, 2.0, 1.0};
  auto run = [&](double dt) {
    StepControl c;
    c.dt = dt;
    return nls_evolve(u0, 0.0, 1.0, p, c).field;
  };
  const double dt = 0.02;
  const ComplexField ref = run(dt / 64);
  const double e1 = l2_distance(run(dt), ref);
  const double e2 = l2_distance(run(dt / 2), ref);
  MESSAGE("split-step errors " << e1 << " " << e2);
  CHECK(e1 / e2 >= 3.5);
  CHECK(e1 / e2 <= 4.5);
}

TEST_CASE("DNLS: linear limit, mass conservation, fourth order") {
  const auto g = GridDescriptor::line(2048, 0.025);
  StepControl c;
  c.dt = 0.01;
  const ComplexField s = sech(g, 0.3);
  CHECK(rel_err(dnls_evolve(s, 0.0, 1.0, {0.0}, c).field, free_propagate(s, 1.0)) < 1e-12);

  c.dt = 1e-3;
  const Evolution e = dnls_evolve(s, 0.0, 1.0, {1.0}, c);
  CHECK(e.health.mass_drift < 1e-8);
  CHECK(e.health.dt_used == 1e-3);

  const ComplexField psi0 = sech(g, 1.0, 1.0);
  auto run = [&](double dt) {
    StepControl cc;
    cc.dt = dt;
    // Loose drift monitor so that no automatic halving masks the step size.
    cc.mass_drift_tol = 1e-3;
    const Evolution ev = dnls_evolve(psi0, 0.0, 1.0, {1.0}, cc);
    CHECK(ev.health.dt_used == dt);
    return ev.field;
  };
  // Explicit RK4 sees λ|ψ|²ξ_max ≈ 125 from the derivative term; dt·125 stays
  // inside its stability region.
  const double dt = 0.01;
  const ComplexField ref = run(dt / 16);
  const double e1 = l2_distance(run(dt), ref);
  const double e2 = l2_distance(run(dt / 2), ref);
  MESSAGE("rk4 errors " << e1 << " " << e2);
  CHECK(e1 / e2 >= 12.0);
  CHECK(e1 / e2 <= 20.0);
  CHECK_THROWS_AS(dnls_evolve(gaussian(GridDescriptor::square(16, 0.5)), 0.0, 1.0, {1.0}, c),
                  std::invalid_argument);
}

TEST_CASE("gauge transform maps the quintic equation onto DNLS and back") {
  const auto g = GridDescriptor::line(2048, 0.025);
  const double lambda = 1.0;
  const NLSParams quintic{1, 2.0, 0.5 * lambda * lambda};
  const ComplexField u0 = sech(g, 0.3);
  StepControl c;
  c.dt = 1e-3;
  std::vector<SnapshotAtTime> us, psis;
  nls_evolve(u0, 0.0, 1.0, quintic, c, [&](const SnapshotAtTime& s) { us.push_back(s); }, 250);
  dnls_evolve(gauge(u0, {lambda, Sign::plus}), 0.0, 1.0, {lambda}, c,
              [&](const SnapshotAtTime& s) { psis.push_back(s); }, 250);
  REQUIRE(us.size() == 5);
  REQUIRE(psis.size() == 5);
  for (std::size_t i = 0; i < us.size(); ++i) {
    CHECK(rel_err(gauge(us[i].field, {lambda, Sign::plus}), psis[i].field) < 1e-5);
    CHECK(rel_err(gauge(psis[i].field, {lambda, Sign::minus}), us[i].field) < 1e-5);
  }
}

TEST_CASE("critical scaling symmetry with Lambda = 2") {
  // v(t, x) = Λ^{1/2} u(Λ² t, Λ x); on the grid with spacing h/Λ the samples of
  // v0 are those of u0 times Λ^{1/2}.
  const double lam = 2.0;
  const auto g = GridDescriptor::line(512, 0.08);
  const auto gs = GridDescriptor::line(512, 0.08 / lam);
  const ComplexField u0 = gaussian(g, 0.7, 1.0, 0.0, 0.4);
  ComplexField v0(gs, std::vector<cplx>(u0.values().begin(), u0.values().end()), Space::position);
  v0 *= std::sqrt(lam);
  const NLSParams p = NLSParams::critical(1, 1.0);
  StepControl cu, cv;
  cu.dt = 1e-3;
  cv.dt = cu.dt / (lam * lam);
  const ComplexField u = nls_evolve(u0, 0.0, 1.0, p, cu).field;
  const ComplexField v = nls_evolve(v0, 0.0, 1.0 / (lam * lam), p, cv).field;
  ComplexField expected(gs, std::vector<cplx>(u.values().begin(), u.values().end()),
                        Space::position);
  expected *= std::sqrt(lam);
  CHECK(rel_err(v, expected) < 1e-10);
}

TEST_CASE("residual") {
  const auto g = GridDescriptor::line(64, 0.2);
  const cplx c(0.6, 0.2);
  const NLSParams p{1, 2.0, 1.0};
  const double omega = p.mu * std::pow(std::norm(c), p.sigma);
  const double dt = 0.01;
  std::vector<SnapshotAtTime> tr;
  for (int i = 0; i < 5; ++i) {
    const double t = i * dt;
    tr.push_back({ComplexField(g, std::vector<cplx>(g.size(), c * std::polar(1.0, -omega * t)),
                               Space::position),
                  t});
  }
  // Central difference of e^{−iωt}: error |c| ω³ dt²/6 pointwise.
  const double differencing = std::abs(c) * std::pow(omega, 3) * dt * dt / 6 *
                              std::sqrt(g.axis(0).length());
  CHECK(residual(tr, p) == doctest::Approx(differencing).epsilon(1e-3));
  CHECK(residual(tr, NLSParams{1, 2.0, 1.5}) > 0.1 * omega * l2_norm(tr[0].field));

  const auto gw = GridDescriptor::line(512, 0.05);
  std::vector<SnapshotAtTime> free;
  for (int i = 0; i < 4; ++i) free.push_back({free_propagate(gaussian(gw), 0.01 * i), 0.01 * i});
  CHECK(residual(free, NLSParams{1, 2.0, 0.0}) < 1e-4);
  CHECK(residual(free, NLSParams{1, 2.0, 1.0}) > 0.1);

  CHECK_THROWS_AS(residual(std::span(free).first(2), NLSParams{}), std::invalid_argument);
  free[2].time = 0.5;
  CHECK_THROWS_AS(residual(free, NLSParams{}), std::invalid_argument);
}

TEST_CASE("residual of a DNLS trajectory") {
  const auto g = GridDescriptor::line(1024, 0.05);
  StepControl c;
  c.dt = 1e-3;
  std::vector<SnapshotAtTime> tr;
  dnls_evolve(sech(g, 0.5), 0.0, 0.05, {1.0}, c, [&](const SnapshotAtTime& s) { tr.push_back(s); },
              10);
  REQUIRE(tr.size() == 6);
  CHECK(residual(tr, DNLSParams{1.0}) < 1e-4);
  CHECK(residual(tr, DNLSParams{-1.0}) > 1e-2);
}
