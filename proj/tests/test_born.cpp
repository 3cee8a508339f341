#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>

#include "nlslab/born.hpp"
#include "nlslab/error.hpp"
#include "nlslab/spectral.hpp"
#include "nlslab/transforms.hpp"
#include "test_helpers.hpp"

using namespace nlslab;
using nlslab::testing::gaussian;
using nlslab::testing::rel_err;
using std::numbers::pi;

namespace {

QuadratureSpec quick() {
  QuadratureSpec q;
  q.T_max = 200.0;
  q.panels = 16;
  return q;
}

const double unit = std::pow(pi, -0.25);

}  // namespace

TEST_CASE("composite rule integrates polynomials and singular weights") {
  CHECK(integrate_scalar([](double t) { return std::pow(t, 19); }, 2.0, 4, 0.0) ==
        doctest::Approx(std::pow(2.0, 20) / 20).epsilon(1e-14));
  CHECK(integrate_scalar([](double) { return 1.0; }, 1.0, 8, -0.5) ==
        doctest::Approx(2.0).epsilon(1e-15));
  for (double a : {-0.5, -0.25, -0.75}) {
    const double g = integrate_scalar([](double t) { return std::exp(-t); }, 60.0, 32, a);
    CHECK(std::abs(g / std::tgamma(1 + a) - 1) < 1e-10);
    // ∫_0^3 t^a t² dt; t² is not polynomial in t^{1+a}, so this is not exact.
    const double p = integrate_scalar([](double t) { return t * t; }, 3.0, 8, a);
    CHECK(p == doctest::Approx(std::pow(3.0, 3 + a) / (3 + a)).epsilon(1e-9));
  }
  const auto panels = quadrature_panels(400.0, 8, 0.0, 1.0);
  REQUIRE(panels.size() == 8);
  CHECK(panels.back().back().t < 400.0);
  CHECK(panels.front().front().t > 0.0);
  CHECK_THROWS_AS(quadrature_panels(1.0, 2, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(quadrature_panels(1.0, 8, -1.0, 1.0), std::invalid_argument);
  CHECK(verify_singular_rule({-0.5, -0.25}).verdict());
}

TEST_CASE("nonlinear_flow") {
  const auto g = GridDescriptor::line(2048, 0.05);
  const ComplexField phi = gaussian(g);
  const ComplexField at0 = nonlinear_flow(phi, 0.0, 2.0);
  for (std::size_t j = 0; j < g.size(); ++j) {
    CHECK(std::abs(at0[j] - std::pow(std::abs(phi[j]), 4) * phi[j]) < 1e-15);
  }
  for (double t : {0.5, 2.0, 5.0}) {
    const ComplexField nf = nonlinear_flow(phi, t, 2.0);
    // ‖|U₀(t)φ|⁴U₀(t)φ‖ = (π/5)^{1/4} (1 + t²)^{-1} for φ = e^{−x²/2}.
    CHECK(l2_norm(nf) == doctest::Approx(std::pow(pi / 5, 0.25) / (1 + t * t)).epsilon(1e-10));
    CHECK(l2_norm(nf) <= std::pow(norms(free_propagate(phi, t)).linf, 4) * l2_norm(phi));
  }
}

TEST_CASE("factorized and literal integrands agree on a grid that holds both") {
  // 4096 × 0.05 holds U₀(±4)φ, and its dual holds U₀(±4)φ̂.
  const auto g = GridDescriptor::line(4096, 0.05);
  const ComplexField phi = gaussian(g, 0.8, 1.0, 0.4, 0.6);
  const ComplexField psi = as_position(forward_fourier(phi));
  for (double t : {3.0, -2.5}) {
    for (double sigma : {2.0, 1.5}) {
      CHECK(rel_err(born_integrand(phi, t, sigma, 0.5), born_integrand(phi, t, sigma, 10.0)) <
            1e-11);
      CHECK(rel_err(fourier_side_integrand(phi, t, sigma, 0.5),
                    fourier_side_integrand(phi, t, sigma, 10.0)) < 1e-11);
      CHECK(rel_err(free_side_integrand(psi, t, sigma, 0.5),
                    free_side_integrand(psi, t, sigma, 10.0)) < 1e-11);
    }
  }
  // The two sides differ pointwise; only their time integrals coincide.
  CHECK(rel_err(fourier_side_integrand(phi, 2.0, 2.0, 1.0),
                free_side_integrand(psi, 2.0, 2.0, 1.0)) > 0.1);
}

TEST_CASE("born_integral: zero, sign symmetry, refinement and horizon stability") {
  const auto g = GridDescriptor::line(1024, 0.0625);
  CHECK(l2_norm(born_integral(ComplexField(g, Space::position), Sign::plus, 2.0, quick()).field) ==
        0.0);

  const ComplexField phi = gaussian(g);
  const QuadratureResult plus = born_integral(phi, Sign::plus, 2.0, quick());
  const QuadratureResult minus = born_integral(phi, Sign::minus, 2.0, quick());
  // For real φ: I₋ = −conj(I₊).
  ComplexField mirrored = conjugate(plus.field);
  mirrored *= -1.0;
  CHECK(rel_err(minus.field, mirrored) < 1e-12);

  CHECK(plus.refinement_delta / l2_norm(plus.field) < 1e-6);
  QuadratureSpec longer = quick();
  longer.T_max *= 2;
  const QuadratureResult far = born_integral(phi, Sign::plus, 2.0, longer);
  CHECK(rel_err(far.field, plus.field) < 1e-6);
  CHECK(l2_distance(far.field, plus.field) < plus.tail_bound);
  CHECK(plus.tail_bound > 0.0);
}

TEST_CASE("born_integral preconditions") {
  const auto g = GridDescriptor::line(1024, 0.0625);
  CHECK_THROWS_AS(born_integral(gaussian(g), Sign::plus, 1.0, quick()), std::invalid_argument);
  // Too narrow a grid: U₀(1)φ reaches the edge.
  const auto narrow = GridDescriptor::line(64, 0.0625);
  CHECK_THROWS_AS(born_integral(gaussian(narrow), Sign::plus, 2.0, quick()), NumericalError);
  QuadratureSpec coarse = quick();
  coarse.panels = 4;
  coarse.max_refinement = 1e-14;
  CHECK_THROWS_AS(born_integral(gaussian(g), Sign::plus, 2.0, coarse), NumericalError);
}

TEST_CASE("parallel panels reproduce the sequential sum bit for bit") {
  const auto g = GridDescriptor::line(1024, 0.0625);
  const ComplexField phi = gaussian(g, 1.0, 1.0, 0.3, 0.2);
  QuadratureSpec seq = quick();
  QuadratureSpec par = quick();
  par.parallel = true;
  par.threads = 3;
  const QuadratureResult a = born_integral(phi, Sign::minus, 2.0, seq);
  const QuadratureResult b = born_integral(phi, Sign::minus, 2.0, par);
  CHECK(std::memcmp(a.field.values().data(), b.field.values().data(),
                    a.field.size() * sizeof(cplx)) == 0);
  CHECK(a.refinement_delta == b.refinement_delta);
}

TEST_CASE("Fourier-side and free-side integrals agree") {
  const auto g = GridDescriptor::line(1024, 0.0625);
  const SidePair zero = corollary2_sides(ComplexField(g, Space::position), Sign::plus, quick());
  CHECK(l2_norm(zero.lhs.field) == 0.0);
  CHECK(l2_norm(zero.rhs.field) == 0.0);
  const ComplexField phi = gaussian(g, 1.0, 1.0, 0.5, -0.3);
  for (Sign s : {Sign::plus, Sign::minus}) {
    const SidePair sp = corollary2_sides(phi, s, quick());
    CHECK(rel_err(sp.lhs.field, sp.rhs.field) < 1e-4);
  }
  const VerificationReport rep = verify_corollary2(gaussian(g), quick());
  for (const Check& c : rep.checks) {
    INFO(c.name << " = " << c.value);
    CHECK(c.pass());
  }
}

TEST_CASE("subcritical weighted identities") {
  const auto g = GridDescriptor::line(1024, 0.0625);
  const VerificationReport rep = verify_subcritical(gaussian(g), 1.5, quick());
  for (const Check& c : rep.checks) {
    INFO(c.name << " = " << c.value);
    CHECK(c.pass());
  }
  CHECK_THROWS_AS(subcritical_sides(gaussian(g), Sign::plus, 1, 2.0, quick()),
                  std::invalid_argument);
  CHECK_THROWS_AS(subcritical_sides(gaussian(g), Sign::plus, 1, 1.0, quick()),
                  std::invalid_argument);
}

TEST_CASE("first-order term of the wave operators") {
  const auto g = GridDescriptor::line(1024, 0.0625);
  const ComplexField phi = gaussian(g, unit);
  const NLSParams p = NLSParams::critical(1, 1.0);
  ScatteringConfig c;
  c.horizon = 50.0;
  c.near_dt = 2e-3;
  const double d = 0.2;
  ComplexField u = phi;
  u *= d;
  const QuadratureResult I = born_integral(phi, Sign::minus, 2.0, quick());
  const ComplexField w = wave_operator(u, Sign::minus, p, c).field;
  CHECK(l2_distance(w, u) == doctest::Approx(std::pow(d, 5) * l2_norm(I.field)).epsilon(1e-3));
  const ComplexField wi = inverse_wave_operator(u, Sign::minus, p, c).field;
  // The inverse carries the opposite first-order term.
  CHECK(l2_distance(wi - u, u - w) / l2_distance(w, u) < 1e-3);
}
