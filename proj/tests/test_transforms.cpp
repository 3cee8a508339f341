#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nlslab/error.hpp"
#include "nlslab/spectral.hpp"
#include "nlslab/transforms.hpp"
#include "test_helpers.hpp"

using namespace nlslab;
using nlslab::testing::gaussian;
using nlslab::testing::random_smooth;
using nlslab::testing::rel_err;
using std::numbers::pi;

TEST_CASE("pseudo_conformal twice is the reflection, for both time signs") {
  const auto g = GridDescriptor::line(512, 0.05);
  const ComplexField u = gaussian(g, 0.8, 1.0, 0.7, 0.5);
  for (double tau : {0.3, -0.4, 2.5}) {
    const SnapshotAtTime once = pseudo_conformal({u, tau});
    CHECK(once.time == doctest::Approx(-1.0 / tau));
    CHECK(l2_norm(once.field) == doctest::Approx(l2_norm(u)).epsilon(1e-13));
    const SnapshotAtTime twice = pseudo_conformal(once);
    CHECK(twice.time == doctest::Approx(tau));
    CHECK(twice.field.grid() == g);
    CHECK(l2_distance(twice.field, reflect(u)) < 1e-6 * l2_norm(u));
  }
  CHECK_THROWS_AS(pseudo_conformal({u, 0.0}), std::invalid_argument);
}

TEST_CASE("pseudo_conformal in two dimensions squares to the reflection") {
  const auto g = GridDescriptor::square(64, 0.25);
  const ComplexField u = gaussian(g, 1.0, 1.0, 0.5, 0.3);
  const SnapshotAtTime twice = pseudo_conformal(pseudo_conformal({u, -0.7}));
  CHECK(l2_distance(twice.field, reflect(u)) < 1e-12);
}

TEST_CASE("Psi maps the free Gaussian solution onto U0(t) F^{-1} phi") {
  // u(s) = U₀(s) φ is the free solution; the snapshot u(−1/t) is taken from
  // the analytic Gaussian formula, not from the propagator. For a free
  // solution the identity is exact, so only roundoff remains.
  const auto small = GridDescriptor::line(256, 0.1);
  const auto big = GridDescriptor::line(2048, 0.15625);
  const ComplexField phi_hat = as_frequency(gaussian(big.dual()));
  for (double t : {5.0, 10.0, 20.0}) {
    const double s = -1.0 / t;
    const ComplexField u_s = ComplexField::sample(small, Space::position,
        [s](std::span<const double> x) {
          const cplx z(1.0, s);
          return std::exp(-x[0] * x[0] / (2.0 * z)) / std::sqrt(z);
        });
    const SnapshotAtTime v = pseudo_conformal({u_s, s}, big);
    CHECK(v.time == doctest::Approx(t));
    const ComplexField reference = free_propagate(inverse_fourier(phi_hat), t);
    CHECK(l2_distance(v.field, reference) < 1e-10);
  }
}

TEST_CASE("Psi of frozen data approaches U0(t) F^{-1} phi like 1/t") {
  // Same Gaussian, but the snapshot is φ itself at every time, so the error
  // is ‖(M_{-1/t} − 1)φ‖-like and should halve per doubling of t.
  const auto small = GridDescriptor::line(256, 0.1);
  const auto big = GridDescriptor::line(8192, 0.15625);
  const ComplexField phi = gaussian(small);
  const ComplexField phi_hat = as_frequency(gaussian(big.dual()));
  std::vector<double> ts{10.0, 20.0, 40.0, 80.0}, errs;
  for (double t : ts) {
    const SnapshotAtTime v = pseudo_conformal({phi, -1.0 / t}, big);
    errs.push_back(l2_distance(v.field, free_propagate(inverse_fourier(phi_hat), t)));
  }
  for (std::size_t i = 1; i < errs.size(); ++i) {
    CHECK(errs[i] < errs[i - 1]);
    CHECK(errs[i - 1] / errs[i] == doctest::Approx(2.0).epsilon(0.05));
  }
  // Leading term: ‖(e^{i x²/(2t)} − 1) e^{−x²/2}‖ ≈ ‖x² e^{−x²/2}‖/(2t) = (3√π/4)^{1/2}/(2t).
  CHECK(errs[3] == doctest::Approx(std::sqrt(3 * std::sqrt(pi) / 4) / 160).epsilon(0.02));
}

TEST_CASE("reflect") {
  const auto g = GridDescriptor::line(128, 0.1);
  const ComplexField r = random_smooth(g, 1);
  CHECK(rel_err(reflect(reflect(r)), r) == 0.0);
  const ComplexField even = gaussian(g);
  // x_{N-j} and −x_j are computed separately and can differ in the last bit.
  CHECK(rel_err(reflect(even), even) < 1e-14);
  const auto wide = GridDescriptor::line(256, 0.1);
  const ComplexField odd = ComplexField::sample(wide, Space::position, [](std::span<const double> x) {
    return cplx(x[0] * std::exp(-x[0] * x[0] / 2));
  });
  ComplexField minus = odd;
  minus *= -1.0;
  // The unpaired left-edge sample maps to itself; it is ~1e-35 here.
  CHECK(l2_distance(reflect(odd), minus) < 1e-15);
}

TEST_CASE("conjugate and its Fourier symmetry") {
  const auto g = GridDescriptor::line(128, 0.15);
  const ComplexField real = gaussian(g);
  CHECK(rel_err(conjugate(real), real) == 0.0);
  ComplexField r = random_smooth(g, 8);
  const ComplexField envelope = gaussian(g, 1.0, 2.0);
  for (std::size_t j = 0; j < r.size(); ++j) r[j] *= envelope[j];
  CHECK(rel_err(conjugate(conjugate(r)), r) == 0.0);
  CHECK(l2_norm(conjugate(r)) == doctest::Approx(l2_norm(r)));

  const ComplexField lhs = forward_fourier(conjugate(r));
  const ComplexField rhs = conjugate(forward_fourier(reflect(r)));
  CHECK(rel_err(lhs, rhs) < 1e-13);

  // Direct summation of F(C r).
  const Axis ax = g.axis(0);
  const ComplexField direct = ComplexField::sample(g.dual(), Space::frequency,
      [&](std::span<const double> xi) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < ax.count; ++j) {
          acc += std::conj(r[j]) * std::polar(1.0, -ax.coordinate(j) * xi[0]);
        }
        return acc * ax.spacing / std::sqrt(2 * pi);
      });
  CHECK(rel_err(lhs, direct) < 1e-12);
}

TEST_CASE("gauge") {
  const auto g = GridDescriptor::line(2048, 0.025);
  const ComplexField f = ComplexField::sample(g, Space::position, [](std::span<const double> x) {
    return cplx(0.5 / std::cosh(x[0]), 0.1 * std::tanh(x[0]) / std::cosh(x[0]));
  });
  CHECK(rel_err(gauge(f, {0.0, Sign::plus}), f) == 0.0);

  const ComplexField roundtrip = gauge(gauge(f, {1.3, Sign::minus}), {1.3, Sign::plus});
  CHECK(rel_err(roundtrip, f) < 1e-12);

  const ComplexField plus = gauge(f, {0.7, Sign::plus});
  for (std::size_t j = 0; j < f.size(); ++j) CHECK(std::abs(plus[j]) == doctest::Approx(std::abs(f[j])));
  CHECK(l2_norm(plus) == doctest::Approx(l2_norm(f)).epsilon(1e-14));

  // f = sech(x)/2, λ = 1: phase accumulated across the grid is ‖f‖² = ∫sech²/4 = 0.5.
  const ComplexField s = ComplexField::sample(g, Space::position, [](std::span<const double> x) {
    return cplx(0.5 / std::cosh(x[0]));
  });
  const std::vector<double> p = cumulative_mass(s);
  CHECK(p.back() == doctest::Approx(0.5).epsilon(1e-6));
  const ComplexField twisted = gauge(s, {1.0, Sign::plus});
  CHECK(std::arg(twisted[s.size() - 1] / s[s.size() - 1]) == doctest::Approx(0.5).epsilon(1e-6));

  CHECK_THROWS_AS(gauge(gaussian(GridDescriptor::square(16, 0.5)), {1.0, Sign::plus}),
                  std::invalid_argument);
  CHECK_THROWS_AS(gauge(gaussian(g, 1.0, 1.0, 24.0), {1.0, Sign::plus}), NumericalError);
}

TEST_CASE("cumulative trapezoid converges at second order") {
  // Exact: ∫_{x0}^{x} sech²/4 = (tanh x − tanh x0)/4, at x = 0.9375, a node of both grids.
  auto err_at = [](double h) {
    const std::size_t n = static_cast<std::size_t>(std::llround(40.0 / h));
    const auto g = GridDescriptor::line(n, h);
    const ComplexField s = ComplexField::sample(g, Space::position, [](std::span<const double> x) {
      return cplx(0.5 / std::cosh(x[0]));
    });
    const std::vector<double> p = cumulative_mass(s);
    const std::size_t j = static_cast<std::size_t>(std::llround((0.9375 - g.axis(0).left()) / h));
    const double exact = (std::tanh(g.axis(0).coordinate(j)) - std::tanh(g.axis(0).left())) / 4;
    return std::abs(p[j] - exact);
  };
  const double e1 = err_at(40.0 / 256);
  const double e2 = err_at(40.0 / 512);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}
