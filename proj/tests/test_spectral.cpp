#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>

#include "nlslab/error.hpp"
#include "nlslab/snapshot_io.hpp"
#include "nlslab/spectral.hpp"
#include "test_helpers.hpp"

using namespace nlslab;
using nlslab::testing::gaussian;
using nlslab::testing::random_smooth;
using nlslab::testing::rel_err;
using std::numbers::pi;

namespace {

// Continuum transform by brute-force trapezoidal summation on a grid `refine`
// times finer than g, evaluated at the points of g.dual().
ComplexField direct_fourier(const std::function<cplx(double)>& f, const GridDescriptor& g,
                            int refine) {
  const Axis fine{g.axis(0).count * static_cast<std::size_t>(refine),
                  g.axis(0).spacing / refine};
  return ComplexField::sample(g.dual(), Space::frequency, [&](std::span<const double> xi) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < fine.count; ++j) {
      const double x = fine.coordinate(j);
      acc += f(x) * std::polar(1.0, -x * xi[0]);
    }
    return acc * fine.spacing / std::sqrt(2.0 * pi);
  });
}

}  // namespace

TEST_CASE("grid validation and dual grid") {
  CHECK_THROWS_AS(GridDescriptor::line(100, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(GridDescriptor::line(4, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(GridDescriptor::line(64, -1.0), std::invalid_argument);
  const auto g = GridDescriptor::line(256, 0.1);
  CHECK(g.axis(0).left() == doctest::Approx(-12.8));
  CHECK(g.dual().axis(0).spacing == doctest::Approx(2 * pi / 25.6));
  CHECK(g.dual().dual().axis(0).spacing == doctest::Approx(0.1));
}

TEST_CASE("forward_fourier: Gaussian is self-dual, zero maps to zero") {
  const auto g = GridDescriptor::line(512, 0.05);
  const ComplexField hat = forward_fourier(gaussian(g));
  CHECK(hat.space() == Space::frequency);
  const ComplexField expect = ComplexField::sample(hat.grid(), Space::frequency,
      [](std::span<const double> xi) { return cplx(std::exp(-xi[0] * xi[0] / 2)); });
  CHECK(rel_err(hat, expect) < 1e-12);

  const ComplexField zero(g, Space::position);
  CHECK(l2_norm(forward_fourier(zero)) == 0.0);
  CHECK_THROWS_AS(forward_fourier(hat), std::invalid_argument);
  CHECK_THROWS_AS(inverse_fourier(zero), std::invalid_argument);
}

TEST_CASE("forward_fourier: modulated Gaussian against direct summation") {
  const auto g = GridDescriptor::line(256, 0.1);
  auto f = [](double x) { return std::exp(-x * x / 2) * std::polar(1.0, 3.0 * x); };
  const ComplexField oracle = direct_fourier(f, g, 8);
  const ComplexField hat = forward_fourier(gaussian(g, 1, 1, 0, 3.0));
  CHECK(rel_err(hat, oracle) < 1e-12);
  const ComplexField analytic = ComplexField::sample(hat.grid(), Space::frequency,
      [](std::span<const double> xi) { return cplx(std::exp(-(xi[0] - 3) * (xi[0] - 3) / 2)); });
  CHECK(rel_err(hat, analytic) < 1e-12);
  // And back.
  CHECK(rel_err(inverse_fourier(analytic), gaussian(g, 1, 1, 0, 3.0)) < 1e-12);
}

TEST_CASE("Fourier round trip and Plancherel on random fields") {
  for (auto g : {GridDescriptor::line(64, 0.3), GridDescriptor::line(4096, 0.02),
                 GridDescriptor::square(64, 0.25)}) {
    const ComplexField f = random_smooth(g, 7);
    const ComplexField hat = forward_fourier(f);
    CHECK(std::abs(l2_norm(hat) - l2_norm(f)) / l2_norm(f) < 1e-12);
    CHECK(rel_err(inverse_fourier(hat), f) < 1e-12);
  }
}

TEST_CASE("two-dimensional Gaussian is self-dual") {
  const auto g = GridDescriptor::square(64, 0.3);
  const ComplexField hat = forward_fourier(gaussian(g));
  const ComplexField expect = ComplexField::sample(hat.grid(), Space::frequency,
      [](std::span<const double> xi) {
        return cplx(std::exp(-(xi[0] * xi[0] + xi[1] * xi[1]) / 2));
      });
  CHECK(rel_err(hat, expect) < 1e-12);
}

TEST_CASE("free_propagate: identity, analytic Gaussian, group law") {
  const auto g = GridDescriptor::line(2048, 0.0625);
  const ComplexField phi = gaussian(g);
  CHECK(rel_err(free_propagate(phi, 0.0), phi) < 1e-15);

  for (double t : {2.0, -3.0, 10.0}) {
    const ComplexField exact = ComplexField::sample(g, Space::position,
        [t](std::span<const double> x) {
          const cplx z(1.0, t);
          return std::exp(-x[0] * x[0] / (2.0 * z)) / std::sqrt(z);
        });
    CHECK(l2_distance(free_propagate(phi, t), exact) < 1e-8);
  }

  const ComplexField r = random_smooth(GridDescriptor::line(512, 0.1), 11);
  const ComplexField two = free_propagate(free_propagate(r, 0.3), 0.7);
  CHECK(rel_err(two, free_propagate(r, 1.0)) < 1e-13);
  CHECK(std::abs(l2_norm(free_propagate(r, 5.0)) - l2_norm(r)) < 1e-13 * l2_norm(r));
}

TEST_CASE("free_propagate in two dimensions is the product of one-dimensional flows") {
  const auto g = GridDescriptor::square(128, 0.25);
  const double t = 1.5;
  const ComplexField exact = ComplexField::sample(g, Space::position,
      [t](std::span<const double> x) {
        const cplx z(1.0, t);
        return std::exp(-(x[0] * x[0] + x[1] * x[1]) / (2.0 * z)) / z;
      });
  CHECK(l2_distance(free_propagate(gaussian(g), t), exact) < 1e-10);
}

TEST_CASE("quadratic_phase") {
  const auto g = GridDescriptor::line(256, 0.1);
  const ComplexField f = random_smooth(g, 3);
  const ComplexField m = quadratic_phase(f, 0.7);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(m[i]) == doctest::Approx(std::abs(f[i])));
  CHECK(rel_err(quadratic_phase(m, -0.7), f) < 1e-14);
  CHECK_THROWS_AS(quadratic_phase(f, 0.0), std::invalid_argument);
  CHECK(rel_err(chirp(f, 1.0 / 0.7), m) < 1e-14);

  // Small-angle regime: ‖(M_t − 1) f‖ ≈ ‖x² f‖ / (2t). The oracle integral is
  // a plain Riemann sum of x⁴ e^{-x²} on a separate fine grid.
  const double t = 100.0;
  const ComplexField phi = inverse_fourier(forward_fourier(gaussian(g)));
  const double lhs = l2_distance(quadratic_phase(phi, t), phi);
  double s = 0.0;
  const double dx = 1e-3;
  for (double x = -20; x <= 20; x += dx) s += std::pow(x, 4) * std::exp(-x * x) * dx;
  CHECK(lhs == doctest::Approx(std::sqrt(s) / (2 * t)).epsilon(1e-3));
}

TEST_CASE("dilate: unit dilation, unitarity, reflection for negative t") {
  const auto g = GridDescriptor::line(256, 0.1);
  const ComplexField f = random_smooth(g, 5);
  const ComplexField d1 = dilate(f, 1.0);
  CHECK(d1.grid() == g);
  CHECK(rel_err(d1, std::polar(1.0, -pi / 4) * f) < 1e-15);

  const ComplexField d3 = dilate(f, 3.0);
  CHECK(d3.grid().axis(0).spacing == doctest::Approx(0.3));
  CHECK(std::abs(l2_norm(d3) - l2_norm(f)) < 1e-13 * l2_norm(f));

  const ComplexField dm = dilate(f, -1.0);
  // (−i)^{-1/2} = e^{iπ/4}; D_{-1} f(x) = e^{iπ/4} f(−x).
  for (std::size_t j = 1; j < f.size(); ++j) {
    CHECK(std::abs(dm[j] - std::polar(1.0, pi / 4) * f[f.size() - j]) < 1e-15);
  }
  CHECK_THROWS_AS(dilate(f, 0.0), std::invalid_argument);
  // Two dimensions: prefactor (it)^{-1}.
  CHECK(std::abs(dilation_prefactor(2, 2.0) - cplx(0.0, -0.5)) < 1e-16);
  CHECK(std::abs(dilation_prefactor(2, -2.0) - cplx(0.0, 0.5)) < 1e-16);
}

TEST_CASE("factorization U0(t) = M_t D_t F M_t reproduces free_propagate") {
  const auto g = GridDescriptor::line(2048, 0.0625);
  const ComplexField phi = gaussian(g);
  for (double t : {0.5, 1.0, 2.0, 5.0, -1.5}) {
    const ComplexField route = factorized_free_propagate(phi, t, g);
    CHECK(l2_distance(route, free_propagate(phi, t)) < 1e-8);
  }
  const ComplexField dual_route = factorized_free_propagate(phi, 2.0);
  CHECK(dual_route.grid().axis(0).spacing == doctest::Approx(2.0 * g.dual().axis(0).spacing));
}

TEST_CASE("resample") {
  const auto g = GridDescriptor::line(1024, 0.05);
  const ComplexField f = gaussian(g);
  CHECK(rel_err(resample(f, g), f) == 0.0);

  const auto fine = GridDescriptor::line(2048, 0.025);
  CHECK(l2_distance(resample(f, fine), gaussian(fine)) < 1e-10);

  // Half-sample shift: compare against the trigonometric interpolant summed
  // term by term from a naive O(N²) DFT.
  const auto small = GridDescriptor::line(64, 0.3);
  ComplexField r = random_smooth(small, 9);
  const ComplexField envelope = gaussian(small, 1.0, 2.0);
  for (std::size_t j = 0; j < r.size(); ++j) r[j] *= envelope[j];
  const std::size_t n = small.axis(0).count;
  std::vector<cplx> coef(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) coef[k] += r[j] * std::polar(1.0, -2 * pi * double(j * k) / n);
    coef[k] /= double(n);
  }
  const auto shifted = GridDescriptor::line(128, 0.15);  // odd points sit at half-steps
  const ComplexField got = resample(r, shifted);
  for (std::size_t m = 1; m < 128; m += 2) {
    const double s = (shifted.axis(0).coordinate(m) - small.axis(0).left()) / 0.3;
    cplx acc = 0.0;
    for (long k = -long(n) / 2; k < long(n) / 2; ++k) {
      acc += coef[std::size_t(k < 0 ? k + long(n) : k)] * std::polar(1.0, 2 * pi * double(k) * s / n);
    }
    CHECK(std::abs(got[m] - acc) < 1e-12);
  }

  // Shrinking onto a grid that clips the field is refused.
  CHECK_THROWS_AS(resample(f, GridDescriptor::line(32, 0.05)), NumericalError);
}

TEST_CASE("resample in two dimensions") {
  const auto g = GridDescriptor::square(64, 0.3);
  const auto target = GridDescriptor::square(128, 0.2);
  CHECK(l2_distance(resample(gaussian(g), target), gaussian(target)) < 1e-10);
}

TEST_CASE("norms") {
  const auto g = GridDescriptor::line(1024, 0.05);
  const Norms z = norms(ComplexField(g, Space::position));
  CHECK(z.l2 == 0.0);
  CHECK(z.h1_seminorm == 0.0);
  CHECK(z.weighted_x == 0.0);
  CHECK(z.linf == 0.0);
  const Norms n = norms(gaussian(g));
  CHECK(n.l2 == doctest::Approx(std::pow(pi, 0.25)).epsilon(1e-13));
  // ‖ξ e^{-ξ²/2}‖ = ‖x e^{-x²/2}‖ = (√π / 2)^{1/2}
  CHECK(n.h1_seminorm == doctest::Approx(std::sqrt(std::sqrt(pi) / 2)).epsilon(1e-12));
  CHECK(n.weighted_x == doctest::Approx(std::sqrt(std::sqrt(pi) / 2)).epsilon(1e-12));
  CHECK(n.linf == doctest::Approx(1.0));
  const ComplexField r = random_smooth(g, 2);
  CHECK(norms(forward_fourier(r)).l2 == doctest::Approx(norms(r).l2).epsilon(1e-12));
}

TEST_CASE("diagnostics flag aliasing and truncation") {
  const auto g = GridDescriptor::line(512, 0.1);
  const FieldDiagnostics ok = diagnostics(gaussian(g));
  CHECK(ok.spectral_tail_fraction < 1e-12);
  CHECK(ok.boundary_mass_fraction < 1e-12);

  const double nyquist = pi / 0.1;
  CHECK(diagnostics(gaussian(g, 1, 1, 0, 0.95 * nyquist)).spectral_tail_fraction > 0.1);
  CHECK(diagnostics(gaussian(g, 1, 1, 24.0)).boundary_mass_fraction > 0.1);
}

TEST_CASE("snapshot round trip is bitwise") {
  const ComplexField f = random_smooth(GridDescriptor::square(16, 0.5), 4);
  std::stringstream ss;
  write_snapshot(ss, f);
  const ComplexField back = read_snapshot(ss);
  CHECK(back.grid() == f.grid());
  CHECK(back.space() == f.space());
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(std::memcmp(&back[i], &f[i], sizeof(cplx)) == 0);
  }
  std::stringstream bad("NLSX");
  CHECK_THROWS(read_snapshot(bad));
  std::stringstream truncated(ss.str().substr(0, 40));
  CHECK_THROWS(read_snapshot(truncated));
}
