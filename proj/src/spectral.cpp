#include "nlslab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fft.hpp"
#include "nlslab/error.hpp"

namespace nlslab {
namespace {

using std::numbers::pi;

void require_space(const ComplexField& f, Space s, const char* op) {
  if (f.space() != s) {
    throw std::invalid_argument(std::string("spectral: ") + op + " expects a " + to_string(s) +
                                " field, got " + to_string(f.space()));
  }
}

// Multiply by (-1)^{Σ indices}: shifts the DFT so index k pairs with ξ_{k-N/2}.
void checkerboard(std::span<cplx> v, const GridDescriptor& g) {
  if (g.dim() == 1) {
    for (std::size_t j = 1; j < v.size(); j += 2) v[j] = -v[j];
    return;
  }
  const std::size_t n0 = g.axis(0).count;
  const std::size_t n1 = g.axis(1).count;
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = (i & 1U) ? 0 : 1; j < n1; j += 2) v[i * n1 + j] = -v[i * n1 + j];
  }
}

// Calls fn(flat_index, squared_radius) over the grid coordinates.
template <class Fn>
void for_each_r2(const GridDescriptor& g, Fn&& fn) {
  if (g.dim() == 1) {
    const Axis& ax = g.axis(0);
    for (std::size_t i = 0; i < ax.count; ++i) {
      const double x = ax.coordinate(i);
      fn(i, x * x);
    }
    return;
  }
  const Axis& a0 = g.axis(0);
  const Axis& a1 = g.axis(1);
  for (std::size_t i = 0; i < a0.count; ++i) {
    const double x = a0.coordinate(i);
    for (std::size_t j = 0; j < a1.count; ++j) {
      const double y = a1.coordinate(j);
      fn(i * a1.count + j, x * x + y * y);
    }
  }
}

double transform_scale(const GridDescriptor& g) {
  double s = 1.0;
  for (int a = 0; a < g.dim(); ++a) s *= g.axis(a).spacing / std::sqrt(2.0 * pi);
  return s;
}

// Mask of the outer band |x_a| >= 7/8 half-width on any axis.
template <class Fn>
void for_each_edge_flag(const GridDescriptor& g, Fn&& fn) {
  auto outer = [](const Axis& ax, std::size_t i) {
    return std::abs(ax.coordinate(i)) >= 0.875 * ax.half_width();
  };
  if (g.dim() == 1) {
    for (std::size_t i = 0; i < g.axis(0).count; ++i) fn(i, outer(g.axis(0), i));
    return;
  }
  const std::size_t n1 = g.axis(1).count;
  for (std::size_t i = 0; i < g.axis(0).count; ++i) {
    const bool oi = outer(g.axis(0), i);
    for (std::size_t j = 0; j < n1; ++j) fn(i * n1 + j, oi || outer(g.axis(1), j));
  }
}

}  // namespace

ComplexField forward_fourier(const ComplexField& f) {
  require_space(f, Space::position, "forward_fourier");
  ComplexField out(f.grid().dual(), std::vector<cplx>(f.values().begin(), f.values().end()),
                   Space::frequency);
  checkerboard(out.values(), f.grid());
  detail::dft(out.values(), f.grid(), detail::Direction::forward);
  checkerboard(out.values(), f.grid());
  out *= transform_scale(f.grid());
  return out;
}

ComplexField inverse_fourier(const ComplexField& f) {
  require_space(f, Space::frequency, "inverse_fourier");
  ComplexField out(f.grid().dual(), std::vector<cplx>(f.values().begin(), f.values().end()),
                   Space::position);
  checkerboard(out.values(), f.grid());
  detail::dft(out.values(), f.grid(), detail::Direction::backward);
  checkerboard(out.values(), f.grid());
  out *= transform_scale(f.grid());
  return out;
}

FreeFlow::FreeFlow(const GridDescriptor& grid, double t)
    : grid_(grid), t_(t), multiplier_(grid.size()) {
  const double inv_n = 1.0 / static_cast<double>(grid.size());
  for_each_r2(grid.dual(), [&](std::size_t k, double xi2) {
    multiplier_[k] = std::polar(inv_n, -0.5 * t * xi2);
  });
}

void FreeFlow::apply_in_place(ComplexField& f) const {
  require_space(f, Space::position, "free_propagate");
  if (f.grid() != grid_) throw std::invalid_argument("spectral: FreeFlow grid mismatch");
  auto v = f.values();
  checkerboard(v, grid_);
  detail::dft(v, grid_, detail::Direction::forward);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] *= multiplier_[k];
  detail::dft(v, grid_, detail::Direction::backward);
  checkerboard(v, grid_);
}

ComplexField free_propagate(const ComplexField& f, double t) {
  return FreeFlow(f.grid(), t).apply(f);
}

ComplexField spectral_derivative(const ComplexField& f) {
  ComplexField hat = forward_fourier(f);
  const Axis& ax = hat.grid().axis(0);
  const std::size_t stride = hat.grid().dim() == 2 ? hat.grid().axis(1).count : 1;
  for (std::size_t k = 0; k < hat.size(); ++k) {
    const std::size_t i = k / stride;
    // The unpaired Nyquist mode has no odd counterpart; drop it.
    const double xi = (i == 0) ? 0.0 : ax.coordinate(i);
    hat[k] *= cplx(0.0, xi);
  }
  return inverse_fourier(hat);
}

ComplexField spectral_laplacian(const ComplexField& f) {
  ComplexField hat = forward_fourier(f);
  for_each_r2(hat.grid(), [&](std::size_t k, double xi2) { hat[k] *= -xi2; });
  return inverse_fourier(hat);
}

ComplexField chirp(const ComplexField& f, double s) {
  ComplexField out = f;
  if (s == 0.0) return out;
  for_each_r2(f.grid(), [&](std::size_t k, double r2) { out[k] *= std::polar(1.0, 0.5 * s * r2); });
  return out;
}

ComplexField quadratic_phase(const ComplexField& f, double t) {
  if (t == 0.0) throw std::invalid_argument("spectral: quadratic_phase requires t != 0");
  ComplexField out = f;
  const double c = 0.5 / t;
  for_each_r2(f.grid(), [&](std::size_t k, double r2) { out[k] *= std::polar(1.0, c * r2); });
  return out;
}

cplx dilation_prefactor(int dim, double t) {
  if (t == 0.0) throw std::invalid_argument("spectral: dilation requires t != 0");
  const double n = static_cast<double>(dim);
  const double sign = t > 0.0 ? 1.0 : -1.0;
  return std::polar(std::pow(std::abs(t), -0.5 * n), -n * pi / 4.0 * sign);
}

ComplexField dilate(const ComplexField& f, double t) {
  const cplx pref = dilation_prefactor(f.grid().dim(), t);
  ComplexField out(f.grid().scaled(std::abs(t)), f.space());
  const GridDescriptor& g = f.grid();
  if (t > 0.0) {
    for (std::size_t k = 0; k < f.size(); ++k) out[k] = pref * f[k];
    return out;
  }
  // Sample j of the new grid sits at x_j = -|t| x_{j'} with j' = (N - j) mod N.
  const std::size_t n0 = g.axis(0).count;
  if (g.dim() == 1) {
    for (std::size_t j = 0; j < n0; ++j) out[j] = pref * f[(n0 - j) % n0];
    return out;
  }
  const std::size_t n1 = g.axis(1).count;
  for (std::size_t i = 0; i < n0; ++i) {
    const std::size_t ri = (n0 - i) % n0;
    for (std::size_t j = 0; j < n1; ++j) out[i * n1 + j] = pref * f[ri * n1 + (n1 - j) % n1];
  }
  return out;
}

namespace {

// Trigonometric interpolation of one periodic line of samples onto the
// coordinates xs; points outside [left, left + N h) receive zero.
void interpolate_line(std::span<const cplx> line, const Axis& src, std::span<const double> xs,
                      std::span<cplx> out) {
  const std::size_t n = src.count;
  std::vector<cplx> coef(line.begin(), line.end());
  detail::dft(coef, 1, n, 1, detail::Direction::forward);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (cplx& c : coef) c *= inv_n;
  const double left = src.left();
  const double right = left + src.length();
  const long half = static_cast<long>(n / 2);
  constexpr long kBlock = 64;  // refresh the phase recurrence from std::polar
  for (std::size_t m = 0; m < xs.size(); ++m) {
    const double x = xs[m];
    if (x < left - 1e-12 * src.spacing || x >= right) {
      out[m] = 0.0;
      continue;
    }
    const double s = (x - left) / src.spacing;  // fractional sample index
    const double dtheta = 2.0 * pi * s / static_cast<double>(n);
    const cplx step = std::polar(1.0, dtheta);
    cplx acc = 0.0;
    cplx phase;
    for (long k = -half; k < half; ++k) {
      if ((k + half) % kBlock == 0) phase = std::polar(1.0, dtheta * static_cast<double>(k));
      const std::size_t idx = static_cast<std::size_t>(k < 0 ? k + static_cast<long>(n) : k);
      acc += coef[idx] * phase;
      phase *= step;
    }
    out[m] = acc;
  }
}

std::vector<double> coordinates(const Axis& ax) {
  std::vector<double> xs(ax.count);
  for (std::size_t i = 0; i < ax.count; ++i) xs[i] = ax.coordinate(i);
  return xs;
}

}  // namespace

ComplexField resample(const ComplexField& f, const GridDescriptor& target) {
  require_space(f, Space::position, "resample");
  const GridDescriptor& src = f.grid();
  if (target.dim() != src.dim()) throw std::invalid_argument("spectral: resample dimension mismatch");
  if (target == src) return f;

  double total = 0.0;
  double lost = 0.0;
  {
    auto inside = [&](int a, double x) { return std::abs(x) < 0.875 * target.axis(a).half_width(); };
    if (src.dim() == 1) {
      for (std::size_t i = 0; i < f.size(); ++i) {
        const double m = std::norm(f[i]);
        total += m;
        if (!inside(0, src.axis(0).coordinate(i))) lost += m;
      }
    } else {
      const std::size_t n1 = src.axis(1).count;
      for (std::size_t i = 0; i < src.axis(0).count; ++i) {
        const bool in0 = inside(0, src.axis(0).coordinate(i));
        for (std::size_t j = 0; j < n1; ++j) {
          const double m = std::norm(f[i * n1 + j]);
          total += m;
          if (!in0 || !inside(1, src.axis(1).coordinate(j))) lost += m;
        }
      }
    }
  }
  if (total > 0.0 && lost / total > 1e-6) {
    throw NumericalError("spectral", "resample would lose mass fraction " +
                                         std::to_string(lost / total) +
                                         " outside the target interior");
  }

  if (src.dim() == 1) {
    ComplexField out(target, Space::position);
    const auto xs = coordinates(target.axis(0));
    interpolate_line(f.values(), src.axis(0), xs, out.values());
    return out;
  }

  // Fast axis first, row by row, then the slow axis column by column.
  const std::size_t n0 = src.axis(0).count;
  const std::size_t m1 = target.axis(1).count;
  const std::size_t m0 = target.axis(0).count;
  const auto xs1 = coordinates(target.axis(1));
  const auto xs0 = coordinates(target.axis(0));
  std::vector<cplx> stage(n0 * m1);
  for (std::size_t i = 0; i < n0; ++i) {
    interpolate_line(f.values().subspan(i * src.axis(1).count, src.axis(1).count), src.axis(1),
                     xs1, std::span<cplx>(stage).subspan(i * m1, m1));
  }
  ComplexField out(target, Space::position);
  std::vector<cplx> column(n0);
  std::vector<cplx> result(m0);
  for (std::size_t j = 0; j < m1; ++j) {
    for (std::size_t i = 0; i < n0; ++i) column[i] = stage[i * m1 + j];
    interpolate_line(column, src.axis(0), xs0, result);
    for (std::size_t i = 0; i < m0; ++i) out[i * m1 + j] = result[i];
  }
  return out;
}

ComplexField factorized_free_propagate(const ComplexField& f, double t) {
  require_space(f, Space::position, "factorized_free_propagate");
  ComplexField inner = dilate(as_position(forward_fourier(quadratic_phase(f, t))), t);
  return quadratic_phase(inner, t);
}

ComplexField factorized_free_propagate(const ComplexField& f, double t,
                                       const GridDescriptor& target) {
  require_space(f, Space::position, "factorized_free_propagate");
  ComplexField inner = dilate(as_position(forward_fourier(quadratic_phase(f, t))), t);
  return quadratic_phase(resample(inner, target), t);
}

double l2_norm(const ComplexField& f) {
  double s = 0.0;
  for (const cplx& z : f.values()) s += std::norm(z);
  return std::sqrt(s * f.grid().cell_volume());
}

double l2_distance(const ComplexField& a, const ComplexField& b) {
  if (!a.same_layout(b)) throw std::invalid_argument("spectral: l2_distance layout mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s * a.grid().cell_volume());
}

Norms norms(const ComplexField& f) {
  Norms out;
  out.l2 = l2_norm(f);
  double wx = 0.0;
  for_each_r2(f.grid(), [&](std::size_t k, double r2) {
    wx += r2 * std::norm(f[k]);
    out.linf = std::max(out.linf, std::abs(f[k]));
  });
  out.weighted_x = std::sqrt(wx * f.grid().cell_volume());
  const ComplexField hat = forward_fourier(as_position(f));
  double h1 = 0.0;
  for_each_r2(hat.grid(), [&](std::size_t k, double xi2) { h1 += xi2 * std::norm(hat[k]); });
  out.h1_seminorm = std::sqrt(h1 * hat.grid().cell_volume());
  return out;
}

double edge_mass_fraction(const ComplexField& f) {
  double total = 0.0;
  double edge = 0.0;
  for_each_edge_flag(f.grid(), [&](std::size_t k, bool outer) {
    const double m = std::norm(f[k]);
    total += m;
    if (outer) edge += m;
  });
  return total > 0.0 ? edge / total : 0.0;
}

FieldDiagnostics diagnostics(const ComplexField& f) {
  FieldDiagnostics d;
  d.l2 = l2_norm(f);
  if (f.space() == Space::position) {
    d.boundary_mass_fraction = edge_mass_fraction(f);
    d.spectral_tail_fraction = edge_mass_fraction(forward_fourier(f));
  } else {
    d.spectral_tail_fraction = edge_mass_fraction(f);
    d.boundary_mass_fraction = edge_mass_fraction(inverse_fourier(f));
  }
  return d;
}

}  // namespace nlslab
