#include "nlslab/transforms.hpp"

#include <cmath>
#include <stdexcept>

#include "nlslab/error.hpp"
#include "nlslab/spectral.hpp"

namespace nlslab {

SnapshotAtTime pseudo_conformal(const SnapshotAtTime& s) {
  if (s.time == 0.0) throw std::invalid_argument("transforms: pseudo_conformal needs time != 0");
  const double t = -1.0 / s.time;
  return {quadratic_phase(dilate(s.field, t), t), t};
}

SnapshotAtTime pseudo_conformal(const SnapshotAtTime& s, const GridDescriptor& target) {
  if (s.time == 0.0) throw std::invalid_argument("transforms: pseudo_conformal needs time != 0");
  const double t = -1.0 / s.time;
  return {quadratic_phase(resample(dilate(s.field, t), target), t), t};
}

ComplexField reflect(const ComplexField& f) {
  if (f.space() != Space::position) {
    throw std::invalid_argument("transforms: reflect expects a position field");
  }
  ComplexField out(f.grid(), f.space());
  const std::size_t n0 = f.grid().axis(0).count;
  if (f.grid().dim() == 1) {
    for (std::size_t k = 0; k < n0; ++k) out[k] = f[(n0 - k) % n0];
    return out;
  }
  const std::size_t n1 = f.grid().axis(1).count;
  for (std::size_t i = 0; i < n0; ++i) {
    const std::size_t ri = (n0 - i) % n0;
    for (std::size_t j = 0; j < n1; ++j) out[i * n1 + j] = f[ri * n1 + (n1 - j) % n1];
  }
  return out;
}

ComplexField conjugate(const ComplexField& f) {
  ComplexField out = f;
  for (cplx& z : out.values()) z = std::conj(z);
  return out;
}

std::vector<double> cumulative_mass(const ComplexField& f) {
  if (f.grid().dim() != 1) throw std::invalid_argument("transforms: cumulative mass is 1D only");
  const double h = f.grid().axis(0).spacing;
  std::vector<double> p(f.size());
  p[0] = 0.0;
  for (std::size_t j = 1; j < f.size(); ++j) {
    p[j] = p[j - 1] + 0.5 * h * (std::norm(f[j - 1]) + std::norm(f[j]));
  }
  return p;
}

ComplexField gauge(const ComplexField& f, const GaugeParams& g) {
  if (f.grid().dim() != 1) throw std::invalid_argument("transforms: gauge is defined in 1D only");
  if (f.space() != Space::position) {
    throw std::invalid_argument("transforms: gauge expects a position field");
  }
  if (!std::isfinite(g.lambda)) throw std::invalid_argument("transforms: lambda must be finite");
  const double edge = edge_mass_fraction(f);
  if (edge > 1e-6) {
    throw NumericalError("transforms", "gauge needs negligible boundary mass, got fraction " +
                                           std::to_string(edge));
  }
  const std::vector<double> p = cumulative_mass(f);
  const double c = value(g.sign) * g.lambda;
  ComplexField out = f;
  for (std::size_t j = 0; j < out.size(); ++j) out[j] *= std::polar(1.0, c * p[j]);
  return out;
}

}  // namespace nlslab
