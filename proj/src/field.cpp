#include "nlslab/field.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nlslab {

const char* to_string(Space s) { return s == Space::position ? "position" : "frequency"; }

ComplexField::ComplexField(GridDescriptor grid, Space space)
    : grid_(grid), values_(grid.size()), space_(space) {}

ComplexField::ComplexField(GridDescriptor grid, std::vector<cplx> values, Space space)
    : grid_(grid), values_(std::move(values)), space_(space) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("field: " + std::to_string(values_.size()) +
                                " values for a grid of " + std::to_string(grid_.size()) +
                                " points");
  }
}

ComplexField ComplexField::sample(const GridDescriptor& grid, Space space,
                                  const std::function<cplx(std::span<const double>)>& f) {
  ComplexField out(grid, space);
  std::array<double, 2> x{};
  if (grid.dim() == 1) {
    for (std::size_t i = 0; i < grid.axis(0).count; ++i) {
      x[0] = grid.axis(0).coordinate(i);
      out.values_[i] = f(std::span<const double>(x.data(), 1));
    }
  } else {
    const std::size_t n1 = grid.axis(1).count;
    for (std::size_t i = 0; i < grid.axis(0).count; ++i) {
      x[0] = grid.axis(0).coordinate(i);
      for (std::size_t j = 0; j < n1; ++j) {
        x[1] = grid.axis(1).coordinate(j);
        out.values_[i * n1 + j] = f(std::span<const double>(x.data(), 2));
      }
    }
  }
  return out;
}

bool ComplexField::all_finite() const {
  for (const cplx& z : values_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

void ComplexField::require_same_layout(const ComplexField& other, const char* op) const {
  if (!same_layout(other)) {
    throw std::invalid_argument(std::string("field: layout mismatch in ") + op);
  }
}

ComplexField& ComplexField::operator+=(const ComplexField& other) {
  require_same_layout(other, "+=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ComplexField& ComplexField::operator-=(const ComplexField& other) {
  require_same_layout(other, "-=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ComplexField& ComplexField::operator*=(cplx s) {
  for (cplx& z : values_) z *= s;
  return *this;
}

ComplexField& ComplexField::axpy(cplx s, const ComplexField& other) {
  require_same_layout(other, "axpy");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * other.values_[i];
  return *this;
}

ComplexField as_position(ComplexField f) { return std::move(f.retag(Space::position)); }

ComplexField as_frequency(ComplexField f) { return std::move(f.retag(Space::frequency)); }

}  // namespace nlslab
