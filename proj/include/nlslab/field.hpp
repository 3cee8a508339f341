#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "nlslab/grid.hpp"

namespace nlslab {

using cplx = std::complex<double>;

enum class Space { position, frequency };

const char* to_string(Space s);

// Complex samples on a grid, row-major over axes, tagged with the variable
// they are a function of. Value type: copies are deep.
class ComplexField {
 public:
  ComplexField() = default;
  ComplexField(GridDescriptor grid, Space space);
  // Throws std::invalid_argument when values.size() != grid.size().
  ComplexField(GridDescriptor grid, std::vector<cplx> values, Space space);

  // Samples f at the grid coordinates; coordinates are passed as {x} or {x, y}.
  static ComplexField sample(const GridDescriptor& grid, Space space,
                             const std::function<cplx(std::span<const double>)>& f);

  const GridDescriptor& grid() const { return grid_; }
  Space space() const { return space_; }
  std::size_t size() const { return values_.size(); }

  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }
  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }

  bool all_finite() const;

  // Change the tag without touching the samples.
  ComplexField& retag(Space s) {
    space_ = s;
    return *this;
  }

  ComplexField& operator+=(const ComplexField& other);
  ComplexField& operator-=(const ComplexField& other);
  ComplexField& operator*=(cplx s);
  // this += s * other
  ComplexField& axpy(cplx s, const ComplexField& other);

  friend ComplexField operator+(ComplexField a, const ComplexField& b) { return a += b; }
  friend ComplexField operator-(ComplexField a, const ComplexField& b) { return a -= b; }
  friend ComplexField operator*(cplx s, ComplexField a) { return a *= s; }

  bool same_layout(const ComplexField& other) const {
    return grid_ == other.grid_ && space_ == other.space_;
  }

 private:
  void require_same_layout(const ComplexField& other, const char* op) const;

  GridDescriptor grid_;
  std::vector<cplx> values_;
  Space space_ = Space::position;
};

// Reinterpret a frequency field as a function of x on the same grid (and back).
// Used wherever an identity feeds F f into an operator acting on x.
ComplexField as_position(ComplexField f);
ComplexField as_frequency(ComplexField f);

}  // namespace nlslab
