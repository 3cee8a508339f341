#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>

namespace nlslab {

struct Axis {
  std::size_t count = 0;
  double spacing = 0.0;

  double left() const { return -0.5 * static_cast<double>(count) * spacing; }
  double length() const { return static_cast<double>(count) * spacing; }
  double coordinate(std::size_t i) const { return left() + static_cast<double>(i) * spacing; }
  // Largest |coordinate| on the axis (the left endpoint).
  double half_width() const { return 0.5 * length(); }

  // Spacings that agree to 1e-12 relative denote the same grid; this absorbs
  // roundoff from products such as |t|·|−1/t|.
  friend bool operator==(const Axis& a, const Axis& b) {
    return a.count == b.count &&
           std::abs(a.spacing - b.spacing) <= 1e-12 * std::max(a.spacing, b.spacing);
  }
};

// Uniform, centered, periodic grid in one or two dimensions. Axis 0 is the
// slow (row) index of the row-major sample layout.
class GridDescriptor {
 public:
  GridDescriptor() = default;

  // Throws std::invalid_argument unless dim is 1 or 2, every count is a power
  // of two no smaller than 8 and every spacing is positive and finite.
  static GridDescriptor line(std::size_t count, double spacing);
  static GridDescriptor square(std::size_t count, double spacing);
  static GridDescriptor make(int dim, std::array<Axis, 2> axes);

  int dim() const { return dim_; }
  const Axis& axis(int a) const { return axes_[static_cast<std::size_t>(a)]; }
  std::size_t size() const;
  // hⁿ, the volume element of the trapezoidal sum.
  double cell_volume() const;

  // Frequency grid of the continuum Fourier transform: spacing 2π/(N h) per axis.
  GridDescriptor dual() const;
  // Same counts, spacings multiplied by factor > 0.
  GridDescriptor scaled(double factor) const;

  friend bool operator==(const GridDescriptor&, const GridDescriptor&) = default;

 private:
  int dim_ = 0;
  std::array<Axis, 2> axes_{};
};

}  // namespace nlslab
