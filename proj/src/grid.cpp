#include "nlslab/grid.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nlslab {

GridDescriptor GridDescriptor::line(std::size_t count, double spacing) {
  return make(1, {Axis{count, spacing}, Axis{}});
}

GridDescriptor GridDescriptor::square(std::size_t count, double spacing) {
  return make(2, {Axis{count, spacing}, Axis{count, spacing}});
}

GridDescriptor GridDescriptor::make(int dim, std::array<Axis, 2> axes) {
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument("grid: dimension must be 1 or 2, got " + std::to_string(dim));
  }
  for (int a = 0; a < dim; ++a) {
    const Axis& ax = axes[static_cast<std::size_t>(a)];
    if (ax.count < 8 || !std::has_single_bit(ax.count)) {
      throw std::invalid_argument("grid: axis count must be a power of two >= 8, got " +
                                  std::to_string(ax.count));
    }
    if (!(ax.spacing > 0.0) || !std::isfinite(ax.spacing)) {
      throw std::invalid_argument("grid: axis spacing must be positive and finite");
    }
  }
  if (dim == 1) axes[1] = Axis{};
  GridDescriptor g;
  g.dim_ = dim;
  g.axes_ = axes;
  return g;
}

std::size_t GridDescriptor::size() const {
  std::size_t n = 1;
  for (int a = 0; a < dim_; ++a) n *= axis(a).count;
  return dim_ == 0 ? 0 : n;
}

double GridDescriptor::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= axis(a).spacing;
  return v;
}

GridDescriptor GridDescriptor::dual() const {
  GridDescriptor g = *this;
  for (int a = 0; a < dim_; ++a) {
    auto& ax = g.axes_[static_cast<std::size_t>(a)];
    ax.spacing = 2.0 * std::numbers::pi / (static_cast<double>(ax.count) * ax.spacing);
  }
  return g;
}

GridDescriptor GridDescriptor::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw std::invalid_argument("grid: scale factor must be positive and finite");
  }
  GridDescriptor g = *this;
  for (int a = 0; a < dim_; ++a) g.axes_[static_cast<std::size_t>(a)].spacing *= factor;
  return g;
}

}  // namespace nlslab
