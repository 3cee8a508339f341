#include "nlslab/snapshot_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "nlslab/error.hpp"

namespace nlslab {
namespace {

template <class T>
void put(std::ostream& os, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
  const U bits = std::bit_cast<U>(value);
  unsigned char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint8_t>>;
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw std::runtime_error("snapshot: truncated stream");
  }
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(bytes[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_snapshot(std::ostream& os, const ComplexField& f) {
  os.write("NLSF", 4);
  put<std::uint32_t>(os, kSnapshotVersion);
  const GridDescriptor& g = f.grid();
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim()));
  for (int a = 0; a < g.dim(); ++a) {
    put<std::uint64_t>(os, g.axis(a).count);
    put<double>(os, g.axis(a).spacing);
    put<double>(os, g.axis(a).left());
  }
  put<std::uint8_t>(os, f.space() == Space::position ? 0 : 1);
  for (const cplx& z : f.values()) {
    put<double>(os, z.real());
    put<double>(os, z.imag());
  }
  if (!os) throw std::runtime_error("snapshot: write failed");
}

ComplexField read_snapshot(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "NLSF", 4) != 0) {
    throw std::runtime_error("snapshot: bad magic");
  }
  const auto version = get<std::uint32_t>(is);
  if (version != kSnapshotVersion) {
    throw std::runtime_error("snapshot: unsupported version " + std::to_string(version));
  }
  const auto dim = get<std::uint32_t>(is);
  if (dim != 1 && dim != 2) throw std::runtime_error("snapshot: bad dimension");
  std::array<Axis, 2> axes{};
  for (std::uint32_t a = 0; a < dim; ++a) {
    axes[a].count = static_cast<std::size_t>(get<std::uint64_t>(is));
    axes[a].spacing = get<double>(is);
    const double x0 = get<double>(is);
    if (std::abs(x0 - axes[a].left()) > 1e-12 * std::max(1.0, std::abs(x0))) {
      throw std::runtime_error("snapshot: grid is not centered");
    }
  }
  const GridDescriptor grid = GridDescriptor::make(static_cast<int>(dim), axes);
  const auto tag = get<std::uint8_t>(is);
  if (tag > 1) throw std::runtime_error("snapshot: bad space tag");
  std::vector<cplx> values(grid.size());
  for (cplx& z : values) {
    const double re = get<double>(is);
    const double im = get<double>(is);
    z = cplx(re, im);
  }
  ComplexField f(grid, std::move(values), tag == 0 ? Space::position : Space::frequency);
  if (!f.all_finite()) throw std::runtime_error("snapshot: non-finite samples");
  return f;
}

void write_snapshot(const std::filesystem::path& path, const ComplexField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("snapshot: cannot open " + path.string());
  write_snapshot(os, f);
}

ComplexField read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("snapshot: cannot open " + path.string());
  return read_snapshot(is);
}

}  // namespace nlslab
