#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "nlslab/field.hpp"

namespace nlslab {

// Binary field snapshot, little-endian throughout:
//   "NLSF" | version u32 | dim u32 | per axis: N u64, h f64, x0 f64 | space u8 |
//   (re f64, im f64) pairs in row-major order.
inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(std::ostream& os, const ComplexField& f);
ComplexField read_snapshot(std::istream& is);

void write_snapshot(const std::filesystem::path& path, const ComplexField& f);
ComplexField read_snapshot(const std::filesystem::path& path);

}  // namespace nlslab
