#pragma once

#include <filesystem>

#include "bwkb/types.hpp"

namespace bwkb {

// Periodic grid x_i = x_min + i dx on [x_min, x_max).
struct UniformGrid {
  Real x_min = 0;
  Real x_max = 1;
  Index n = 1;

  Real length() const { return x_max - x_min; }
  Real dx() const { return length() / static_cast<Real>(n); }
  Real x(Index i) const { return x_min + static_cast<Real>(i) * dx(); }
  RealVector points() const;
  bool operator==(const UniformGrid&) const = default;
};

// Smallest power-of-two grid on [x_min, x_max) with dx <= epsilon * period / points_per_cell.
UniformGrid wave_grid(Real x_min, Real x_max, Real epsilon, Real period = 1.0,
                      int points_per_cell = 16);
void check_resolution(const UniformGrid& grid, Real epsilon, Real period = 1.0,
                      int points_per_cell = 16);

struct WaveField {
  Real epsilon = 1;
  Real t = 0;
  UniformGrid grid;
  ComplexVector values;

  static WaveField zeros(const UniformGrid& grid, Real epsilon, Real t = 0);
};

// Discrete L2 norm, sqrt(sum |psi|^2 dx).
Real mass(const WaveField& psi);

void require_same_grid(const WaveField& a, const WaveField& b);

// 64-byte header "BWKB", u32 version, u64 n, f64 x_min, x_max, epsilon, t,
// 16 reserved bytes, then interleaved re/im f64. Little-endian.
inline constexpr std::uint32_t kFieldVersion = 1;
void write_field(const std::filesystem::path& path, const WaveField& field);
WaveField read_field(const std::filesystem::path& path);

}  // namespace bwkb
