#include "bwkb/wavefield.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "bwkb/error.hpp"
#include "bwkb/spectral.hpp"

static_assert(std::endian::native == std::endian::little, "field IO assumes a little-endian host");

namespace bwkb {

RealVector UniformGrid::points() const {
  RealVector p(n);
  for (Index i = 0; i < n; ++i) p[i] = x(i);
  return p;
}

UniformGrid wave_grid(Real x_min, Real x_max, Real epsilon, Real period, int points_per_cell) {
  if (!(x_max > x_min)) throw InvalidArgument("empty box");
  if (!(epsilon > 0) || points_per_cell < 1) throw InvalidArgument("bad resolution request");
  const Real dx_max = epsilon * period / points_per_cell;
  const auto needed = static_cast<Index>(std::ceil((x_max - x_min) / dx_max - 1e-9));
  return {x_min, x_max, next_power_of_two(needed)};
}

void check_resolution(const UniformGrid& grid, Real epsilon, Real period, int points_per_cell) {
  if (!is_power_of_two(grid.n)) throw InvalidArgument("grid size must be a power of two");
  const Real dx_max = epsilon * period / points_per_cell;
  if (grid.dx() > dx_max * (1 + 1e-12))
    throw InvalidArgument("grid does not resolve the lattice scale: dx=" + std::to_string(grid.dx()) +
                          " > " + std::to_string(dx_max));
}

WaveField WaveField::zeros(const UniformGrid& grid, Real epsilon, Real t) {
  return {epsilon, t, grid, ComplexVector::Zero(grid.n)};
}

Real mass(const WaveField& psi) { return std::sqrt(psi.values.squaredNorm() * psi.grid.dx()); }

void require_same_grid(const WaveField& a, const WaveField& b) {
  if (!(a.grid == b.grid) || a.epsilon != b.epsilon || a.values.size() != b.values.size())
    throw GridMismatch("fields live on different grids or epsilons");
}

namespace {
template <typename T>
void put(char*& p, T v) {
  std::memcpy(p, &v, sizeof(T));
  p += sizeof(T);
}
template <typename T>
T get(const char*& p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  p += sizeof(T);
  return v;
}
}  // namespace

void write_field(const std::filesystem::path& path, const WaveField& field) {
  char header[64] = {};
  char* p = header;
  std::memcpy(p, "BWKB", 4);
  p += 4;
  put<std::uint32_t>(p, kFieldVersion);
  put<std::uint64_t>(p, static_cast<std::uint64_t>(field.values.size()));
  put<double>(p, field.grid.x_min);
  put<double>(p, field.grid.x_max);
  put<double>(p, field.epsilon);
  put<double>(p, field.t);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(header, sizeof header);
  // std::complex<double> is layout-compatible with double[2]
  out.write(reinterpret_cast<const char*>(field.values.data()),
            static_cast<std::streamsize>(field.values.size() * sizeof(Complex)));
  if (!out) throw Error("short write to " + path.string());
}

WaveField read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  char header[64];
  if (!in.read(header, sizeof header)) throw Error(path.string() + ": truncated header");
  if (std::memcmp(header, "BWKB", 4) != 0) throw Error(path.string() + ": bad magic");
  const char* p = header + 4;
  const auto version = get<std::uint32_t>(p);
  if (version != kFieldVersion)
    throw Error(path.string() + ": unsupported version " + std::to_string(version));
  const auto n = get<std::uint64_t>(p);
  WaveField f;
  f.grid.x_min = get<double>(p);
  f.grid.x_max = get<double>(p);
  f.epsilon = get<double>(p);
  f.t = get<double>(p);
  f.grid.n = static_cast<Index>(n);
  f.values.resize(static_cast<Index>(n));
  if (!in.read(reinterpret_cast<char*>(f.values.data()), static_cast<std::streamsize>(n * sizeof(Complex))))
    throw Error(path.string() + ": truncated data");
  return f;
}

}  // namespace bwkb
