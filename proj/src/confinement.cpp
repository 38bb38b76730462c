#include "bwkb/confinement.hpp"

#include <cmath>
#include <sstream>

#include "bwkb/error.hpp"

namespace bwkb {

Confinement Confinement::zero() { return {}; }

Confinement Confinement::harmonic(Real omega) {
  if (!std::isfinite(omega)) throw InvalidArgument("harmonic frequency must be finite");
  Confinement u;
  u.kind_ = Kind::harmonic;
  u.c_ = {0.0, 0.0, 0.5 * omega * omega};
  return u;
}

Confinement Confinement::stark(Real field) {
  if (!std::isfinite(field)) throw InvalidArgument("Stark field must be finite");
  Confinement u;
  u.kind_ = Kind::stark;
  u.c_ = {0.0, -field, 0.0};
  return u;
}

Confinement Confinement::polynomial(const std::array<Real, 3>& c) {
  for (Real v : c)
    if (!std::isfinite(v)) throw InvalidArgument("confinement coefficients must be finite");
  Confinement u;
  u.kind_ = Kind::polynomial;
  u.c_ = c;
  return u;
}

std::string Confinement::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::zero: return "zero";
    case Kind::harmonic: os << "harmonic:omega=" << std::sqrt(2.0 * c_[2]); break;
    case Kind::stark: os << "stark:field=" << -c_[1]; break;
    case Kind::polynomial: os << "polynomial:" << c_[0] << "," << c_[1] << "," << c_[2]; break;
  }
  return os.str();
}

}  // namespace bwkb
