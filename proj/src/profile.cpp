#include "bwkb/profile.hpp"

#include <cmath>
#include <sstream>

namespace bwkb {

Real InitialProfile::envelope(Real x) const {
  const Real s = (x - center) / width;
  return amplitude * std::exp(-0.5 * s * s);
}

Real InitialProfile::envelope_derivative(Real x) const {
  return -(x - center) / (width * width) * envelope(x);
}

Real InitialProfile::l2_norm() const {
  return std::abs(amplitude) * std::sqrt(width * std::sqrt(kPi));
}

bool Coupling::is_real() const { return fn(0.0).imag() == 0.0; }

Coupling Coupling::constant(Complex value) {
  std::ostringstream os;
  os.precision(17);
  os << "constant:" << value.real() << "," << value.imag();
  return Coupling{[value](Real) { return value; }, os.str()};
}

}  // namespace bwkb
