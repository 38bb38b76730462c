#pragma once

#include <array>
#include <string>

#include "bwkb/types.hpp"

namespace bwkb {

// Slowly varying confinement U(x). Only polynomials of degree <= 2 are
// supported, which keeps U'' bounded.
class Confinement {
 public:
  enum class Kind { zero, harmonic, stark, polynomial };

  static Confinement zero();
  // U = omega^2 x^2 / 2
  static Confinement harmonic(Real omega = 1.0);
  // U = -field * x
  static Confinement stark(Real field);
  // U = c[0] + c[1] x + c[2] x^2
  static Confinement polynomial(const std::array<Real, 3>& c);

  Kind kind() const { return kind_; }
  const std::array<Real, 3>& coefficients() const { return c_; }
  std::string describe() const;

  Real value(Real x) const { return c_[0] + x * (c_[1] + x * c_[2]); }
  Real gradient(Real x) const { return c_[1] + 2.0 * c_[2] * x; }
  Real hessian(Real) const { return 2.0 * c_[2]; }

  RealVector value(const RealVector& x) const {
    return x.unaryExpr([this](Real t) { return value(t); });
  }

 private:
  Kind kind_ = Kind::zero;
  std::array<Real, 3> c_{0.0, 0.0, 0.0};
};

}  // namespace bwkb
