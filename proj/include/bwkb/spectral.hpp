#pragma once

#include <unsupported/Eigen/FFT>

#include "bwkb/types.hpp"

namespace bwkb {

// Thin wrapper over Eigen::FFT with unscaled forward and 1/n-scaled inverse.
// Plans are cached inside, so keep one per thread.
class Fft {
 public:
  Fft() { fft_.SetFlag(Eigen::FFT<Real>::Unscaled); }

  void forward(const ComplexVector& in, ComplexVector& out) {
    out.resize(in.size());
    fft_.fwd(out.data(), in.data(), static_cast<int>(in.size()));
  }
  void inverse(const ComplexVector& in, ComplexVector& out) {
    out.resize(in.size());
    fft_.inv(out.data(), in.data(), static_cast<int>(in.size()));
    out /= static_cast<Real>(in.size());
  }
  ComplexVector forward(const ComplexVector& in) {
    ComplexVector out;
    forward(in, out);
    return out;
  }
  ComplexVector inverse(const ComplexVector& in) {
    ComplexVector out;
    inverse(in, out);
    return out;
  }

 private:
  Eigen::FFT<Real> fft_;
};

// Angular wavenumbers of an n-point periodic grid of length `length`, FFT order.
inline RealVector fft_wavenumbers(Index n, Real length) {
  RealVector k(n);
  const Real dk = 2.0 * kPi / length;
  for (Index j = 0; j < n; ++j) k[j] = dk * static_cast<Real>(j < (n + 1) / 2 ? j : j - n);
  return k;
}

inline bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

inline Index next_power_of_two(Index n) {
  Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Values of sum_{|m|<=M} c_m exp(i m 2pi j/ny), j = 0..ny-1, coefficients ordered -M..M.
inline ComplexVector synthesize_periodic(const ComplexVector& coeffs, Index ny, Fft& fft) {
  const Index n_modes = coeffs.size();
  const Index max_mode = (n_modes - 1) / 2;
  ComplexVector spec = ComplexVector::Zero(ny);
  for (Index i = 0; i < n_modes; ++i) {
    const Index m = i - max_mode;
    spec[((m % ny) + ny) % ny] += coeffs[i];
  }
  ComplexVector out;
  fft.inverse(spec, out);
  return out * static_cast<Real>(ny);
}

// Inverse of synthesize_periodic, truncated to |m| <= max_mode.
inline ComplexVector analyze_periodic(const ComplexVector& values, Index max_mode, Fft& fft) {
  const Index ny = values.size();
  ComplexVector spec;
  fft.forward(values, spec);
  ComplexVector c(2 * max_mode + 1);
  for (Index m = -max_mode; m <= max_mode; ++m)
    c[m + max_mode] = spec[((m % ny) + ny) % ny] / static_cast<Real>(ny);
  return c;
}

// Spectral derivative d^order/dx^order on a periodic grid of length `length`.
inline ComplexVector spectral_derivative(const ComplexVector& f, Real length, int order, Fft& fft) {
  if (order == 0) return f;
  const Index n = f.size();
  ComplexVector spec;
  fft.forward(f, spec);
  const RealVector k = fft_wavenumbers(n, length);
  Complex ik_pow;
  for (Index j = 0; j < n; ++j) {
    // the Nyquist mode has no consistent odd derivative
    if (n % 2 == 0 && j == n / 2 && order % 2 == 1) {
      spec[j] = 0;
      continue;
    }
    ik_pow = std::pow(kI * k[j], order);
    spec[j] *= ik_pow;
  }
  return fft.inverse(spec);
}

}  // namespace bwkb
