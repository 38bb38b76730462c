#pragma once

#include <array>

namespace bwkb::interp {

// Cubic Hermite on [0, h] in the local coordinate s = t/h.
template <typename T, typename S>
T hermite3(const T& f0, const T& d0, const T& f1, const T& d1, S h, S t) {
  const S s = t / h;
  const S s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * f0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * f1 +
         (s3 - s2) * h * d1;
}

template <typename T, typename S>
T hermite3_derivative(const T& f0, const T& d0, const T& f1, const T& d1, S h, S t) {
  const S s = t / h;
  const S s2 = s * s;
  return ((6 * s2 - 6 * s) * f0 + (-6 * s2 + 6 * s) * f1) / h + (3 * s2 - 4 * s + 1) * d0 +
         (3 * s2 - 2 * s) * d1;
}

// Integral of hermite3 over [0, t].
template <typename T, typename S>
T hermite3_integral(const T& f0, const T& d0, const T& f1, const T& d1, S h, S t) {
  const S s = t / h;
  const S s2 = s * s, s3 = s2 * s, s4 = s3 * s;
  return h * ((s4 / 2 - s3 + s) * f0 + (s4 / 4 - 2 * s3 / 3 + s2 / 2) * h * d0 +
              (-s4 / 2 + s3) * f1 + (s4 / 4 - s3 / 3) * h * d1);
}

// Quintic Hermite from value, first and second derivative at both ends.
// Returns {f, f', f''} at t in [0, h].
template <typename S>
std::array<S, 3> hermite5(S f0, S d0, S c0, S f1, S d1, S c1, S h, S t) {
  const S s = t / h;
  const S s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  const S h2 = h * h;
  // basis on [0,1] and its first two derivatives
  const S H0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
  const S H1 = s - 6 * s3 + 8 * s4 - 3 * s5;
  const S H2 = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5);
  const S H5 = 10 * s3 - 15 * s4 + 6 * s5;
  const S H4 = -4 * s3 + 7 * s4 - 3 * s5;
  const S H3 = 0.5 * (s3 - 2 * s4 + s5);

  const S dH0 = -30 * s2 + 60 * s3 - 30 * s4;
  const S dH1 = 1 - 18 * s2 + 32 * s3 - 15 * s4;
  const S dH2 = 0.5 * (2 * s - 9 * s2 + 12 * s3 - 5 * s4);
  const S dH5 = -dH0;
  const S dH4 = -12 * s2 + 28 * s3 - 15 * s4;
  const S dH3 = 0.5 * (3 * s2 - 8 * s3 + 5 * s4);

  const S ddH0 = -60 * s + 180 * s2 - 120 * s3;
  const S ddH1 = -36 * s + 96 * s2 - 60 * s3;
  const S ddH2 = 0.5 * (2 - 18 * s + 36 * s2 - 20 * s3);
  const S ddH5 = -ddH0;
  const S ddH4 = -24 * s + 84 * s2 - 60 * s3;
  const S ddH3 = 0.5 * (6 * s - 24 * s2 + 20 * s3);

  const S f = H0 * f0 + H1 * h * d0 + H2 * h2 * c0 + H5 * f1 + H4 * h * d1 + H3 * h2 * c1;
  const S df = (dH0 * f0 + dH5 * f1) / h + dH1 * d0 + dH4 * d1 + (dH2 * c0 + dH3 * c1) * h;
  const S ddf = (ddH0 * f0 + ddH5 * f1) / h2 + (ddH1 * d0 + ddH4 * d1) / h + ddH2 * c0 + ddH3 * c1;
  return {f, df, ddf};
}

// Lagrange cubic through (x[i], y[i]), i = 0..3.
template <typename T, typename S>
T lagrange4(const std::array<S, 4>& x, const std::array<T, 4>& y, S t) {
  T out = y[0] * S(0);
  for (int i = 0; i < 4; ++i) {
    S w = 1;
    for (int j = 0; j < 4; ++j)
      if (j != i) w *= (t - x[j]) / (x[i] - x[j]);
    out += w * y[i];
  }
  return out;
}

// Integral from a to b of the cubic through equispaced values y at nodes
// x0 - h, x0, x0 + h, x0 + 2h, written in the coordinate s = (x - x0)/h.
template <typename T, typename S>
T lagrange4_equispaced_integral(const std::array<T, 4>& y, S h, S a, S b) {
  // basis polynomials in s for nodes -1, 0, 1, 2; antiderivatives below
  auto prim = [](S s) {
    const S s2 = s * s, s3 = s2 * s, s4 = s3 * s;
    // L_{-1} = -s(s-1)(s-2)/6, L_0 = (s+1)(s-1)(s-2)/2,
    // L_1 = -(s+1)s(s-2)/2, L_2 = (s+1)s(s-1)/6
    return std::array<S, 4>{-(s4 / 4 - s3 + s2) / 6, (s4 / 4 - 2 * s3 / 3 - s2 / 2 + 2 * s) / 2,
                            -(s4 / 4 - s3 / 3 - s2) / 2, (s4 / 4 - s2 / 2) / 6};
  };
  const auto pa = prim(a / h), pb = prim(b / h);
  T out = y[0] * S(0);
  for (int i = 0; i < 4; ++i) out += (pb[i] - pa[i]) * y[i];
  return out * h;
}

}  // namespace bwkb::interp
