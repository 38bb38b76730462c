#include "bwkb/wigner.hpp"

#include <cmath>

#include "bwkb/error.hpp"
#include "bwkb/parallel.hpp"
#include "bwkb/spectral.hpp"

namespace bwkb {

namespace {

struct Layout {
  Index first = 0, count = 0;  // raw x indices (periodic) before mollification
  Index margin = 0;            // extra points on each side for the mollifier
  Index J = 0, nxi = 0;
  Real deta = 0, eta_max = 0, dxi = 0, xi0 = 0;
  RealVector window;           // w_j, j = 0..J
};

Layout make_layout(const UniformGrid& grid, Real eps, const WignerOptions& o) {
  Layout l;
  const Real dx = grid.dx();
  l.deta = 2 * dx / eps;
  const Real eta_max = o.eta_max > 0 ? o.eta_max : grid.length() / 4;
  l.J = std::max<Index>(1, static_cast<Index>(std::floor(eta_max / l.deta)));
  l.eta_max = static_cast<Real>(l.J) * l.deta;
  if (l.J >= grid.n / 2) throw InvalidArgument("eta window exceeds half the box");
  l.window.resize(l.J + 1);
  for (Index j = 0; j <= l.J; ++j) l.window[j] = std::pow(std::cos(0.5 * kPi * j / Real(l.J)), 2);
  l.nxi = std::max(o.xi_points, 2 * l.J + 1);
  const Real period = 2 * kPi / l.deta;
  l.dxi = period / Real(l.nxi);
  l.xi0 = o.xi_center - 0.5 * period;

  Index lo = 0, hi = grid.n;
  if (o.x_max > o.x_min) {
    lo = static_cast<Index>(std::ceil((o.x_min - grid.x_min) / dx - 1e-9));
    hi = static_cast<Index>(std::floor((o.x_max - grid.x_min) / dx + 1e-9)) + 1;
    lo = std::clamp<Index>(lo, 0, grid.n);
    hi = std::clamp<Index>(hi, lo, grid.n);
  }
  if (hi <= lo) throw InvalidArgument("empty Wigner x window");
  l.margin = o.mollifier > 0 ? static_cast<Index>(std::ceil(5 * o.mollifier / dx)) : 0;
  l.first = lo - l.margin;
  l.count = hi - lo + 2 * l.margin;
  return l;
}

// rows of `raw` are the extended window; returns the mollified, strided interior
RealMatrix mollify(const RealMatrix& raw, const Layout& l, Real dx, Real width, Index stride,
                   Index& out_rows) {
  const Index inner = l.count - 2 * l.margin;
  out_rows = (inner + stride - 1) / stride;
  RealMatrix out(out_rows, raw.cols());
  if (width <= 0) {
    for (Index r = 0; r < out_rows; ++r) out.row(r) = raw.row(r * stride);
    return out;
  }
  RealVector kernel(2 * l.margin + 1);
  for (Index s = -l.margin; s <= l.margin; ++s)
    kernel[s + l.margin] = std::exp(-0.5 * std::pow(Real(s) * dx / width, 2));
  kernel /= kernel.sum();
  parallel_for(out_rows, [&](Index r) {
    const Index c = l.margin + r * stride;
    RealVector acc = RealVector::Zero(raw.cols());
    for (Index s = -l.margin; s <= l.margin; ++s) acc += kernel[s + l.margin] * raw.row(c + s).transpose();
    out.row(r) = acc.transpose();
  });
  return out;
}

// correlation(i) returns p_j for j = 0..J at raw window row i; W from one FFT per row
template <class Corr>
WignerGrid assemble(const UniformGrid& grid, const Layout& l, const WignerOptions& o,
                    const RealVector& density_raw, Corr&& correlation) {
  RealMatrix raw(l.count, l.nxi);
  const Real scale = l.deta / (2 * kPi);
  parallel_for(l.count, [&](Index i) {
    thread_local Fft fft;
    const ComplexVector p = correlation(i);
    // sum_j p_j e^{i (xi0 + m dxi) eta_j}, with dxi * deta = 2 pi / nxi
    ComplexVector q = ComplexVector::Zero(l.nxi), spec;
    for (Index j = 1; j <= l.J; ++j)
      q[j] = std::conj(l.window[j] * p[j] * std::polar(1.0, l.xi0 * Real(j) * l.deta));
    fft.forward(q, spec);
    for (Index m = 0; m < l.nxi; ++m) raw(i, m) = scale * (p[0].real() + 2 * spec[m].real());
  });

  WignerGrid w;
  Index rows = 0;
  const Index stride = std::max<Index>(1, o.x_stride);
  w.values = mollify(raw, l, grid.dx(), o.mollifier, stride, rows);
  RealMatrix dens_raw = density_raw;
  w.density = mollify(dens_raw, l, grid.dx(), o.mollifier, stride, rows).col(0);
  w.x.resize(rows);
  for (Index r = 0; r < rows; ++r) w.x[r] = grid.x_min + Real(l.first + l.margin + r * stride) * grid.dx();
  w.xi = RealVector::LinSpaced(l.nxi, 0, Real(l.nxi - 1)).array() * l.dxi + l.xi0;
  w.dx = grid.dx() * Real(stride);
  w.dxi = l.dxi;
  w.eta_max = l.eta_max;
  w.deta = l.deta;
  w.half_width = l.J;
  w.mollifier = o.mollifier;
  return w;
}

Index wrap(Index i, Index n) { return ((i % n) + n) % n; }

}  // namespace

Real WignerGrid::marginal_defect() const {
  const RealVector marginal = values.rowwise().sum() * dxi;
  return (marginal - density).cwiseAbs().sum() / density.cwiseAbs().sum();
}

WignerGrid wigner_transform(const WaveField& psi, const WignerOptions& opts) {
  const UniformGrid& g = psi.grid;
  const Layout l = make_layout(g, psi.epsilon, opts);
  const ComplexVector& v = psi.values;
  RealVector dens(l.count);
  for (Index i = 0; i < l.count; ++i) dens[i] = std::norm(v[wrap(l.first + i, g.n)]);
  return assemble(g, l, opts, dens, [&](Index i) {
    ComplexVector p(l.J + 1);
    const Index c = l.first + i;
    for (Index j = 0; j <= l.J; ++j) p[j] = v[wrap(c - j, g.n)] * std::conj(v[wrap(c + j, g.n)]);
    return p;
  });
}

WignerGrid wigner_predicted(const EulerianFields& fields, const BandTable& band, Real epsilon,
                            const UniformGrid& grid, const WignerOptions& opts) {
  if (fields.x.size() != grid.n) throw GridMismatch("fields are not on the Wigner grid");
  const Layout l = make_layout(grid, epsilon, opts);
  const Real G = band.lattice().dual_period();
  const Index M = band.problem().cutoff;
  RealVector dens(l.count);
  for (Index i = 0; i < l.count; ++i) dens[i] = std::pow(fields.amp[wrap(l.first + i, grid.n)], 2);
  return assemble(grid, l, opts, dens, [&](Index i) {
    const Index c = wrap(l.first + i, grid.n);
    ComplexVector p = ComplexVector::Zero(l.J + 1);
    if (dens[i] == 0.0) return p;
    const Real k = fields.grad_phi[c];
    const ComplexVector coeffs = band.bloch_vector(k);
    for (Index m = -M; m <= M; ++m) {
      const Real weight = dens[i] * std::norm(coeffs[m + M]);
      if (weight < 1e-300) continue;
      // a delta line at xi0 has correlation e^{-i xi0 eta}
      const Complex step = std::polar(1.0, -(k + Real(m) * G) * l.deta);
      Complex ph = 1.0;
      for (Index j = 0; j <= l.J; ++j, ph *= step) p[j] += weight * ph;
    }
    return p;
  });
}

WignerOptions fan_window(const EulerianFields& f, Real mollifier) {
  Index lo = -1, hi = -1;
  for (Index i = 0; i < f.x.size(); ++i)
    if (f.covered[i]) {
      if (lo < 0) lo = i;
      hi = i;
    }
  if (lo < 0) throw InvalidArgument("no grid point inside the ray fan");
  WignerOptions o;
  o.mollifier = mollifier;
  o.x_min = f.x[lo] + 5 * mollifier;
  o.x_max = f.x[hi] - 5 * mollifier;
  if (!(o.x_max > o.x_min)) throw InvalidArgument("ray fan narrower than the mollifier");
  return o;
}

Real wigner_l1_discrepancy(const WignerGrid& a, const WignerGrid& b) {
  if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols())
    throw GridMismatch("Wigner grids differ");
  return (a.values - b.values).cwiseAbs().sum() / b.values.cwiseAbs().sum();
}

}  // namespace bwkb
