#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "bwkb/bloch.hpp"
#include "bwkb/confinement.hpp"
#include "bwkb/profile.hpp"

namespace bwkb {

inline constexpr Real kNoCaustic = std::numeric_limits<Real>::infinity();

// One characteristic of the band Hamiltonian E_n(k) + U(x), sampled every step.
struct RayPath {
  Real x0 = 0;
  Real k0 = 0;
  Real amplitude = 0;  // |a_I(x0)|
  RealVector t, x, k;  // k is unfolded (continuous in t)
  RealVector jacobian;      // dX_t/dx0
  RealVector jacobian_rate; // dk_t/dx0
  RealVector phase;         // phi(t, X_t)
  RealVector berry;         // int Im<chi, d_k chi> U'(X_s) ds
  RealVector nlphase;       // -|a_I|^{2 sigma} int lambda kappa / J^sigma ds
  Real caustic_time = kNoCaustic;
  int zone_exits = 0;       // times k left the first Brillouin zone

  Index samples() const { return t.size(); }
  Real folded_k(Index i, const BandTable& band) const { return band.folded(k[i]); }
  // combined Berry + nonlinear phase
  Real omega(Index i) const { return berry[i] + nlphase[i]; }
};

struct RayBundle {
  std::vector<RayPath> rays;
  Real caustic_time = kNoCaustic;
  Real dt = 0;

  RealVector x0() const;
  // X_t on the launch grid at sample i (rays with fewer samples are skipped by callers)
  bool monotone_at(Index i) const;
};

struct RayOptions {
  Real caustic_tol = 1e-6;
};

RayPath trace_ray(const BandTable& band, const Confinement& confinement, Real x0,
                  const InitialProfile& initial, int sigma, const Coupling& lambda, Real a_abs,
                  Real t_end, Real dt, const RayOptions& opts = {});

RayBundle trace_bundle(const BandTable& band, const Confinement& confinement,
                       const RealVector& x0_grid, const InitialProfile& initial, int sigma,
                       const Coupling& lambda, Real t_end, Real dt, const RayOptions& opts = {});

// a~0(t) = a_I(x0) exp(i omega) per sample.
ComplexVector amplitude_on_ray(const RayPath& path, Complex a_initial);

struct BlowupResult {
  RealVector t;
  RealVector modulus2;        // |a~0|^2 along the ray until the threshold
  Real blowup_time = kNoCaustic;
  Real coarse_time = kNoCaustic;  // crossing time at dt (before Richardson)
};

// Integrates d|a|^2/dt = Im(lambda) kappa |a|^{2 sigma + 2} / J^sigma along one ray.
BlowupResult blowup_experiment(const BandTable& band, const Confinement& confinement, Real x0,
                               const InitialProfile& initial, int sigma, Complex lambda,
                               Real a_abs, Real t_end, Real dt, Real threshold = 1e6);

}  // namespace bwkb
