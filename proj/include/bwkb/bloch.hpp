#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bwkb/confinement.hpp"
#include "bwkb/lattice.hpp"
#include "bwkb/profile.hpp"
#include "bwkb/types.hpp"

namespace bwkb {

// Plane-wave Galerkin truncation of H(k) = (-i d/dy + k)^2 / 2 + V(y),
// modes m = -cutoff..cutoff.
struct BlochProblem {
  PeriodicPotential potential;
  int cutoff = 32;
  int n_bands = 4;

  Index size() const { return 2 * cutoff + 1; }
  const Lattice& lattice() const { return potential.lattice(); }
};

void validate(const BlochProblem& problem);

ComplexMatrix bloch_hamiltonian(const BlochProblem& problem, Real k);

// Full eigen-decomposition at one k, ascending, columns normalized.
struct BlochSpectrum {
  Real k = 0;
  Real dual_period = 0;
  RealVector energies;
  ComplexMatrix vectors;

  Index size() const { return energies.size(); }
  // diagonal of dH/dk
  RealVector momentum_diagonal() const;
};

BlochSpectrum bloch_spectrum(const BlochProblem& problem, Real k);

// First n_bands eigenpairs.
std::vector<std::pair<Real, ComplexVector>> solve_bloch_at_k(const BlochProblem& problem, Real k);

// Band quantities from a spectrum; `band` is 1-based throughout.
Real band_velocity(const BlochSpectrum& s, int band);
Real band_curvature(const BlochSpectrum& s, int band, Real gap_tol = 1e-8);
// Q d/dk chi_n, the gauge-free part of the k-derivative (orthogonal to chi_n).
ComplexVector projected_derivative(const BlochSpectrum& s, int band, Real gap_tol = 1e-8);
// Q^T (H - E_n)^{-1} Q applied to rhs: sum_{m != n} chi_m <chi_m, rhs> / (E_m - E_n).
ComplexVector reduced_resolvent(const BlochSpectrum& s, int band, const ComplexVector& rhs,
                                Real gap_tol = 1e-8);

Real group_velocity(const BlochProblem& problem, int band, Real k);
Real kappa_integral(const BlochProblem& problem, int band, Real k, int sigma);

// Cell integrals over the plane-wave coefficients of chi (sum |c|^2 = 1).
Real kappa_from_coeffs(const ComplexVector& c, int sigma, const Lattice& lattice);
Real kappa_slope_from_coeffs(const ComplexVector& c, const ComplexVector& dc, int sigma,
                             const Lattice& lattice);
// coefficients of |chi|^{2 sigma} chi, truncated to the same modes
ComplexVector nonlinear_coeffs(const ComplexVector& c, int sigma, const Lattice& lattice);
// chi(y) for coefficients c
Complex bloch_wave(const ComplexVector& c, Real y, const Lattice& lattice);

// c_m -> c_{m + shift}, which maps chi(., k) to chi(., k + shift * G).
ComplexVector shift_modes(const ComplexVector& c, int shift);

struct BandTableOptions {
  int k_points = 129;
  Real gap_tol = 1e-8;
};

// Gauge-fixed samples of one isolated band over a cell-centred Brillouin grid
//   k_j = -pi/period + (j + 1/2) dk,  j = 0..k_points-1,
// with a smooth on-demand extension chi(k) to all real k that agrees with the
// table at the nodes and whose Berry potential (antiderivative of
// Im<chi, d_k chi>) is available in closed form.
class BandTable {
 public:
  static BandTable build(const BlochProblem& problem, int band, const BandTableOptions& opts = {});

  // Same band with every stored chi multiplied by exp(i theta(k)).
  BandTable with_gauge(const std::function<Real(Real)>& theta) const;

  int band() const { return band_; }
  const BlochProblem& problem() const { return problem_; }
  const Lattice& lattice() const { return problem_.lattice(); }
  Index size() const { return k_.size(); }
  Real spacing() const { return dk_; }
  Real gap_tol() const { return gap_tol_; }

  const RealVector& k_grid() const { return k_; }
  const RealVector& energies() const { return energy_; }
  // all energies up to n_bands, row per k
  const RealMatrix& all_energies() const { return all_energies_; }
  const RealVector& velocities() const { return velocity_; }
  const RealVector& curvatures() const { return curvature_; }
  // column j holds chi at k_j
  const ComplexMatrix& eigvecs() const { return vecs_; }
  // finite-difference <chi, d_k chi> on the table, purely imaginary up to O(dk^2)
  const ComplexVector& connection() const { return conn_; }
  const RealVector& gaps() const { return gap_; }
  Real min_gap() const { return min_gap_; }
  Real winding_phase() const { return winding_; }
  RealVector kappa_samples(int sigma) const;

  // Smooth extensions to any real k (k outside B uses the periodicity of the band).
  Real energy(Real k) const { return energy_derivs(k)[0]; }
  Real velocity(Real k) const { return energy_derivs(k)[1]; }
  Real curvature(Real k) const { return energy_derivs(k)[2]; }
  std::array<Real, 3> energy_derivs(Real k) const;
  Real kappa(Real k, int sigma) const;
  Real kappa_slope(Real k, int sigma) const;
  // Im<chi, d_k chi> of bloch_vector(k)
  Real berry_connection(Real k) const;
  // antiderivative of berry_connection, zero at k = 0
  Real berry_potential(Real k) const;
  // gauge-fixed coefficients of chi(., k) (fresh eigensolve, memoized)
  ComplexVector bloch_vector(Real k) const;
  Real folded(Real k) const;

 private:
  struct Interval {
    Real dtheta = 0;                  // phase change across the interval
    Real theta_slope0 = 0, theta_slope1 = 0;
    std::array<Real, 4> ref_connection{};  // at nodes j-1 .. j+2
    Real potential0 = 0;              // berry potential at the left node
  };
  struct Locator {
    int wrap;
    Index j;
    Real t;
  };
  struct KappaNodes {
    RealVector value, slope;
  };

  BandTable() = default;
  Locator locate(Real k) const;
  ComplexVector node_vector(Index i) const;      // any integer index, periodic with shifts
  ComplexVector node_derivative(Index i) const;  // Q d_k chi at node i
  void finish_gauge();
  const KappaNodes& kappa_nodes(int sigma) const;
  Real theta(const Interval& iv, Real t) const;

  BlochProblem problem_;
  int band_ = 1;
  Real gap_tol_ = 1e-8;
  Real dk_ = 0;
  RealVector k_;
  RealVector energy_, velocity_, curvature_, gap_;
  RealMatrix all_energies_;
  ComplexMatrix vecs_, dvecs_;
  ComplexVector conn_;
  Real min_gap_ = 0;
  Real winding_ = 0;
  std::vector<Interval> intervals_;
  Real potential_period_ = 0;
  Real potential_offset_ = 0;

  struct Cache {
    std::shared_mutex mutex;
    std::unordered_map<long long, ComplexVector> vectors;
    std::mutex kappa_mutex;
    std::map<int, KappaNodes> kappa;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

// Plane-wave coefficients of the t=0 corrector u1 (orthogonal to chi_n) per x.
struct CorrectorField {
  RealVector x;
  ComplexMatrix coeffs;  // column per x
};

CorrectorField well_prepared_corrector(const BandTable& band, const InitialProfile& initial,
                                       const Confinement& confinement, Real lambda0, int sigma,
                                       const RealVector& x_grid);

}  // namespace bwkb
