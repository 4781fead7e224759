#pragma once

#include <vector>

#include "preth/driven.hpp"

namespace preth {

/// Commuting family of on-site number operators N_x with integer spectra,
/// all diagonal in the product basis carried by every potential. Houses
/// N = sum_x N_x for the static renormalization of G = nu N + H.
class NumberOperator {
 public:
  NumberOperator() = default;
  NumberOperator(Lattice lattice, std::vector<std::vector<int>> spectra);

  /// The same integer spectrum at every site.
  static NumberOperator uniform(const Lattice& lattice,
                                const std::vector<int>& spectrum);

  const Lattice& lattice() const { return lattice_; }
  const std::vector<int>& spectrum(int site) const;

  /// Total charge of the product-basis state `index` over `support`
  /// (ascending sites, first site in the most significant tensor slot).
  int charge(const SupportSet& support, long index) const;

  /// sup_x ||N_x||: the largest |eigenvalue| over all sites.
  double site_norm() const;

  /// N as a potential of single-site diagonal terms (zero terms dropped).
  Potential as_potential() const;

  /// Recorded affine offset when a physical half-integer charge was shifted
  /// to integers (N_x -> N_x + shift); purely informational, commutators
  /// are unchanged.
  double affine_shift = 0.0;

 private:
  Lattice lattice_;
  std::vector<std::vector<int>> spectra_;
};

/// Charge-graded potential: component m satisfies [N, Z_m] = m Z_m. The
/// harmonic container is reused verbatim (harmonic index = charge, stored
/// frequency = grading scale nu): commutators convolve charges exactly as
/// they convolve Fourier indices, so the whole series machinery applies.
using GradedPotential = HarmonicPotential;

/// Split Z by charge under ad_N: each term's matrix is scattered by the
/// eigenvalue difference m = N(row) - N(col). The components sum back to Z
/// exactly, and grading a pure component is the identity on it.
GradedPotential grade(const Potential& z, const NumberOperator& n, double nu);

/// Sum all components back into a plain potential (left inverse of grade).
Potential collapse(const GradedPotential& z);

/// Charge-0 component of Z: sum_q chi(N = q) Z chi(N = q), the part
/// commuting with N.
Potential static_average(const Potential& z, const NumberOperator& n);

/// Anti-Hermitian solution of [nu N, A] + V = 0 on a graded drive with no
/// charge-0 component: A_m = -V_m / (nu m), A_0 = 0. The graded variant
/// keeps the charge labels for use inside the recursion; solve_A_static
/// sums them into the plain generator.
GradedPotential solve_A_static_graded(const GradedPotential& v);
Potential solve_A_static(const GradedPotential& v, double nu);

/// One static renormalization step: from (D_n, V_n) with D_n of charge 0,
/// produce A_n and H_{n+1} = gamma(D) + gamma(V) - alpha(V), split by
/// charge into D_{n+1} (component 0) and V_{n+1} (the rest).
struct StaticStepOutcome {
  Potential d_next;
  GradedPotential v_next;
  GradedPotential a;
  TruncationLedger delta;
  int series_terms = 0;
};

StaticStepOutcome static_step(const Potential& d, const GradedPotential& v,
                              const TruncationPolicy& policy);

/// A static problem G = nu N + H with the initial decay rate kappa_0; the
/// splitting H = D + V by charge happens inside static_run.
struct StaticProblem {
  NumberOperator number;
  double nu = 0.0;
  Potential h0;
  double kappa0 = 0.0;

  /// Enforce the stored invariants (Hermitian H, positive rates, matching
  /// lattices); throws on violation.
  void validate() const;
};

/// Run the static recursion; semantics mirror the driven run (certified
/// depth n_star + 1 with refusals, greedy descent with rho_stop), with
/// time-averaging replaced by the charge-0 projection. Norms are measured
/// on the collapsed potentials (no time supremum exists here). The
/// returned records store graded containers in their `v` and `a` fields,
/// and [D_n, N] = 0 holds at every level by construction.
RenormTrace static_run(const StaticProblem& problem, int n_max, RunMode mode,
                       const RunOptions& opts = {});

}  // namespace preth
