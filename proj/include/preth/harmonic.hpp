#pragma once

#include <map>

#include "preth/potential.hpp"

namespace preth {

/// Potential-valued Fourier series Z(t) = sum_k Z_k e^{i k nu t} with
/// period T = 2 pi / nu. The same container carries graded decompositions
/// (index m under a number operator) in the static pipeline, where the
/// convolution algebra is identical and `nu` is the grading frequency.
/// Z(t) Hermitian for all t corresponds to Z_{-k} = Z_k^dag.
class HarmonicPotential {
 public:
  HarmonicPotential() = default;
  HarmonicPotential(Lattice lattice, double frequency);

  const Lattice& lattice() const { return lattice_; }
  double frequency() const { return nu_; }
  double period() const;

  bool empty() const;
  /// Largest |k| with a stored (possibly empty) harmonic; 0 when empty.
  int max_harmonic() const;
  const std::map<int, Potential>& harmonics() const { return modes_; }

  /// Stored harmonic k, or nullptr.
  const Potential* harmonic(int k) const;
  /// Harmonic k, or an empty potential on the lattice.
  Potential harmonic_or_zero(int k) const;

  void set_harmonic(int k, Potential p);
  void add_harmonic(int k, const Potential& p, Complex factor = 1.0);
  void add_scaled(const HarmonicPotential& other, Complex factor);

  /// Z(t) as a plain potential (pruned; symmetry set to hermitian when the
  /// series satisfies the Hermiticity pairing).
  Potential value_at(double t) const;

  /// Termwise prune of every harmonic; empty harmonics are dropped.
  void prune(double eps_rel = kDefaultPruneEps, double kappa_acct = 0.0,
             TruncationLedger* ledger = nullptr);

  /// Drop harmonics with |k| > k_cap; their kappa_acct-norm goes to the
  /// ledger's harmonic_cap bucket. No effect when k_cap <= 0.
  void enforce_cap(int k_cap, double kappa_acct = 0.0,
                   TruncationLedger* ledger = nullptr);

  HarmonicPotential& operator+=(const HarmonicPotential& other);
  HarmonicPotential& operator-=(const HarmonicPotential& other);
  HarmonicPotential& operator*=(Complex factor);

 private:
  Lattice lattice_;
  double nu_ = 0.0;
  std::map<int, Potential> modes_;
};

HarmonicPotential operator+(HarmonicPotential a, const HarmonicPotential& b);
HarmonicPotential operator-(HarmonicPotential a, const HarmonicPotential& b);
HarmonicPotential operator*(Complex factor, HarmonicPotential z);
HarmonicPotential operator-(HarmonicPotential z);

/// Z(t)^dag as a series: harmonic k of the result is Z_{-k}^dag.
HarmonicPotential adjoint(const HarmonicPotential& z);

/// Whether Z_{-k} = Z_k^dag holds termwise within tolerance.
bool hermitian_series(const HarmonicPotential& z, double tol = 1e-10);

/// Whether Z_{-k} = -Z_k^dag holds termwise within tolerance (the series
/// evaluates to an anti-Hermitian operator at every time).
bool anti_hermitian_series(const HarmonicPotential& z, double tol = 1e-10);

/// Largest |entry| over all harmonics.
double series_max_entry(const HarmonicPotential& z);

/// Potential as a time-independent series (single k = 0 harmonic).
HarmonicPotential promote(const Potential& p, double frequency);

/// The k = 0 harmonic verbatim (empty potential when absent).
Potential average(const HarmonicPotential& z);

/// Z minus its average: the k = 0 harmonic removed exactly.
HarmonicPotential oscillating_part(HarmonicPotential z);

/// d/dt termwise: harmonic k multiplied by i k nu.
HarmonicPotential time_derivative(const HarmonicPotential& z);

/// Certificate-safe norm: sup_t ||Z_S(t)|| bounded by sum_k ||Z_{S,k}||,
/// i.e. sup_x sum_{S containing x} e^{kappa |S|} sum_k ||Z_{S,k}||.
double kappa_norm(const HarmonicPotential& z, double kappa);

/// Diagnostic companion to kappa_norm: max over `samples` uniform times in
/// one period of the plain kappa_norm of Z(t). Never exceeds kappa_norm().
double kappa_norm_sampled(const HarmonicPotential& z, double kappa,
                          int samples = 64);

/// Sound upper bound on the kappa-norm of [Q, Z] without forming matrices:
/// sum over overlapping term pairs of e^{kappa |S1 u S2|} 2 ||Q_S1|| ||Z_S2||.
double commutator_norm_bound(const Potential& q, const Potential& z,
                             double kappa);

/// Harmonic commutator: result_k = sum_{k1 + k2 = k} [Q_{k1}, Z_{k2}].
/// Harmonics beyond k_cap (> 0) are not formed; their bound is ledgered.
HarmonicPotential commutator(const HarmonicPotential& q,
                             const HarmonicPotential& z, int k_cap,
                             const CommutatorOptions& opts,
                             TruncationLedger* ledger);

Matrix to_dense_at(const HarmonicPotential& z, double t,
                   const DenseBudget& budget = {});

}  // namespace preth
