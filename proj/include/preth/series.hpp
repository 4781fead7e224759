#pragma once

#include "preth/harmonic.hpp"

namespace preth {

/// Knobs bounding every truncated expansion. eps_series is an absolute
/// threshold on the kappa_acct-norm of a series term; callers fix it
/// relative to the initial drive strength (see make_policy).
struct TruncationPolicy {
  double eps_series = 1e-12;
  double eps_prune = kDefaultPruneEps;
  double kappa_acct = 0.0;   // accounting decay rate for ledgered discards
  int m_max = 48;            // series terms before declaring divergence
  int k_cap = 0;             // harmonic cap; 0 = unlimited
  int support_cap = 0;       // widest kept support; 0 = unlimited
  double pair_cutoff = 0.0;  // commutator pair screening; 0 = off

  CommutatorOptions commutator_options() const {
    return CommutatorOptions{pair_cutoff, support_cap, kappa_acct, eps_prune};
  }
};

/// Default relative thresholds, resolved against a reference scale
/// (the initial ||V||_{kappa_0}).
inline constexpr double kSeriesEpsRel = 1e-12;

TruncationPolicy make_policy(double reference_norm, double kappa_acct,
                             int k_cap = 0);

/// Truncated Lie conjugation series around an anti-Hermitian generator A:
///   gamma = e^{-ad_A} Z = sum_m T_m,  T_0 = Z,  T_m = -(1/m) [A, T_{m-1}],
///   alpha = int_0^1 e^{-s ad_A} Z ds = sum_m T_m / (m+1).
struct LieSeriesResult {
  HarmonicPotential gamma;
  HarmonicPotential alpha;
  int terms = 0;  // highest m actually formed
};

/// Run the shared T_m recursion until the kappa_acct-norm of T_m falls
/// below eps_series while decaying (ratio < 1); the geometric tail bound is
/// added to the ledger. Raises SeriesDivergence if m_max terms pass without
/// meeting the criterion. `want_alpha` skips the alpha accumulation.
LieSeriesResult lie_series(const HarmonicPotential& a,
                           const HarmonicPotential& z,
                           const TruncationPolicy& policy,
                           TruncationLedger* ledger, bool want_alpha = true);

/// Plain-potential conveniences (single k = 0 harmonic throughout).
Potential conjugate_series(const Potential& a, const Potential& z,
                           const TruncationPolicy& policy,
                           TruncationLedger* ledger);
Potential alpha_series(const Potential& a, const Potential& z,
                       const TruncationPolicy& policy,
                       TruncationLedger* ledger);

}  // namespace preth
