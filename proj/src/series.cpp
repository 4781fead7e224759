#include "preth/series.hpp"

#include <cmath>
#include <sstream>

#include "preth/errors.hpp"

namespace preth {

TruncationPolicy make_policy(double reference_norm, double kappa_acct,
                             int k_cap) {
  TruncationPolicy policy;
  policy.eps_series = kSeriesEpsRel * std::max(reference_norm, 1e-300);
  policy.kappa_acct = kappa_acct;
  policy.k_cap = k_cap;
  return policy;
}

LieSeriesResult lie_series(const HarmonicPotential& a,
                           const HarmonicPotential& z,
                           const TruncationPolicy& policy,
                           TruncationLedger* ledger, bool want_alpha) {
  LieSeriesResult result;
  result.gamma = z;
  result.alpha = want_alpha ? z : HarmonicPotential(z.lattice(),
                                                    z.frequency());
  if (z.empty() || a.empty()) return result;

  const CommutatorOptions copts = policy.commutator_options();
  HarmonicPotential term = z;
  double prev = kappa_norm(term, policy.kappa_acct);

  for (int m = 1; m <= policy.m_max; ++m) {
    term = commutator(a, term, policy.k_cap, copts, ledger);
    term *= Complex(-1.0 / m, 0.0);
    const double tau = kappa_norm(term, policy.kappa_acct);
    result.terms = m;
    if (term.empty()) return result;

    result.gamma += term;
    if (want_alpha)
      result.alpha.add_scaled(term, Complex(1.0 / (m + 1), 0.0));

    if (tau < policy.eps_series && tau < prev) {
      const double r = tau / prev;
      const double tail = tau * r / (1.0 - r);
      if (ledger) {
        ledger->series_tail += tail;
        if (want_alpha) ledger->series_tail += tail / (m + 2);
      }
      result.gamma.prune(policy.eps_prune, policy.kappa_acct, ledger);
      if (want_alpha)
        result.alpha.prune(policy.eps_prune, policy.kappa_acct, ledger);
      return result;
    }
    prev = tau;
  }

  std::ostringstream msg;
  msg << "Lie series shows no decay after " << policy.m_max
      << " terms (last term norm " << prev
      << "): perturbative regime violated";
  throw SeriesDivergence(msg.str());
}

namespace {

constexpr double kDummyFrequency = 1.0;

}  // namespace

Potential conjugate_series(const Potential& a, const Potential& z,
                           const TruncationPolicy& policy,
                           TruncationLedger* ledger) {
  const auto result =
      lie_series(promote(a, kDummyFrequency), promote(z, kDummyFrequency),
                 policy, ledger, /*want_alpha=*/false);
  return average(result.gamma);
}

Potential alpha_series(const Potential& a, const Potential& z,
                       const TruncationPolicy& policy,
                       TruncationLedger* ledger) {
  const auto result =
      lie_series(promote(a, kDummyFrequency), promote(z, kDummyFrequency),
                 policy, ledger, /*want_alpha=*/true);
  return average(result.alpha);
}

}  // namespace preth
