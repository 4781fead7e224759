#pragma once

#include <vector>

#include "preth/certificates.hpp"
#include "preth/harmonic.hpp"
#include "preth/series.hpp"

namespace preth {

/// A periodically driven problem H(t) = D + V(t) split into its time
/// average D and zero-average drive V, with the initial decay rate kappa_0.
struct DrivenProblem {
  Potential d0;
  HarmonicPotential v0;
  double kappa0 = 0.0;

  double nu() const { return v0.frequency(); }
  double period() const { return v0.period(); }

  /// Enforce the stored invariants (Hermitian D, zero-average Hermitian
  /// drive, positive rates); throws on violation.
  void validate() const;
};

/// Split a Hermitian time-periodic Hamiltonian into (average, rest).
std::pair<Potential, HarmonicPotential> split(const HarmonicPotential& h);

/// Solve i dA/dt = V with A(0) = 0 in Fourier space:
/// A_k = -V_k/(k nu) for k != 0 and A_0 = sum_{k != 0} V_k/(k nu).
/// Requires average(V) = 0; the result is anti-Hermitian valued.
HarmonicPotential solve_A(const HarmonicPotential& v);

/// One renormalization step: from (D_n, V_n) produce the generator
/// A_n, W_n = (gamma(D) - D) + (gamma(V) - V) - (alpha(V) - V), and split
/// H_{n+1} = D_n + W_n into D_{n+1} = D_n + <W_n>, V_{n+1} = W_n - <W_n>.
struct StepOutcome {
  Potential d_next;
  HarmonicPotential v_next;
  HarmonicPotential a;
  TruncationLedger delta;  // everything discarded during this step
  int series_terms = 0;    // deepest Lie-series order used
};

StepOutcome renorm_step(const Potential& d, const HarmonicPotential& v,
                        const TruncationPolicy& policy);

enum class RunMode { certified, greedy };

/// Snapshot of one renormalization level.
struct StepRecord {
  int n = 0;
  Potential d;
  HarmonicPotential v;
  HarmonicPotential a;    // generator used to leave this level (empty at end)
  double kappa = 0.0;     // kappa_n
  double v_norm = 0.0;    // v(n) = ||V_n||_{kappa_n}
  double d_norm = 0.0;    // d(n)
  double delta_d = 0.0;   // ||D_{n+1} - D_n||_{kappa_{n+1}} (0 at the end)
  int series_terms = 0;
  TruncationLedger ledger;  // cumulative discards up to this level
};

/// Full history of a run plus the chosen effective pair (D-hat, V-hat).
struct RenormTrace {
  RunMode mode = RunMode::greedy;
  double kappa0 = 0.0;
  double nu = 0.0;
  double rho_stop = 0.0;  // greedy continuation factor (0 in certified mode)
  int n_star = -1;        // certified depth (-1 in greedy mode)
  int optimal = 0;        // level index of the reported D-hat, V-hat
  std::vector<StepRecord> levels;
  TruncationLedger ledger;  // final cumulative ledger

  const Potential& d_hat() const { return levels[optimal].d; }
  const HarmonicPotential& v_hat() const { return levels[optimal].v; }
  std::vector<MeasuredNorms> measured() const;
};

struct RunOptions {
  double rho_stop = 0.9;    // greedy: continue while v(n+1) <= rho v(n)
  int k_cap = 0;            // 0 = auto: 3x the drive's native content
  int support_cap = 0;      // 0 = off
  double pair_cutoff = 0.0; // 0 = off
  int m_max = 48;
};

/// Run the recursion. Certified mode validates the closed-form hypotheses,
/// executes exactly n_star + 1 steps (levels 0..n_star+1), and refuses
/// (CertificationRefused) if any hypothesis or per-step condition fails.
/// Greedy mode iterates while v(n) keeps dropping by rho_stop, up to n_max,
/// and reports the level with the smallest measured v(n).
RenormTrace run(const DrivenProblem& problem, int n_max, RunMode mode,
                const RunOptions& opts = {});

/// Dressing map applied to an observable: Y(t) Z Y*(t) =
/// e^{ad_{A_{n-1}}(t)} ... e^{ad_{A_0}(t)} Z over the executed steps
/// (n = optimal level). At stroboscopic times Y = identity up to the ledger.
Potential dress(const RenormTrace& trace, const Potential& z, double t,
                TruncationLedger* ledger = nullptr);

}  // namespace preth
