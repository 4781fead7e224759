#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "preth/driven.hpp"
#include "preth/static_renorm.hpp"

namespace preth {

/// One piecewise-constant stretch of an evolution protocol.
struct Segment {
  double duration = 0.0;
  Potential hamiltonian;
};

/// How to generate U(T) over one period: either an exactly-solvable list of
/// piecewise-constant segments, or a smooth harmonic drive handed to a
/// commutator-respecting fixed-step integrator.
class EvolutionProtocol {
 public:
  /// Segments must be positive and sum to `expected_period` within 1e-12.
  static EvolutionProtocol piecewise(std::vector<Segment> segments,
                                     double expected_period);
  /// order must be 2 (midpoint exponential) or 4 (two-exponential
  /// composition on Gauss nodes); the step count is doubled until two
  /// consecutive propagators agree within `tolerance`.
  static EvolutionProtocol smooth(HarmonicPotential drive,
                                  int steps_per_period = 64, int order = 4,
                                  double tolerance = 1e-9);

  bool is_piecewise() const { return piecewise_; }
  const std::vector<Segment>& segments() const { return segments_; }
  const HarmonicPotential& drive() const { return drive_; }
  double period() const { return period_; }
  int steps_per_period() const { return steps_; }
  int order() const { return order_; }
  double tolerance() const { return tolerance_; }

 private:
  bool piecewise_ = true;
  std::vector<Segment> segments_;
  HarmonicPotential drive_;
  double period_ = 0.0;
  int steps_ = 64;
  int order_ = 4;
  double tolerance_ = 1e-9;
};

/// Dense one-period propagator U(T). Piecewise protocols multiply exact
/// matrix exponentials; smooth protocols integrate with step-halving until
/// converged (IntegratorFailure otherwise). The result is unitary to 1e-10
/// (re-orthonormalized once if an accumulation drifts past that).
Matrix period_propagator(const EvolutionProtocol& protocol,
                         const DenseBudget& budget = {});

/// Time grid plus named scalar diagnostics, with run metadata.
struct SimulationTrace {
  std::vector<double> times;
  std::vector<std::pair<std::string, std::vector<double>>> series;
  std::map<std::string, std::string> metadata;

  const std::vector<double>& column(const std::string& name) const;
  bool has_column(const std::string& name) const;
};

struct DiagnosticOptions {
  bool spectral = true;  // also report operator norms (Lanczos) per point
  int stride = 1;        // record every `stride` periods
  /// When nonempty, record exactly these period counts instead of the
  /// 0..n_periods stride walk. Phases are raised to the power directly
  /// (e^{i n theta}), so astronomically late samples cost the same as
  /// early ones. Heating diagnostic only.
  std::vector<double> sample_periods;
};

/// Stroboscopic heating of the effective Hamiltonian: per-volume norms of
/// U*(nT) Z U(nT) - Z for Z in {d_hat, d_bare}, reported as the
/// infinite-temperature 2-norm (columns dhat_two/bare_two) and optionally
/// the spectral norm (dhat_spectral/bare_spectral). U(T) is diagonalized
/// once; each period is a phase update, so long horizons are cheap.
SimulationTrace heating_diagnostic(const Matrix& u_period,
                                   const Matrix& d_hat, const Matrix& d_bare,
                                   int n_periods, double period, int sites,
                                   const DiagnosticOptions& opts = {});

/// Tracking error of a local observable: norms of
/// U*(nT) O U(nT) - e^{i n T D} O e^{-i n T D} (columns error_two and
/// optionally error_spectral), plus a crude envelope fit
/// err <= K (t + K')^2 recorded in metadata (fit_K, fit_Kprime).
SimulationTrace observable_tracking(const Matrix& u_period, const Matrix& d,
                                    const Matrix& observable, int n_periods,
                                    double period,
                                    const DiagnosticOptions& opts = {});

/// Conservation diagnostic under a static Hamiltonian: seeded random
/// product states evolve under e^{-iGt}; columns drift_mean and drift_var
/// hold the ensemble mean and variance of <Q(t)> - <Q(0)>, and
/// drift_abs_mean the mean absolute drift.
SimulationTrace static_conservation(const Matrix& g, const Matrix& q,
                                    const std::vector<double>& times,
                                    int n_states, const Lattice& lattice,
                                    std::uint64_t seed);

/// Commutator growth ||[A, e^{itH} B e^{-itH}]|| on a time grid (column
/// commutator_norm); the empirical side of the Lieb-Robinson velocity.
SimulationTrace lr_probe(const Matrix& h, const Matrix& a, const Matrix& b,
                         const std::vector<double>& times);

/// Dense dressing unitary of a driven trace: Y(t) = e^{A_{n-1}(t)} ...
/// e^{A_0(t)} over the executed steps (n = optimal level).
Matrix dressing_unitary(const RenormTrace& trace, double t,
                        const DenseBudget& budget = {});

/// Dense transform unitary of a static trace: Y = e^{-A_{n-1}} ... e^{-A_0},
/// satisfying Y (nu N + H) Y* = nu N + D_hat + V_hat within the ledger.
Matrix static_dressing_unitary(const RenormTrace& trace,
                               const DenseBudget& budget = {});

}  // namespace preth
