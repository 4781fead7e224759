#pragma once

#include <string>
#include <vector>

#include "preth/potential.hpp"
#include "preth/series.hpp"

namespace preth {

/// Decay-rate schedule kappa_n = kappa_0 / (1 + ln(n + 1)).
double kappa_schedule(double kappa0, int n);

/// delta kappa_n = kappa_n - kappa_{n+1}.
double delta_kappa(double kappa0, int n);

/// m(n) = 18 / (delta kappa_n * kappa_{n+1}), the conjugation-lemma rate.
double lemma_rate(double kappa0, int n);

/// The closed-form hypotheses gating a certified run: the frequency must
/// dominate both the drive scale and the combined local scale nu_0, and the
/// certified depth n_star must be at least 1.
struct Hypotheses {
  double kappa0 = 0.0;
  double nu = 0.0;
  double v0 = 0.0;
  double d0 = 0.0;
  double nu0 = 0.0;   // (54 pi / kappa_0^2) (d0 + 2 v0)
  int n_star = 0;     // floor((nu/nu0) / (1 + ln(nu/nu0))^3) - 2
  bool frequency_ok = false;  // nu >= 9 pi v0 / kappa_0
  bool ratio_ok = false;      // nu >= nu0
  bool n_star_ok = false;     // n_star >= 1

  bool certified() const { return frequency_ok && ratio_ok && n_star_ok; }
  /// Human-readable description of the first failed inequality ("" if none).
  std::string failed_inequality() const;
};

Hypotheses evaluate_hypotheses(double kappa0, double nu, double v0,
                               double d0);

/// Norms measured at one renormalization level.
struct MeasuredNorms {
  double v = 0.0;        // ||V_n||_{kappa_n}
  double d = 0.0;        // ||D_n||_{kappa_n}
  double delta_d = 0.0;  // ||D_{n+1} - D_n||_{kappa_{n+1}} (0 at the last)
};

/// The two per-step conditions of the contraction argument, evaluated from
/// measured norms. When both hold, the next level must contract by 2/3.
struct StepConditions {
  int n = 0;
  double kappa_n = 0.0;
  double kappa_np1 = 0.0;
  double delta_kappa_n = 0.0;
  double m_n = 0.0;
  double v = 0.0;
  double d = 0.0;
  bool drive_small = false;   // (3T/2) v(n) <= delta kappa_n
  bool contraction = false;   // T m(n) (d(n) + 2 v(n)) < 2/3
  bool both() const { return drive_small && contraction; }
  std::string failed_inequality() const;
};

StepConditions step_conditions(double kappa0, int n, double period, double v,
                               double d);

/// Evaluate both conditions at every measured level (the last level has no
/// successor and is judged on its own norms all the same).
std::vector<StepConditions> contraction_conditions(
    double kappa0, double period, const std::vector<MeasuredNorms>& levels);

/// Slow-heating bound t * K0 * (2/3)^{n_star}, K0 = C d0 v0. The theorem
/// constant C is configurable (default 1) and echoed in every report.
double heating_bound(double t, double d0, double v0, int n_star,
                     double constant_c = 1.0);

/// Lieb-Robinson velocity C(dim) kappa^{-(dim+2)} e^kappa ||Z||_{2 kappa}.
double lr_velocity(double norm_two_kappa, double kappa, int dim,
                   double constant_cd = 1.0);

/// Empirical validation of the conjugation lemma
///   ||e^Q Z e^{-Q} - Z||_{n+1} <= m(n) ||Z||_n ||Q||_n
/// under 3||Q||_n <= delta kappa_n, on seeded random potentials (supports of
/// up to 3 sites on a chain). Q is rescaled so the hypothesis is saturated
/// at `saturation` of its allowed size.
struct LemmaCheckStats {
  int trials = 0;
  int violations = 0;
  double worst_ratio = 0.0;  // max over trials of measured / bound
  std::string first_violation;
};

LemmaCheckStats lemma_check(int n_trials, int chain_sites, double kappa0,
                            int n, std::uint64_t seed,
                            double saturation = 1.0);

/// One row of the certification table.
struct CertificateRow {
  int n = 0;
  double kappa_n = 0.0;
  double delta_kappa_n = 0.0;
  double m_n = 0.0;
  double v_predicted = 0.0;  // v(0) (2/3)^n
  double v_measured = 0.0;
  double d_measured = 0.0;
  bool drive_small = false;
  bool contraction = false;
};

/// Full certificate: hypotheses, the per-level table, and the heating bound
/// slope, with every configurable constant echoed.
struct CertificateReport {
  Hypotheses hypotheses;
  double period = 0.0;
  std::vector<CertificateRow> rows;
  double constant_c = 1.0;      // theorem constant in K0
  double k0 = 0.0;              // C d(0) v(0)
  double heating_slope = 0.0;   // K0 (2/3)^{n_star}, per unit time
  bool certified = false;
  std::string failed;
};

CertificateReport build_report(double kappa0, double nu,
                               const std::vector<MeasuredNorms>& levels,
                               double constant_c = 1.0);

}  // namespace preth
