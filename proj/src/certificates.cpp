#include "preth/certificates.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "preth/errors.hpp"
#include "preth/rng.hpp"

namespace preth {

double kappa_schedule(double kappa0, int n) {
  if (kappa0 <= 0.0) throw Error("decay rate must be positive");
  if (n < 0) throw Error("schedule index must be nonnegative");
  return kappa0 / (1.0 + std::log(static_cast<double>(n + 1)));
}

double delta_kappa(double kappa0, int n) {
  return kappa_schedule(kappa0, n) - kappa_schedule(kappa0, n + 1);
}

double lemma_rate(double kappa0, int n) {
  return 18.0 / (delta_kappa(kappa0, n) * kappa_schedule(kappa0, n + 1));
}

std::string Hypotheses::failed_inequality() const {
  std::ostringstream out;
  if (!frequency_ok) {
    out << "nu >= 9 pi v(0)/kappa_0 fails: " << nu << " < "
        << 9.0 * std::numbers::pi * v0 / kappa0;
    return out.str();
  }
  if (!ratio_ok) {
    out << "nu >= nu_0 fails: " << nu << " < " << nu0;
    return out.str();
  }
  if (!n_star_ok) {
    out << "n_star >= 1 fails: n_star = " << n_star;
    return out.str();
  }
  return {};
}

Hypotheses evaluate_hypotheses(double kappa0, double nu, double v0,
                               double d0) {
  if (kappa0 <= 0.0 || nu <= 0.0)
    throw Error("kappa_0 and nu must be positive");
  if (v0 < 0.0 || d0 < 0.0) throw Error("norms must be nonnegative");

  Hypotheses h;
  h.kappa0 = kappa0;
  h.nu = nu;
  h.v0 = v0;
  h.d0 = d0;
  h.nu0 = (54.0 * std::numbers::pi / (kappa0 * kappa0)) * (d0 + 2.0 * v0);
  h.frequency_ok = nu >= 9.0 * std::numbers::pi * v0 / kappa0;
  h.ratio_ok = nu >= h.nu0;

  const double x = nu / h.nu0;
  const double denom = std::pow(1.0 + std::log(x), 3);
  if (denom <= 0.0) {
    h.n_star = -1000000;
  } else {
    const double raw = std::floor(x / denom) - 2.0;
    h.n_star = static_cast<int>(std::max(-1e6, std::min(1e6, raw)));
  }
  h.n_star_ok = h.n_star >= 1;
  return h;
}

std::string StepConditions::failed_inequality() const {
  std::ostringstream out;
  if (!drive_small) {
    out << "(3T/2) v(" << n << ") <= delta kappa_" << n << " fails: " << v
        << " too large for " << delta_kappa_n;
    return out.str();
  }
  if (!contraction) {
    out << "T m(" << n << ") (d(" << n << ") + 2 v(" << n
        << ")) < 2/3 fails: value "
        << (m_n == 0.0 ? 0.0 : m_n * (d + 2.0 * v));
    return out.str();
  }
  return {};
}

StepConditions step_conditions(double kappa0, int n, double period, double v,
                               double d) {
  StepConditions c;
  c.n = n;
  c.kappa_n = kappa_schedule(kappa0, n);
  c.kappa_np1 = kappa_schedule(kappa0, n + 1);
  c.delta_kappa_n = c.kappa_n - c.kappa_np1;
  c.m_n = lemma_rate(kappa0, n);
  c.v = v;
  c.d = d;
  c.drive_small = 1.5 * period * v <= c.delta_kappa_n;
  c.contraction = period * c.m_n * (d + 2.0 * v) < 2.0 / 3.0;
  return c;
}

std::vector<StepConditions> contraction_conditions(
    double kappa0, double period, const std::vector<MeasuredNorms>& levels) {
  std::vector<StepConditions> out;
  out.reserve(levels.size());
  for (size_t n = 0; n < levels.size(); ++n)
    out.push_back(step_conditions(kappa0, static_cast<int>(n), period,
                                  levels[n].v, levels[n].d));
  return out;
}

double heating_bound(double t, double d0, double v0, int n_star,
                     double constant_c) {
  if (t < 0.0) throw Error("time must be nonnegative");
  const double k0 = constant_c * d0 * v0;
  return t * k0 * std::pow(2.0 / 3.0, n_star);
}

double lr_velocity(double norm_two_kappa, double kappa, int dim,
                   double constant_cd) {
  if (kappa <= 0.0) throw Error("decay rate must be positive");
  return constant_cd * std::pow(kappa, -(dim + 2)) * std::exp(kappa) *
         norm_two_kappa;
}

namespace {

/// Random Hermitian potential with supports of 1..3 contiguous sites.
Potential random_lemma_potential(const Lattice& lat, Rng& rng, int max_width,
                                 int terms) {
  Potential p(lat, Symmetry::hermitian);
  for (int i = 0; i < terms; ++i) {
    const int width =
        1 + static_cast<int>(rng.uniform() * max_width) % max_width;
    const int start =
        static_cast<int>(rng.uniform() * (lat.sites() - width));
    std::vector<int> sites(width);
    for (int w = 0; w < width; ++w) sites[w] = start + w;
    const long dim = pow_long(lat.local_dim(), width);
    Matrix g(dim, dim);
    for (long r = 0; r < dim; ++r)
      for (long c = 0; c < dim; ++c) g(r, c) = rng.complex_normal();
    p.add(sites, (0.5 * (g + g.adjoint())).eval());
  }
  p.prune();
  return p;
}

}  // namespace

LemmaCheckStats lemma_check(int n_trials, int chain_sites, double kappa0,
                            int n, std::uint64_t seed, double saturation) {
  if (saturation <= 0.0 || saturation > 1.0)
    throw Error("saturation must lie in (0, 1]");
  const Lattice lat = Lattice::chain(chain_sites);
  const double kn = kappa_schedule(kappa0, n);
  const double knp1 = kappa_schedule(kappa0, n + 1);
  const double dk = kn - knp1;
  const double bound_rate = lemma_rate(kappa0, n);

  LemmaCheckStats stats;
  Rng base(seed);
  for (int trial = 0; trial < n_trials; ++trial) {
    Rng rng = base.split(trial);
    const Potential z = random_lemma_potential(lat, rng, 3, chain_sites);
    Potential q_raw = random_lemma_potential(lat, rng, 3, chain_sites);
    // Anti-Hermitian generator, rescaled so 3||Q||_n = saturation * dk.
    Potential q = Complex(0, 1) * q_raw;
    const double qn_raw = kappa_norm(q, kn);
    if (qn_raw == 0.0) continue;
    q *= Complex(saturation * dk / (3.0 * qn_raw), 0.0);

    const double zn = kappa_norm(z, kn);
    const double qn = kappa_norm(q, kn);

    // e^{Q} Z e^{-Q} = e^{-ad_{-Q}} Z. Truncation is sound here because
    // every discarded bound lands in the ledger, which is *added* to the
    // measured side below: coarse cutoffs can only push toward a violation,
    // never mask one. That keeps the sweep cheap on long chains.
    TruncationPolicy policy = make_policy(zn, knp1);
    policy.eps_series = 1e-6 * std::max(zn, 1e-300);
    policy.support_cap = 6;
    TruncationLedger ledger;
    const Potential conj = conjugate_series(-q, z, policy, &ledger);
    const double measured =
        kappa_norm(conj - z, knp1) + ledger.total();
    const double bound = bound_rate * zn * qn;

    stats.trials += 1;
    if (bound > 0.0)
      stats.worst_ratio = std::max(stats.worst_ratio, measured / bound);
    if (measured > bound * (1.0 + 1e-10)) {
      stats.violations += 1;
      if (stats.first_violation.empty()) {
        std::ostringstream out;
        out << "trial " << trial << ": measured " << measured << " > bound "
            << bound << " (||Z||_n = " << zn << ", ||Q||_n = " << qn
            << ", m(n) = " << bound_rate << ")";
        stats.first_violation = out.str();
      }
    }
  }
  return stats;
}

CertificateReport build_report(double kappa0, double nu,
                               const std::vector<MeasuredNorms>& levels,
                               double constant_c) {
  if (levels.empty()) throw Error("report needs at least one level");
  CertificateReport report;
  const double v0 = levels.front().v;
  const double d0 = levels.front().d;
  report.hypotheses = evaluate_hypotheses(kappa0, nu, v0, d0);
  report.period = 2.0 * std::numbers::pi / nu;
  report.constant_c = constant_c;
  report.k0 = constant_c * d0 * v0;
  report.heating_slope =
      report.k0 * std::pow(2.0 / 3.0, report.hypotheses.n_star);
  report.certified = report.hypotheses.certified();
  report.failed = report.hypotheses.failed_inequality();

  for (size_t n = 0; n < levels.size(); ++n) {
    const StepConditions c = step_conditions(
        kappa0, static_cast<int>(n), report.period, levels[n].v, levels[n].d);
    CertificateRow row;
    row.n = static_cast<int>(n);
    row.kappa_n = c.kappa_n;
    row.delta_kappa_n = c.delta_kappa_n;
    row.m_n = c.m_n;
    row.v_predicted = v0 * std::pow(2.0 / 3.0, static_cast<double>(n));
    row.v_measured = levels[n].v;
    row.d_measured = levels[n].d;
    row.drive_small = c.drive_small;
    row.contraction = c.contraction;
    report.rows.push_back(row);
    if (report.certified && static_cast<int>(n) <= report.hypotheses.n_star &&
        !c.both()) {
      report.certified = false;
      report.failed = c.failed_inequality();
    }
  }
  return report;
}

}  // namespace preth
