#include "preth/driven.hpp"

#include <algorithm>
#include <cmath>

#include "preth/errors.hpp"

namespace preth {

void DrivenProblem::validate() const {
  if (kappa0 <= 0.0) throw Error("kappa_0 must be positive");
  if (v0.frequency() <= 0.0) throw Error("frequency must be positive");
  if (d0.lattice() != v0.lattice())
    throw LatticeMismatch("D and V live on different lattices");
  if (!average(v0).empty())
    throw Error("the drive must have zero time average");
  Potential d_check = d0;
  d_check.set_symmetry(Symmetry::hermitian);
  if (!symmetry_holds(d_check))
    throw Error("D must be Hermitian");
  if (!hermitian_series(v0))
    throw Error("the drive must be Hermitian at every time");
}

std::pair<Potential, HarmonicPotential> split(const HarmonicPotential& h) {
  if (!hermitian_series(h))
    throw Error("can only split a Hermitian time-periodic Hamiltonian");
  Potential d = average(h);
  d.set_symmetry(Symmetry::hermitian);
  return {std::move(d), oscillating_part(h)};
}

HarmonicPotential solve_A(const HarmonicPotential& v) {
  if (!average(v).empty())
    throw Error("solve_A requires a zero-average drive");
  const double nu = v.frequency();
  HarmonicPotential a(v.lattice(), nu);
  Potential a0(v.lattice());
  for (const auto& [k, vk] : v.harmonics()) {
    if (k == 0) continue;
    const double inv = 1.0 / (static_cast<double>(k) * nu);
    Potential ak(v.lattice());
    ak.add_scaled(vk, Complex(-inv, 0.0));
    a.set_harmonic(k, std::move(ak));
    a0.add_scaled(vk, Complex(inv, 0.0));
  }
  a0.prune();
  a.set_harmonic(0, std::move(a0));
  return a;
}

StepOutcome renorm_step(const Potential& d, const HarmonicPotential& v,
                        const TruncationPolicy& policy) {
  StepOutcome out;
  out.a = solve_A(v);
  if (v.empty()) {  // fixed point: nothing to rotate away
    out.d_next = d;
    out.v_next = v;
    return out;
  }

  const double nu = v.frequency();
  const HarmonicPotential d_series = promote(d, nu);
  const LieSeriesResult gd =
      lie_series(out.a, d_series, policy, &out.delta, /*want_alpha=*/false);
  const LieSeriesResult gv =
      lie_series(out.a, v, policy, &out.delta, /*want_alpha=*/true);
  out.series_terms = std::max(gd.terms, gv.terms);

  // W = (gamma(D) - D) + (gamma(V) - V) - (alpha(V) - V)
  //   = gamma(D) - D + gamma(V) - alpha(V).
  HarmonicPotential w = gd.gamma;
  w -= d_series;
  w += gv.gamma;
  w -= gv.alpha;
  w.enforce_cap(policy.k_cap, policy.kappa_acct, &out.delta);
  w.prune(policy.eps_prune, policy.kappa_acct, &out.delta);

  out.d_next = d;
  out.d_next += average(w);
  out.d_next.prune(policy.eps_prune, policy.kappa_acct, &out.delta);
  out.d_next.set_symmetry(Symmetry::hermitian);
  out.v_next = oscillating_part(w);

  // Exact algebraic identities, independent of truncation quality.
  if (!symmetry_holds(out.d_next, 1e-9))
    throw Error("Hermiticity of D lost during a step");
  if (!hermitian_series(out.v_next, 1e-9))
    throw Error("Hermiticity of V lost during a step");
  if (!average(out.v_next).empty())
    throw Error("residual drive acquired a nonzero average");
  return out;
}

std::vector<MeasuredNorms> RenormTrace::measured() const {
  std::vector<MeasuredNorms> out;
  out.reserve(levels.size());
  for (const StepRecord& rec : levels)
    out.push_back({rec.v_norm, rec.d_norm, rec.delta_d});
  return out;
}

namespace {

StepRecord make_record(int n, double kappa0, Potential d, HarmonicPotential v,
                       const TruncationLedger& cumulative) {
  StepRecord rec;
  rec.n = n;
  rec.kappa = kappa_schedule(kappa0, n);
  rec.v_norm = kappa_norm(v, rec.kappa);
  rec.d_norm = kappa_norm(d, rec.kappa);
  rec.d = std::move(d);
  rec.v = std::move(v);
  rec.ledger = cumulative;
  return rec;
}

}  // namespace

RenormTrace run(const DrivenProblem& problem, int n_max, RunMode mode,
                const RunOptions& opts) {
  problem.validate();
  if (n_max < 0) throw Error("n_max must be nonnegative");

  RenormTrace trace;
  trace.mode = mode;
  trace.kappa0 = problem.kappa0;
  trace.nu = problem.nu();
  trace.rho_stop = mode == RunMode::greedy ? opts.rho_stop : 0.0;

  TruncationLedger cumulative;
  trace.levels.push_back(make_record(0, problem.kappa0, problem.d0,
                                     problem.v0, cumulative));

  const double v0_norm = trace.levels[0].v_norm;
  const double d0_norm = trace.levels[0].d_norm;
  const double period = problem.period();

  int steps_wanted = n_max;
  if (mode == RunMode::certified) {
    const Hypotheses hyp =
        evaluate_hypotheses(problem.kappa0, problem.nu(), v0_norm, d0_norm);
    if (!hyp.certified())
      throw CertificationRefused(hyp.failed_inequality());
    trace.n_star = hyp.n_star;
    steps_wanted = hyp.n_star + 1;  // levels 0 .. n_star + 1
    if (steps_wanted > n_max)
      throw Error("certified depth n_star + 1 exceeds n_max");
  }

  const int k_cap = opts.k_cap > 0
                        ? opts.k_cap
                        : 3 * std::max(1, problem.v0.max_harmonic());

  for (int n = 0; n < steps_wanted; ++n) {
    StepRecord& current = trace.levels.back();
    if (current.v.empty()) break;  // fixed point reached

    if (mode == RunMode::certified) {
      const StepConditions cond = step_conditions(
          problem.kappa0, n, period, current.v_norm, current.d_norm);
      if (!cond.both()) throw CertificationRefused(cond.failed_inequality());
    }

    TruncationPolicy policy =
        make_policy(v0_norm, kappa_schedule(problem.kappa0, n + 1), k_cap);
    policy.support_cap = opts.support_cap;
    policy.pair_cutoff = opts.pair_cutoff;
    policy.m_max = opts.m_max;

    const StepOutcome step = renorm_step(current.d, current.v, policy);
    cumulative += step.delta;

    current.a = step.a;
    current.series_terms = step.series_terms;
    current.delta_d =
        kappa_norm(step.d_next - current.d,
                   kappa_schedule(problem.kappa0, n + 1));

    StepRecord next = make_record(n + 1, problem.kappa0, step.d_next,
                                  step.v_next, cumulative);
    trace.levels.push_back(std::move(next));

    if (mode == RunMode::greedy) {
      const double v_prev = trace.levels[trace.levels.size() - 2].v_norm;
      const double v_new = trace.levels.back().v_norm;
      if (v_new == 0.0 || v_new > opts.rho_stop * v_prev) break;
    }
  }

  trace.ledger = cumulative;
  if (mode == RunMode::certified) {
    trace.optimal = static_cast<int>(trace.levels.size()) - 1;
  } else {
    int best = 0;
    for (size_t i = 1; i < trace.levels.size(); ++i)
      if (trace.levels[i].v_norm < trace.levels[best].v_norm)
        best = static_cast<int>(i);
    trace.optimal = best;
  }
  return trace;
}

Potential dress(const RenormTrace& trace, const Potential& z, double t,
                TruncationLedger* ledger) {
  if (trace.levels.empty()) throw Error("dress needs a nonempty trace");
  if (z.lattice() != trace.levels[0].d.lattice())
    throw LatticeMismatch("observable lives on a different lattice");

  Potential out = z;
  TruncationLedger scratch;
  TruncationLedger* sink = ledger ? ledger : &scratch;
  const double kappa_acct = kappa_schedule(trace.kappa0, trace.optimal);
  const double reference = std::max(kappa_norm(z, trace.kappa0), 1e-300);

  // Y(t) Z Y*(t) = e^{ad_{A_{n-1}}} ... e^{ad_{A_0}} Z, innermost first.
  for (int j = 0; j < trace.optimal; ++j) {
    const Potential aj = trace.levels[j].a.value_at(t);
    if (aj.empty()) continue;
    // e^{ad_Q} Z = e^{Q} Z e^{-Q} = e^{-ad_{-Q}} Z.
    TruncationPolicy policy = make_policy(reference, kappa_acct);
    out = conjugate_series(Complex(-1.0, 0.0) * aj, out, policy, sink);
  }
  return out;
}

}  // namespace preth
