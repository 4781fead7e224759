#include "preth/static_renorm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "preth/errors.hpp"

namespace preth {

NumberOperator::NumberOperator(Lattice lattice,
                               std::vector<std::vector<int>> spectra)
    : lattice_(std::move(lattice)), spectra_(std::move(spectra)) {
  if (static_cast<int>(spectra_.size()) != lattice_.sites())
    throw Error("number operator needs one spectrum per site");
  for (const auto& s : spectra_)
    if (static_cast<int>(s.size()) != lattice_.local_dim())
      throw Error("number-operator spectrum must match the local dimension");
}

NumberOperator NumberOperator::uniform(const Lattice& lattice,
                                       const std::vector<int>& spectrum) {
  return NumberOperator(
      lattice, std::vector<std::vector<int>>(lattice.sites(), spectrum));
}

const std::vector<int>& NumberOperator::spectrum(int site) const {
  if (site < 0 || site >= static_cast<int>(spectra_.size()))
    throw Error("number-operator site index out of range");
  return spectra_[static_cast<size_t>(site)];
}

int NumberOperator::charge(const SupportSet& support, long index) const {
  const int q = lattice_.local_dim();
  int total = 0;
  for (int i = support.size() - 1; i >= 0; --i) {
    total += spectrum(support[i])[static_cast<size_t>(index % q)];
    index /= q;
  }
  return total;
}

double NumberOperator::site_norm() const {
  int largest = 0;
  for (const auto& s : spectra_)
    for (int value : s) largest = std::max(largest, std::abs(value));
  return static_cast<double>(largest);
}

Potential NumberOperator::as_potential() const {
  Potential n(lattice_, Symmetry::hermitian);
  const int q = lattice_.local_dim();
  for (int x = 0; x < lattice_.sites(); ++x) {
    Matrix d = Matrix::Zero(q, q);
    for (int i = 0; i < q; ++i) d(i, i) = spectra_[x][i];
    n.add({x}, d);
  }
  n.prune();
  return n;
}

GradedPotential grade(const Potential& z, const NumberOperator& n,
                      double nu) {
  if (z.lattice() != n.lattice())
    throw LatticeMismatch("potential and number operator disagree");
  GradedPotential out(z.lattice(), nu);
  for (const auto& [support, term] : z.terms()) {
    const long dim = term.matrix.rows();
    std::vector<int> charges(dim);
    for (long b = 0; b < dim; ++b)
      charges[static_cast<size_t>(b)] = n.charge(support, b);
    std::map<int, Matrix> parts;
    for (long r = 0; r < dim; ++r) {
      for (long c = 0; c < dim; ++c) {
        const Complex value = term.matrix(r, c);
        if (value == Complex(0.0, 0.0)) continue;
        const int m = charges[static_cast<size_t>(r)] -
                      charges[static_cast<size_t>(c)];
        auto [it, inserted] = parts.try_emplace(m, Matrix::Zero(dim, dim));
        it->second(r, c) = value;
      }
    }
    for (auto& [m, matrix] : parts) {
      Potential slot = out.harmonic_or_zero(m);
      slot.add(support, matrix);
      out.set_harmonic(m, std::move(slot));
    }
  }
  out.prune();
  return out;
}

Potential collapse(const GradedPotential& z) {
  Potential out(z.lattice());
  for (const auto& [m, component] : z.harmonics())
    out.add_scaled(component, Complex(1.0, 0.0));
  out.prune();
  if (hermitian_series(z)) out.set_symmetry(Symmetry::hermitian);
  return out;
}

Potential static_average(const Potential& z, const NumberOperator& n) {
  Potential out = grade(z, n, 1.0).harmonic_or_zero(0);
  if (z.symmetry() == Symmetry::hermitian)
    out.set_symmetry(Symmetry::hermitian);
  return out;
}

GradedPotential solve_A_static_graded(const GradedPotential& v) {
  if (!average(v).empty())
    throw Error("solve_A_static requires a drive without a charge-0 part");
  const double nu = v.frequency();
  if (nu <= 0.0) throw Error("grading scale must be positive");
  GradedPotential a(v.lattice(), nu);
  for (const auto& [m, vm] : v.harmonics()) {
    if (m == 0) continue;
    Potential am(v.lattice());
    am.add_scaled(vm, Complex(-1.0 / (static_cast<double>(m) * nu), 0.0));
    a.set_harmonic(m, std::move(am));
  }
  return a;  // the charge-0 component is zero by convention
}

Potential solve_A_static(const GradedPotential& v, double nu) {
  if (nu <= 0.0) throw Error("grading scale must be positive");
  if (!average(v).empty())
    throw Error("solve_A_static requires a drive without a charge-0 part");
  Potential a(v.lattice());
  for (const auto& [m, vm] : v.harmonics()) {
    if (m == 0) continue;
    a.add_scaled(vm, Complex(-1.0 / (static_cast<double>(m) * nu), 0.0));
  }
  a.prune();
  if (hermitian_series(v)) a.set_symmetry(Symmetry::anti_hermitian);
  return a;
}

StaticStepOutcome static_step(const Potential& d, const GradedPotential& v,
                              const TruncationPolicy& policy) {
  StaticStepOutcome out;
  out.a = solve_A_static_graded(v);
  if (v.empty()) {  // fixed point: H already commutes with N
    out.d_next = d;
    out.v_next = v;
    return out;
  }

  const double nu = v.frequency();
  const GradedPotential d_series = promote(d, nu);
  const LieSeriesResult gd =
      lie_series(out.a, d_series, policy, &out.delta, /*want_alpha=*/false);
  const LieSeriesResult gv =
      lie_series(out.a, v, policy, &out.delta, /*want_alpha=*/true);
  out.series_terms = std::max(gd.terms, gv.terms);

  // H_{n+1} = gamma(D) + (gamma(V) - V) - (alpha(V) - V)
  //         = gamma(D) + gamma(V) - alpha(V), graded by charge.
  GradedPotential h_next = gd.gamma;
  h_next += gv.gamma;
  h_next -= gv.alpha;
  h_next.enforce_cap(policy.k_cap, policy.kappa_acct, &out.delta);
  h_next.prune(policy.eps_prune, policy.kappa_acct, &out.delta);

  out.d_next = average(h_next);
  out.d_next.set_symmetry(Symmetry::hermitian);
  out.v_next = oscillating_part(h_next);

  // Exact algebraic identities, independent of truncation quality.
  if (!symmetry_holds(out.d_next, 1e-9))
    throw Error("Hermiticity of D lost during a static step");
  if (!hermitian_series(out.v_next, 1e-9))
    throw Error("Hermiticity of V lost during a static step");
  if (!average(out.v_next).empty())
    throw Error("residual drive acquired a charge-0 component");
  return out;
}

void StaticProblem::validate() const {
  if (kappa0 <= 0.0) throw Error("kappa_0 must be positive");
  if (nu <= 0.0) throw Error("nu must be positive");
  if (h0.lattice() != number.lattice())
    throw LatticeMismatch("H and N live on different lattices");
  Potential h_check = h0;
  h_check.set_symmetry(Symmetry::hermitian);
  if (!symmetry_holds(h_check)) throw Error("H must be Hermitian");
}

namespace {

StepRecord make_static_record(int n, double kappa0, Potential d,
                              GradedPotential v,
                              const TruncationLedger& cumulative) {
  StepRecord rec;
  rec.n = n;
  rec.kappa = kappa_schedule(kappa0, n);
  // Static norms carry no time supremum: measure the collapsed sum.
  rec.v_norm = kappa_norm(collapse(v), rec.kappa);
  rec.d_norm = kappa_norm(d, rec.kappa);
  rec.d = std::move(d);
  rec.v = std::move(v);
  rec.ledger = cumulative;
  return rec;
}

}  // namespace

RenormTrace static_run(const StaticProblem& problem, int n_max, RunMode mode,
                       const RunOptions& opts) {
  problem.validate();
  if (n_max < 0) throw Error("n_max must be nonnegative");

  RenormTrace trace;
  trace.mode = mode;
  trace.kappa0 = problem.kappa0;
  trace.nu = problem.nu;
  trace.rho_stop = mode == RunMode::greedy ? opts.rho_stop : 0.0;

  const GradedPotential h_graded =
      grade(problem.h0, problem.number, problem.nu);
  Potential d0 = average(h_graded);
  d0.set_symmetry(Symmetry::hermitian);
  const GradedPotential v0 = oscillating_part(h_graded);

  TruncationLedger cumulative;
  trace.levels.push_back(make_static_record(0, problem.kappa0, std::move(d0),
                                            v0, cumulative));

  const double v0_norm = trace.levels[0].v_norm;
  const double d0_norm = trace.levels[0].d_norm;
  const double period = 2.0 * std::numbers::pi / problem.nu;

  int steps_wanted = n_max;
  if (mode == RunMode::certified) {
    const Hypotheses hyp =
        evaluate_hypotheses(problem.kappa0, problem.nu, v0_norm, d0_norm);
    if (!hyp.certified())
      throw CertificationRefused(hyp.failed_inequality());
    trace.n_star = hyp.n_star;
    steps_wanted = hyp.n_star + 1;  // levels 0 .. n_star + 1
    if (steps_wanted > n_max)
      throw Error("certified depth n_star + 1 exceeds n_max");
  }

  const int k_cap =
      opts.k_cap > 0 ? opts.k_cap : 3 * std::max(1, v0.max_harmonic());

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

    const StaticStepOutcome step = static_step(current.d, current.v, policy);
    cumulative += step.delta;

    current.a = step.a;
    current.series_terms = step.series_terms;
    current.delta_d = kappa_norm(step.d_next - current.d,
                                 kappa_schedule(problem.kappa0, n + 1));

    StepRecord next = make_static_record(n + 1, problem.kappa0, step.d_next,
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

}  // namespace preth
