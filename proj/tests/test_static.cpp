#include <cmath>
#include <numbers>

#include "doctest.h"
#include "preth/errors.hpp"
#include "preth/pauli.hpp"
#include "preth/rng.hpp"
#include "preth/static_renorm.hpp"
#include "test_support.hpp"

using namespace preth;
using preth::testing::max_abs_diff;

namespace {

/// q = 2 occupation-number family: N_x = diag(0, 1) = |1><1|.
NumberOperator occupation(const Lattice& lat) {
  return NumberOperator::uniform(lat, {0, 1});
}

/// sigma^+ = |1><0| in the diag(0, 1) charge basis.
Matrix raising() {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 0) = Complex(1.0, 0.0);
  return m;
}

/// Random Hermitian potential with nearest-neighbor and on-site terms.
Potential random_hermitian(const Lattice& lat, Rng& rng, double scale) {
  Potential p(lat, Symmetry::hermitian);
  for (int i = 0; i < lat.sites(); ++i) {
    Matrix g(2, 2);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) g(r, c) = rng.complex_normal();
    p.add({i}, (scale * 0.5 * (g + g.adjoint())).eval());
  }
  for (int i = 0; i + 1 < lat.sites(); ++i) {
    Matrix g(4, 4);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) g(r, c) = rng.complex_normal();
    p.add({i, i + 1}, (scale * 0.5 * (g + g.adjoint())).eval());
  }
  p.prune();
  return p;
}

}  // namespace

TEST_CASE("number operator: charges, norm, and dense form") {
  const Lattice lat = Lattice::chain(3);
  const NumberOperator n = occupation(lat);
  CHECK(n.site_norm() == doctest::Approx(1.0));

  // Single site: basis 0 -> charge 0, basis 1 -> charge 1.
  CHECK(n.charge(SupportSet({0}), 0) == 0);
  CHECK(n.charge(SupportSet({0}), 1) == 1);
  // Two sites, first site most significant: index 2 = |1>|0> -> charge 1.
  const SupportSet pair({0, 1});
  CHECK(n.charge(pair, 0) == 0);
  CHECK(n.charge(pair, 1) == 1);
  CHECK(n.charge(pair, 2) == 1);
  CHECK(n.charge(pair, 3) == 2);

  // Dense N equals the sum of embedded single-site diagonals.
  const Matrix nd = to_dense(n.as_potential());
  for (long b = 0; b < 8; ++b) {
    CHECK(nd(b, b).real() ==
          doctest::Approx(n.charge(SupportSet({0, 1, 2}), b)));
  }
  CHECK(nd.cwiseAbs().sum() ==
        doctest::Approx(nd.diagonal().cwiseAbs().sum()));

  // Mixed spectra and validation errors.
  const NumberOperator mixed(Lattice::chain(2),
                             {{0, 2}, {-1, 1}});
  CHECK(mixed.charge(SupportSet({0, 1}), 3) == 3);  // 2 + 1
  CHECK(mixed.site_norm() == doctest::Approx(2.0));
  CHECK_THROWS_AS(NumberOperator(Lattice::chain(2), {{0, 1}}), Error);
  CHECK_THROWS_AS(NumberOperator(Lattice::chain(1), {{0, 1, 2}}), Error);
}

TEST_CASE("grade splits by charge and resolves the identity") {
  const Lattice lat = Lattice::chain(2);
  const NumberOperator n = occupation(lat);

  // A raising operator carries charge +1.
  Potential raise(lat);
  raise.add({1}, raising());
  raise.prune();
  const GradedPotential graded = grade(raise, n, 1.0);
  CHECK(graded.harmonic(1) != nullptr);
  CHECK(graded.harmonic(0) == nullptr);
  CHECK(max_term_diff(graded.harmonic_or_zero(1), raise) == 0.0);

  // A diagonal operator is pure charge 0.
  Potential diag(lat, Symmetry::hermitian);
  diag.add({0}, pauli::z());
  diag.add({0, 1}, pauli::string_matrix("ZZ"));
  diag.prune();
  const GradedPotential dg = grade(diag, n, 1.0);
  CHECK(dg.max_harmonic() == 0);
  CHECK(max_term_diff(static_average(diag, n), diag) == 0.0);

  // Random Hermitian potential: components sum back exactly, each carries
  // its charge under the dense commutator with N, and grading is
  // idempotent on pure components.
  Rng rng(7u);
  const Potential z = random_hermitian(lat, rng, 1.0);
  const GradedPotential zg = grade(z, n, 1.0);
  CHECK(max_term_diff(collapse(zg), z) < 1e-14);
  CHECK(hermitian_series(zg));

  const Matrix nd = to_dense(n.as_potential());
  for (const auto& [m, component] : zg.harmonics()) {
    const Matrix cd = to_dense(component);
    CHECK(max_abs_diff(nd * cd - cd * nd, (double(m) * cd).eval()) < 1e-12);
    const GradedPotential again = grade(component, n, 1.0);
    CHECK(again.harmonics().size() == 1);
    CHECK(max_term_diff(again.harmonic_or_zero(m), component) == 0.0);
  }
}

TEST_CASE("solve_A_static solves [nu N, A] + V = 0") {
  const Lattice lat = Lattice::chain(2);
  const NumberOperator n = occupation(lat);
  const double g = 0.7, nu = 11.0;

  // V = g (sigma^+ + sigma^-) on site 1 -> A = -(g/nu)(sigma^+ - sigma^-).
  Potential v(lat, Symmetry::hermitian);
  v.add({1}, (g * (raising() + raising().adjoint())).eval());
  v.prune();
  const GradedPotential vg = grade(v, n, nu);
  const Potential a = solve_A_static(vg, nu);
  CHECK(a.symmetry() == Symmetry::anti_hermitian);
  CHECK(symmetry_holds(a));
  Potential expect(lat);
  expect.add({1}, (-(g / nu) * (raising() - raising().adjoint())).eval());
  expect.prune();
  CHECK(max_term_diff(a, expect) < 1e-15);

  // Dense check of the defining equation on a random drive.
  Rng rng(13u);
  const Potential h = random_hermitian(lat, rng, 0.8);
  const GradedPotential hg = grade(h, n, nu);
  const GradedPotential osc = oscillating_part(hg);
  const Potential a2 = solve_A_static(osc, nu);
  const Matrix nd = nu * to_dense(n.as_potential());
  const Matrix ad = to_dense(a2);
  const Matrix vd = to_dense(collapse(osc));
  CHECK(max_abs_diff((nd * ad - ad * nd + vd).eval(),
                     Matrix::Zero(4, 4).eval()) < 1e-12);

  // The graded variant matches the collapsed plain generator.
  const GradedPotential ag = solve_A_static_graded(osc);
  CHECK(max_term_diff(collapse(ag), a2) < 1e-14);
  CHECK(ag.harmonic(0) == nullptr);

  // Drives with a charge-0 part are rejected; empty drives give A = 0.
  CHECK_THROWS_AS(solve_A_static(hg, nu), Error);
  CHECK(solve_A_static(GradedPotential(lat, nu), nu).empty());
}

TEST_CASE("a Hamiltonian commuting with N is a fixed point") {
  const Lattice lat = Lattice::chain(3);
  Potential h(lat, Symmetry::hermitian);
  h.add({0}, pauli::z());
  const Matrix flip_flop =
      pauli::string_matrix("XX") + pauli::string_matrix("YY");
  for (int i = 0; i + 1 < lat.sites(); ++i)
    h.add({i, i + 1}, (0.5 * flip_flop).eval());
  h.prune();

  const StaticProblem problem{occupation(lat), 9.0, h, 1.0};
  const RenormTrace trace = static_run(problem, 5, RunMode::greedy);
  CHECK(trace.levels.size() == 1);
  CHECK(trace.optimal == 0);
  CHECK(max_term_diff(trace.d_hat(), h) < 1e-14);
  CHECK(trace.levels[0].v_norm == doctest::Approx(0.0));
}

TEST_CASE("static steps match the dense similarity transform") {
  const Lattice lat = Lattice::chain(2);
  const NumberOperator number = occupation(lat);
  const double nu = 35.0;
  Rng rng(41u);
  const Potential h = random_hermitian(lat, rng, 0.6);
  const StaticProblem problem{number, nu, h, 1.0};

  RunOptions opts;
  opts.k_cap = 12;
  const RenormTrace trace = static_run(problem, 2, RunMode::greedy, opts);
  REQUIRE(trace.levels.size() >= 2);

  const Matrix nd = nu * to_dense(number.as_potential());
  for (size_t n = 0; n + 1 < trace.levels.size(); ++n) {
    const StepRecord& lvl = trace.levels[n];
    const StepRecord& nxt = trace.levels[n + 1];
    const double slack = nxt.ledger.total() - lvl.ledger.total();
    const double tol = lat.sites() * slack + 1e-8;

    // e^{-A}(nu N + D_n + V_n) e^{A} = nu N + D_{n+1} + V_{n+1}.
    const Matrix ad = to_dense(collapse(lvl.a));
    const Matrix u = expm_antihermitian(ad);
    const Matrix lhs =
        u.adjoint() * (nd + to_dense(lvl.d) + to_dense(collapse(lvl.v))) * u;
    const Matrix rhs = nd + to_dense(nxt.d) + to_dense(collapse(nxt.v));
    CHECK(max_abs_diff(lhs, rhs) < tol);
  }

  // Every D_n commutes with N by construction; verify densely.
  for (const StepRecord& lvl : trace.levels) {
    const Matrix dd = to_dense(lvl.d);
    CHECK((nd * dd - dd * nd).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(hermitian_series(lvl.v));
    CHECK(average(lvl.v).empty());
  }

  // The residual shrank.
  CHECK(trace.levels[trace.optimal].v_norm < trace.levels[0].v_norm);
}

TEST_CASE("the static residual shrinks like 1/nu across a decade") {
  const Lattice lat = Lattice::chain(2);
  const NumberOperator number = occupation(lat);
  Rng rng(5u);
  const Potential h = random_hermitian(lat, rng, 0.5);

  std::vector<double> nus = {30.0, 60.0, 120.0, 240.0, 300.0};
  std::vector<double> residuals;
  for (double nu : nus) {
    const StaticProblem problem{number, nu, h, 1.0};
    RunOptions opts;
    opts.k_cap = 12;
    const RenormTrace trace = static_run(problem, 1, RunMode::greedy, opts);
    REQUIRE(trace.levels.size() == 2);
    residuals.push_back(trace.levels[1].v_norm);
  }
  const double slope = std::log(residuals.front() / residuals.back()) /
                       std::log(nus.back() / nus.front());
  CHECK(slope >= 0.9);
  CHECK(slope <= 1.1);
}

TEST_CASE("certified static run contracts and refuses when out of regime") {
  const Lattice lat = Lattice::chain(2);
  const NumberOperator number = occupation(lat);
  // Weak off-diagonal part: H = 0.01 sum Z Z + 0.004 sum X.
  Potential h(lat, Symmetry::hermitian);
  h.add({0, 1}, (0.01 * pauli::string_matrix("ZZ")).eval());
  for (int i = 0; i < 2; ++i) h.add({i}, (0.004 * pauli::x()).eval());
  h.prune();

  StaticProblem problem{number, 6.0e4, h, 1.0};
  const RenormTrace trace = static_run(problem, 10, RunMode::certified);
  CHECK(trace.n_star >= 1);
  CHECK(static_cast<int>(trace.levels.size()) == trace.n_star + 2);
  CHECK(trace.optimal == trace.n_star + 1);
  const double v0n = trace.levels[0].v_norm;
  for (const StepRecord& lvl : trace.levels)
    CHECK(lvl.v_norm <=
          v0n * std::pow(2.0 / 3.0, lvl.n) + trace.ledger.total() + 1e-12);

  problem.nu = 20.0;  // far below the certifiable window
  CHECK_THROWS_AS(static_run(problem, 10, RunMode::certified),
                  CertificationRefused);
}

TEST_CASE("static problem validation rejects malformed inputs") {
  const Lattice lat = Lattice::chain(2);
  Potential h(lat, Symmetry::hermitian);
  h.add({0}, pauli::x());
  h.prune();
  StaticProblem good{occupation(lat), 10.0, h, 1.0};
  CHECK_NOTHROW(good.validate());

  StaticProblem bad_nu = good;
  bad_nu.nu = 0.0;
  CHECK_THROWS_AS(bad_nu.validate(), Error);

  StaticProblem bad_lat = good;
  bad_lat.number = occupation(Lattice::chain(3));
  CHECK_THROWS_AS(bad_lat.validate(), LatticeMismatch);

  StaticProblem bad_herm = good;
  bad_herm.h0 = Potential(lat);
  bad_herm.h0.add({0}, raising());
  CHECK_THROWS_AS(bad_herm.validate(), Error);
}
