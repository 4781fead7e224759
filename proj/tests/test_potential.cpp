#include <doctest.h>

#include <cmath>

#include "preth/errors.hpp"
#include "preth/pauli.hpp"
#include "preth/potential.hpp"
#include "preth/rng.hpp"
#include "test_support.hpp"

using namespace preth;
using preth::testing::max_abs_diff;

namespace {

/// Random Hermitian potential with nearest-neighbour and on-site terms.
Potential random_hermitian(const Lattice& lat, Rng& rng) {
  Potential p(lat, Symmetry::hermitian);
  for (int s = 0; s < lat.sites(); ++s) {
    Matrix g(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) g(i, j) = rng.complex_normal();
    p.add({s}, (0.5 * (g + g.adjoint())).eval());
  }
  for (int s = 0; s + 1 < lat.sites(); ++s) {
    Matrix g(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) g(i, j) = rng.complex_normal();
    p.add({s, s + 1}, (0.5 * (g + g.adjoint())).eval());
  }
  p.prune();
  return p;
}

}  // namespace

TEST_CASE("adding a term accumulates on the connected hull") {
  const Lattice lat = Lattice::chain(4);
  Potential p(lat);
  p.add({0}, pauli::x());
  p.add({0}, pauli::x());
  p.prune();
  CHECK(p.term_count() == 1);
  CHECK(max_abs_diff(p.term_matrix(SupportSet({0})), 2.0 * pauli::x()) == 0.0);

  // Disconnected support lands on the covering interval.
  Potential spread(lat);
  spread.add({0, 2}, pauli::string_matrix("XZ"));
  spread.prune();
  CHECK(spread.term_count() == 1);
  CHECK(spread.terms().begin()->first == SupportSet({0, 1, 2}));
  CHECK(max_abs_diff(spread.term_matrix(SupportSet({0, 1, 2})),
                     pauli::string_matrix("XIZ")) == 0.0);
}

TEST_CASE("add validates input") {
  const Lattice lat = Lattice::chain(3);
  Potential p(lat);
  CHECK_THROWS_AS(p.add({5}, pauli::x()), LatticeMismatch);
  CHECK_THROWS_AS(p.add({0, 1}, pauli::x()), LatticeMismatch);  // wrong dim
  CHECK_THROWS_AS(p.add({1, 0}, pauli::string_matrix("XZ")), Error);
}

TEST_CASE("prune peels identity factors and drops zero terms") {
  const Lattice lat = Lattice::chain(4);
  Potential p(lat);
  p.add({1, 2}, pauli::string_matrix("XI"));  // really X on site 1
  p.add({3}, Matrix::Zero(2, 2));
  TruncationLedger ledger;
  p.prune(1e-14, 0.5, &ledger);
  CHECK(p.term_count() == 1);
  CHECK(p.terms().begin()->first == SupportSet({1}));
  CHECK(max_abs_diff(p.term_matrix(SupportSet({1})), pauli::x()) == 0.0);
  CHECK(ledger.total() == 0.0);  // exact peel discards nothing

  // An all-identity term collapses onto a single site.
  Potential c(lat);
  c.add({0, 1}, (2.5 * Matrix::Identity(4, 4)).eval());
  c.prune();
  CHECK(c.term_count() == 1);
  CHECK(c.terms().begin()->first.size() == 1);
}

TEST_CASE("prune records discarded entries in the ledger") {
  const Lattice lat = Lattice::chain(2);
  Potential p(lat);
  Matrix m = pauli::x();
  m(0, 0) = Complex(1e-20, 0.0);
  p.add({0}, m);
  TruncationLedger ledger;
  p.prune(1e-14, 0.0, &ledger);
  CHECK(ledger.prune == doctest::Approx(1e-20));
  CHECK(max_abs_diff(p.term_matrix(SupportSet({0})), pauli::x()) == 0.0);
}

TEST_CASE("single-site commutator: [aX, bZ] = -2i ab Y") {
  const Lattice lat = Lattice::chain(3);
  const double a = 0.7, b = -1.3;
  Potential qa(lat);
  qa.add({1}, (a * pauli::x()).eval());
  qa.prune();
  Potential zb(lat);
  zb.add({1}, (b * pauli::z()).eval());
  zb.prune();
  const Potential c = commutator(qa, zb);
  CHECK(c.term_count() == 1);
  CHECK(max_abs_diff(c.term_matrix(SupportSet({1})),
                     (Complex(0, -2.0) * a * b * pauli::y()).eval()) < 1e-14);
}

TEST_CASE("overlapping supports produce the union: [X1X2, Z2Z3]") {
  const Lattice lat = Lattice::chain(4);
  Potential q(lat);
  q.add({1, 2}, pauli::string_matrix("XX"));
  q.prune();
  Potential z(lat);
  z.add({2, 3}, pauli::string_matrix("ZZ"));
  z.prune();
  const Potential c = commutator(q, z);
  CHECK(c.term_count() == 1);
  // X1 [X2, Z2] Z3 = -2i X1 Y2 Z3.
  CHECK(max_abs_diff(c.term_matrix(SupportSet({1, 2, 3})),
                     (Complex(0, -2.0) * pauli::string_matrix("XYZ")).eval()) <
        1e-14);
}

TEST_CASE("disjoint supports commute") {
  const Lattice lat = Lattice::chain(4);
  Potential q(lat);
  q.add({0}, pauli::x());
  q.prune();
  Potential z(lat);
  z.add({2, 3}, pauli::string_matrix("ZZ"));
  z.prune();
  CHECK(commutator(q, z).empty());
}

TEST_CASE("commutator matches the dense commutator") {
  const Lattice lat = Lattice::chain(4);
  Rng rng(11);
  const Potential q = random_hermitian(lat, rng);
  const Potential z = random_hermitian(lat, rng);
  const Potential c = commutator(q, z);
  const Matrix dq = to_dense(q), dz = to_dense(z);
  CHECK(max_abs_diff(to_dense(c), dq * dz - dz * dq) < 1e-10);
}

TEST_CASE("commutator algebra: antisymmetry and Jacobi") {
  const Lattice lat = Lattice::chain(3);
  Rng rng(23);
  const Potential a = random_hermitian(lat, rng);
  const Potential b = random_hermitian(lat, rng);
  const Potential c = random_hermitian(lat, rng);

  CHECK(max_abs_diff(to_dense(commutator(a, b)),
                     -to_dense(commutator(b, a))) < 1e-10);

  const Matrix jacobi = to_dense(commutator(a, commutator(b, c))) +
                        to_dense(commutator(b, commutator(c, a))) +
                        to_dense(commutator(c, commutator(a, b)));
  CHECK(jacobi.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("symmetry propagation") {
  CHECK(combine_commutator(Symmetry::hermitian, Symmetry::hermitian) ==
        Symmetry::anti_hermitian);
  CHECK(combine_commutator(Symmetry::anti_hermitian, Symmetry::hermitian) ==
        Symmetry::hermitian);
  CHECK(combine_commutator(Symmetry::anti_hermitian,
                           Symmetry::anti_hermitian) ==
        Symmetry::anti_hermitian);
  CHECK(scaled_symmetry(Symmetry::hermitian, Complex(0, 2)) ==
        Symmetry::anti_hermitian);
  CHECK(scaled_symmetry(Symmetry::hermitian, Complex(2, 0)) ==
        Symmetry::hermitian);
  CHECK(scaled_symmetry(Symmetry::hermitian, Complex(1, 1)) ==
        Symmetry::none);

  const Lattice lat = Lattice::chain(3);
  Rng rng(5);
  const Potential h = random_hermitian(lat, rng);
  CHECK(symmetry_holds(h));
  const Potential anti = Complex(0, 1) * h;
  CHECK(anti.symmetry() == Symmetry::anti_hermitian);
  CHECK(symmetry_holds(anti));
  CHECK(commutator(h, h).symmetry() == Symmetry::anti_hermitian);
}

TEST_CASE("kappa norm of the transverse-field Ising ring") {
  const double j = 0.8, h = 0.45, kappa = 0.3;
  const int sites = 6;
  const Lattice ring = Lattice::chain(sites, 2, true);
  Potential p(ring, Symmetry::hermitian);
  for (int s = 0; s < sites; ++s) {
    const int t = (s + 1) % sites;
    std::vector<int> bond{std::min(s, t), std::max(s, t)};
    p.add(bond, (j * pauli::string_matrix("ZZ")).eval());
    p.add({s}, (h * pauli::x()).eval());
  }
  p.prune();
  // Every site touches two bonds (weight e^{2 kappa} |J|) and one field
  // (weight e^{kappa} |h|).
  const double expected =
      2.0 * j * std::exp(2.0 * kappa) + h * std::exp(kappa);
  CHECK(kappa_norm(p, kappa) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("kappa norm properties") {
  const Lattice lat = Lattice::chain(4);
  Rng rng(31);
  const Potential a = random_hermitian(lat, rng);
  const Potential b = random_hermitian(lat, rng);
  // Triangle inequality.
  CHECK(kappa_norm(a + b, 0.4) <= kappa_norm(a, 0.4) + kappa_norm(b, 0.4) +
                                      1e-12);
  // Monotone in kappa.
  CHECK(kappa_norm(a, 0.2) <= kappa_norm(a, 0.5));
  // Homogeneous.
  CHECK(kappa_norm(Complex(-2, 0) * a, 0.3) ==
        doctest::Approx(2.0 * kappa_norm(a, 0.3)));
  CHECK(kappa_norm(Potential(lat), 0.3) == 0.0);
}

TEST_CASE("pair cutoff discards are covered by the ledger") {
  const Lattice lat = Lattice::chain(4);
  Rng rng(17);
  const Potential q = random_hermitian(lat, rng);
  Potential z = random_hermitian(lat, rng);
  // Make one term tiny so the cutoff bites.
  z.add({0}, (1e-9 * pauli::z()).eval());
  z.prune();

  CommutatorOptions opts;
  opts.pair_cutoff = 1e-6;
  TruncationLedger ledger;
  const Potential approx = commutator(q, z, opts, &ledger);
  const Potential exact = commutator(q, z);
  const double err = spectral_norm(to_dense(approx) - to_dense(exact));
  CHECK(err <= lat.sites() * ledger.total() + 1e-12);
}

TEST_CASE("support cap discards are covered by the ledger") {
  const Lattice lat = Lattice::chain(5);
  Rng rng(19);
  const Potential q = random_hermitian(lat, rng);
  const Potential z = random_hermitian(lat, rng);
  CommutatorOptions opts;
  opts.support_cap = 2;
  TruncationLedger ledger;
  const Potential capped = commutator(q, z, opts, &ledger);
  for (const auto& [support, term] : capped.terms())
    CHECK(support.size() <= 2);
  const Potential exact = commutator(q, z);
  const double err = spectral_norm(to_dense(capped) - to_dense(exact));
  CHECK(err <= lat.sites() * ledger.total() + 1e-12);
  CHECK(ledger.support_cap > 0.0);
}

TEST_CASE("to_dense respects the dimension budget") {
  const Lattice lat = Lattice::chain(20);
  Potential p(lat);
  p.add({0}, pauli::x());
  p.prune();
  DenseBudget tight;
  tight.max_dim = 1 << 10;
  CHECK_THROWS_AS(to_dense(p, tight), BudgetExceeded);
}

TEST_CASE("adjoint conjugates termwise") {
  const Lattice lat = Lattice::chain(2);
  Potential p(lat);
  Matrix m(2, 2);
  m << Complex(1, 2), Complex(0, 1), Complex(3, 0), Complex(0, -4);
  p.add({0}, m);
  p.prune();
  const Potential pd = adjoint(p);
  CHECK(max_abs_diff(pd.term_matrix(SupportSet({0})), m.adjoint()) == 0.0);
}
