#include <doctest.h>

#include <cmath>

#include "preth/errors.hpp"
#include "preth/pauli.hpp"
#include "preth/series.hpp"
#include "test_support.hpp"

using namespace preth;
using preth::testing::integrate_unit;
using preth::testing::max_abs_diff;

namespace {

/// Single-site generator A = i theta X and probe Z = sigma_z.
struct Rotation {
  Lattice lat = Lattice::chain(1);
  Potential a;
  Potential z;
  explicit Rotation(double theta) {
    a = Potential(lat, Symmetry::anti_hermitian);
    a.add({0}, (Complex(0, theta) * pauli::x()).eval());
    a.prune();
    z = Potential(lat, Symmetry::hermitian);
    z.add({0}, pauli::z());
    z.prune();
  }
};

}  // namespace

TEST_CASE("conjugation series reproduces the closed-form rotation") {
  const double theta = 0.41;
  Rotation rot(theta);
  TruncationPolicy policy = make_policy(1.0, 0.0);
  TruncationLedger ledger;
  const Potential gamma = conjugate_series(rot.a, rot.z, policy, &ledger);
  // e^{-i theta X} Z e^{i theta X} = cos(2 theta) Z - sin(2 theta) Y.
  const Matrix expected = std::cos(2 * theta) * pauli::z() -
                          std::sin(2 * theta) * pauli::y();
  CHECK(max_abs_diff(to_dense(gamma), expected) <=
        ledger.total() + 1e-12);
  CHECK(gamma.symmetry() == Symmetry::hermitian);
}

TEST_CASE("conjugation series matches dense conjugation on two sites") {
  const Lattice lat = Lattice::chain(2);
  Potential a(lat, Symmetry::anti_hermitian);
  a.add({0, 1}, (Complex(0, 0.23) * pauli::string_matrix("XY")).eval());
  a.prune();
  Potential z(lat, Symmetry::hermitian);
  z.add({0}, pauli::z());
  z.add({0, 1}, (0.4 * pauli::string_matrix("ZX")).eval());
  z.prune();

  TruncationPolicy policy = make_policy(1.0, 0.0);
  TruncationLedger ledger;
  const Potential gamma = conjugate_series(a, z, policy, &ledger);
  const Matrix u = expm_antihermitian(to_dense(a));
  const Matrix expected = u.adjoint() * to_dense(z) * u;
  CHECK(max_abs_diff(to_dense(gamma), expected) <=
        lat.sites() * ledger.total() + 1e-8);
}

TEST_CASE("alpha series matches closed form and quadrature") {
  const double theta = 0.57;
  Rotation rot(theta);
  TruncationPolicy policy = make_policy(1.0, 0.0);
  TruncationLedger ledger;
  const Potential alpha = alpha_series(rot.a, rot.z, policy, &ledger);

  // int_0^1 [cos(2 s theta) Z - sin(2 s theta) Y] ds.
  const Matrix closed =
      (std::sin(2 * theta) / (2 * theta)) * pauli::z() -
      ((1 - std::cos(2 * theta)) / (2 * theta)) * pauli::y();
  CHECK(max_abs_diff(to_dense(alpha), closed) <= ledger.total() + 1e-12);

  // 64-point Gauss-Legendre oracle of the defining integral.
  const Matrix da = to_dense(rot.a);
  const Matrix dz = to_dense(rot.z);
  const Matrix quad = integrate_unit(
      [&](double s) {
        const Matrix u = expm_antihermitian((s * da).eval());
        return (u.adjoint() * dz * u).eval();
      },
      2);
  CHECK(max_abs_diff(to_dense(alpha), quad) <= ledger.total() + 1e-10);
}

TEST_CASE("series terminates immediately for commuting operators") {
  const Lattice lat = Lattice::chain(2);
  Potential a(lat, Symmetry::anti_hermitian);
  a.add({0}, (Complex(0, 1.0) * pauli::z()).eval());
  a.prune();
  Potential z(lat, Symmetry::hermitian);
  z.add({1}, pauli::z());
  z.prune();
  TruncationPolicy policy = make_policy(1.0, 0.0);
  TruncationLedger ledger;
  const Potential gamma = conjugate_series(a, z, policy, &ledger);
  CHECK(max_term_diff(gamma, z) == 0.0);
  CHECK(ledger.total() == 0.0);
}

TEST_CASE("lie series on a harmonic generator conjugates pointwise in time") {
  const Lattice lat = Lattice::chain(2);
  const double nu = 2.0;
  // A(t) = i (0.2 cos(nu t)) XY-type generator, Hermitian pairing by hand.
  Potential seed(lat);
  seed.add({0, 1}, (Complex(0, 0.1) * pauli::string_matrix("XY")).eval());
  seed.prune();
  HarmonicPotential a(lat, nu);
  a.set_harmonic(1, seed);
  a.set_harmonic(-1, seed);

  Potential d(lat, Symmetry::hermitian);
  d.add({0}, pauli::z());
  d.add({1}, (0.7 * pauli::x()).eval());
  d.prune();
  const HarmonicPotential z = promote(d, nu);

  TruncationPolicy policy = make_policy(1.0, 0.0);
  TruncationLedger ledger;
  const LieSeriesResult result = lie_series(a, z, policy, &ledger);

  for (double t : {0.0, 0.31, 1.4}) {
    const Matrix at = to_dense_at(a, t);
    const Matrix u = expm_antihermitian(at);
    const Matrix expected = u.adjoint() * to_dense(d) * u;
    CHECK(max_abs_diff(to_dense_at(result.gamma, t), expected) <=
          lat.sites() * ledger.total() + 1e-8);
  }
  CHECK(result.terms > 1);
}

TEST_CASE("series divergence raises after m_max growing terms") {
  Rotation rot(9.0);  // terms grow until m ~ 18
  TruncationPolicy policy = make_policy(1.0, 0.0);
  policy.m_max = 8;
  TruncationLedger ledger;
  CHECK_THROWS_AS(conjugate_series(rot.a, rot.z, policy, &ledger),
                  SeriesDivergence);
}

TEST_CASE("empty inputs short-circuit") {
  const Lattice lat = Lattice::chain(2);
  const HarmonicPotential empty(lat, 2.0);
  Potential d(lat, Symmetry::hermitian);
  d.add({0}, pauli::z());
  d.prune();
  TruncationPolicy policy = make_policy(1.0, 0.0);
  const LieSeriesResult r =
      lie_series(empty, promote(d, 2.0), policy, nullptr);
  CHECK(r.terms == 0);
  CHECK(max_term_diff(average(r.gamma), d) == 0.0);
}
