#pragma once

#include <Eigen/Dense>
#include <complex>

#include "preth/lattice.hpp"

namespace preth {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Dimension guard for dense embeddings. q^L above the cap raises
/// BudgetExceeded instead of allocating.
struct DenseBudget {
  long max_dim = 1 << 14;
};

long pow_long(int base, int exp);

/// Largest singular value. Hermitian and anti-Hermitian inputs take the
/// eigenvalue route, everything else falls back to SVD.
double spectral_norm(const Matrix& m);

/// Infinite-temperature 2-norm sqrt(tr(M^dag M) / dim).
double two_norm(const Matrix& m);

bool is_hermitian(const Matrix& m, double tol = 1e-12);
bool is_anti_hermitian(const Matrix& m, double tol = 1e-12);

/// Embed an operator acting on `support` into the larger `universe`
/// (tensor ordering by ascending site index, identity elsewhere).
Matrix embed(const Matrix& m, const SupportSet& support,
             const SupportSet& universe, int local_dim);

/// Partial trace over the tensor slot holding `site`, divided by q. If the
/// input factorizes as identity at `site`, this recovers the other factor.
Matrix peel_site(const Matrix& m, const SupportSet& support, int site,
                 int local_dim);

/// exp(A) for anti-Hermitian A via the eigendecomposition of iA; the result
/// is unitary to machine precision.
Matrix expm_antihermitian(const Matrix& a);

/// exp(-i theta H) for Hermitian H.
Matrix expm_i_hermitian(const Matrix& h, double theta);

/// Largest |eigenvalue| of a Hermitian matrix by Lanczos iteration with full
/// reorthogonalization (relative accuracy ~1e-6, deterministic start).
double extremal_eigenvalue(const Matrix& m, double rel_tol = 1e-6,
                           int max_iter = 96);

}  // namespace preth
