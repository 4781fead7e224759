#include "preth/dense.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "preth/errors.hpp"

namespace preth {

long pow_long(int base, int exp) {
  long r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > (1L << 40)) throw BudgetExceeded("tensor dimension overflow");
    r *= base;
  }
  return r;
}

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  double scale = m.cwiseAbs().maxCoeff();
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, scale);
}

bool is_anti_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  double scale = m.cwiseAbs().maxCoeff();
  return (m + m.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, scale);
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  if (is_hermitian(m, 1e-13)) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  if (is_anti_hermitian(m, 1e-13)) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(Complex(0, 1) * m),
                                             Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double two_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return std::sqrt(m.squaredNorm() / static_cast<double>(m.rows()));
}

Matrix embed(const Matrix& m, const SupportSet& support,
             const SupportSet& universe, int local_dim) {
  const int q = local_dim;
  const int ns = support.size();
  const int nu = universe.size();
  const long ds = pow_long(q, ns);
  const long du = pow_long(q, nu);
  if (m.rows() != ds || m.cols() != ds)
    throw Error("embed: matrix dimension does not match support");

  // Strides of each universe slot in the full index (slot 0 = lowest site =
  // most significant digit, matching the ascending-site tensor order).
  std::vector<long> stride(nu);
  long acc = 1;
  for (int i = nu - 1; i >= 0; --i) {
    stride[i] = acc;
    acc *= q;
  }
  std::vector<long> sup_stride;   // strides of the support slots
  std::vector<long> rest_stride;  // strides of the identity slots
  for (int i = 0; i < nu; ++i) {
    if (support.contains(universe[i]))
      sup_stride.push_back(stride[i]);
    else
      rest_stride.push_back(stride[i]);
  }
  if (static_cast<int>(sup_stride.size()) != ns)
    throw Error("embed: support is not contained in universe");

  const long dr = du / ds;
  // Offsets of every support index / rest index in the full space.
  std::vector<long> sup_off(ds, 0);
  for (long a = 0; a < ds; ++a) {
    long rem = a;
    for (int i = ns - 1; i >= 0; --i) {
      sup_off[a] += (rem % q) * sup_stride[i];
      rem /= q;
    }
  }
  std::vector<long> rest_off(dr, 0);
  const int nrest = nu - ns;
  for (long e = 0; e < dr; ++e) {
    long rem = e;
    for (int i = nrest - 1; i >= 0; --i) {
      rest_off[e] += (rem % q) * rest_stride[i];
      rem /= q;
    }
  }

  Matrix out = Matrix::Zero(du, du);
  for (long b = 0; b < ds; ++b)
    for (long a = 0; a < ds; ++a) {
      const Complex val = m(a, b);
      if (val == Complex(0, 0)) continue;
      for (long e = 0; e < dr; ++e)
        out(sup_off[a] + rest_off[e], sup_off[b] + rest_off[e]) = val;
    }
  return out;
}

Matrix peel_site(const Matrix& m, const SupportSet& support, int site,
                 int local_dim) {
  const int q = local_dim;
  const int ns = support.size();
  const int pos = support.index_of(site);
  if (pos < 0) throw Error("peel_site: site not in support");
  const long ds = m.rows();
  const long d_lo = pow_long(q, ns - 1 - pos);  // slots after `pos`
  const long d_hi = ds / (d_lo * q);            // slots before `pos`

  Matrix out = Matrix::Zero(ds / q, ds / q);
  for (long hi_r = 0; hi_r < d_hi; ++hi_r)
    for (long lo_r = 0; lo_r < d_lo; ++lo_r)
      for (long hi_c = 0; hi_c < d_hi; ++hi_c)
        for (long lo_c = 0; lo_c < d_lo; ++lo_c) {
          Complex sum = 0;
          for (int k = 0; k < q; ++k)
            sum += m((hi_r * q + k) * d_lo + lo_r, (hi_c * q + k) * d_lo + lo_c);
          out(hi_r * d_lo + lo_r, hi_c * d_lo + lo_c) = sum / double(q);
        }
  return out;
}

Matrix expm_antihermitian(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(Complex(0, 1) * a));
  Vector phases(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i)
    phases(i) = std::exp(Complex(0, -es.eigenvalues()(i)));
  return es.eigenvectors() * phases.asDiagonal() *
         es.eigenvectors().adjoint();
}

Matrix expm_i_hermitian(const Matrix& h, double theta) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Vector phases(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i)
    phases(i) = std::exp(Complex(0, -theta * es.eigenvalues()(i)));
  return es.eigenvectors() * phases.asDiagonal() *
         es.eigenvectors().adjoint();
}

double extremal_eigenvalue(const Matrix& m, double rel_tol, int max_iter) {
  const long n = m.rows();
  if (n == 0) return 0.0;
  if (n <= 64) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  // Lanczos with full reorthogonalization, deterministic start vector.
  Vector v = Vector::Zero(n);
  for (long i = 0; i < n; ++i)
    v(i) = Complex(std::cos(0.7 * double(i) + 0.3),
                   std::sin(1.3 * double(i) + 0.1));
  v.normalize();
  std::vector<Vector> basis;
  std::vector<double> alpha, beta;
  double prev = 0.0;
  Vector w;
  for (int it = 0; it < max_iter; ++it) {
    basis.push_back(v);
    w = m * v;
    double a = std::real(v.dot(w));
    alpha.push_back(a);
    w -= a * v;
    if (!beta.empty()) w -= beta.back() * basis[basis.size() - 2];
    for (const auto& u : basis) w -= u.dot(w) * u;  // full reorth
    double b = w.norm();
    // Extremal eigenvalue of the tridiagonal section.
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(alpha.size(), alpha.size());
    for (size_t i = 0; i < alpha.size(); ++i) {
      tri(i, i) = alpha[i];
      if (i + 1 < alpha.size()) tri(i, i + 1) = tri(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri,
                                                      Eigen::EigenvaluesOnly);
    double cur = es.eigenvalues().cwiseAbs().maxCoeff();
    if (it > 2 && std::abs(cur - prev) <= rel_tol * std::max(1e-300, cur))
      return cur;
    prev = cur;
    if (b < 1e-14 * std::max(1.0, std::abs(cur))) return cur;
    beta.push_back(b);
    v = w / b;
  }
  return prev;
}

}  // namespace preth
