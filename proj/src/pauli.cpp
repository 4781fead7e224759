#include "preth/pauli.hpp"

#include <algorithm>

#include "preth/errors.hpp"
#include "preth/potential.hpp"

namespace preth {
namespace pauli {

Matrix identity2() { return Matrix::Identity(2, 2); }

Matrix x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix y() {
  Matrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

Matrix z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Matrix matrix_for(char op) {
  switch (op) {
    case 'I':
      return identity2();
    case 'X':
      return x();
    case 'Y':
      return y();
    case 'Z':
      return z();
    default:
      throw ParseError(std::string("unknown Pauli letter '") + op + "'");
  }
}

Matrix string_matrix(const std::string& ops) {
  Matrix out = Matrix::Identity(1, 1);
  for (char c : ops) {
    const Matrix next = matrix_for(c);
    Matrix grown(out.rows() * 2, out.cols() * 2);
    for (long r = 0; r < out.rows(); ++r)
      for (long cl = 0; cl < out.cols(); ++cl)
        grown.block(2 * r, 2 * cl, 2, 2) = out(r, cl) * next;
    out = std::move(grown);
  }
  return out;
}

std::pair<char, Complex> multiply_single(char a, char b) {
  if (a == 'I') return {b, Complex(1, 0)};
  if (b == 'I') return {a, Complex(1, 0)};
  if (a == b) return {'I', Complex(1, 0)};
  // XY = iZ, YZ = iX, ZX = iY; reversed order flips the sign.
  static const std::string cycle = "XYZ";
  const int ia = static_cast<int>(cycle.find(a));
  const int ib = static_cast<int>(cycle.find(b));
  if (ia < 0 || ib < 0) throw ParseError("unknown Pauli letter in product");
  const char out = cycle[3 - ia - ib];
  const bool forward = (ib - ia + 3) % 3 == 1;
  return {out, forward ? Complex(0, 1) : Complex(0, -1)};
}

Sum::Sum(int qubits) : qubits_(qubits) {
  if (qubits <= 0) throw Error("Pauli sum needs a positive qubit count");
}

void Sum::add(const std::string& ops, Complex coeff) {
  if (static_cast<int>(ops.size()) != qubits_)
    throw LatticeMismatch("Pauli string length does not match the register");
  for (char c : ops)
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z')
      throw ParseError(std::string("unknown Pauli letter '") + c + "'");
  auto it = terms_.find(ops);
  if (it == terms_.end()) {
    if (coeff != Complex(0, 0)) terms_.emplace(ops, coeff);
  } else {
    it->second += coeff;
    if (it->second == Complex(0, 0)) terms_.erase(it);
  }
}

Sum& Sum::operator+=(const Sum& other) {
  if (qubits_ != other.qubits_)
    throw LatticeMismatch("Pauli sums on different registers");
  for (const auto& [ops, coeff] : other.terms_) add(ops, coeff);
  return *this;
}

Sum& Sum::operator-=(const Sum& other) {
  if (qubits_ != other.qubits_)
    throw LatticeMismatch("Pauli sums on different registers");
  for (const auto& [ops, coeff] : other.terms_) add(ops, -coeff);
  return *this;
}

Sum& Sum::operator*=(Complex factor) {
  if (factor == Complex(0, 0)) {
    terms_.clear();
    return *this;
  }
  for (auto& [ops, coeff] : terms_) coeff *= factor;
  return *this;
}

void Sum::prune(double eps) {
  for (auto it = terms_.begin(); it != terms_.end();)
    it = (std::abs(it->second) < eps) ? terms_.erase(it) : std::next(it);
}

Sum Sum::identity(int qubits, Complex coeff) {
  Sum s(qubits);
  s.add(std::string(qubits, 'I'), coeff);
  return s;
}

Sum Sum::single(int qubits, int site, char op, Complex coeff) {
  if (site < 0 || site >= qubits)
    throw LatticeMismatch("Pauli site outside the register");
  Sum s(qubits);
  std::string ops(qubits, 'I');
  ops[site] = op;
  s.add(ops, coeff);
  return s;
}

Sum operator*(const Sum& a, const Sum& b) {
  if (a.qubits_ != b.qubits_)
    throw LatticeMismatch("Pauli sums on different registers");
  Sum out(a.qubits_);
  for (const auto& [ops_a, ca] : a.terms_) {
    for (const auto& [ops_b, cb] : b.terms_) {
      std::string ops(a.qubits_, 'I');
      Complex phase = ca * cb;
      for (int i = 0; i < a.qubits_; ++i) {
        auto [letter, factor] = multiply_single(ops_a[i], ops_b[i]);
        ops[i] = letter;
        phase *= factor;
      }
      out.add(ops, phase);
    }
  }
  return out;
}

Sum operator+(Sum a, const Sum& b) {
  a += b;
  return a;
}

Sum operator-(Sum a, const Sum& b) {
  a -= b;
  return a;
}

Sum operator*(Complex factor, Sum s) {
  s *= factor;
  return s;
}

}  // namespace pauli

Potential sum_to_potential(const pauli::Sum& s, const Lattice& lattice,
                           bool drop_identity) {
  if (lattice.local_dim() != 2)
    throw LatticeMismatch("Pauli sums require a q = 2 lattice");
  if (lattice.sites() != s.qubits())
    throw LatticeMismatch("Pauli register size does not match the lattice");
  Potential out(lattice, Symmetry::none);
  for (const auto& [ops, coeff] : s.terms()) {
    std::vector<int> sites;
    std::string reduced;
    for (int i = 0; i < s.qubits(); ++i) {
      if (ops[i] != 'I') {
        sites.push_back(i);
        reduced.push_back(ops[i]);
      }
    }
    if (sites.empty()) {
      if (drop_identity) continue;
      sites.push_back(0);
      reduced = "I";
    }
    out.add(sites, coeff * pauli::string_matrix(reduced));
  }
  out.prune();
  return out;
}

}  // namespace preth
