#pragma once

#include <map>
#include <string>

#include "preth/dense.hpp"

namespace preth {

class Potential;
class Lattice;

namespace pauli {

Matrix identity2();
Matrix x();
Matrix y();
Matrix z();

/// Single-qubit matrix for 'I', 'X', 'Y', 'Z'.
Matrix matrix_for(char op);

/// Tensor product of single-qubit Paulis; the first character occupies the
/// most significant slot (ascending site order).
Matrix string_matrix(const std::string& ops);

/// Sparse sum of Pauli strings over a fixed qubit count, with exact
/// single-qubit multiplication rules (XY = iZ and cyclic). Strings are
/// stored dense over the register ("IXZI..."), coefficients complex.
class Sum {
 public:
  explicit Sum(int qubits);

  int qubits() const { return qubits_; }
  bool empty() const { return terms_.empty(); }
  const std::map<std::string, Complex>& terms() const { return terms_; }

  void add(const std::string& ops, Complex coeff);
  Sum& operator+=(const Sum& other);
  Sum& operator-=(const Sum& other);
  Sum& operator*=(Complex factor);

  /// Drop terms with |coeff| below eps.
  void prune(double eps = 1e-14);

  static Sum identity(int qubits, Complex coeff = 1.0);
  /// Single operator `op` acting on `site`, identity elsewhere.
  static Sum single(int qubits, int site, char op, Complex coeff = 1.0);

  friend Sum operator*(const Sum& a, const Sum& b);

 private:
  int qubits_ = 0;
  std::map<std::string, Complex> terms_;
};

Sum operator+(Sum a, const Sum& b);
Sum operator-(Sum a, const Sum& b);
Sum operator*(Complex factor, Sum s);

/// Product of two single-qubit Paulis: returns the resulting letter and the
/// phase (e.g. X*Y -> {Z, i}).
std::pair<char, Complex> multiply_single(char a, char b);

}  // namespace pauli

/// Convert a Pauli sum into a potential on a q = 2 lattice: each string
/// becomes a term on the support of its non-identity letters (hulled if
/// disconnected). Identity strings are dropped when `drop_identity`.
Potential sum_to_potential(const pauli::Sum& s, const Lattice& lattice,
                           bool drop_identity = true);

}  // namespace preth
