#pragma once

#include <map>

#include "preth/dense.hpp"
#include "preth/lattice.hpp"
#include "preth/ledger.hpp"

namespace preth {

enum class Symmetry { hermitian, anti_hermitian, none };

Symmetry combine_add(Symmetry a, Symmetry b);
Symmetry combine_commutator(Symmetry a, Symmetry b);
Symmetry scaled_symmetry(Symmetry s, Complex factor);

/// Dense operator supported on a connected set of sites; the atom of every
/// potential. `norm` caches the spectral norm and is valid only while the
/// owning potential reports norms_fresh().
struct LocalOperator {
  SupportSet support;
  Matrix matrix;
  double norm = 0.0;
};

/// Relative entry-pruning threshold: entries below eps * (largest matrix
/// entry in the potential) are discarded.
inline constexpr double kDefaultPruneEps = 1e-14;

/// Sum of local terms indexed by connected supports. Construction goes
/// through add()/add_scaled() followed by prune(), which enforces the stored
/// invariants (no zero terms, identity factors peeled, norms cached).
class Potential {
 public:
  Potential() = default;
  explicit Potential(Lattice lattice, Symmetry symmetry = Symmetry::none);

  const Lattice& lattice() const { return lattice_; }
  Symmetry symmetry() const { return symmetry_; }
  void set_symmetry(Symmetry s) { symmetry_ = s; }

  bool empty() const { return terms_.empty(); }
  int term_count() const { return static_cast<int>(terms_.size()); }
  const std::map<SupportSet, LocalOperator>& terms() const { return terms_; }
  bool norms_fresh() const { return norms_fresh_; }

  /// Accumulate a matrix on `sites` (strictly ascending; tensor slots follow
  /// that order). Disconnected supports are placed on their connected hull.
  void add(const std::vector<int>& sites, const Matrix& m);
  void add(const SupportSet& support, const Matrix& m);
  void add_scaled(const Potential& other, Complex factor);

  /// Largest |entry| over all stored terms.
  double max_entry() const;

  /// Enforce invariants: entries below eps_rel * max_entry() are dropped,
  /// all-zero terms removed, identity tensor factors peeled off supports,
  /// spectral norms recomputed. Discarded mass (weighted by
  /// e^{kappa_acct |S|}) lands in the ledger's prune bucket.
  void prune(double eps_rel = kDefaultPruneEps, double kappa_acct = 0.0,
             TruncationLedger* ledger = nullptr);

  /// Matrix of the term at `support`, or a zero matrix if absent.
  Matrix term_matrix(const SupportSet& support) const;

  Potential& operator+=(const Potential& other);
  Potential& operator-=(const Potential& other);
  Potential& operator*=(Complex factor);

  friend Potential adjoint(const Potential& p);

 private:
  Lattice lattice_;
  Symmetry symmetry_ = Symmetry::none;
  std::map<SupportSet, LocalOperator> terms_;
  bool norms_fresh_ = true;
};

Potential operator+(Potential a, const Potential& b);
Potential operator-(Potential a, const Potential& b);
Potential operator*(Complex factor, Potential p);
Potential operator-(Potential p);

Potential adjoint(const Potential& p);

/// Verify the declared symmetry termwise within a relative tolerance.
bool symmetry_holds(const Potential& p, double tol = 1e-10);

/// Spectral norms per support; uses the cache when fresh.
std::map<SupportSet, double> term_norms(const Potential& p);

struct CommutatorOptions {
  double pair_cutoff = 0.0;  // skip pairs with 2|q||z| below this (ledgered)
  int support_cap = 0;       // drop result supports wider than this; 0 = off
  double kappa_acct = 0.0;   // accounting rate for ledgered discards
  double prune_eps = kDefaultPruneEps;
};

/// Commutator of potentials: (ad_Q Z)_S = sum over S1 u S2 = S of
/// [Q_S1, Z_S2]; disjoint pairs vanish and are skipped.
Potential commutator(const Potential& q, const Potential& z);
Potential commutator(const Potential& q, const Potential& z,
                     const CommutatorOptions& opts, TruncationLedger* ledger);

/// sup_x sum_{S containing x} e^{kappa |S|} ||Z_S||.
double kappa_norm(const Potential& z, double kappa);

/// Full matrix on the whole lattice (sum of embedded terms).
Matrix to_dense(const Potential& z, const DenseBudget& budget = {});

/// Largest absolute entry difference between two potentials, compared
/// termwise on matching supports (both sides in pruned canonical form).
double max_term_diff(const Potential& a, const Potential& b);

}  // namespace preth
