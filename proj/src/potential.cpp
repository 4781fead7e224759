#include "preth/potential.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "preth/errors.hpp"

namespace preth {

Symmetry combine_add(Symmetry a, Symmetry b) {
  if (a == b) return a;
  return Symmetry::none;
}

Symmetry combine_commutator(Symmetry a, Symmetry b) {
  // [A,B]^dag = [B^dag, A^dag]: two Hermitian or two anti-Hermitian factors
  // give an anti-Hermitian commutator; a mixed pair gives a Hermitian one.
  if (a == Symmetry::none || b == Symmetry::none) return Symmetry::none;
  if (a == b) return Symmetry::anti_hermitian;
  return Symmetry::hermitian;
}

Symmetry scaled_symmetry(Symmetry s, Complex factor) {
  if (s == Symmetry::none || factor == Complex(0.0, 0.0)) return s;
  if (factor.imag() == 0.0) return s;
  if (factor.real() == 0.0) {
    return s == Symmetry::hermitian ? Symmetry::anti_hermitian
                                    : Symmetry::hermitian;
  }
  return Symmetry::none;
}

Potential::Potential(Lattice lattice, Symmetry symmetry)
    : lattice_(std::move(lattice)), symmetry_(symmetry) {}

void Potential::add(const std::vector<int>& sites, const Matrix& m) {
  if (!std::is_sorted(sites.begin(), sites.end()) ||
      std::adjacent_find(sites.begin(), sites.end()) != sites.end())
    throw Error("term sites must be strictly ascending");
  add(SupportSet(sites), m);
}

void Potential::add(const SupportSet& support, const Matrix& m) {
  if (support.empty()) throw Error("cannot add a term with empty support");
  for (int s : support.sites()) {
    if (s < 0 || s >= lattice_.sites())
      throw LatticeMismatch("term support leaves the lattice");
  }
  const long dim = pow_long(lattice_.local_dim(), support.size());
  if (m.rows() != dim || m.cols() != dim)
    throw LatticeMismatch("term matrix dimension does not match its support");

  const SupportSet hull = is_connected(support, lattice_)
                              ? support
                              : support_hull(support.sites(), lattice_);
  Matrix placed =
      (hull == support) ? m : embed(m, support, hull, lattice_.local_dim());

  auto it = terms_.find(hull);
  if (it == terms_.end()) {
    terms_.emplace(hull, LocalOperator{hull, std::move(placed), 0.0});
  } else {
    it->second.matrix += placed;
  }
  norms_fresh_ = false;
}

void Potential::add_scaled(const Potential& other, Complex factor) {
  if (lattice_.sites() == 0) lattice_ = other.lattice();
  if (lattice_ != other.lattice())
    throw LatticeMismatch("cannot combine potentials on different lattices");
  for (const auto& [support, term] : other.terms())
    add(support, factor * term.matrix);
  symmetry_ =
      combine_add(symmetry_, scaled_symmetry(other.symmetry(), factor));
}

double Potential::max_entry() const {
  double m = 0.0;
  for (const auto& [support, term] : terms_)
    m = std::max(m, term.matrix.cwiseAbs().maxCoeff());
  return m;
}

namespace {

/// Check whether `m` equals identity-on-`site` tensor its normalized partial
/// trace. On success writes the reduced matrix and the Frobenius norm of the
/// (tiny) discarded difference.
bool peels_identity(const Matrix& m, const SupportSet& support, int site,
                    int local_dim, double tol, Matrix* rest,
                    double* discarded) {
  Matrix reduced = peel_site(m, support, site, local_dim);
  std::vector<int> remaining;
  for (int s : support.sites())
    if (s != site) remaining.push_back(s);
  const Matrix back =
      embed(reduced, SupportSet(remaining), support, local_dim);
  const Matrix diff = m - back;
  if (diff.cwiseAbs().maxCoeff() > tol) return false;
  *rest = std::move(reduced);
  *discarded = diff.norm();
  return true;
}

}  // namespace

void Potential::prune(double eps_rel, double kappa_acct,
                      TruncationLedger* ledger) {
  const double scale = max_entry();
  if (scale == 0.0) {
    terms_.clear();
    norms_fresh_ = true;
    return;
  }
  const double threshold = eps_rel * scale;
  const int q = lattice_.local_dim();

  std::map<SupportSet, LocalOperator> kept;
  for (auto& [support, term] : terms_) {
    Matrix m = std::move(term.matrix);
    double zeroed_sq = 0.0;
    for (long c = 0; c < m.cols(); ++c) {
      for (long r = 0; r < m.rows(); ++r) {
        const double a = std::abs(m(r, c));
        if (a != 0.0 && a < threshold) {
          zeroed_sq += a * a;
          m(r, c) = Complex(0.0, 0.0);
        }
      }
    }
    SupportSet current = support;
    if (ledger && zeroed_sq > 0.0) {
      // Frobenius norm upper-bounds the spectral norm of the removed part.
      ledger->prune +=
          std::exp(kappa_acct * current.size()) * std::sqrt(zeroed_sq);
    }
    if (m.cwiseAbs().maxCoeff() == 0.0) continue;

    // Peel identity tensor factors while the remaining support stays
    // connected and nonempty.
    bool peeled = true;
    while (peeled && current.size() > 1) {
      peeled = false;
      for (int site : current.sites()) {
        std::vector<int> remaining;
        for (int s : current.sites())
          if (s != site) remaining.push_back(s);
        if (!is_connected(SupportSet(remaining), lattice_)) continue;
        Matrix rest;
        double diff = 0.0;
        if (peels_identity(m, current, site, q, threshold, &rest, &diff)) {
          if (ledger && diff > 0.0)
            ledger->prune += std::exp(kappa_acct * current.size()) * diff;
          m = std::move(rest);
          current = SupportSet(remaining);
          peeled = true;
          break;
        }
      }
    }

    auto it = kept.find(current);
    if (it == kept.end()) {
      kept.emplace(current, LocalOperator{current, std::move(m), 0.0});
    } else {
      it->second.matrix += m;
    }
  }

  for (auto& [support, term] : kept) term.norm = spectral_norm(term.matrix);
  terms_ = std::move(kept);
  norms_fresh_ = true;
}

Matrix Potential::term_matrix(const SupportSet& support) const {
  auto it = terms_.find(support);
  if (it != terms_.end()) return it->second.matrix;
  const long dim = pow_long(lattice_.local_dim(), support.size());
  return Matrix::Zero(dim, dim);
}

Potential& Potential::operator+=(const Potential& other) {
  add_scaled(other, Complex(1.0, 0.0));
  return *this;
}

Potential& Potential::operator-=(const Potential& other) {
  add_scaled(other, Complex(-1.0, 0.0));
  return *this;
}

Potential& Potential::operator*=(Complex factor) {
  for (auto& [support, term] : terms_) {
    term.matrix *= factor;
    term.norm *= std::abs(factor);
  }
  symmetry_ = scaled_symmetry(symmetry_, factor);
  return *this;
}

Potential operator+(Potential a, const Potential& b) {
  a += b;
  return a;
}

Potential operator-(Potential a, const Potential& b) {
  a -= b;
  return a;
}

Potential operator*(Complex factor, Potential p) {
  p *= factor;
  return p;
}

Potential operator-(Potential p) {
  p *= Complex(-1.0, 0.0);
  return p;
}

Potential adjoint(const Potential& p) {
  Potential out(p.lattice(), p.symmetry());
  out.terms_ = p.terms_;
  for (auto& [support, term] : out.terms_)
    term.matrix = term.matrix.adjoint().eval();
  out.norms_fresh_ = p.norms_fresh_;  // ||M^dag|| = ||M||
  return out;
}

bool symmetry_holds(const Potential& p, double tol) {
  for (const auto& [support, term] : p.terms()) {
    const double scale = std::max(term.matrix.cwiseAbs().maxCoeff(), 1.0);
    switch (p.symmetry()) {
      case Symmetry::hermitian:
        if ((term.matrix - term.matrix.adjoint()).cwiseAbs().maxCoeff() >
            tol * scale)
          return false;
        break;
      case Symmetry::anti_hermitian:
        if ((term.matrix + term.matrix.adjoint()).cwiseAbs().maxCoeff() >
            tol * scale)
          return false;
        break;
      case Symmetry::none:
        break;
    }
  }
  return true;
}

std::map<SupportSet, double> term_norms(const Potential& p) {
  std::map<SupportSet, double> out;
  for (const auto& [support, term] : p.terms())
    out[support] =
        p.norms_fresh() ? term.norm : spectral_norm(term.matrix);
  return out;
}

Potential commutator(const Potential& q, const Potential& z) {
  return commutator(q, z, CommutatorOptions{}, nullptr);
}

Potential commutator(const Potential& q, const Potential& z,
                     const CommutatorOptions& opts, TruncationLedger* ledger) {
  if (q.lattice() != z.lattice())
    throw LatticeMismatch("commutator of potentials on different lattices");
  const Lattice& lat = q.lattice();
  Potential out(lat, combine_commutator(q.symmetry(), z.symmetry()));

  const bool screening = opts.pair_cutoff > 0.0 || opts.support_cap > 0;
  const auto qn = screening ? term_norms(q) : std::map<SupportSet, double>{};
  const auto zn = screening ? term_norms(z) : std::map<SupportSet, double>{};

  for (const auto& [s1, t1] : q.terms()) {
    for (const auto& [s2, t2] : z.terms()) {
      if (!s1.intersects(s2)) continue;  // disjoint supports commute
      const SupportSet u = s1.united(s2);
      if (screening) {
        const double pair_bound = 2.0 * qn.at(s1) * zn.at(s2);
        if (opts.pair_cutoff > 0.0 && pair_bound <= opts.pair_cutoff) {
          if (ledger)
            ledger->prune +=
                std::exp(opts.kappa_acct * u.size()) * pair_bound;
          continue;
        }
        if (opts.support_cap > 0 && u.size() > opts.support_cap) {
          if (ledger)
            ledger->support_cap +=
                std::exp(opts.kappa_acct * u.size()) * pair_bound;
          continue;
        }
      }
      const Matrix a = embed(t1.matrix, s1, u, lat.local_dim());
      const Matrix b = embed(t2.matrix, s2, u, lat.local_dim());
      out.add(u, a * b - b * a);
    }
  }
  out.prune(opts.prune_eps, opts.kappa_acct, ledger);
  return out;
}

double kappa_norm(const Potential& z, double kappa) {
  if (z.empty()) return 0.0;
  const auto norms = term_norms(z);
  std::vector<double> per_site(z.lattice().sites(), 0.0);
  for (const auto& [support, norm] : norms) {
    const double weighted = std::exp(kappa * support.size()) * norm;
    for (int s : support.sites()) per_site[s] += weighted;
  }
  return *std::max_element(per_site.begin(), per_site.end());
}

Matrix to_dense(const Potential& z, const DenseBudget& budget) {
  const Lattice& lat = z.lattice();
  const long dim = pow_long(lat.local_dim(), lat.sites());
  if (dim > budget.max_dim)
    throw BudgetExceeded("dense representation exceeds the dimension budget");
  std::vector<int> all(lat.sites());
  for (int i = 0; i < lat.sites(); ++i) all[i] = i;
  const SupportSet universe(all);
  Matrix out = Matrix::Zero(dim, dim);
  for (const auto& [support, term] : z.terms())
    out += embed(term.matrix, support, universe, lat.local_dim());
  return out;
}

double max_term_diff(const Potential& a, const Potential& b) {
  double worst = 0.0;
  auto scan = [&](const Potential& lhs, const Potential& rhs) {
    for (const auto& [support, term] : lhs.terms()) {
      const Matrix d = term.matrix - rhs.term_matrix(support);
      worst = std::max(worst, d.cwiseAbs().maxCoeff());
    }
  };
  scan(a, b);
  scan(b, a);
  return worst;
}

}  // namespace preth
