#include "preth/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "preth/errors.hpp"

namespace preth {

HarmonicPotential::HarmonicPotential(Lattice lattice, double frequency)
    : lattice_(std::move(lattice)), nu_(frequency) {
  if (nu_ <= 0.0) throw Error("harmonic frequency must be positive");
}

double HarmonicPotential::period() const {
  return 2.0 * std::numbers::pi / nu_;
}

bool HarmonicPotential::empty() const {
  for (const auto& [k, p] : modes_)
    if (!p.empty()) return false;
  return true;
}

int HarmonicPotential::max_harmonic() const {
  int out = 0;
  for (const auto& [k, p] : modes_)
    if (!p.empty()) out = std::max(out, std::abs(k));
  return out;
}

const Potential* HarmonicPotential::harmonic(int k) const {
  auto it = modes_.find(k);
  return it == modes_.end() ? nullptr : &it->second;
}

Potential HarmonicPotential::harmonic_or_zero(int k) const {
  if (const Potential* p = harmonic(k)) return *p;
  return Potential(lattice_);
}

void HarmonicPotential::set_harmonic(int k, Potential p) {
  if (p.lattice() != lattice_)
    throw LatticeMismatch("harmonic on a different lattice");
  if (p.empty())
    modes_.erase(k);
  else
    modes_.insert_or_assign(k, std::move(p));
}

void HarmonicPotential::add_harmonic(int k, const Potential& p,
                                     Complex factor) {
  if (p.empty()) return;
  auto it = modes_.find(k);
  if (it == modes_.end()) {
    Potential fresh(lattice_, scaled_symmetry(p.symmetry(), factor));
    fresh.add_scaled(p, factor);
    modes_.emplace(k, std::move(fresh));
  } else {
    it->second.add_scaled(p, factor);
  }
}

void HarmonicPotential::add_scaled(const HarmonicPotential& other,
                                   Complex factor) {
  if (lattice_.sites() == 0) {
    lattice_ = other.lattice_;
    nu_ = other.nu_;
  }
  if (lattice_ != other.lattice_)
    throw LatticeMismatch("cannot combine series on different lattices");
  if (nu_ != other.nu_)
    throw Error("cannot combine series with different frequencies");
  for (const auto& [k, p] : other.modes_) add_harmonic(k, p, factor);
}

Potential HarmonicPotential::value_at(double t) const {
  Potential out(lattice_);
  for (const auto& [k, p] : modes_) {
    const double phase = static_cast<double>(k) * nu_ * t;
    out.add_scaled(p, Complex(std::cos(phase), std::sin(phase)));
  }
  out.prune();
  if (hermitian_series(*this)) out.set_symmetry(Symmetry::hermitian);
  return out;
}

void HarmonicPotential::prune(double eps_rel, double kappa_acct,
                              TruncationLedger* ledger) {
  for (auto it = modes_.begin(); it != modes_.end();) {
    it->second.prune(eps_rel, kappa_acct, ledger);
    it = it->second.empty() ? modes_.erase(it) : std::next(it);
  }
}

void HarmonicPotential::enforce_cap(int k_cap, double kappa_acct,
                                    TruncationLedger* ledger) {
  if (k_cap <= 0) return;
  for (auto it = modes_.begin(); it != modes_.end();) {
    if (std::abs(it->first) > k_cap) {
      if (ledger)
        ledger->harmonic_cap += kappa_norm(it->second, kappa_acct);
      it = modes_.erase(it);
    } else {
      ++it;
    }
  }
}

HarmonicPotential& HarmonicPotential::operator+=(
    const HarmonicPotential& other) {
  add_scaled(other, Complex(1.0, 0.0));
  return *this;
}

HarmonicPotential& HarmonicPotential::operator-=(
    const HarmonicPotential& other) {
  add_scaled(other, Complex(-1.0, 0.0));
  return *this;
}

HarmonicPotential& HarmonicPotential::operator*=(Complex factor) {
  for (auto& [k, p] : modes_) p *= factor;
  return *this;
}

HarmonicPotential operator+(HarmonicPotential a, const HarmonicPotential& b) {
  a += b;
  return a;
}

HarmonicPotential operator-(HarmonicPotential a, const HarmonicPotential& b) {
  a -= b;
  return a;
}

HarmonicPotential operator*(Complex factor, HarmonicPotential z) {
  z *= factor;
  return z;
}

HarmonicPotential operator-(HarmonicPotential z) {
  z *= Complex(-1.0, 0.0);
  return z;
}

HarmonicPotential adjoint(const HarmonicPotential& z) {
  HarmonicPotential out(z.lattice(), z.frequency());
  for (const auto& [k, p] : z.harmonics()) out.set_harmonic(-k, adjoint(p));
  return out;
}

bool hermitian_series(const HarmonicPotential& z, double tol) {
  for (const auto& [k, p] : z.harmonics()) {
    const Potential partner = z.harmonic_or_zero(-k);
    const double scale = std::max(p.max_entry(), 1.0);
    if (max_term_diff(adjoint(partner), p) > tol * scale) return false;
  }
  return true;
}

bool anti_hermitian_series(const HarmonicPotential& z, double tol) {
  for (const auto& [k, p] : z.harmonics()) {
    const Potential partner = z.harmonic_or_zero(-k);
    const double scale = std::max(p.max_entry(), 1.0);
    if (max_term_diff(Complex(-1.0, 0.0) * adjoint(partner), p) >
        tol * scale)
      return false;
  }
  return true;
}

double series_max_entry(const HarmonicPotential& z) {
  double m = 0.0;
  for (const auto& [k, p] : z.harmonics()) m = std::max(m, p.max_entry());
  return m;
}

HarmonicPotential promote(const Potential& p, double frequency) {
  HarmonicPotential out(p.lattice(), frequency);
  out.set_harmonic(0, p);
  return out;
}

Potential average(const HarmonicPotential& z) {
  return z.harmonic_or_zero(0);
}

HarmonicPotential oscillating_part(HarmonicPotential z) {
  z.set_harmonic(0, Potential(z.lattice()));
  return z;
}

HarmonicPotential time_derivative(const HarmonicPotential& z) {
  HarmonicPotential out(z.lattice(), z.frequency());
  for (const auto& [k, p] : z.harmonics()) {
    if (k == 0) continue;
    Potential scaled(z.lattice());
    scaled.add_scaled(p, Complex(0.0, static_cast<double>(k) * z.frequency()));
    out.set_harmonic(k, std::move(scaled));
  }
  return out;
}

double kappa_norm(const HarmonicPotential& z, double kappa) {
  if (z.empty()) return 0.0;
  // Per support, sum the harmonic norms first (sup_t bound), then apply the
  // usual per-site accumulation.
  std::map<SupportSet, double> per_support;
  for (const auto& [k, p] : z.harmonics())
    for (const auto& [support, norm] : term_norms(p))
      per_support[support] += norm;
  std::vector<double> per_site(z.lattice().sites(), 0.0);
  for (const auto& [support, norm] : per_support) {
    const double weighted = std::exp(kappa * support.size()) * norm;
    for (int s : support.sites()) per_site[s] += weighted;
  }
  return *std::max_element(per_site.begin(), per_site.end());
}

double kappa_norm_sampled(const HarmonicPotential& z, double kappa,
                          int samples) {
  if (z.empty()) return 0.0;
  double worst = 0.0;
  const double T = z.period();
  for (int i = 0; i < samples; ++i) {
    const double t = T * static_cast<double>(i) / samples;
    worst = std::max(worst, kappa_norm(z.value_at(t), kappa));
  }
  return worst;
}

double commutator_norm_bound(const Potential& q, const Potential& z,
                             double kappa) {
  const auto qn = term_norms(q);
  const auto zn = term_norms(z);
  double bound = 0.0;
  for (const auto& [s1, n1] : qn) {
    for (const auto& [s2, n2] : zn) {
      if (!s1.intersects(s2)) continue;
      const SupportSet u = s1.united(s2);
      bound += std::exp(kappa * u.size()) * 2.0 * n1 * n2;
    }
  }
  return bound;
}

HarmonicPotential commutator(const HarmonicPotential& q,
                             const HarmonicPotential& z, int k_cap,
                             const CommutatorOptions& opts,
                             TruncationLedger* ledger) {
  if (q.lattice() != z.lattice())
    throw LatticeMismatch("commutator of series on different lattices");
  if (q.frequency() != z.frequency())
    throw Error("commutator of series with different frequencies");
  HarmonicPotential out(q.lattice(), q.frequency());
  for (const auto& [k1, p1] : q.harmonics()) {
    for (const auto& [k2, p2] : z.harmonics()) {
      const int k = k1 + k2;
      if (k_cap > 0 && std::abs(k) > k_cap) {
        if (ledger)
          ledger->harmonic_cap +=
              commutator_norm_bound(p1, p2, opts.kappa_acct);
        continue;
      }
      Potential c = commutator(p1, p2, opts, ledger);
      out.add_harmonic(k, c);
    }
  }
  out.prune(opts.prune_eps, opts.kappa_acct, ledger);
  return out;
}

Matrix to_dense_at(const HarmonicPotential& z, double t,
                   const DenseBudget& budget) {
  return to_dense(z.value_at(t), budget);
}

}  // namespace preth
