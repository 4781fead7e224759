#include "preth/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "preth/errors.hpp"
#include "preth/pauli.hpp"

namespace preth {

namespace {

Matrix kron2(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long r = 0; r < a.rows(); ++r)
    for (long c = 0; c < a.cols(); ++c)
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

/// Ladder operator in the occupation basis (|1> occupied, n = (1 - Z)/2).
Matrix ladder(bool creation) {
  Matrix m = Matrix::Zero(2, 2);
  if (creation)
    m(1, 0) = 1.0;
  else
    m(0, 1) = 1.0;
  return m;
}

/// Jordan-Wigner mode operator restricted to the qubit span
/// [span_lo, span_lo + span_len): parity Z-string below the mode, the
/// ladder at the mode, identity above. The string below span_lo is omitted;
/// it cancels in every even product.
Matrix mode_operator(bool creation, int mode, int span_lo, int span_len) {
  Matrix out = Matrix::Identity(1, 1);
  for (int l = span_lo; l < span_lo + span_len; ++l) {
    if (l < mode)
      out = kron2(out, pauli::z());
    else if (l == mode)
      out = kron2(out, ladder(creation));
    else
      out = kron2(out, Matrix::Identity(2, 2));
  }
  return out;
}

Matrix fermion_term_matrix(const FermionTerm& term, int span_lo,
                           int span_len) {
  const long dim = pow_long(2, span_len);
  Matrix m = term.coefficient * Matrix::Identity(dim, dim);
  for (const auto& [creation, mode] : term.factors)
    m = (m * mode_operator(creation, mode, span_lo, span_len)).eval();
  return m;
}

}  // namespace

Potential jordan_wigner(const std::vector<FermionTerm>& terms,
                        const Lattice& qubits) {
  if (qubits.local_dim() != 2)
    throw Error("Jordan-Wigner requires a qubit lattice");
  if (qubits.kind() == Lattice::Kind::chain_periodic)
    throw Error("Jordan-Wigner requires an open 1-D mode ordering");
  Potential p(qubits, Symmetry::none);
  for (const FermionTerm& term : terms) {
    if (term.factors.empty())
      throw Error("fermionic term has no operator factors");
    if (term.factors.size() % 2 != 0)
      throw Error(
          "odd fermionic products carry an unbounded parity string and are "
          "not local");
    int lo = qubits.sites(), hi = -1;
    for (const auto& [creation, mode] : term.factors) {
      if (mode < 0 || mode >= qubits.sites())
        throw Error("fermionic mode outside the lattice");
      lo = std::min(lo, mode);
      hi = std::max(hi, mode);
    }
    std::vector<int> span;
    for (int l = lo; l <= hi; ++l) span.push_back(l);
    p.add(span, fermion_term_matrix(term, lo, hi - lo + 1));
  }
  p.prune();
  return p;
}

void verify_jordan_wigner(int n_modes) {
  if (n_modes < 1 || n_modes > 6)
    throw Error("anticommutator check wants a small register");
  const long dim = pow_long(2, n_modes);
  const Matrix id = Matrix::Identity(dim, dim);
  std::vector<Matrix> c, cdag;
  for (int j = 0; j < n_modes; ++j) {
    c.push_back(mode_operator(false, j, 0, n_modes));
    cdag.push_back(mode_operator(true, j, 0, n_modes));
  }
  const auto anti = [](const Matrix& a, const Matrix& b) -> Matrix {
    return a * b + b * a;
  };
  for (int i = 0; i < n_modes; ++i) {
    for (int j = 0; j < n_modes; ++j) {
      const double mixed =
          (anti(c[i], cdag[j]) - (i == j ? id : Matrix::Zero(dim, dim)))
              .cwiseAbs()
              .maxCoeff();
      if (mixed > 1e-14)
        throw Error("{c, c*} anticommutator violated by the mapping");
      if (anti(c[i], c[j]).cwiseAbs().maxCoeff() > 1e-14 ||
          anti(cdag[i], cdag[j]).cwiseAbs().maxCoeff() > 1e-14)
        throw Error("{c, c} anticommutator violated by the mapping");
    }
    const Matrix number = cdag[i] * c[i];
    Potential zi(Lattice::chain(n_modes), Symmetry::hermitian);
    zi.add({i}, ((Matrix::Identity(2, 2) - pauli::z()) / 2.0).eval());
    if ((number - to_dense(zi)).cwiseAbs().maxCoeff() > 1e-14)
      throw Error("occupation does not map to (1 - Z)/2");
  }
}

Potential fuse_qubit_pairs(const Potential& p) {
  const Lattice& ql = p.lattice();
  if (ql.local_dim() != 2) throw Error("pair fusing expects qubits");
  if (ql.sites() % 2 != 0) throw Error("pair fusing expects an even count");
  if (ql.kind() == Lattice::Kind::chain_periodic)
    throw Error("pair fusing expects an open chain");
  const Lattice fused = Lattice::chain(ql.sites() / 2, 4);

  Potential out(fused, p.symmetry());
  for (const auto& [support, term] : p.terms()) {
    std::vector<int> fused_sites;
    for (int s : support.sites()) {
      const int f = s / 2;
      if (fused_sites.empty() || fused_sites.back() != f)
        fused_sites.push_back(f);
    }
    std::vector<int> universe;
    for (int f : fused_sites) {
      universe.push_back(2 * f);
      universe.push_back(2 * f + 1);
    }
    // Ascending qubit order puts the even qubit of each pair in the more
    // significant slot; the embedded matrix is already the base-4 matrix.
    const Matrix full =
        embed(term.matrix, support, SupportSet(universe), 2);
    out.add(fused_sites, full);
  }
  out.prune();
  return out;
}

Lattice ModelSpec::lattice() const {
  return Lattice::chain(sites, local_dim, periodic);
}

Potential build_potential(const Lattice& lat,
                          const std::vector<TermSpec>& terms,
                          Symmetry symmetry) {
  Potential p(lat, symmetry);
  for (const TermSpec& t : terms) {
    if (t.sites.empty()) throw Error("term has no support");
    for (size_t i = 0; i < t.sites.size(); ++i) {
      if (t.sites[i] < 0 || t.sites[i] >= lat.sites())
        throw Error("term site outside the lattice");
      if (i > 0 && t.sites[i] <= t.sites[i - 1])
        throw Error("term sites must be strictly ascending");
    }
    const long dim = pow_long(lat.local_dim(), static_cast<int>(t.sites.size()));
    if (t.matrix.rows() != dim || t.matrix.cols() != dim)
      throw Error("term matrix does not match its support dimension");
    p.add(t.sites, t.matrix);
  }
  p.prune();
  return p;
}

std::vector<TermSpec> to_term_specs(const Potential& p) {
  std::vector<TermSpec> out;
  for (const auto& [support, term] : p.terms())
    out.push_back({support.sites(), term.matrix});
  return out;
}

namespace {

/// sup_theta |S_K(theta)| for the square-wave partial sum
/// S_K = sum_{odd k <= K} (4 / pi k) sin(k theta): dense grid plus a
/// derivative-bound pad, so the result is an upper bound.
double square_partial_sum_sup(int k_max) {
  int count = 0;
  for (int k = 1; k <= k_max; k += 2) ++count;
  const double lipschitz = 4.0 / std::numbers::pi * count;
  const int grid = 20000;
  double sup = 0.0;
  for (int i = 0; i <= grid; ++i) {
    const double theta = std::numbers::pi * i / grid;
    double s = 0.0;
    for (int k = 1; k <= k_max; k += 2)
      s += 4.0 / (std::numbers::pi * k) * std::sin(k * theta);
    sup = std::max(sup, std::abs(s));
  }
  return sup + 0.5 * lipschitz * (std::numbers::pi / grid);
}

int odd_cap(int max_harmonic) {
  if (max_harmonic < 1)
    throw Error("square-wave truncation needs max_harmonic >= 1");
  return max_harmonic % 2 == 0 ? max_harmonic - 1 : max_harmonic;
}

/// Static part and oscillating drive of a declared model; explicit k = 0
/// Fourier content is folded into the static part.
std::pair<Potential, HarmonicPotential> split_spec(const ModelSpec& spec,
                                                   TruncationLedger* ledger) {
  if (spec.nu <= 0.0) throw Error("model needs a positive frequency nu");
  const Lattice lat = spec.lattice();
  Potential d = build_potential(lat, spec.terms);
  HarmonicPotential v(lat, spec.nu);
  switch (spec.drive.type) {
    case DriveSpec::Type::none:
      throw Error("model declares no periodic drive");
    case DriveSpec::Type::fourier:
      for (const auto& [k, terms] : spec.drive.harmonics) {
        if (k == 0) {
          d += build_potential(lat, terms);
          d.prune();
        } else {
          v.add_harmonic(k, build_potential(lat, terms, Symmetry::none));
        }
      }
      break;
    case DriveSpec::Type::square: {
      const Potential amp = build_potential(lat, spec.drive.amplitude);
      const int cap = odd_cap(spec.drive.max_harmonic);
      for (int k = 1; k <= cap; k += 2) {
        const Complex fk(0.0, -2.0 / (std::numbers::pi * k));
        v.add_harmonic(k, amp, fk);
        v.add_harmonic(-k, amp, std::conj(fk));
      }
      if (ledger != nullptr)
        ledger->harmonic_cap += kappa_norm(amp, spec.kappa0) *
                                (1.0 + square_partial_sum_sup(cap));
      break;
    }
  }
  return {std::move(d), std::move(v)};
}

}  // namespace

IngestedModel to_driven_problem(const ModelSpec& spec) {
  IngestedModel out;
  auto [d, v] = split_spec(spec, &out.ingestion);
  out.problem.d0 = std::move(d);
  out.problem.v0 = std::move(v);
  out.problem.kappa0 = spec.kappa0;
  out.problem.validate();
  return out;
}

StaticProblem to_static_problem(const ModelSpec& spec) {
  if (!spec.is_static())
    throw Error("model declares no number operator");
  if (spec.drive.type != DriveSpec::Type::none)
    throw Error("the static pipeline takes undriven models");
  if (spec.nu <= 0.0) throw Error("model needs a positive grading scale nu");
  StaticProblem p;
  p.number = NumberOperator(spec.lattice(), spec.number.spectra);
  p.number.affine_shift = spec.number.affine_shift;
  p.nu = spec.nu;
  p.h0 = build_potential(spec.lattice(), spec.terms);
  p.kappa0 = spec.kappa0;
  p.validate();
  return p;
}

EvolutionProtocol to_protocol(const ModelSpec& spec) {
  if (spec.drive.type == DriveSpec::Type::none)
    throw Error("static models have no periodic protocol");
  const Lattice lat = spec.lattice();
  const double period = 2.0 * std::numbers::pi / spec.nu;
  if (spec.drive.type == DriveSpec::Type::square) {
    // The exact protocol: sign(sin nu t) is +1 then -1 over half periods.
    const Potential d = build_potential(lat, spec.terms);
    const Potential amp = build_potential(lat, spec.drive.amplitude);
    return EvolutionProtocol::piecewise(
        {{0.5 * period, d + amp}, {0.5 * period, d - amp}}, period);
  }
  auto [d, v] = split_spec(spec, nullptr);
  HarmonicPotential full = std::move(v);
  full.set_harmonic(0, std::move(d));
  return EvolutionProtocol::smooth(full);
}

namespace {

std::map<std::string, double> merge_params(
    const std::string& name, const std::map<std::string, double>& defaults,
    std::map<std::string, double> params) {
  std::map<std::string, double> out = defaults;
  for (const auto& [key, value] : params) {
    if (out.find(key) == out.end())
      throw Error("unknown parameter '" + key + "' for builtin " + name);
    out[key] = value;
  }
  return out;
}

int int_param(const std::map<std::string, double>& p, const std::string& key) {
  return static_cast<int>(std::lround(p.at(key)));
}

void chain_bonds(std::vector<TermSpec>& terms, int sites, const Matrix& m) {
  for (int i = 0; i + 1 < sites; ++i) terms.push_back({{i, i + 1}, m});
}

void chain_fields(std::vector<TermSpec>& terms, int sites, const Matrix& m) {
  for (int i = 0; i < sites; ++i) terms.push_back({{i}, m});
}

ModelSpec build_driven_ising(std::map<std::string, double> params) {
  const auto p = merge_params("driven_ising",
                              {{"L", 8},
                               {"J", 1.0},
                               {"h", 0.8},
                               {"g", 0.5},
                               {"nu", 20.0},
                               {"kappa0", 1.0},
                               {"max_harmonic", 13}},
                              std::move(params));
  ModelSpec spec;
  spec.name = "driven_ising";
  spec.params = p;
  spec.sites = int_param(p, "L");
  spec.kappa0 = p.at("kappa0");
  spec.nu = p.at("nu");
  chain_bonds(spec.terms, spec.sites,
              (p.at("J") * pauli::string_matrix("ZZ")).eval());
  chain_fields(spec.terms, spec.sites, (p.at("h") * pauli::z()).eval());
  spec.drive.type = DriveSpec::Type::square;
  spec.drive.max_harmonic = int_param(p, "max_harmonic");
  chain_fields(spec.drive.amplitude, spec.sites,
               (p.at("g") * pauli::x()).eval());
  return spec;
}

ModelSpec build_driven_heisenberg(std::map<std::string, double> params) {
  const auto p = merge_params("driven_heisenberg",
                              {{"L", 6},
                               {"J", 1.0},
                               {"h", 0.6},
                               {"g", 0.5},
                               {"nu", 15.0},
                               {"kappa0", 1.0}},
                              std::move(params));
  ModelSpec spec;
  spec.name = "driven_heisenberg";
  spec.params = p;
  spec.sites = int_param(p, "L");
  spec.kappa0 = p.at("kappa0");
  spec.nu = p.at("nu");
  const Matrix coupling = (p.at("J") * (pauli::string_matrix("XX") +
                                        pauli::string_matrix("YY") +
                                        pauli::string_matrix("ZZ")))
                              .eval();
  chain_bonds(spec.terms, spec.sites, coupling);
  chain_fields(spec.terms, spec.sites, (p.at("h") * pauli::z()).eval());
  spec.drive.type = DriveSpec::Type::fourier;
  std::vector<TermSpec> half;
  chain_fields(half, spec.sites, (0.5 * p.at("g") * pauli::x()).eval());
  spec.drive.harmonics.emplace_back(1, half);
  spec.drive.harmonics.emplace_back(-1, half);
  return spec;
}

/// Both hopping directions of one spin flavor across one bond, in fermionic
/// mode indices (site x, spin s -> mode 2x + s).
std::vector<FermionTerm> bond_hops(double j, int x, int spin) {
  const int a = 2 * x + spin;
  const int b = 2 * (x + 1) + spin;
  return {{j, {{false, a}, {true, b}}}, {j, {{false, b}, {true, a}}}};
}

ModelSpec build_hubbard(std::map<std::string, double> params) {
  const auto p = merge_params(
      "hubbard", {{"L", 2}, {"U", 20.0}, {"J", 1.0}, {"kappa0", 1.0}},
      std::move(params));
  const int sites = int_param(p, "L");
  if (sites < 2) throw Error("hubbard needs at least two sites");
  // Build-time mapping check on a 3-mode register.
  verify_jordan_wigner(3);

  const Lattice qubits = Lattice::chain(2 * sites);
  std::vector<FermionTerm> hops;
  for (int x = 0; x + 1 < sites; ++x)
    for (int spin = 0; spin < 2; ++spin)
      for (FermionTerm& t : bond_hops(p.at("J"), x, spin))
        hops.push_back(std::move(t));
  const Potential hopping = fuse_qubit_pairs(jordan_wigner(hops, qubits));

  ModelSpec spec;
  spec.name = "hubbard";
  spec.params = p;
  spec.sites = sites;
  spec.local_dim = 4;
  spec.kappa0 = p.at("kappa0");
  spec.nu = p.at("U");
  spec.terms = to_term_specs(hopping);
  // Doublon projector: fused basis index 3 = both flavors occupied.
  spec.number.spectra.assign(sites, {0, 0, 0, 1});
  return spec;
}

ModelSpec build_xyz(std::map<std::string, double> params) {
  const auto p = merge_params("xyz",
                              {{"L", 6},
                               {"J1", 1.0},
                               {"J2", 0.4},
                               {"J3", 0.7},
                               {"h", 30.0},
                               {"kappa0", 1.0}},
                              std::move(params));
  ModelSpec spec;
  spec.name = "xyz";
  spec.params = p;
  spec.sites = int_param(p, "L");
  spec.kappa0 = p.at("kappa0");
  spec.nu = p.at("h");
  // Spin-1/2 operators S = sigma / 2; the field h sum S3 = nu N - h L / 2
  // after the shift N = S3 + 1/2, so only couplings remain in H.
  const Matrix coupling = (0.25 * (p.at("J1") * pauli::string_matrix("XX") +
                                   p.at("J2") * pauli::string_matrix("YY") +
                                   p.at("J3") * pauli::string_matrix("ZZ")))
                              .eval();
  chain_bonds(spec.terms, spec.sites, coupling);
  spec.number.spectra.assign(spec.sites, {1, 0});
  spec.number.affine_shift = -0.5;
  return spec;
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"driven_ising", "driven_heisenberg", "hubbard", "xyz"};
}

std::string builtin_summary(const std::string& name) {
  if (name == "driven_ising")
    return "Ising chain J ZZ + h Z with a square-wave transverse drive "
           "g sq(nu t) X (L, J, h, g, nu, kappa0, max_harmonic)";
  if (name == "driven_heisenberg")
    return "Heisenberg chain J (XX+YY+ZZ) + h Z with a cosine drive "
           "g cos(nu t) X (L, J, h, g, nu, kappa0)";
  if (name == "hubbard")
    return "Fermi-Hubbard chain at nu = U: hopping J, doublon number "
           "operator, fused spin-orbital sites (L, U, J, kappa0)";
  if (name == "xyz")
    return "XYZ chain in a large field at nu = h: shifted magnetization "
           "number operator (L, J1, J2, J3, h, kappa0)";
  throw Error("unknown builtin model " + name);
}

ModelSpec builtin(const std::string& name,
                  std::map<std::string, double> params) {
  if (name == "driven_ising") return build_driven_ising(std::move(params));
  if (name == "driven_heisenberg")
    return build_driven_heisenberg(std::move(params));
  if (name == "hubbard") return build_hubbard(std::move(params));
  if (name == "xyz") return build_xyz(std::move(params));
  throw Error("unknown builtin model " + name);
}

namespace {

void expect(bool ok, const std::string& what) {
  if (!ok) throw Error("structural check failed: " + what);
}

/// Occupation projector n or (1 - n) of one qubit inside a span.
Matrix occupation_in_span(int qubit, bool occupied, int span_lo,
                          int span_len) {
  Matrix out = Matrix::Identity(1, 1);
  const Matrix n = ((Matrix::Identity(2, 2) - pauli::z()) / 2.0).eval();
  const Matrix hole = (Matrix::Identity(2, 2) - n).eval();
  for (int l = span_lo; l < span_lo + span_len; ++l) {
    if (l == qubit)
      out = kron2(out, occupied ? n : hole);
    else
      out = kron2(out, Matrix::Identity(2, 2));
  }
  return out;
}

/// The projector-dressed hopping D = T_s + T_d of the Hubbard chain,
/// built independently of the grading machinery: each spin-s hop across a
/// bond is multiplied by chi(the other flavor occupies neither site) +
/// chi(it occupies both).
Potential hubbard_projected_hopping(int sites, double j) {
  const Lattice qubits = Lattice::chain(2 * sites);
  Potential p(qubits, Symmetry::hermitian);
  for (int x = 0; x + 1 < sites; ++x) {
    const int lo = 2 * x;
    const int len = 4;
    for (int spin = 0; spin < 2; ++spin) {
      Matrix hop = Matrix::Zero(16, 16);
      for (const FermionTerm& t : bond_hops(j, x, spin))
        hop += fermion_term_matrix(t, lo, len);
      const int other_a = 2 * x + (1 - spin);
      const int other_b = 2 * (x + 1) + (1 - spin);
      const Matrix both = occupation_in_span(other_a, true, lo, len) *
                          occupation_in_span(other_b, true, lo, len);
      const Matrix neither = occupation_in_span(other_a, false, lo, len) *
                             occupation_in_span(other_b, false, lo, len);
      p.add({lo, lo + 1, lo + 2, lo + 3}, (hop * (both + neither)).eval());
    }
  }
  p.prune();
  return fuse_qubit_pairs(p);
}

void verify_driven_ising(const ModelSpec& spec) {
  const IngestedModel m = to_driven_problem(spec);
  const Lattice lat = spec.lattice();
  const Potential amp = build_potential(lat, spec.drive.amplitude);

  expect(average(m.problem.v0).empty(), "square drive has zero average");
  expect(hermitian_series(m.problem.v0), "square drive is Hermitian-valued");
  for (const auto& [k, vk] : m.problem.v0.harmonics())
    expect(k % 2 != 0, "square wave carries odd harmonics only");
  const Potential expected_k1 =
      Complex(0.0, -2.0 / std::numbers::pi) * amp;
  expect(max_term_diff(m.problem.v0.harmonic_or_zero(1), expected_k1) < 1e-12,
         "harmonic 1 is -2i/pi times the amplitude");
  expect(m.ingestion.total() > 0.0, "truncated tail is ledgered");

  const EvolutionProtocol proto = to_protocol(spec);
  expect(proto.is_piecewise(), "square drive has an exact protocol");
  const Potential mean =
      0.5 * (proto.segments()[0].hamiltonian + proto.segments()[1].hamiltonian);
  expect(max_term_diff(mean, m.problem.d0) < 1e-12,
         "protocol halves average to the static part");
  const Potential swing =
      0.5 * (proto.segments()[0].hamiltonian - proto.segments()[1].hamiltonian);
  expect(max_term_diff(swing, amp) < 1e-12,
         "protocol halves differ by the drive amplitude");
}

void verify_driven_heisenberg(const ModelSpec& spec) {
  const IngestedModel m = to_driven_problem(spec);
  expect(m.problem.v0.max_harmonic() == 1, "cosine drive is one harmonic");
  expect(average(m.problem.v0).empty(), "cosine drive has zero average");
  expect(hermitian_series(m.problem.v0), "cosine drive is Hermitian-valued");
  expect(m.ingestion.total() == 0.0, "explicit Fourier drives ingest exactly");
}

void verify_hubbard(const ModelSpec& spec) {
  verify_jordan_wigner(3);

  // Dense two-mode hopping spectrum {-J, 0, 0, +J} against the mapping.
  const Lattice two_modes = Lattice::chain(2);
  const Potential hop2 = jordan_wigner(
      {{1.0, {{false, 0}, {true, 1}}}, {1.0, {{false, 1}, {true, 0}}}},
      two_modes);
  Eigen::SelfAdjointEigenSolver<Matrix> es(to_dense(hop2));
  const Eigen::VectorXd ev = es.eigenvalues();
  expect(std::abs(ev[0] + 1.0) < 1e-12 && std::abs(ev[1]) < 1e-12 &&
             std::abs(ev[2]) < 1e-12 && std::abs(ev[3] - 1.0) < 1e-12,
         "two-mode hopping spectrum is {-J, 0, 0, +J}");

  // The charge-0 part of the hopping is the projector form T_s + T_d.
  const StaticProblem problem = to_static_problem(spec);
  const Potential avg = static_average(problem.h0, problem.number);
  const Potential expected =
      hubbard_projected_hopping(spec.sites, spec.params.at("J"));
  expect(max_term_diff(avg, expected) < 1e-12,
         "charge-0 hopping equals the projector form T_s + T_d");

  // Dense commutation with the doublon number on small instances.
  if (spec.sites <= 4) {
    const Matrix n_dense = to_dense(problem.number.as_potential());
    const Matrix d_dense = to_dense(avg);
    expect((n_dense * d_dense - d_dense * n_dense).cwiseAbs().maxCoeff() <
               1e-12,
           "T_s + T_d commutes with the doublon number");
  }
}

void verify_xyz(const ModelSpec& spec) {
  const StaticProblem problem = to_static_problem(spec);
  const Potential avg = static_average(problem.h0, problem.number);

  const double j1 = spec.params.at("J1");
  const double j2 = spec.params.at("J2");
  const double j3 = spec.params.at("J3");
  std::vector<TermSpec> expected_terms;
  const Matrix d_bond = (0.5 * (j1 + j2) * 0.25 *
                             (pauli::string_matrix("XX") +
                              pauli::string_matrix("YY")) +
                         j3 * 0.25 * pauli::string_matrix("ZZ"))
                            .eval();
  chain_bonds(expected_terms, spec.sites, d_bond);
  const Potential expected =
      build_potential(spec.lattice(), expected_terms);
  expect(max_term_diff(avg, expected) < 1e-12,
         "averaged coupling is (J1+J2)/2 (S1S1 + S2S2) + J3 S3S3");

  if (spec.sites <= 8) {
    const Matrix n_dense = to_dense(problem.number.as_potential());
    const Matrix d_dense = to_dense(avg);
    expect((n_dense * d_dense - d_dense * n_dense).cwiseAbs().maxCoeff() <
               1e-12,
           "averaged XYZ coupling commutes with the magnetization");
  }
}

}  // namespace

void verify_builtin_structure(const ModelSpec& spec) {
  if (spec.name == "driven_ising") return verify_driven_ising(spec);
  if (spec.name == "driven_heisenberg")
    return verify_driven_heisenberg(spec);
  if (spec.name == "hubbard") return verify_hubbard(spec);
  if (spec.name == "xyz") return verify_xyz(spec);
  throw Error("no structural checks for model " + spec.name);
}

}  // namespace preth
