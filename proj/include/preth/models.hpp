#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "preth/driven.hpp"
#include "preth/ed.hpp"
#include "preth/static_renorm.hpp"

namespace preth {

/// One product of fermionic mode operators with a coefficient; factors are
/// listed in operator order (leftmost factor acts last on kets).
struct FermionTerm {
  Complex coefficient = Complex(1.0, 0.0);
  /// (creation?, mode) pairs. Even counts only: odd products carry an
  /// unbounded parity string and are not local qubit operators.
  std::vector<std::pair<bool, int>> factors;
};

/// Jordan-Wigner image on a qubit chain: mode j lives on qubit j, occupation
/// n_j = (1 - Z_j)/2 (|1> occupied), and each operator carries the parity
/// string prod_{l < j} Z_l. Every term becomes one dense matrix on the
/// contiguous qubit span of its modes.
Potential jordan_wigner(const std::vector<FermionTerm>& terms,
                        const Lattice& qubits);

/// Dense check of the canonical anticommutation relations for all mode
/// pairs on a small register; throws on any violation.
void verify_jordan_wigner(int n_modes = 3);

/// Repack a potential on 2L qubits into L fused sites of local dimension 4;
/// qubits (2x, 2x+1) become site x with the even qubit in the most
/// significant slot, so matrices carry over entry-for-entry.
Potential fuse_qubit_pairs(const Potential& p);

/// One declared local term: a dense matrix on ascending sites. This is the
/// canonical form; the file format also accepts Pauli-string shorthand on
/// qubit lattices, which ingestion converts to a matrix.
struct TermSpec {
  std::vector<int> sites;
  Matrix matrix;
};

struct DriveSpec {
  enum class Type { none, fourier, square };
  Type type = Type::none;
  /// Explicit Fourier modes (type fourier). A k = 0 entry is folded into
  /// the static part during ingestion so the drive has zero average.
  std::vector<std::pair<int, std::vector<TermSpec>>> harmonics;
  /// Square-wave amplitude A (type square): drive = sign(sin nu t) * A.
  std::vector<TermSpec> amplitude;
  /// Fourier truncation of the square wave: odd |k| <= max_harmonic are
  /// kept as the certified drive, the sup-norm of the tail is ledgered.
  int max_harmonic = 13;
};

struct NumberSpec {
  std::vector<std::vector<int>> spectra;  // per-site diagonals; empty = none
  double affine_shift = 0.0;
};

/// A complete model declaration: lattice, static terms, optional periodic
/// drive, optional number operator (which selects the static pipeline).
struct ModelSpec {
  std::string name;
  int sites = 0;
  int local_dim = 2;
  bool periodic = false;
  double kappa0 = 1.0;
  double nu = 0.0;  // drive frequency, or the grading scale nu = U, h
  std::vector<TermSpec> terms;
  DriveSpec drive;
  NumberSpec number;
  /// Named scalars the model was generated from (builtins fill these);
  /// carried for provenance and structural checks, not consumed by
  /// ingestion.
  std::map<std::string, double> params;

  bool is_static() const { return !number.spectra.empty(); }
  Lattice lattice() const;
};

/// Sum of declared terms as a potential (validated against the lattice).
Potential build_potential(const Lattice& lat,
                          const std::vector<TermSpec>& terms,
                          Symmetry symmetry = Symmetry::hermitian);

/// The stored terms of a potential as declaration entries.
std::vector<TermSpec> to_term_specs(const Potential& p);

/// A driven problem plus the model-level ledger: what the certified
/// Fourier-truncated drive omits relative to the declared protocol
/// (square-wave tail), separate from the renormalization trace ledger.
struct IngestedModel {
  DrivenProblem problem;
  TruncationLedger ingestion;
};

IngestedModel to_driven_problem(const ModelSpec& spec);
StaticProblem to_static_problem(const ModelSpec& spec);

/// The exact one-period evolution protocol: piecewise segments for square
/// drives (the propagator is then integrator-error free), a smooth harmonic
/// protocol for fourier drives. Static models have none.
EvolutionProtocol to_protocol(const ModelSpec& spec);

/// Built-in models. Parameters not supplied take the documented defaults;
/// unknown parameter names are errors.
std::vector<std::string> builtin_names();
std::string builtin_summary(const std::string& name);
ModelSpec builtin(const std::string& name,
                  std::map<std::string, double> params = {});

/// Machine-checkable structural facts for each builtin (the worked
/// examples): Hubbard's charge-0 part equals the projector-dressed
/// hoppings, XYZ's averaged coupling is (J1+J2)/2, the square-wave Ising
/// ingestion reproduces the odd-harmonic coefficients. Throws on failure.
void verify_builtin_structure(const ModelSpec& spec);

}  // namespace preth
