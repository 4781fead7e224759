#pragma once

#include <filesystem>
#include <string>

#include "preth/certificates.hpp"
#include "preth/driven.hpp"
#include "preth/ed.hpp"
#include "preth/errors.hpp"
#include "preth/models.hpp"

namespace preth {

/// ---- model files -------------------------------------------------------
///
/// Models are declared in JSON. The canonical form stores each local term
/// as a dense matrix with entries as [re, im] pairs in row-major order,
/// which round-trips bit-exactly. On qubit lattices the parser also
/// accepts {"sites": [...], "pauli": "ZX", "coefficient": c} shorthand
/// (coefficient a number or an [re, im] pair, default 1); these are
/// converted to matrices on parse, so serialize_model output is always
/// canonical regardless of how the input was written.

std::string serialize_model(const ModelSpec& spec);
/// Throws ParseError with the offending field named in the message.
ModelSpec parse_model(const std::string& text);
ModelSpec load_model(const std::filesystem::path& path);
void save_model(const ModelSpec& spec, const std::filesystem::path& path);

/// ---- run artifacts -------------------------------------------------------

/// JSON body of a potential: one entry per stored term with its sites,
/// matrix, and term norm.
std::string serialize_potential(const Potential& p);

/// JSON body of a Fourier/graded series: one potential block per mode.
std::string serialize_harmonic(const HarmonicPotential& z);

/// JSON summary of a renormalization run: per-level norms and ledgers, the
/// selected level, and the effective pair (D-hat terms, V-hat harmonics).
std::string serialize_trace(const RenormTrace& trace);

/// ---- human-readable reports ----------------------------------------------

/// Per-level norm table plus the cumulative truncation ledger.
std::string trace_report(const RenormTrace& trace);

/// Hypotheses block, the per-step condition table, and the heating slope.
std::string certificate_text(const CertificateReport& report);

/// ---- simulation traces -----------------------------------------------------

/// CSV text: a header row (time, then the diagnostic columns), one row per
/// sample. Doubles are printed with %.17g and rows end in '\n', so equal
/// traces serialize to identical bytes.
std::string to_csv(const SimulationTrace& trace);

/// Metadata sidecar for a CSV trace: one sorted `key = value` line per
/// entry.
std::string metadata_text(const SimulationTrace& trace);

/// ---- files -----------------------------------------------------------------

/// Write content to a sibling temporary file and rename it over the target,
/// so readers never observe a partially written file.
void atomic_write(const std::filesystem::path& path,
                  const std::string& content);

}  // namespace preth
