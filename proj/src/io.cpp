#include "preth/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "preth/pauli.hpp"

namespace preth {
namespace {

using Json = nlohmann::ordered_json;

/// ---- field access with error context ---------------------------------

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError("model file: " + where + ": " + what);
}

const Json& field(const Json& j, const std::string& key,
                  const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) fail(where, "missing field \"" + key + "\"");
  return *it;
}

double number_or(const Json& j, const std::string& key, double fallback,
                 const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) fail(where, "\"" + key + "\" must be a number");
  return it->get<double>();
}

int int_at(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_number_integer()) fail(where, "\"" + key + "\" must be an integer");
  return v.get<int>();
}

int int_or(const Json& j, const std::string& key, int fallback,
           const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer())
    fail(where, "\"" + key + "\" must be an integer");
  return it->get<int>();
}

std::string string_at(const Json& j, const std::string& key,
                      const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_string()) fail(where, "\"" + key + "\" must be a string");
  return v.get<std::string>();
}

/// ---- matrices and terms -----------------------------------------------

Json complex_json(const Complex& c) { return Json::array({c.real(), c.imag()}); }

Complex complex_from(const Json& j, const std::string& where) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Complex(j[0].get<double>(), j[1].get<double>());
  fail(where, "expected a number or an [re, im] pair");
}

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "matrix must be a nonempty array of rows");
  const int n = static_cast<int>(j.size());
  Matrix m(n, n);
  for (int r = 0; r < n; ++r) {
    const Json& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      fail(where, "matrix must be square (row " + std::to_string(r) +
                      " has the wrong length)");
    for (int c = 0; c < n; ++c)
      m(r, c) = complex_from(row[c], where + " entry (" + std::to_string(r) +
                                         "," + std::to_string(c) + ")");
  }
  return m;
}

Json term_json(const TermSpec& term) {
  Json j;
  j["sites"] = term.sites;
  j["matrix"] = matrix_json(term.matrix);
  return j;
}

std::vector<int> sites_from(const Json& j, const std::string& where) {
  const Json& v = field(j, "sites", where);
  if (!v.is_array() || v.empty())
    fail(where, "\"sites\" must be a nonempty array of site indices");
  std::vector<int> sites;
  for (const Json& s : v) {
    if (!s.is_number_integer()) fail(where, "\"sites\" entries must be integers");
    sites.push_back(s.get<int>());
  }
  return sites;
}

TermSpec term_from(const Json& j, int local_dim, const std::string& where) {
  if (!j.is_object()) fail(where, "each term must be an object");
  TermSpec term;
  term.sites = sites_from(j, where);
  const bool has_matrix = j.contains("matrix");
  const bool has_pauli = j.contains("pauli");
  if (has_matrix == has_pauli)
    fail(where, "a term needs exactly one of \"matrix\" or \"pauli\"");
  if (has_matrix) {
    term.matrix = matrix_from(j["matrix"], where);
    double want = 1.0;
    for (size_t i = 0; i < term.sites.size(); ++i) want *= local_dim;
    if (static_cast<double>(term.matrix.rows()) != want)
      fail(where, "matrix dimension " + std::to_string(term.matrix.rows()) +
                      " does not match local_dim^sites");
  } else {
    if (local_dim != 2) fail(where, "\"pauli\" shorthand needs local_dim = 2");
    const std::string ops = string_at(j, "pauli", where);
    if (ops.size() != term.sites.size())
      fail(where, "\"pauli\" string length must equal the number of sites");
    Complex coeff(1.0, 0.0);
    if (j.contains("coefficient"))
      coeff = complex_from(j["coefficient"], where + " coefficient");
    term.matrix = coeff * pauli::string_matrix(ops);
  }
  return term;
}

Json terms_json(const std::vector<TermSpec>& terms) {
  Json arr = Json::array();
  for (const TermSpec& t : terms) arr.push_back(term_json(t));
  return arr;
}

std::vector<TermSpec> terms_from(const Json& j, int local_dim,
                                 const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of terms");
  std::vector<TermSpec> terms;
  for (size_t i = 0; i < j.size(); ++i)
    terms.push_back(
        term_from(j[i], local_dim, where + "[" + std::to_string(i) + "]"));
  return terms;
}

/// ---- potential / series blocks (run artifacts) --------------------------

Json potential_json(const Potential& p) {
  Json terms = Json::array();
  for (const auto& [support, op] : p.terms()) {
    Json t;
    t["sites"] = support.sites();
    t["matrix"] = matrix_json(op.matrix);
    t["norm"] = op.norm;
    terms.push_back(std::move(t));
  }
  Json j;
  j["sites"] = p.lattice().sites();
  j["local_dim"] = p.lattice().local_dim();
  j["terms"] = std::move(terms);
  return j;
}

Json harmonic_json(const HarmonicPotential& z) {
  Json modes = Json::array();
  for (const auto& [k, p] : z.harmonics()) {
    Json m;
    m["k"] = k;
    m["potential"] = potential_json(p);
    modes.push_back(std::move(m));
  }
  Json j;
  j["frequency"] = z.frequency();
  j["modes"] = std::move(modes);
  return j;
}

Json ledger_json(const TruncationLedger& ledger) {
  Json j;
  j["series_tail"] = ledger.series_tail;
  j["support_cap"] = ledger.support_cap;
  j["harmonic_cap"] = ledger.harmonic_cap;
  j["prune"] = ledger.prune;
  j["total"] = ledger.total();
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

/// ---- fixed-width text helpers --------------------------------------------

std::string formatted(const char* fmt, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, x);
  return buf;
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

}  // namespace

/// ---- model serialization -----------------------------------------------

std::string serialize_model(const ModelSpec& spec) {
  Json j;
  j["name"] = spec.name;
  Json lat;
  lat["sites"] = spec.sites;
  lat["local_dim"] = spec.local_dim;
  lat["periodic"] = spec.periodic;
  j["lattice"] = std::move(lat);
  j["kappa0"] = spec.kappa0;
  j["nu"] = spec.nu;
  if (!spec.params.empty()) {
    Json params;
    for (const auto& [key, value] : spec.params) params[key] = value;
    j["params"] = std::move(params);
  }
  j["terms"] = terms_json(spec.terms);
  switch (spec.drive.type) {
    case DriveSpec::Type::none:
      break;
    case DriveSpec::Type::fourier: {
      Json d;
      d["type"] = "fourier";
      Json modes = Json::array();
      for (const auto& [k, terms] : spec.drive.harmonics) {
        Json m;
        m["k"] = k;
        m["terms"] = terms_json(terms);
        modes.push_back(std::move(m));
      }
      d["harmonics"] = std::move(modes);
      j["drive"] = std::move(d);
      break;
    }
    case DriveSpec::Type::square: {
      Json d;
      d["type"] = "square";
      d["amplitude"] = terms_json(spec.drive.amplitude);
      d["max_harmonic"] = spec.drive.max_harmonic;
      j["drive"] = std::move(d);
      break;
    }
  }
  if (!spec.number.spectra.empty()) {
    Json num;
    num["spectra"] = spec.number.spectra;
    num["affine_shift"] = spec.number.affine_shift;
    j["number"] = std::move(num);
  }
  return dump(j);
}

ModelSpec parse_model(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("model file: top level must be an object");

  ModelSpec spec;
  spec.name = string_at(j, "name", "top level");
  const Json& lat = field(j, "lattice", "top level");
  if (!lat.is_object()) fail("top level", "\"lattice\" must be an object");
  spec.sites = int_at(lat, "sites", "lattice");
  spec.local_dim = int_or(lat, "local_dim", 2, "lattice");
  if (auto it = lat.find("periodic"); it != lat.end()) {
    if (!it->is_boolean()) fail("lattice", "\"periodic\" must be a boolean");
    spec.periodic = it->get<bool>();
  }
  if (spec.sites <= 0) fail("lattice", "\"sites\" must be positive");
  if (spec.local_dim < 2) fail("lattice", "\"local_dim\" must be at least 2");

  spec.kappa0 = number_or(j, "kappa0", 1.0, "top level");
  spec.nu = number_or(j, "nu", 0.0, "top level");

  if (auto it = j.find("params"); it != j.end()) {
    if (!it->is_object()) fail("top level", "\"params\" must be an object");
    for (const auto& [key, value] : it->items()) {
      if (!value.is_number()) fail("params", "\"" + key + "\" must be a number");
      spec.params[key] = value.get<double>();
    }
  }

  if (auto it = j.find("terms"); it != j.end())
    spec.terms = terms_from(*it, spec.local_dim, "terms");

  if (auto it = j.find("drive"); it != j.end()) {
    const Json& d = *it;
    if (!d.is_object()) fail("top level", "\"drive\" must be an object");
    const std::string type = string_at(d, "type", "drive");
    if (type == "none") {
      spec.drive.type = DriveSpec::Type::none;
    } else if (type == "fourier") {
      spec.drive.type = DriveSpec::Type::fourier;
      const Json& modes = field(d, "harmonics", "drive");
      if (!modes.is_array()) fail("drive", "\"harmonics\" must be an array");
      for (size_t i = 0; i < modes.size(); ++i) {
        const std::string where = "drive.harmonics[" + std::to_string(i) + "]";
        if (!modes[i].is_object()) fail(where, "expected an object");
        const int k = int_at(modes[i], "k", where);
        spec.drive.harmonics.emplace_back(
            k, terms_from(field(modes[i], "terms", where), spec.local_dim,
                          where + ".terms"));
      }
    } else if (type == "square") {
      spec.drive.type = DriveSpec::Type::square;
      spec.drive.amplitude = terms_from(field(d, "amplitude", "drive"),
                                        spec.local_dim, "drive.amplitude");
      spec.drive.max_harmonic =
          int_or(d, "max_harmonic", spec.drive.max_harmonic, "drive");
      if (spec.drive.max_harmonic < 1)
        fail("drive", "\"max_harmonic\" must be at least 1");
    } else {
      fail("drive", "unknown type \"" + type +
                        "\" (expected none, fourier, or square)");
    }
  }

  if (auto it = j.find("number"); it != j.end()) {
    const Json& num = *it;
    if (!num.is_object()) fail("top level", "\"number\" must be an object");
    const Json& spectra = field(num, "spectra", "number");
    if (!spectra.is_array() || spectra.empty())
      fail("number", "\"spectra\" must be a nonempty array of integer lists");
    for (size_t s = 0; s < spectra.size(); ++s) {
      const std::string where = "number.spectra[" + std::to_string(s) + "]";
      if (!spectra[s].is_array()) fail(where, "expected an array of integers");
      std::vector<int> diag;
      for (const Json& v : spectra[s]) {
        if (!v.is_number_integer()) fail(where, "entries must be integers");
        diag.push_back(v.get<int>());
      }
      spec.number.spectra.push_back(std::move(diag));
    }
    spec.number.affine_shift = number_or(num, "affine_shift", 0.0, "number");
  }

  return spec;
}

ModelSpec load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file: " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_model(text.str());
}

void save_model(const ModelSpec& spec, const std::filesystem::path& path) {
  atomic_write(path, serialize_model(spec));
}

/// ---- run artifacts -------------------------------------------------------

std::string serialize_potential(const Potential& p) {
  return dump(potential_json(p));
}

std::string serialize_harmonic(const HarmonicPotential& z) {
  return dump(harmonic_json(z));
}

std::string serialize_trace(const RenormTrace& trace) {
  Json j;
  j["mode"] = trace.mode == RunMode::certified ? "certified" : "greedy";
  j["kappa0"] = trace.kappa0;
  j["nu"] = trace.nu;
  if (trace.mode == RunMode::certified)
    j["n_star"] = trace.n_star;
  else
    j["rho_stop"] = trace.rho_stop;
  j["optimal"] = trace.optimal;
  Json levels = Json::array();
  for (const StepRecord& level : trace.levels) {
    Json l;
    l["n"] = level.n;
    l["kappa"] = level.kappa;
    l["v_norm"] = level.v_norm;
    l["d_norm"] = level.d_norm;
    l["delta_d"] = level.delta_d;
    l["series_terms"] = level.series_terms;
    l["ledger"] = ledger_json(level.ledger);
    levels.push_back(std::move(l));
  }
  j["levels"] = std::move(levels);
  j["ledger"] = ledger_json(trace.ledger);
  j["d_hat"] = potential_json(trace.d_hat());
  j["v_hat"] = harmonic_json(trace.v_hat());
  return dump(j);
}

/// ---- reports ---------------------------------------------------------------

std::string trace_report(const RenormTrace& trace) {
  std::ostringstream out;
  out << "renormalization trace: mode = "
      << (trace.mode == RunMode::certified ? "certified" : "greedy")
      << ", kappa0 = " << formatted("%.6g", trace.kappa0)
      << ", nu = " << formatted("%.6g", trace.nu) << "\n";
  if (trace.mode == RunMode::certified)
    out << "certified depth n* = " << trace.n_star << "\n";
  out << "selected level: " << trace.optimal
      << " (v = " << formatted("%.6g", trace.levels[trace.optimal].v_norm)
      << ")\n\n";
  out << "   n      kappa_n       v_norm       d_norm      delta_d  series"
         "  ledger_total\n";
  for (const StepRecord& level : trace.levels) {
    char line[160];
    std::snprintf(line, sizeof(line), "%4d %12.6g %12.6g %12.6g %12.6g %7d %13.6g\n",
                  level.n, level.kappa, level.v_norm, level.d_norm,
                  level.delta_d, level.series_terms, level.ledger.total());
    out << line;
  }
  const TruncationLedger& lg = trace.ledger;
  out << "\nledger: series_tail = " << formatted("%.6g", lg.series_tail)
      << ", support_cap = " << formatted("%.6g", lg.support_cap)
      << ", harmonic_cap = " << formatted("%.6g", lg.harmonic_cap)
      << ", prune = " << formatted("%.6g", lg.prune)
      << ", total = " << formatted("%.6g", lg.total()) << "\n";
  return out.str();
}

std::string certificate_text(const CertificateReport& report) {
  std::ostringstream out;
  const Hypotheses& h = report.hypotheses;
  out << "contraction certificate\n";
  out << "  kappa0 = " << formatted("%.6g", h.kappa0)
      << ", nu = " << formatted("%.6g", h.nu)
      << ", period T = " << formatted("%.6g", report.period) << "\n";
  out << "  v(0) = " << formatted("%.6g", h.v0)
      << ", d(0) = " << formatted("%.6g", h.d0) << "\n";
  out << "  nu_0 = " << formatted("%.6g", h.nu0) << ", n* = " << h.n_star
      << "\n";
  out << "  frequency_ok: " << yes_no(h.frequency_ok)
      << ", ratio_ok: " << yes_no(h.ratio_ok)
      << ", n_star_ok: " << yes_no(h.n_star_ok) << "\n";
  out << "  certified: " << yes_no(report.certified) << "\n";
  if (!report.failed.empty()) out << "  failed: " << report.failed << "\n";
  if (!report.rows.empty()) {
    out << "\n   n      kappa_n  delta_kappa          m_n       v_pred"
           "       v_meas       d_meas  drive_small  contraction\n";
    for (const CertificateRow& row : report.rows) {
      char line[220];
      std::snprintf(line, sizeof(line),
                    "%4d %12.6g %12.6g %12.6g %12.6g %12.6g %12.6g %12s %12s\n",
                    row.n, row.kappa_n, row.delta_kappa_n, row.m_n,
                    row.v_predicted, row.v_measured, row.d_measured,
                    yes_no(row.drive_small), yes_no(row.contraction));
      out << line;
    }
  }
  if (report.certified) {
    out << "\nheating bound: slope K0 (2/3)^{n*} = "
        << formatted("%.6g", report.heating_slope)
        << " per unit time (K0 = C d(0) v(0) = "
        << formatted("%.6g", report.k0)
        << ", C = " << formatted("%.6g", report.constant_c) << ")\n";
  } else {
    out << "\nheating bound: none (hypotheses not certified)\n";
  }
  return out.str();
}

/// ---- simulation traces -------------------------------------------------------

std::string to_csv(const SimulationTrace& trace) {
  for (const auto& [name, values] : trace.series)
    if (values.size() != trace.times.size())
      throw Error("trace column \"" + name + "\" has " +
                  std::to_string(values.size()) + " entries for " +
                  std::to_string(trace.times.size()) + " times");
  std::string out = "time";
  for (const auto& [name, values] : trace.series) out += "," + name;
  out += "\n";
  char buf[40];
  for (size_t i = 0; i < trace.times.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", trace.times[i]);
    out += buf;
    for (const auto& [name, values] : trace.series) {
      std::snprintf(buf, sizeof(buf), ",%.17g", values[i]);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

std::string metadata_text(const SimulationTrace& trace) {
  std::string out;
  for (const auto& [key, value] : trace.metadata)
    out += key + " = " + value + "\n";
  return out;
}

/// ---- files ---------------------------------------------------------------------

void atomic_write(const std::filesystem::path& path,
                  const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace preth
