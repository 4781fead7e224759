#include "preth/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "preth/certificates.hpp"
#include "preth/dense.hpp"
#include "preth/ed.hpp"
#include "preth/io.hpp"
#include "preth/models.hpp"
#include "preth/pauli.hpp"

namespace preth {
namespace {

namespace fs = std::filesystem;

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// ---- shared model selection ---------------------------------------------

struct ModelFlags {
  std::string file;
  std::string name;
  std::vector<std::string> params;  // key=value overrides for builtins
  double nu = 0.0;                  // 0 = keep the model's value
  double kappa0 = 0.0;
  int sites = 0;  // --L override, builtins only
};

void add_model_flags(CLI::App* cmd, ModelFlags& mf) {
  auto* file =
      cmd->add_option("--model", mf.file, "model declaration file (JSON)");
  auto* name = cmd->add_option("--builtin", mf.name, "built-in model name");
  file->excludes(name);
  name->excludes(file);
  cmd->add_option("--param", mf.params,
                  "builtin parameter override, key=value (repeatable)");
  cmd->add_option("--nu", mf.nu, "override the drive/grading frequency");
  cmd->add_option("--kappa0", mf.kappa0, "override the initial decay rate");
  cmd->add_option("--L", mf.sites, "override the chain length (builtins only)");
}

ModelSpec resolve_model(const ModelFlags& mf) {
  ModelSpec spec;
  if (!mf.name.empty()) {
    std::map<std::string, double> params;
    for (const std::string& kv : mf.params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0)
        throw Error("--param expects key=value, got \"" + kv + "\"");
      try {
        params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
      } catch (const std::exception&) {
        throw Error("--param value is not a number: \"" + kv + "\"");
      }
    }
    if (mf.sites > 0) params["L"] = mf.sites;
    spec = builtin(mf.name, params);
  } else if (!mf.file.empty()) {
    if (!mf.params.empty() || mf.sites > 0)
      throw Error("--param and --L apply to built-in models only");
    spec = load_model(mf.file);
  } else {
    throw Error("select a model with --model FILE or --builtin NAME");
  }
  if (mf.nu > 0.0) spec.nu = mf.nu;
  if (mf.kappa0 > 0.0) spec.kappa0 = mf.kappa0;
  return spec;
}

RunMode parse_mode(const std::string& mode) {
  if (mode == "greedy") return RunMode::greedy;
  if (mode == "certified") return RunMode::certified;
  throw Error("--mode must be greedy or certified, got \"" + mode + "\"");
}

/// Engine truncation knobs shared by every renormalizing subcommand. All
/// three are ledger-accounted, so tightening them trades certificate slack
/// for speed, never silent error.
struct EngineFlags {
  int support_cap = 6;
  int k_cap = 0;  // 0 = engine auto (3x the drive's native content)
  double pair_cutoff = 1e-8;
};

void add_engine_flags(CLI::App* cmd, EngineFlags& ef) {
  cmd->add_option("--support-cap", ef.support_cap,
                  "discard (and ledger) terms wider than this many sites");
  cmd->add_option("--k-cap", ef.k_cap,
                  "harmonic cutoff kept during the recursion (0 = auto)");
  cmd->add_option("--pair-cutoff", ef.pair_cutoff,
                  "skip (and ledger) commutator pairs below this weight");
}

RunOptions engine_options(const EngineFlags& ef) {
  RunOptions opts;
  opts.support_cap = ef.support_cap;
  opts.k_cap = ef.k_cap;
  opts.pair_cutoff = ef.pair_cutoff;
  return opts;
}

/// Renormalize along the pipeline the model declares (driven or static);
/// `ingestion` receives the model-level drive-truncation ledger.
RenormTrace renormalize(const ModelSpec& spec, int steps, RunMode mode,
                        const EngineFlags& ef,
                        TruncationLedger* ingestion = nullptr) {
  if (spec.is_static())
    return static_run(to_static_problem(spec), steps, mode,
                      engine_options(ef));
  IngestedModel ing = to_driven_problem(spec);
  if (ingestion) *ingestion = ing.ingestion;
  return run(ing.problem, steps, mode, engine_options(ef));
}

std::vector<double> time_grid(double t_max, int samples) {
  if (t_max <= 0.0) throw Error("--t-max must be positive");
  if (samples < 2) throw Error("--samples must be at least 2");
  std::vector<double> times(samples);
  for (int i = 0; i < samples; ++i)
    times[i] = t_max * static_cast<double>(i) / (samples - 1);
  return times;
}

/// Pauli Z embedded at one site of a qubit chain (diagnostics observable).
Matrix site_z(const Lattice& lat, int site) {
  if (lat.local_dim() != 2)
    throw Error("this diagnostic's observable is a Pauli Z; it needs a "
                "qubit lattice (local_dim = 2)");
  std::vector<int> universe(lat.sites());
  for (int i = 0; i < lat.sites(); ++i) universe[i] = i;
  return embed(pauli::string_matrix("Z"), SupportSet({site}),
               SupportSet(universe), 2);
}

/// ---- subcommands ----------------------------------------------------------

struct TransformFlags {
  ModelFlags model;
  EngineFlags engine;
  int steps = 6;
  std::string mode = "greedy";
  bool static_mode = false;
  std::string out;
};

void run_transform(const TransformFlags& f) {
  ModelSpec spec = resolve_model(f.model);
  if (f.static_mode && !spec.is_static())
    throw Error("--static requires a model with a number block");
  TruncationLedger ingestion;
  RenormTrace trace =
      renormalize(spec, f.steps, parse_mode(f.mode), f.engine, &ingestion);
  std::string report = trace_report(trace);
  if (ingestion.total() > 0.0)
    report += "model ingestion (drive truncation): " +
              fmt_double(ingestion.total()) + "\n";
  std::cout << report;
  if (!f.out.empty()) {
    fs::create_directories(f.out);
    const fs::path dir(f.out);
    atomic_write(dir / "report.txt", report);
    atomic_write(dir / "trace.json", serialize_trace(trace));
    atomic_write(dir / "d_hat.json", serialize_potential(trace.d_hat()));
    atomic_write(dir / "v_hat.json", serialize_harmonic(trace.v_hat()));
    atomic_write(dir / "model.json", serialize_model(spec));
  }
}

struct CertifyFlags {
  ModelFlags model;
  EngineFlags engine;
  int steps = 6;
  int trials = 0;
  std::uint64_t seed = 1;
  double constant_c = 1.0;
  std::string out;
};

void run_certify(const CertifyFlags& f) {
  ModelSpec spec = resolve_model(f.model);
  RenormTrace trace = renormalize(spec, f.steps, RunMode::greedy, f.engine);
  CertificateReport report =
      build_report(spec.kappa0, spec.nu, trace.measured(), f.constant_c);
  std::string text = certificate_text(report);

  if (f.trials > 0) {
    LemmaCheckStats stats = lemma_check(f.trials, 3, spec.kappa0, 0, f.seed);
    text += "\nlemma check: " + std::to_string(stats.trials) + " trials, " +
            std::to_string(stats.violations) +
            " violations, worst measured/bound = " +
            fmt_double(stats.worst_ratio) + " (seed " +
            std::to_string(f.seed) + ")\n";
    if (stats.violations > 0)
      text += "first violation: " + stats.first_violation + "\n";
  }
  std::cout << text;
  if (!f.out.empty()) {
    fs::create_directories(f.out);
    const fs::path dir(f.out);
    atomic_write(dir / "certificate.txt", text);
    std::string csv =
        "n,kappa_n,delta_kappa_n,m_n,v_predicted,v_measured,d_measured,"
        "drive_small,contraction\n";
    for (const CertificateRow& row : report.rows) {
      csv += std::to_string(row.n) + "," + fmt_double(row.kappa_n) + "," +
             fmt_double(row.delta_kappa_n) + "," + fmt_double(row.m_n) + "," +
             fmt_double(row.v_predicted) + "," + fmt_double(row.v_measured) +
             "," + fmt_double(row.d_measured) + "," +
             (row.drive_small ? "1" : "0") + "," +
             (row.contraction ? "1" : "0") + "\n";
    }
    atomic_write(dir / "certificate_table.csv", csv);
  }
  if (!report.certified)
    throw CertificationRefused(report.failed.empty()
                                   ? "certification hypotheses failed"
                                   : report.failed);
}

struct SimulateFlags {
  ModelFlags model;
  EngineFlags engine;
  std::string diagnostic = "heating";
  int steps = 4;
  int order = -1;  // -1 = the trace's selected level
  int periods = 400;
  int stride = 0;  // 0 = auto
  double t_max = 100.0;
  int samples = 51;
  int states = 8;
  std::uint64_t seed = 1;
  bool no_spectral = false;
  std::string out;
};

int pick_order(const RenormTrace& trace, int order) {
  if (order < 0) return trace.optimal;
  if (order >= static_cast<int>(trace.levels.size()))
    throw Error("--order " + std::to_string(order) +
                " exceeds the executed depth " +
                std::to_string(trace.levels.size() - 1));
  return order;
}

SimulationTrace run_diagnostic(const SimulateFlags& f, const ModelSpec& spec) {
  DiagnosticOptions opts;
  opts.spectral = !f.no_spectral;
  opts.stride = f.stride > 0 ? f.stride : std::max(1, f.periods / 100);
  const Lattice lat = spec.lattice();

  if (f.diagnostic == "heating" || f.diagnostic == "tracking") {
    if (spec.is_static())
      throw Error("diagnostic \"" + f.diagnostic + "\" needs a driven model");
    IngestedModel ing = to_driven_problem(spec);
    RenormTrace trace =
        run(ing.problem, f.steps, RunMode::greedy, engine_options(f.engine));
    const int order = pick_order(trace, f.order);
    const Matrix u = period_propagator(to_protocol(spec));
    const double period = ing.problem.period();
    SimulationTrace result;
    if (f.diagnostic == "heating") {
      result = heating_diagnostic(u, to_dense(trace.levels[order].d),
                                  to_dense(ing.problem.d0), f.periods, period,
                                  spec.sites, opts);
    } else {
      result = observable_tracking(u, to_dense(trace.levels[order].d),
                                   site_z(lat, spec.sites / 2), f.periods,
                                   period, opts);
    }
    result.metadata["order"] = std::to_string(order);
    return result;
  }

  if (f.diagnostic == "conservation") {
    if (!spec.is_static())
      throw Error("diagnostic \"conservation\" needs a static model");
    StaticProblem prob = to_static_problem(spec);
    Potential g = prob.h0;
    g.add_scaled(prob.number.as_potential(), prob.nu);
    return static_conservation(to_dense(g),
                               to_dense(prob.number.as_potential()),
                               time_grid(f.t_max, f.samples), f.states, lat,
                               f.seed);
  }

  if (f.diagnostic == "lr") {
    Potential h = spec.is_static()
                      ? to_static_problem(spec).h0
                      : to_driven_problem(spec).problem.d0;
    return lr_probe(to_dense(h), site_z(lat, 0), site_z(lat, lat.sites() / 2),
                    time_grid(f.t_max, f.samples));
  }

  throw Error("--diagnostic must be heating, tracking, conservation, or lr; "
              "got \"" + f.diagnostic + "\"");
}

void run_simulate(const SimulateFlags& f) {
  ModelSpec spec = resolve_model(f.model);
  SimulationTrace trace = run_diagnostic(f, spec);
  trace.metadata["model"] = spec.name;
  trace.metadata["diagnostic"] = f.diagnostic;
  trace.metadata["nu"] = fmt_double(spec.nu);
  trace.metadata["kappa0"] = fmt_double(spec.kappa0);
  trace.metadata["sites"] = std::to_string(spec.sites);
  const std::string csv = to_csv(trace);
  const std::string meta = metadata_text(trace);
  if (f.out.empty()) {
    std::cout << csv;
    std::cerr << meta;
  } else {
    fs::create_directories(f.out);
    const fs::path dir(f.out);
    atomic_write(dir / (f.diagnostic + ".csv"), csv);
    atomic_write(dir / (f.diagnostic + "_meta.txt"), meta);
  }
}

void run_models() {
  for (const std::string& name : builtin_names())
    std::cout << name << "\n    " << builtin_summary(name) << "\n";
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Renormalization toolkit for driven and static lattice models:"
               " effective Hamiltonians, contraction certificates, and exact-"
               "diagonalization checks."};
  app.require_subcommand(1);

  TransformFlags tf;
  CLI::App* transform = app.add_subcommand(
      "transform", "run the renormalization and export D-hat, V-hat, norms");
  add_model_flags(transform, tf.model);
  add_engine_flags(transform, tf.engine);
  transform->add_option("--steps", tf.steps, "maximum renormalization depth");
  transform->add_option("--mode", tf.mode, "greedy or certified");
  transform->add_flag("--static", tf.static_mode,
                      "require the static (graded) pipeline");
  transform->add_option("--out", tf.out, "output directory");
  transform->callback([&tf]() { run_transform(tf); });

  CertifyFlags cf;
  CLI::App* certify = app.add_subcommand(
      "certify", "evaluate the contraction hypotheses and per-step bounds");
  add_model_flags(certify, cf.model);
  add_engine_flags(certify, cf.engine);
  certify->add_option("--steps", cf.steps, "measured levels to include");
  certify->add_option("--trials", cf.trials,
                      "random one-step lemma instances to check");
  certify->add_option("--seed", cf.seed, "lemma-check seed");
  certify->add_option("--constant-c", cf.constant_c,
                      "theorem constant C in the heating slope");
  certify->add_option("--out", cf.out, "output directory");
  certify->callback([&cf]() { run_certify(cf); });

  SimulateFlags sf;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "exact-diagonalization diagnostics on a model");
  add_model_flags(simulate, sf.model);
  add_engine_flags(simulate, sf.engine);
  simulate->add_option("--diagnostic", sf.diagnostic,
                       "heating | tracking | conservation | lr");
  simulate->add_option("--steps", sf.steps, "renormalization depth used");
  simulate->add_option("--order", sf.order,
                       "use D-hat from this level (default: selected level)");
  simulate->add_option("--periods", sf.periods,
                       "driven horizon in periods (heating, tracking)");
  simulate->add_option("--stride", sf.stride, "record every this many periods");
  simulate->add_option("--t-max", sf.t_max,
                       "time horizon (conservation, lr)");
  simulate->add_option("--samples", sf.samples,
                       "grid points (conservation, lr)");
  simulate->add_option("--states", sf.states,
                       "random product states (conservation)");
  simulate->add_option("--seed", sf.seed, "random-state seed (conservation)");
  simulate->add_flag("--no-spectral", sf.no_spectral,
                     "skip spectral-norm columns");
  simulate->add_option("--out", sf.out, "output directory");
  simulate->callback([&sf]() { run_simulate(sf); });

  CLI::App* models =
      app.add_subcommand("models", "list the built-in models");
  models->callback([]() { run_models(); });

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const CertificationRefused& e) {
    std::cerr << "certification refused: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.push_back("preth");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  argv.reserve(storage.size());
  for (std::string& arg : storage) argv.push_back(arg.data());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace preth
