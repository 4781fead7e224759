#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "preth/io.hpp"
#include "preth/pauli.hpp"
#include "test_support.hpp"

using namespace preth;
using preth::testing::max_abs_diff;

TEST_CASE("model JSON round-trips byte-for-byte on canonical form") {
  // Values with no short decimal form must survive serialize -> parse
  // exactly: the writer emits shortest-round-trip doubles.
  ModelSpec spec = builtin("driven_ising", {{"L", 4},
                                            {"J", 1.0 / 3.0},
                                            {"h", 0.1},
                                            {"g", M_PI / 7.0},
                                            {"nu", 17.25}});
  const std::string text = serialize_model(spec);
  ModelSpec back = parse_model(text);

  CHECK(back.name == spec.name);
  CHECK(back.sites == spec.sites);
  CHECK(back.local_dim == spec.local_dim);
  CHECK(back.periodic == spec.periodic);
  CHECK(back.kappa0 == spec.kappa0);
  CHECK(back.nu == spec.nu);
  CHECK(back.params == spec.params);
  REQUIRE(back.terms.size() == spec.terms.size());
  for (size_t i = 0; i < spec.terms.size(); ++i) {
    CHECK(back.terms[i].sites == spec.terms[i].sites);
    CHECK(max_abs_diff(back.terms[i].matrix, spec.terms[i].matrix) == 0.0);
  }
  CHECK(back.drive.type == DriveSpec::Type::square);
  CHECK(back.drive.max_harmonic == spec.drive.max_harmonic);
  REQUIRE(back.drive.amplitude.size() == spec.drive.amplitude.size());
  CHECK(max_abs_diff(back.drive.amplitude[0].matrix,
                     spec.drive.amplitude[0].matrix) == 0.0);

  // Serializing the parsed spec reproduces the text exactly.
  CHECK(serialize_model(back) == text);
}

TEST_CASE("static model declarations keep their number operator") {
  ModelSpec spec = builtin("xyz", {{"L", 4}, {"h", 33.5}});
  ModelSpec back = parse_model(serialize_model(spec));
  CHECK(back.is_static());
  CHECK(back.number.spectra == spec.number.spectra);
  CHECK(back.number.affine_shift == spec.number.affine_shift);
  CHECK(back.nu == 33.5);
  CHECK(serialize_model(back) == serialize_model(spec));

  // Fourier drives round-trip mode by mode.
  ModelSpec heis = builtin("driven_heisenberg", {{"L", 3}});
  ModelSpec heis_back = parse_model(serialize_model(heis));
  CHECK(heis_back.drive.type == DriveSpec::Type::fourier);
  REQUIRE(heis_back.drive.harmonics.size() == heis.drive.harmonics.size());
  CHECK(heis_back.drive.harmonics[0].first == heis.drive.harmonics[0].first);
  CHECK(serialize_model(heis_back) == serialize_model(heis));
}

TEST_CASE("pauli shorthand parses and canonicalizes to matrices") {
  const std::string text = R"({
    "name": "shorthand",
    "lattice": {"sites": 3},
    "nu": 10.0,
    "terms": [
      {"sites": [0, 1], "pauli": "ZZ", "coefficient": 0.25},
      {"sites": [2], "pauli": "X", "coefficient": [0.0, -1.0]},
      {"sites": [1], "pauli": "Y"}
    ]
  })";
  ModelSpec spec = parse_model(text);
  REQUIRE(spec.terms.size() == 3);
  CHECK(max_abs_diff(spec.terms[0].matrix,
                     0.25 * pauli::string_matrix("ZZ")) == 0.0);
  CHECK(max_abs_diff(spec.terms[1].matrix,
                     Complex(0.0, -1.0) * pauli::string_matrix("X")) == 0.0);
  CHECK(max_abs_diff(spec.terms[2].matrix, pauli::string_matrix("Y")) == 0.0);

  // Canonical output stores matrices only.
  const std::string canonical = serialize_model(spec);
  CHECK(canonical.find("\"pauli\"") == std::string::npos);
  CHECK(canonical.find("\"matrix\"") != std::string::npos);
  CHECK(serialize_model(parse_model(canonical)) == canonical);
}

TEST_CASE("malformed model files fail with the field named") {
  CHECK_THROWS_AS(parse_model("not json at all {"), ParseError);
  CHECK_THROWS_AS(parse_model("[1, 2]"), ParseError);

  auto expect_message = [](const std::string& text, const std::string& part) {
    try {
      parse_model(text);
      FAIL_CHECK("expected ParseError for: " << part);
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find(part) != std::string::npos);
    }
  };
  expect_message(R"({"lattice": {"sites": 2}})", "name");
  expect_message(R"({"name": "x"})", "lattice");
  expect_message(R"({"name": "x", "lattice": {"sites": 0}})", "sites");
  expect_message(
      R"({"name": "x", "lattice": {"sites": 2},
          "terms": [{"sites": [0], "pauli": "X", "matrix": []}]})",
      "exactly one");
  expect_message(
      R"({"name": "x", "lattice": {"sites": 2, "local_dim": 3},
          "terms": [{"sites": [0], "pauli": "X"}]})",
      "local_dim");
  expect_message(
      R"({"name": "x", "lattice": {"sites": 2},
          "terms": [{"sites": [0, 1], "pauli": "X"}]})",
      "length");
  expect_message(
      R"({"name": "x", "lattice": {"sites": 2},
          "terms": [{"sites": [0], "matrix": [[[0,0],[0,0]],[[0,0],[0,0]],
                                              [[0,0],[0,0]]]}]})",
      "square");
  expect_message(
      R"({"name": "x", "lattice": {"sites": 2},
          "terms": [{"sites": [0, 1], "matrix": [[[1,0],[0,0]],[[0,0],[1,0]]]}]})",
      "dimension");
  expect_message(
      R"({"name": "x", "lattice": {"sites": 2},
          "drive": {"type": "sawtooth"}})",
      "sawtooth");
  expect_message(
      R"({"name": "x", "lattice": {"sites": 2},
          "number": {"spectra": [[0, 0.5]]}})",
      "integers");
}

TEST_CASE("parsed files ingest identically to the in-memory declaration") {
  ModelSpec spec = builtin("driven_ising", {{"L", 3}, {"nu", 20}});
  ModelSpec back = parse_model(serialize_model(spec));
  IngestedModel a = to_driven_problem(spec);
  IngestedModel b = to_driven_problem(back);
  CHECK(max_term_diff(average(a.problem.v0), average(b.problem.v0)) == 0.0);
  CHECK(max_term_diff(a.problem.d0, b.problem.d0) == 0.0);
  CHECK(a.ingestion.total() == b.ingestion.total());
}

TEST_CASE("simulation traces serialize to deterministic CSV") {
  SimulationTrace trace;
  trace.times = {0.0, 0.5, 1.0};
  trace.series.emplace_back("alpha", std::vector<double>{1.0, 0.25, 0.0625});
  trace.series.emplace_back("beta", std::vector<double>{-1.0, 0.0, 3.0});
  trace.metadata["seed"] = "42";
  trace.metadata["normalization"] = "per_site";

  const std::string csv = to_csv(trace);
  CHECK(csv ==
        "time,alpha,beta\n"
        "0,1,-1\n"
        "0.5,0.25,0\n"
        "1,0.0625,3\n");
  CHECK(to_csv(trace) == csv);
  CHECK(metadata_text(trace) ==
        "normalization = per_site\n"
        "seed = 42\n");

  // %.17g keeps full precision on awkward values.
  SimulationTrace fine;
  fine.times = {1.0 / 3.0};
  fine.series.emplace_back("x", std::vector<double>{M_PI});
  const std::string fine_csv = to_csv(fine);
  CHECK(fine_csv.find("0.33333333333333331") != std::string::npos);
  CHECK(fine_csv.find("3.1415926535897931") != std::string::npos);

  SimulationTrace bad;
  bad.times = {0.0, 1.0};
  bad.series.emplace_back("short", std::vector<double>{1.0});
  CHECK_THROWS_AS(to_csv(bad), Error);
}

TEST_CASE("trace and certificate artifacts serialize") {
  ModelSpec spec = builtin("driven_ising", {{"L", 3}, {"nu", 25}});
  IngestedModel ing = to_driven_problem(spec);
  RenormTrace trace = run(ing.problem, 2, RunMode::greedy);

  const std::string json_text = serialize_trace(trace);
  nlohmann::json j = nlohmann::json::parse(json_text);
  CHECK(j["mode"] == "greedy");
  CHECK(j["levels"].size() == trace.levels.size());
  CHECK(j["optimal"] == trace.optimal);
  CHECK(j["d_hat"]["terms"].size() == trace.d_hat().terms().size());
  CHECK(j["ledger"]["total"].get<double>() == trace.ledger.total());

  const std::string report = trace_report(trace);
  CHECK(report.find("selected level: " + std::to_string(trace.optimal)) !=
        std::string::npos);
  CHECK(report.find("ledger:") != std::string::npos);

  CertificateReport cert =
      build_report(spec.kappa0, spec.nu, trace.measured());
  const std::string cert_text = certificate_text(cert);
  CHECK(cert_text.find("contraction certificate") == 0);
  CHECK(cert_text.find("n* = ") != std::string::npos);
  CHECK(cert_text.find("heating bound") != std::string::npos);

  const std::string pot_text = serialize_potential(trace.d_hat());
  nlohmann::json pot = nlohmann::json::parse(pot_text);
  CHECK(pot["terms"].size() == trace.d_hat().terms().size());
  const std::string harm_text = serialize_harmonic(trace.v_hat());
  nlohmann::json harm = nlohmann::json::parse(harm_text);
  CHECK(harm["modes"].size() == trace.v_hat().harmonics().size());
}

TEST_CASE("atomic writes land complete files and model files reload") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "preth_io_test";
  fs::create_directories(dir);

  const fs::path target = dir / "out.txt";
  atomic_write(target, "first\n");
  atomic_write(target, "second\n");  // overwrite is atomic too
  std::ifstream in(target, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  CHECK(content == "second\n");
  CHECK_FALSE(fs::exists(dir / "out.txt.tmp"));

  CHECK_THROWS_AS(atomic_write(dir / "missing_sub" / "f.txt", "x"), Error);

  ModelSpec spec = builtin("hubbard", {{"L", 2}, {"U", 14}});
  const fs::path model_path = dir / "hubbard.json";
  save_model(spec, model_path);
  ModelSpec back = load_model(model_path);
  CHECK(serialize_model(back) == serialize_model(spec));
  CHECK_THROWS_AS(load_model(dir / "nope.json"), Error);

  fs::remove_all(dir);
}
