#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "preth/cli.hpp"
#include "preth/io.hpp"

using namespace preth;
namespace fs = std::filesystem;

namespace {

/// Redirect std::cout/std::cerr while a CLI call runs in-process.
struct CaptureStreams {
  std::ostringstream out, err;
  std::streambuf* old_out;
  std::streambuf* old_err;
  CaptureStreams()
      : old_out(std::cout.rdbuf(out.rdbuf())),
        old_err(std::cerr.rdbuf(err.rdbuf())) {}
  ~CaptureStreams() {
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
  }
};

int run_cli(const std::vector<std::string>& args, std::string* out = nullptr,
            std::string* err = nullptr) {
  CaptureStreams capture;
  const int status = cli_main(args);
  if (out) *out = capture.out.str();
  if (err) *err = capture.err.str();
  return status;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

fs::path fresh_dir(const std::string& leaf) {
  const fs::path dir = fs::temp_directory_path() / "preth_cli_test" / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("models lists every builtin") {
  std::string out;
  CHECK(run_cli({"models"}, &out) == 0);
  CHECK(out.find("driven_ising") != std::string::npos);
  CHECK(out.find("driven_heisenberg") != std::string::npos);
  CHECK(out.find("hubbard") != std::string::npos);
  CHECK(out.find("xyz") != std::string::npos);
}

TEST_CASE("certify exits 2 when hypotheses are refused, 0 when certified") {
  std::string out, err;
  const int refused = run_cli({"certify", "--builtin", "driven_ising", "--L",
                               "3", "--nu", "20", "--steps", "1"},
                              &out, &err);
  CHECK(refused == 2);
  CHECK(out.find("certified: no") != std::string::npos);
  CHECK(out.find("nu_0") != std::string::npos);
  CHECK(out.find("n* = ") != std::string::npos);
  CHECK(err.find("certification refused") != std::string::npos);

  // Weak couplings at a huge frequency satisfy the closed-form hypotheses.
  const std::vector<std::string> certified_args = {
      "certify", "--builtin", "driven_ising", "--L", "3",
      "--param", "J=0.01",    "--param",  "h=0.008", "--param", "g=0.005",
      "--nu",    "400000",    "--steps",  "2",       "--trials", "5",
      "--seed",  "11"};
  const int certified = run_cli(certified_args, &out, &err);
  CHECK(certified == 0);
  CHECK(out.find("certified: yes") != std::string::npos);
  CHECK(out.find("heating bound: slope") != std::string::npos);
  CHECK(out.find("lemma check: 5 trials, 0 violations") != std::string::npos);
}

TEST_CASE("certify --out writes the report and a plot-ready table") {
  const fs::path dir = fresh_dir("certify");
  std::string out;
  const int status = run_cli({"certify", "--builtin", "driven_ising", "--L",
                              "3", "--nu", "30", "--steps", "2", "--out",
                              dir.string()},
                             &out);
  CHECK(status == 2);  // refused, but artifacts still land
  CHECK(slurp(dir / "certificate.txt") == out);
  const std::string table = slurp(dir / "certificate_table.csv");
  CHECK(table.rfind("n,kappa_n,delta_kappa_n,m_n,", 0) == 0);
  CHECK(std::count(table.begin(), table.end(), '\n') >= 3);
  fs::remove_all(dir);
}

TEST_CASE("transform exports the effective pair and reloadable artifacts") {
  const fs::path dir = fresh_dir("transform");
  std::string out;
  const int status =
      run_cli({"transform", "--builtin", "hubbard", "--static", "--mode",
               "greedy", "--steps", "4", "--out", dir.string()},
              &out);
  CHECK(status == 0);
  CHECK(out.find("selected level") != std::string::npos);
  CHECK(slurp(dir / "report.txt") == out);

  nlohmann::json trace = nlohmann::json::parse(slurp(dir / "trace.json"));
  CHECK(trace["mode"] == "greedy");
  CHECK(trace["levels"].size() >= 2);
  nlohmann::json d_hat = nlohmann::json::parse(slurp(dir / "d_hat.json"));
  CHECK(d_hat["terms"].size() > 0);

  // The echoed model file reloads to the same canonical declaration.
  ModelSpec spec = load_model(dir / "model.json");
  CHECK(spec.name == "hubbard");
  CHECK(serialize_model(spec) == slurp(dir / "model.json"));
  fs::remove_all(dir);
}

TEST_CASE("transform rejects --static on models without a number block") {
  std::string out, err;
  const int status = run_cli({"transform", "--builtin", "driven_ising", "--L",
                              "3", "--static", "--steps", "1"},
                             &out, &err);
  CHECK(status == 1);
  CHECK(err.find("number block") != std::string::npos);
}

TEST_CASE("bad invocations exit 1 with a message") {
  std::string out, err;
  CHECK(run_cli({"transform", "--steps", "1"}, &out, &err) == 1);
  CHECK(err.find("--model FILE or --builtin NAME") != std::string::npos);
  CHECK(run_cli({"transform", "--builtin", "nope"}, &out, &err) == 1);
  CHECK(run_cli({"transform", "--builtin", "driven_ising", "--param",
                 "J=fast"},
                &out, &err) == 1);
  CHECK(run_cli({"transform", "--builtin", "driven_ising", "--param",
                 "warp=9"},
                &out, &err) == 1);
  CHECK(run_cli({"simulate", "--builtin", "driven_ising", "--L", "3",
                 "--diagnostic", "entropy"},
                &out, &err) == 1);
  CHECK(run_cli({"simulate", "--builtin", "xyz", "--L", "3", "--diagnostic",
                 "heating"},
                &out, &err) == 1);
  CHECK(run_cli({"simulate", "--builtin", "driven_ising", "--L", "3",
                 "--diagnostic", "conservation"},
                &out, &err) == 1);
  CHECK(run_cli({}, &out, &err) == 1);           // no subcommand
  CHECK(run_cli({"--help"}, &out, &err) == 0);   // help is a success
}

TEST_CASE("simulate is byte-deterministic across invocations") {
  const fs::path dir_a = fresh_dir("sim_a");
  const fs::path dir_b = fresh_dir("sim_b");
  const std::vector<std::string> base = {
      "simulate", "--builtin", "driven_ising", "--L", "3", "--nu", "14",
      "--diagnostic", "heating", "--periods", "24", "--steps", "1",
      "--stride", "4"};
  auto with_out = [&base](const fs::path& dir) {
    std::vector<std::string> args = base;
    args.push_back("--out");
    args.push_back(dir.string());
    return args;
  };
  CHECK(run_cli(with_out(dir_a)) == 0);
  CHECK(run_cli(with_out(dir_b)) == 0);

  const std::string csv_a = slurp(dir_a / "heating.csv");
  CHECK(csv_a == slurp(dir_b / "heating.csv"));
  CHECK(slurp(dir_a / "heating_meta.txt") == slurp(dir_b / "heating_meta.txt"));
  CHECK(csv_a.rfind("time,dhat_two,bare_two", 0) == 0);
  // 24 periods at stride 4 plus t = 0.
  CHECK(std::count(csv_a.begin(), csv_a.end(), '\n') == 8);

  // Seeded diagnostics change with the seed but reproduce with it.
  const fs::path dir_c = fresh_dir("sim_c");
  const fs::path dir_d = fresh_dir("sim_d");
  const fs::path dir_e = fresh_dir("sim_e");
  std::vector<std::string> cons = {
      "simulate", "--builtin", "xyz", "--L", "3", "--diagnostic",
      "conservation", "--t-max", "20", "--samples", "5", "--states", "3"};
  auto cons_with = [&cons](const fs::path& dir, const std::string& seed) {
    std::vector<std::string> args = cons;
    args.insert(args.end(), {"--seed", seed, "--out", dir.string()});
    return args;
  };
  CHECK(run_cli(cons_with(dir_c, "7")) == 0);
  CHECK(run_cli(cons_with(dir_d, "7")) == 0);
  CHECK(run_cli(cons_with(dir_e, "8")) == 0);
  CHECK(slurp(dir_c / "conservation.csv") == slurp(dir_d / "conservation.csv"));
  CHECK(slurp(dir_c / "conservation.csv") != slurp(dir_e / "conservation.csv"));
  for (const fs::path& d : {dir_a, dir_b, dir_c, dir_d, dir_e})
    fs::remove_all(d);
}

TEST_CASE("simulate honors --order and file-based models") {
  // Export a model to a file, then simulate from that file.
  const fs::path dir = fresh_dir("file_model");
  ModelSpec spec = builtin("driven_ising", {{"L", 3}, {"nu", 14}});
  save_model(spec, dir / "model.json");

  std::string out, err;
  const int status = run_cli(
      {"simulate", "--model", (dir / "model.json").string(), "--diagnostic",
       "tracking", "--periods", "10", "--steps", "2", "--order", "0",
       "--no-spectral"},
      &out, &err);
  CHECK(status == 0);
  CHECK(out.rfind("time,error_two", 0) == 0);
  CHECK(err.find("order = 0") != std::string::npos);

  const int bad_order = run_cli(
      {"simulate", "--model", (dir / "model.json").string(), "--diagnostic",
       "tracking", "--periods", "10", "--steps", "1", "--order", "9"},
      &out, &err);
  CHECK(bad_order == 1);
  CHECK(err.find("exceeds the executed depth") != std::string::npos);
  fs::remove_all(dir);
}
