// SPDX-License-Identifier: Apache-2.0
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "fflock/bench.hpp"
#include "fflock/error.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using fflock::ErrorKind;
using fflock::read_text_file;

namespace {

const std::string kCli = FFLOCK_CLI;
const std::string kS27 = std::string(FFLOCK_TEST_DATA) + "/s27.bench";

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("fflock_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Exit status of the CLI; stdout goes to `out` when given.
int run(const std::string& args, const fs::path& out = {}) {
  std::string cmd = kCli + " " + args;
  cmd += out.empty() ? " > /dev/null" : " > '" + out.string() + "'";
  cmd += " 2> /dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

nlohmann::json json_file(const fs::path& p) { return nlohmann::json::parse(read_text_file(p.string())); }

}  // namespace

TEST_CASE("encrypt reruns are byte-identical and carry provenance") {
  const fs::path a = scratch("enc_a"), b = scratch("enc_b");
  const std::string args = "encrypt " + kS27 + " --scheme eff -k 1 --seed 9 --scan chain --controller";
  REQUIRE(run(args + " -o " + (a / "out").string()) == 0);
  REQUIRE(run(args + " -o " + (b / "out").string()) == 0);
  for (const char* f : {"out.bench", "out.key", "out.json"}) {
    CAPTURE(f);
    CHECK(read_text_file((a / f).string()) == read_text_file((b / f).string()));
  }
  auto j = json_file(a / "out.json");
  CHECK(j["config_hash"].get<std::string>().size() == 16);
  CHECK(j["seeds"].contains("placement"));
  CHECK(j["diagnostics"].empty());
  const std::string bench = read_text_file((a / "out.bench").string());
  CHECK(bench.find("# config-hash " + j["config_hash"].get<std::string>()) != std::string::npos);
  // The emitted netlist parses back with its key.
  auto n = fflock::read_bench_file((a / "out.bench").string());
  CHECK(n.key_inputs().size() == 1);
  CHECK(n.scan().has_value());
}

TEST_CASE("different seeds change the config hash") {
  const fs::path d = scratch("hash");
  REQUIRE(run("analyze " + kS27 + " --seed 1", d / "a.json") == 0);
  REQUIRE(run("encrypt " + kS27 + " --scheme xor -k 2 --seed 1 -o " + (d / "x1").string()) == 0);
  REQUIRE(run("encrypt " + kS27 + " --scheme xor -k 2 --seed 2 -o " + (d / "x2").string()) == 0);
  CHECK(json_file(d / "x1.json")["config_hash"] != json_file(d / "x2.json")["config_hash"]);
}

TEST_CASE("exit codes per error class") {
  const fs::path d = scratch("codes");
  CHECK(run("encrypt " + kS27 + " --scheme eff -k 50 -o " + (d / "x").string()) ==
        fflock::exit_code(ErrorKind::KeyTooLarge));
  CHECK(run("stats " + (d / "missing.bench").string()) == fflock::exit_code(ErrorKind::Io));
  fflock::write_text_file((d / "bad.bench").string(), "INPUT(a)\ny = FROB(a)\n");
  CHECK(run("stats " + (d / "bad.bench").string()) == fflock::exit_code(ErrorKind::Syntax));
  CHECK(run("encrypt " + kS27 + " --scheme eff -k 1 --controller -o " + (d / "y").string()) ==
        fflock::exit_code(ErrorKind::InvalidArgument));
  CHECK(run("report " + kS27 + " --scheme oc -k 2") == fflock::exit_code(ErrorKind::MissingCell));
  CHECK(run("frobnicate") != 0);
}

TEST_CASE("stats rows") {
  const fs::path d = scratch("stats");
  REQUIRE(run("stats " + kS27, d / "s.json") == 0);
  auto s = json_file(d / "s.json")["stats"];
  CHECK(s["inputs"] == 4);
  CHECK(s["outputs"] == 1);
  CHECK(s["dffs"] == 3);
  CHECK(s["gates"] == 10);
  CHECK(s["encryption_time_ms"].get<double>() > 0);

  fflock::write_text_file((d / "empty.bench").string(), "# nothing\n");
  REQUIRE(run("stats " + (d / "empty.bench").string(), d / "e.json") == 0);
  auto e = json_file(d / "e.json")["stats"];
  CHECK(e["inputs"] == 0);
  CHECK(e["dffs"] == 0);
  CHECK(e["candidate_dffs"] == 0);
  CHECK(e["coverage_pct"] == 0.0);
  CHECK(e["encryption_time_ms"].get<double>() > 0);
}

TEST_CASE("corpus lookup through the environment") {
  const fs::path d = scratch("corpus");
  fs::copy_file(kS27, d / "s27.bench");
  const std::string env = "FFLOCK_CORPUS='" + d.string() + "' ";
  const int status = std::system((env + kCli + " stats s27 --no-timing > '" + (d / "o.json").string() + "'").c_str());
  REQUIRE(WEXITSTATUS(status) == 0);
  CHECK(json_file(d / "o.json")["stats"]["dffs"] == 3);
}

TEST_CASE("attack pipeline on XOR with scan access") {
  const fs::path d = scratch("attack");
  REQUIRE(run("encrypt " + kS27 + " --scheme xor -k 3 --seed 4 --scan chain -o " + (d / "x").string()) == 0);
  const std::string bench = (d / "x.bench").string(), key = (d / "x.key").string();
  REQUIRE(run("attack " + bench + " --key-file " + key + " --method scan --report " + (d / "r.json").string()) == 0);
  auto r = json_file(d / "r.json")["report"];
  CHECK(r["status"] == "success");
  CHECK(r["validated"] == true);
  REQUIRE(run("attack " + bench + " --key-file " + key + " --method suite", d / "s.json") == 0);
  CHECK(json_file(d / "s.json")["resilience"]["scan_based"] == "broken");
  // A key file of the wrong width is rejected.
  fflock::write_text_file((d / "short.key").string(), "key = 1\n");
  CHECK(run("attack " + bench + " --key-file " + (d / "short.key").string()) ==
        fflock::exit_code(ErrorKind::WidthMismatch));
}

TEST_CASE("simulate writes a trace with a provenance header") {
  const fs::path d = scratch("sim");
  REQUIRE(run("simulate " + kS27 + " --patterns 3 --cycles 2 --csv " + (d / "t.csv").string()) == 0);
  const std::string csv = read_text_file((d / "t.csv").string());
  CHECK(csv.rfind("# fflock simulate\n", 0) == 0);
  CHECK(csv.find("pattern_index,cycle,po_bits\n") != std::string::npos);
}

TEST_CASE("generate is deterministic") {
  const fs::path d = scratch("gen");
  REQUIRE(run("generate --preset s344 --seed 3", d / "a.bench") == 0);
  REQUIRE(run("generate --preset s344 --seed 3", d / "b.bench") == 0);
  CHECK(read_text_file((d / "a.bench").string()) == read_text_file((d / "b.bench").string()));
  auto n = fflock::read_bench_file((d / "a.bench").string());
  CHECK(n.inputs().size() == 9);
  CHECK(n.dffs().size() == 15);
}

TEST_CASE("report writes the scheme comparison csv") {
  const fs::path d = scratch("compare");
  REQUIRE(run("report " + kS27 + " -k 2 --patterns 20 --compare-csv " + (d / "c.csv").string(), d / "r.json") == 0);
  const std::string csv = read_text_file((d / "c.csv").string());
  CHECK(csv.find("scheme,key_bits,observed_outputs,mean_hd_pct,mean_hd_all_pct\n") != std::string::npos);
  CHECK(json_file(d / "r.json")["corruption_summary"]["scheme_comparison"].size() == 4);
}
