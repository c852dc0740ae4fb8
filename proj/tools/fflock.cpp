// SPDX-License-Identifier: Apache-2.0
// Command-line front end: stats, analyze, encrypt, simulate, attack, report
// and generate. Every emitted artifact carries the config hash and the
// resolved seeds, so identical invocations produce identical bytes.
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "fflock/attacks.hpp"
#include "fflock/bench.hpp"
#include "fflock/cone.hpp"
#include "fflock/encrypt.hpp"
#include "fflock/error.hpp"
#include "fflock/generate.hpp"
#include "fflock/metrics.hpp"
#include "fflock/sim.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using namespace fflock;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::uint64_t fnv1a(std::string_view text, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

// Resolved configuration of one invocation. Output paths are left out so
// the same run written to two directories hashes the same.
class RunConfig {
 public:
  explicit RunConfig(std::string command) : command_(std::move(command)) {}

  void set(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }
  void set(const std::string& key, std::uint64_t value) { set(key, std::to_string(value)); }
  void seed(const std::string& key, std::uint64_t value) {
    seeds_.emplace_back(key, value);
    set("seed." + key, value);
  }

  std::string hash() const {
    std::uint64_t h = fnv1a(command_);
    for (const auto& [k, v] : entries_) h = fnv1a(k + "=" + v + ";", h);
    return hex64(h);
  }

  Json provenance() const {
    Json j;
    j["tool"] = "fflock";
    j["command"] = command_;
    j["config_hash"] = hash();
    Json s = Json::object();
    for (const auto& [k, v] : seeds_) s[k] = v;
    j["seeds"] = s;
    Json c = Json::object();
    for (const auto& [k, v] : entries_) c[k] = v;
    j["config"] = c;
    return j;
  }

  // Comment lines for .bench, key and CSV files.
  std::vector<std::string> header() const {
    std::vector<std::string> h{"fflock " + command_, "config-hash " + hash()};
    for (const auto& [k, v] : seeds_) h.push_back("seed " + k + " " + std::to_string(v));
    return h;
  }

 private:
  std::string command_;
  std::vector<std::pair<std::string, std::string>> entries_;
  std::vector<std::pair<std::string, std::uint64_t>> seeds_;
};

std::string comment_block(const RunConfig& cfg) {
  std::string out;
  for (const auto& h : cfg.header()) out += "# " + h + "\n";
  return out;
}

// A bare name is looked up in $FFLOCK_CORPUS, with or without ".bench".
std::string resolve_input(const std::string& path) {
  if (fs::exists(path)) return path;
  if (const char* dir = std::getenv("FFLOCK_CORPUS")) {
    for (const std::string& cand : {path, path + ".bench"}) {
      fs::path p = fs::path(dir) / cand;
      if (fs::exists(p)) return p.string();
    }
  }
  throw Error(ErrorKind::Io, "input '" + path + "' not found (set FFLOCK_CORPUS for corpus lookups)");
}

struct Input {
  Netlist netlist;
  std::uint64_t text_hash = 0;
};

Input load(const std::string& path, RunConfig& cfg) {
  const std::string resolved = resolve_input(path);
  Input in;
  const std::string text = read_text_file(resolved);
  in.text_hash = fnv1a(text);
  in.netlist = read_bench_file(resolved);
  cfg.set("input.name", in.netlist.name());
  cfg.set("input.fnv", hex64(in.text_hash));
  return in;
}

void emit(const Json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

Json names_json(const Netlist& n, const std::vector<NodeId>& ids) { return names_of(n, ids); }

Bits load_key(const std::string& path, const Netlist& n) {
  if (path.empty()) {
    if (!n.key_inputs().empty()) throw Error(ErrorKind::InvalidArgument, "netlist has key inputs; pass --key-file");
    return {};
  }
  Bits key = parse_key_file(read_text_file(path)).key;
  if (key.size() != n.key_inputs().size()) {
    throw Error(ErrorKind::WidthMismatch, "key file has " + std::to_string(key.size()) + " bits, netlist has " +
                                              std::to_string(n.key_inputs().size()) + " key inputs");
  }
  return key;
}

// ---------------------------------------------------------------------------
// Encryption pipeline shared by encrypt and report.

struct EncryptArgs {
  std::string scheme = "eff";
  std::size_t key_bits = 8;
  std::string scan = "none";
  std::string scan_order = "declaration";
  std::string tap = "keymux";
  std::vector<std::size_t> qbar_links;
  bool controller = false;
  bool fixed_polarity = false;
  bool avoid_sensitizable = false;
  std::string affects = "transitive";
  std::size_t floor = 1;
};

void add_encrypt_options(CLI::App* sub, EncryptArgs& a) {
  sub->add_option("--scheme", a.scheme, "eff, xor, mux or oc")
      ->check(CLI::IsMember({"eff", "xor", "mux", "oc"}))
      ->capture_default_str();
  sub->add_option("--key-bits,-k", a.key_bits, "number of key bits")->capture_default_str();
  sub->add_option("--scan", a.scan, "none or chain")->check(CLI::IsMember({"none", "chain"}))->capture_default_str();
  sub->add_option("--scan-order", a.scan_order, "declaration, encrypted-first, unencrypted-first or random")
      ->capture_default_str();
  sub->add_option("--tap", a.tap, "keymux or rawq")->check(CLI::IsMember({"keymux", "rawq"}))->capture_default_str();
  sub->add_option("--qbar-links", a.qbar_links, "chain links driven from Qbar")->delimiter(',');
  sub->add_flag("--controller", a.controller, "add the reset-gated scan controller");
  sub->add_flag("--fixed-polarity", a.fixed_polarity, "EFF: never swap key mux inputs");
  sub->add_flag("--avoid-sensitizable", a.avoid_sensitizable,
                "EFF: skip flip-flops whose D cone reads only primary inputs");
  sub->add_option("--affects", a.affects, "transitive or combinational")
      ->check(CLI::IsMember({"transitive", "combinational"}))
      ->capture_default_str();
  sub->add_option("--floor", a.floor, "minimum overlap size during selection")->capture_default_str();
}

SelectionOptions selection_options(const EncryptArgs& a) {
  return {a.affects == "combinational" ? Affects::Combinational : Affects::Transitive, a.floor};
}

struct Encrypted {
  EncryptionResult result;
  std::optional<SelectionResult> selection;
  std::vector<NodeId> affected;  // EFF: O' in the encrypted netlist
};

Encrypted run_encrypt(const Netlist& base, const EncryptArgs& a, std::uint64_t seed, RunConfig& cfg) {
  cfg.set("scheme", a.scheme);
  cfg.set("key_bits", a.key_bits);
  cfg.set("scan", a.scan);
  cfg.set("controller", a.controller ? "1" : "0");
  const auto scheme = scheme_from_string(a.scheme);
  if (!scheme) throw Error(ErrorKind::InvalidArgument, "unknown scheme '" + a.scheme + "'");
  const std::uint64_t placement_seed = derive_seed(seed, "placement");
  const std::uint64_t polarity_seed = derive_seed(seed, "polarity");
  cfg.seed("placement", placement_seed);
  cfg.seed("polarity", polarity_seed);

  Encrypted out;
  switch (*scheme) {
    case Scheme::Eff: {
      cfg.set("affects", a.affects);
      cfg.set("floor", a.floor);
      cfg.set("fixed_polarity", a.fixed_polarity ? "1" : "0");
      cfg.set("avoid_sensitizable", a.avoid_sensitizable ? "1" : "0");
      out.selection = select_flip_flops(base, selection_options(a));
      const auto exclude = a.avoid_sensitizable ? pi_controllable_ffs(base) : std::vector<NodeId>{};
      const auto ffs = pick_key_ffs(base, *out.selection, a.key_bits, placement_seed, exclude);
      EffOptions eo;
      eo.randomize_polarity = !a.fixed_polarity;
      out.result = encrypt_flip_flop(base, ffs, polarity_seed, eo);
      break;
    }
    case Scheme::Xor: out.result = encrypt_xor_random(base, a.key_bits, placement_seed); break;
    case Scheme::Mux: out.result = encrypt_mux_random(base, a.key_bits, placement_seed); break;
    case Scheme::Oc: out.result = encrypt_oc(base, a.key_bits, placement_seed); break;
  }

  if (a.controller && a.scan != "chain") throw Error(ErrorKind::InvalidArgument, "--controller needs --scan chain");
  if (a.scan == "chain") {
    const auto policy = scan_order_from_string(a.scan_order);
    if (!policy) throw Error(ErrorKind::InvalidArgument, "unknown scan order '" + a.scan_order + "'");
    cfg.set("scan_order", a.scan_order);
    cfg.set("tap", a.tap);
    std::string links;
    for (auto l : a.qbar_links) links += std::to_string(l) + ",";
    cfg.set("qbar_links", links);
    const std::uint64_t order_seed = derive_seed(seed, "scan-order");
    cfg.seed("scan_order", order_seed);
    ScanOptions so;
    so.order = scan_order(out.result.netlist, *policy, order_seed);
    so.qbar_links = a.qbar_links;
    so.tap = a.tap == "rawq" ? ScanTap::RawQ : ScanTap::KeyMux;
    out.result.netlist = insert_scan(out.result.netlist, so);
    if (a.controller) out.result.netlist = insert_scan_controller(out.result.netlist);
  }
  if (out.selection) out.affected = map_outputs(base, out.result.netlist, out.selection->affected_outputs);
  return out;
}

KeyFile key_file_of(const EncryptionResult& r) {
  KeyFile kf;
  kf.key = r.correct_key;
  kf.sites.resize(r.correct_key.size());
  for (const auto& p : r.placements) kf.sites.at(p.key_index) = p.site;
  return kf;
}

Json selection_json(const Netlist& n, const SelectionResult& s) {
  Json j;
  j["affected_outputs"] = names_json(n, s.affected_outputs);
  j["l_overlap"] = names_json(n, s.l_overlap);
  j["l_weak"] = names_json(n, s.l_weak);
  j["l_strong"] = names_json(n, s.l_strong);
  j["coverage_pct"] = s.coverage_pct;
  return j;
}

Json complexity_json(const Netlist& n, const Complexity& c) {
  Json j;
  j["brute_inputs"] = c.brute_inputs;
  j["brute_keys"] = c.brute_keys;
  j["brute_exponent"] = c.brute_exponent;
  j["worst_ff"] = c.worst_ff ? Json(n.name_of(*c.worst_ff)) : Json(nullptr);
  j["cone_inputs"] = c.cone_inputs;
  j["cone_keys"] = c.cone_keys;
  j["scan_exponent"] = c.scan_exponent ? Json(*c.scan_exponent) : Json(nullptr);
  return j;
}

// Table II-style row. Candidate counts are zero when selection finds none.
Json stats_json(const Netlist& n, const SelectionOptions& so, bool timing) {
  Json j;
  j["circuit"] = n.name();
  j["inputs"] = n.functional_inputs().size();
  j["outputs"] = n.functional_outputs().size();
  j["gates"] = n.gate_count();
  j["nodes"] = n.size();
  j["dffs"] = n.design_dffs().size();
  const auto t0 = Clock::now();
  std::optional<SelectionResult> sel;
  try {
    sel = select_flip_flops(n, so);
    // Encryption time covers selection plus EFF insertion on every candidate.
    (void)encrypt_flip_flop(n, sel->l_strong, 1);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoCandidates) throw;
  }
  const double elapsed = ms_since(t0);
  j["candidate_dffs"] = sel ? sel->l_strong.size() : 0;
  j["affected_outputs"] = sel ? sel->affected_outputs.size() : 0;
  j["coverage_pct"] = sel ? sel->coverage_pct : 0.0;
  if (timing) j["encryption_time_ms"] = elapsed;
  return j;
}

Json bits_status_json(const AttackReport& r) {
  Json j = Json::array();
  for (auto s : r.bit_status) j.push_back(to_string(s));
  return j;
}

Json attack_json(const AttackReport& r, const Bits& true_key, bool timing) {
  Json j;
  j["method"] = r.method;
  j["scheme"] = r.scheme;
  j["status"] = to_string(r.status);
  j["key"] = to_string(r.key);
  j["bit_status"] = bits_status_json(r);
  j["recovered"] = r.count(BitStatus::Recovered);
  j["aliased"] = r.count(BitStatus::Alias);
  j["unknown"] = r.count(BitStatus::Unknown);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < r.key.size() && i < true_key.size(); ++i) {
    if (r.bit_status[i] == BitStatus::Recovered && r.key[i] == true_key[i]) ++correct;
  }
  j["recovered_bits_correct"] = correct;
  j["queries"] = r.queries;
  j["scan_shifts"] = r.scan_shifts;
  j["brute_exponent"] = r.brute_exponent;
  j["scan_exponent"] = r.scan_exponent ? Json(*r.scan_exponent) : Json(nullptr);
  j["validated"] = r.validated;
  j["note"] = r.note;
  if (timing) j["wall_ms"] = r.wall_ms;
  return j;
}

Json parity_json(const ParityResult& p) {
  Json j;
  j["status"] = to_string(p.status);
  j["loaded"] = to_string(p.loaded);
  j["unloaded"] = to_string(p.unloaded);
  j["total_odd"] = p.total_odd;
  j["structural_inversions"] = p.structural_inversions;
  j["key_ones_odd"] = p.key_ones_odd;
  j["entropy_bits_removed"] = p.entropy_bits_removed;
  j["queries"] = p.queries;
  return j;
}

CellAreaTable cell_table(const std::vector<std::string>& overrides) {
  CellAreaTable t = CellAreaTable::standard();
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorKind::InvalidArgument, "--cell-area expects CELL=AREA");
    double v = 0;
    try {
      v = std::stod(o.substr(eq + 1));
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "bad area in '" + o + "'");
    }
    t.set(o.substr(0, eq), v);
  }
  return t;
}

Json area_json(const AreaReport& r) {
  Json j;
  j["scheme"] = r.scheme;
  j["key_bits"] = r.key_bits;
  if (r.block_inputs) j["block_inputs"] = r.block_inputs;
  j["key_gate_area"] = r.key_gate_area;
  j["block_area"] = r.block_area;
  j["controller_area"] = r.controller_area;
  j["controller_dff_area"] = r.controller_dff_area;
  j["total_extra"] = r.total_extra;
  j["base_area"] = r.base_area ? Json(*r.base_area) : Json(nullptr);
  j["overhead_pct"] = r.overhead_pct ? Json(*r.overhead_pct) : Json(nullptr);
  j["notes"] = r.notes;
  return j;
}

// ---------------------------------------------------------------------------
// Subcommands.

struct Common {
  std::uint64_t seed = 1;
  std::string json;
  bool timing = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "base seed")->capture_default_str();
  sub->add_option("--json", c.json, "write the JSON report here instead of stdout");
  sub->add_flag("--timing", c.timing, "include wall-clock times (breaks byte-identical reruns)");
}

int cmd_stats(const std::string& input, const Common& c, bool no_timing, const EncryptArgs& a) {
  RunConfig cfg("stats");
  Input in = load(input, cfg);
  Json j = cfg.provenance();
  j["stats"] = stats_json(in.netlist, selection_options(a), !no_timing);
  emit(j, c.json);
  return 0;
}

int cmd_analyze(const std::string& input, const Common& c, const EncryptArgs& a) {
  RunConfig cfg("analyze");
  Input in = load(input, cfg);
  cfg.set("affects", a.affects);
  cfg.set("floor", a.floor);
  Json j = cfg.provenance();
  j["selection"] = selection_json(in.netlist, select_flip_flops(in.netlist, selection_options(a)));
  j["complexity"] = complexity_json(in.netlist, attack_complexity(in.netlist));
  Json sv = Json::array();
  for (NodeId ff : pi_controllable_ffs(in.netlist)) sv.push_back(in.netlist.name_of(ff));
  j["pi_controllable_ffs"] = sv;
  emit(j, c.json);
  return 0;
}

int cmd_encrypt(const std::string& input, const Common& c, const EncryptArgs& a, const std::string& out_prefix) {
  RunConfig cfg("encrypt");
  cfg.seed("base", c.seed);
  Input in = load(input, cfg);
  const auto t0 = Clock::now();
  Encrypted e = run_encrypt(in.netlist, a, c.seed, cfg);
  const double elapsed = ms_since(t0);
  const Netlist& n = e.result.netlist;
  const auto diags = validate(n);

  const std::string prefix = out_prefix.empty() ? n.name() + "_" + a.scheme : out_prefix;
  write_text_file(prefix + ".bench", write_bench(n, cfg.header()));
  write_text_file(prefix + ".key", write_key_file(key_file_of(e.result), cfg.header()));

  Json j = cfg.provenance();
  j["scheme"] = a.scheme;
  j["key_bits"] = e.result.correct_key.size();
  j["correct_key"] = to_string(e.result.correct_key);
  Json pl = Json::array();
  for (const auto& p : e.result.placements) {
    Json x;
    x["key"] = p.key_name;
    x["site"] = p.site;
    x["inverted"] = p.inverted;
    pl.push_back(x);
  }
  j["placements"] = pl;
  if (e.selection) j["selection"] = selection_json(in.netlist, *e.selection);
  j["complexity"] = complexity_json(n, attack_complexity(n));
  j["nodes_before"] = in.netlist.size();
  j["nodes_after"] = n.size();
  Json dj = Json::array();
  for (const auto& d : diags) dj.push_back(std::string(to_string(d.kind)) + ": " + d.message);
  j["diagnostics"] = dj;
  if (c.timing) j["encryption_time_ms"] = elapsed;
  j["files"] = {fs::path(prefix + ".bench").filename().string(), fs::path(prefix + ".key").filename().string()};
  if (c.json.empty()) {
    write_text_file(prefix + ".json", j.dump(2) + "\n");
  } else {
    emit(j, c.json);
  }
  return diags.empty() ? 0 : exit_code(ErrorKind::InvalidArgument);
}

int cmd_simulate(const std::string& input, const Common& c, const std::string& key_path, std::size_t patterns,
                 std::size_t cycles, const std::string& csv) {
  RunConfig cfg("simulate");
  Input in = load(input, cfg);
  const Bits key = load_key(key_path, in.netlist);
  cfg.set("key", to_string(key));
  cfg.set("patterns", patterns);
  cfg.set("cycles", cycles);
  cfg.seed("patterns", c.seed);
  if (patterns == 0) throw Error(ErrorKind::InvalidArgument, "--patterns must be positive");
  const auto t0 = Clock::now();
  PoTrace trace = run_patterns(in.netlist, key, patterns, cycles, c.seed);
  const double elapsed = ms_since(t0);
  if (!csv.empty()) write_text_file(csv, comment_block(cfg) + trace_csv(trace));
  Json j = cfg.provenance();
  j["patterns"] = patterns;
  j["cycles"] = cycles;
  j["outputs"] = names_json(in.netlist, in.netlist.functional_outputs());
  std::uint64_t total = 0;
  for (std::size_t p = 0; p < patterns; ++p) {
    for (std::size_t t = 0; t < cycles; ++t) total += popcount(trace.row(p, t));
  }
  j["output_ones"] = total;
  j["trace_fnv"] = hex64(fnv1a(trace_csv(trace)));
  if (c.timing) j["wall_ms"] = elapsed;
  emit(j, c.json);
  return 0;
}

struct AttackArgs {
  std::string method = "scan";
  std::string key_file;
  std::size_t budget_exp = 24;
  std::size_t experiments = 64;
  std::size_t max_iters = 10000;
  std::size_t patterns = 256;
};

int cmd_attack(const std::string& input, const Common& c, const AttackArgs& a) {
  RunConfig cfg("attack");
  Input in = load(input, cfg);
  const Netlist& n = in.netlist;
  const Bits key = load_key(a.key_file, n);
  cfg.set("method", a.method);
  cfg.set("budget_exp", a.budget_exp);
  cfg.set("experiments", a.experiments);
  cfg.set("max_iters", a.max_iters);
  cfg.set("patterns", a.patterns);
  // The key held by the oracle is part of the experiment, not of the attacker's view.
  cfg.set("oracle_key_fnv", hex64(fnv1a(to_string(key))));
  const std::uint64_t attack_seed = derive_seed(c.seed, "attack");
  const std::uint64_t powerup_seed = derive_seed(c.seed, "powerup");
  cfg.seed("attack", attack_seed);
  cfg.seed("powerup", powerup_seed);

  ScanAttackOptions so;
  so.experiments = a.experiments;
  so.budget_exp = a.budget_exp;
  so.seed = attack_seed;
  LogicConeOptions lo;
  lo.budget_exp = a.budget_exp;
  lo.seed = attack_seed;
  HillClimbOptions ho;
  ho.max_iters = a.max_iters;
  ho.patterns = a.patterns;
  ho.seed = attack_seed;

  Json j = cfg.provenance();
  if (a.method == "suite") {
    SuiteOptions opt;
    opt.seed = attack_seed;
    opt.scan = so;
    opt.logic = lo;
    opt.hill = ho;
    SuiteReport s = attack_suite(n, key, opt);
    j["scheme"] = s.scheme;
    Json m;
    m["path_sensitization"] = to_string(s.path_sensitization);
    m["logic_cone"] = to_string(s.logic_cone);
    m["hill_climbing"] = to_string(s.hill_climbing);
    m["sat"] = to_string(s.sat);
    m["scan_based"] = to_string(s.scan_based);
    j["resilience"] = m;
    Json at = Json::array();
    for (const auto& r : s.attacks) at.push_back(attack_json(r, key, c.timing));
    j["attacks"] = at;
    j["parity"] = s.parity ? parity_json(*s.parity) : Json(nullptr);
    j["sensitization_vulnerable"] = names_json(n, s.sensitization_vulnerable);
    j["correct_bits_recovered"] = s.correct_bits_recovered;
    emit(j, c.json);
    return 0;
  }

  Oracle oracle(n, key, powerup_seed);
  if (a.method == "scan") {
    j["report"] = attack_json(scan_partition_attack(n, oracle, so), key, c.timing);
  } else if (a.method == "reset-scan") {
    j["report"] = attack_json(reset_and_scan_attack(n, oracle), key, c.timing);
  } else if (a.method == "logic-cone") {
    j["report"] = attack_json(logic_cone_attack(n, oracle, lo), key, c.timing);
  } else if (a.method == "parity") {
    j["parity"] = parity_json(parity_probe(n, oracle, attack_seed));
  } else if (a.method == "hill") {
    HillClimbResult h = hill_climbing_attack(n, oracle, ho);
    j["report"] = attack_json(h.report, key, c.timing);
    j["iterations"] = h.iterations;
    j["reached_zero"] = h.reached_zero;
    j["hd_trace"] = h.hd_trace;
  } else if (a.method == "sensitization") {
    j["sensitization_vulnerable"] = names_json(n, sensitization_vulnerable_ffs(n));
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown attack method '" + a.method + "'");
  }
  emit(j, c.json);
  return 0;
}

struct ReportArgs {
  std::size_t patterns = 1000;
  std::size_t cycles = 4;
  std::vector<std::string> cell_area;
  double dff_area = 0;
  std::string csv;
  bool compare = false;
  std::string compare_csv;
};

int cmd_report(const std::string& input, const Common& c, const EncryptArgs& a, const ReportArgs& r) {
  RunConfig cfg("report");
  cfg.seed("base", c.seed);
  Input in = load(input, cfg);
  const Netlist& base = in.netlist;
  const CellAreaTable table = cell_table(r.cell_area);
  std::string cells;
  for (const auto& [k, v] : table.cells()) cells += k + "=" + std::to_string(v) + ",";
  cfg.set("cell_area", cells);
  cfg.set("dff_area", std::to_string(r.dff_area));
  cfg.set("patterns", r.patterns);
  cfg.set("cycles", r.cycles);
  cfg.set("compare", r.compare || !r.compare_csv.empty() ? "1" : "0");
  Encrypted e = run_encrypt(base, a, c.seed, cfg);
  const std::uint64_t pattern_seed = derive_seed(c.seed, "patterns");
  cfg.seed("patterns", pattern_seed);
  const Netlist& n = e.result.netlist;

  Json j = cfg.provenance();
  j["table2_stats"] = stats_json(base, selection_options(a), c.timing);
  j["complexity"] = complexity_json(n, attack_complexity(n));

  CorruptionOptions co;
  co.patterns = r.patterns;
  co.cycles = r.cycles;
  co.seed = pattern_seed;
  co.restrict_to_affected = !e.affected.empty();
  CorruptionCurve curve = output_corruption(n, e.result.correct_key, e.affected, co);
  Json cs;
  cs["observed_outputs"] = curve.observed_outputs.size();
  Json pts = Json::array();
  std::uint64_t outside = 0;
  for (const auto& pt : curve.points) {
    Json p;
    p["wrong_pct"] = pt.wrong_pct;
    p["wrong_bits"] = pt.wrong_bits;
    p["mean_hd_pct"] = pt.mean_hd_pct;
    p["min_hd_pct"] = pt.min_hd_pct;
    p["max_hd_pct"] = pt.max_hd_pct;
    p["outside_hd_bits"] = pt.outside_hd_bits;
    outside += pt.outside_hd_bits;
    pts.push_back(p);
  }
  cs["points"] = pts;
  cs["outside_hd_bits_total"] = outside;
  if (r.compare || !r.compare_csv.empty()) {
    const auto rows = avg_corruption_compare(base, {Scheme::Eff, Scheme::Xor, Scheme::Mux, Scheme::Oc}, a.key_bits,
                                             pattern_seed, r.patterns, r.cycles);
    Json cmp = Json::array();
    for (const auto& row : rows) {
      Json x;
      x["scheme"] = to_string(row.scheme);
      x["key_bits"] = row.key_bits;
      x["observed_outputs"] = row.observed_outputs;
      x["mean_hd_pct"] = row.mean_hd_pct;
      x["mean_hd_all_pct"] = row.mean_hd_all_pct;
      cmp.push_back(x);
    }
    cs["scheme_comparison"] = cmp;
    if (!r.compare_csv.empty()) write_text_file(r.compare_csv, comment_block(cfg) + avg_corruption_csv(rows));
  }
  j["corruption_summary"] = cs;
  if (!r.csv.empty()) write_text_file(r.csv, comment_block(cfg) + corruption_csv(n, curve));

  std::optional<double> base_area;
  std::string base_note;
  try {
    base_area = netlist_area(base, table);
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::MissingCell) throw;
    base_note = std::string("base area unavailable: ") + err.what();
  }
  const std::size_t k = e.result.correct_key.size();
  Json area;
  AreaReport own = area_estimate(a.scheme, k, 0, base_area, table, a.controller ? r.dff_area : 0);
  if (a.scheme == "eff" && !a.controller) {
    own.total_extra -= own.controller_area + own.controller_dff_area;
    own.controller_area = own.controller_dff_area = 0;
    own.notes = {"no scan controller inserted"};
    if (base_area && *base_area > 0) own.overhead_pct = 100.0 * own.total_extra / *base_area;
  }
  if (!base_note.empty()) own.notes.push_back(base_note);
  area["encrypted"] = area_json(own);
  area["sarlock"] = area_json(area_estimate("sarlock", k, 0, base_area, table));
  if (k >= 2) area["antisat"] = area_json(area_estimate("antisat", 0, k, base_area, table));
  j["area"] = area;
  emit(j, c.json);
  return 0;
}

struct GenerateArgs {
  std::string preset = "s298";
  GeneratorSpec spec;
  std::string out;
};

int cmd_generate(const Common& c, GenerateArgs g) {
  RunConfig cfg("generate");
  GeneratorSpec spec = g.spec;
  if (g.preset == "s298") {
    spec = s298_like(c.seed);
  } else if (g.preset == "s344") {
    spec = s344_like(c.seed);
  } else {
    spec.seed = c.seed;
  }
  cfg.set("preset", g.preset);
  cfg.set("shape", std::to_string(spec.inputs) + "/" + std::to_string(spec.outputs) + "/" +
                       std::to_string(spec.dffs) + "/" + std::to_string(spec.gates) + "/" +
                       std::to_string(spec.blocks));
  cfg.seed("generator", spec.seed);
  const std::string text = write_bench(generate_circuit(spec), cfg.header());
  if (g.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(g.out, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fflock: flip-flop logic encryption, scan-chain attacks and metrics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "fflock 0.1.0");

  std::string input;
  Common common;
  EncryptArgs enc;
  AttackArgs atk;
  ReportArgs rep;
  GenerateArgs gen;
  bool no_timing = false;
  std::string key_file, csv, out_prefix;
  std::size_t patterns = 1000, cycles = 4;
  int rc = 0;

  auto* stats = app.add_subcommand("stats", "interface counts, candidates, coverage and encryption time");
  stats->add_option("input", input, ".bench file or corpus name")->required();
  add_common(stats, common);
  stats->add_flag("--no-timing", no_timing, "omit encryption_time_ms");
  stats->callback([&] { rc = cmd_stats(input, common, no_timing, enc); });

  auto* analyze = app.add_subcommand("analyze", "flip-flop selection and attack complexity as JSON");
  analyze->add_option("input", input, ".bench file or corpus name")->required();
  add_common(analyze, common);
  analyze->add_option("--affects", enc.affects, "transitive or combinational")
      ->check(CLI::IsMember({"transitive", "combinational"}));
  analyze->add_option("--floor", enc.floor, "minimum overlap size during selection");
  analyze->callback([&] { rc = cmd_analyze(input, common, enc); });

  auto* encrypt = app.add_subcommand("encrypt", "encrypt a netlist; writes PREFIX.bench, PREFIX.key, PREFIX.json");
  encrypt->add_option("input", input, ".bench file or corpus name")->required();
  add_common(encrypt, common);
  add_encrypt_options(encrypt, enc);
  encrypt->add_option("--out,-o", out_prefix, "output prefix (default <circuit>_<scheme>)");
  encrypt->callback([&] { rc = cmd_encrypt(input, common, enc, out_prefix); });

  auto* simulate = app.add_subcommand("simulate", "random-pattern output traces");
  simulate->add_option("input", input, ".bench file or corpus name")->required();
  add_common(simulate, common);
  simulate->add_option("--key-file", key_file, "key file for an encrypted netlist");
  simulate->add_option("--patterns", patterns, "number of patterns")->capture_default_str();
  simulate->add_option("--cycles", cycles, "cycles per pattern")->capture_default_str();
  simulate->add_option("--csv", csv, "write the per-cycle trace here");
  simulate->callback([&] { rc = cmd_simulate(input, common, key_file, patterns, cycles, csv); });

  auto* attack = app.add_subcommand("attack", "run an attack against an oracle holding the key");
  attack->add_option("input", input, "encrypted .bench file")->required();
  add_common(attack, common);
  attack->add_option("--method", atk.method, "scan, reset-scan, parity, hill, logic-cone, sensitization or suite")
      ->check(CLI::IsMember({"scan", "reset-scan", "parity", "hill", "logic-cone", "sensitization", "suite"}))
      ->capture_default_str();
  attack->add_option("--key-file", atk.key_file, "key held by the oracle");
  attack->add_option("--budget-exp", atk.budget_exp, "largest cone exponent to brute-force")->capture_default_str();
  attack->add_option("--experiments", atk.experiments, "scan experiments per round")->capture_default_str();
  attack->add_option("--max-iters", atk.max_iters, "hill-climbing iteration cap")->capture_default_str();
  attack->add_option("--patterns", atk.patterns, "hill-climbing pattern batch")->capture_default_str();
  attack->add_option("--report", common.json, "alias of --json");
  attack->callback([&] { rc = cmd_attack(input, common, atk); });

  auto* report = app.add_subcommand("report", "stats, complexity, corruption and area for one encryption");
  report->add_option("input", input, ".bench file or corpus name")->required();
  add_common(report, common);
  add_encrypt_options(report, enc);
  report->add_option("--patterns", rep.patterns, "corruption patterns")->capture_default_str();
  report->add_option("--cycles", rep.cycles, "cycles per pattern")->capture_default_str();
  report->add_option("--cell-area", rep.cell_area, "override a cell area, CELL=AREA (repeatable)");
  report->add_option("--dff-area", rep.dff_area, "controller flip-flop area")->capture_default_str();
  report->add_option("--csv", rep.csv, "write per-pattern corruption here");
  report->add_flag("--compare-schemes", rep.compare, "average corruption of all four schemes at this key size");
  report->add_option("--compare-csv", rep.compare_csv, "write the scheme comparison here (implies --compare-schemes)");
  report->callback([&] { rc = cmd_report(input, common, enc, rep); });

  auto* generate = app.add_subcommand("generate", "write a random sequential benchmark");
  add_common(generate, common);
  generate->add_option("--preset", gen.preset, "s298, s344 or custom")
      ->check(CLI::IsMember({"s298", "s344", "custom"}))
      ->capture_default_str();
  generate->add_option("--inputs", gen.spec.inputs);
  generate->add_option("--outputs", gen.spec.outputs);
  generate->add_option("--dffs", gen.spec.dffs);
  generate->add_option("--gates", gen.spec.gates);
  generate->add_option("--blocks", gen.spec.blocks);
  generate->add_option("--name", gen.spec.name);
  generate->add_option("--out,-o", gen.out, "output file (default stdout)");
  generate->callback([&] { rc = cmd_generate(common, gen); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "fflock: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "fflock: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
