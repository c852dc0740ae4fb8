// SPDX-License-Identifier: Apache-2.0
// Acceptance run: one PASS/FAIL line per criterion, followed by indented
// detail lines. Exit status is nonzero when any criterion fails.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "equivalence.hpp"
#include "fflock/attacks.hpp"
#include "fflock/bench.hpp"
#include "fflock/cone.hpp"
#include "fflock/encrypt.hpp"
#include "fflock/error.hpp"
#include "fflock/generate.hpp"
#include "fflock/metrics.hpp"
#include "fflock/sim.hpp"
#include "fixtures.hpp"
#include "json.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace fflock;

namespace {

// Pinned limits.
constexpr double kGoldenLimitMs = 1000.0;
constexpr std::size_t kParityCases = 10000;
constexpr std::size_t kMaxChain = 32;
constexpr std::size_t kResetScanChains = 100;
constexpr std::size_t kScanCircuitMaxPis = 12;
constexpr std::size_t kScanCircuitMaxKeys = 8;
constexpr double kScanAttackLimitS = 300.0;
constexpr std::uint64_t kEquivalenceSeeds = 10;
constexpr std::size_t kEquivalenceTraceCycles = 10000;
constexpr std::size_t kWrongKeys = 1000;
constexpr std::size_t kCorruptionPatterns = 1000;
constexpr std::size_t kHillIters = 10000;
constexpr std::size_t kHillSeeds = 20;
constexpr double kHillFailFraction = 0.80;
constexpr double kAreaTolerance = 1e-9;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void fail(const std::string& why) {
    pass = false;
    details.push_back("violation: " + why);
  }
  void note(const std::string& s) { details.push_back(s); }
};

std::string fmt(double v, int digits = 2) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

Bits flipped(Bits b) {
  for (auto& x : b) x ^= 1U;
  return b;
}

std::optional<fs::path> corpus_dir() {
  if (const char* env = std::getenv("FFLOCK_CORPUS")) return fs::path(env);
  fs::path p = FFLOCK_CORPUS_DIR;
  if (fs::exists(p)) return p;
  return std::nullopt;
}

std::optional<Netlist> corpus_circuit(const std::string& name) {
  auto dir = corpus_dir();
  if (!dir) return std::nullopt;
  fs::path p = *dir / (name + ".bench");
  if (!fs::exists(p)) return std::nullopt;
  return read_bench_file(p.string());
}

// Strong flip-flops drawn for an EFF encryption of at most `k` bits, or
// nothing when selection has no candidates.
struct EffCase {
  Netlist base;
  SelectionResult selection;
  EncryptionResult enc;
  std::vector<NodeId> affected;  // in enc.netlist
};

std::optional<EffCase> eff_case(const Netlist& base, std::size_t k, std::uint64_t seed) {
  EffCase c;
  c.base = base;
  try {
    c.selection = select_flip_flops(base);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NoCandidates) return std::nullopt;
    throw;
  }
  const std::size_t bits = std::min(k, c.selection.l_strong.size());
  c.enc = encrypt_flip_flop(base, pick_key_ffs(base, c.selection, bits, seed), seed);
  c.affected = map_outputs(base, c.enc.netlist, c.selection.affected_outputs);
  return c;
}

// ---------------------------------------------------------------------------

Outcome golden_vectors() {
  Outcome o;
  const auto t0 = Clock::now();
  auto enc = fixtures::ten_cell_chain();
  const Bits load = bits_from_string("1011010001");
  struct Case {
    const char* key;
    const char* cells;
    Bits unload;
  };
  for (const Case& c : {Case{"01010", "1001011110", flipped(load)}, Case{"10110", "1111000001", load}}) {
    Simulator sim(enc.netlist, bits_from_string(c.key));
    sim.scan_load(load);
    const std::string cells = to_string(sim.chain_values());
    const Bits unload = sim.scan_unload();
    if (cells != c.cells) o.fail(std::string("key ") + c.key + ": cells " + cells + ", expected " + c.cells);
    if (unload != c.unload) {
      o.fail(std::string("key ") + c.key + ": unload " + to_string(unload) + ", expected " + to_string(c.unload));
    }
    o.note(std::string("key ") + c.key + ": cells " + cells + ", unload " + to_string(unload));
  }
  const double ms = seconds_since(t0) * 1000;
  if (ms >= kGoldenLimitMs) o.fail("took " + fmt(ms) + " ms");
  o.note("elapsed " + fmt(ms, 3) + " ms");
  return o;
}

// A random EFF ring with a random Qbar-link set over the plain cells.
EncryptionResult random_chain(Rng& rng, std::size_t max_len, bool controller, bool need_key) {
  const std::size_t L = 1 + rng.below(max_len);
  std::vector<std::size_t> encrypted, qbar;
  for (std::size_t j = 0; j < L; ++j) {
    if (rng.coin()) {
      encrypted.push_back(j);
    } else if (rng.coin()) {
      qbar.push_back(j);
    }
  }
  if (need_key && encrypted.empty()) {
    encrypted.push_back(rng.below(L));
    qbar.erase(std::remove(qbar.begin(), qbar.end(), encrypted[0]), qbar.end());
  }
  return fixtures::scanned_ring(L, encrypted, qbar, controller, true, rng.next());
}

Outcome parity_law() {
  Outcome o;
  Rng rng(2024);
  std::size_t violations = 0, odd = 0;
  for (std::size_t t = 0; t < kParityCases; ++t) {
    auto enc = random_chain(rng, kMaxChain, false, false);
    const Netlist& n = enc.netlist;
    const Bits key = rng.bits(n.key_inputs().size());
    // Expected parity from structure: Qbar links, plus per key mux its key
    // bit XOR its swap flag.
    bool parity = false;
    for (auto l : n.scan()->links) parity ^= (l == LinkSource::Qbar);
    for (const auto& km : find_key_muxes(n)) {
      std::size_t k = 0;
      while (n.key_inputs()[k] != km.key) ++k;
      parity ^= (key[k] != 0) != km.swapped;
    }
    odd += parity;
    Simulator sim(n, key, t);
    const Bits v = rng.bits(n.scan()->chain.size());
    sim.scan_load(v);
    if (sim.scan_unload() != (parity ? flipped(v) : v)) ++violations;
  }
  if (violations) o.fail(std::to_string(violations) + " cases broke the parity law");
  o.note(std::to_string(kParityCases) + " cases, " + std::to_string(odd) + " with odd parity, " +
         std::to_string(violations) + " violations");
  return o;
}

Outcome reset_and_scan() {
  Outcome o;
  Rng rng(77);
  std::size_t recovered = 0, exact_shifts = 0, blocked = 0, leaked_bits = 0;
  for (std::size_t t = 0; t < kResetScanChains; ++t) {
    const std::uint64_t s = rng.next();
    Rng a(s), b(s);
    auto plain = random_chain(a, kMaxChain, false, true);
    auto guarded = random_chain(b, kMaxChain, true, true);
    const std::size_t L = plain.netlist.scan()->chain.size();
    {
      Oracle oracle(plain.netlist, plain.correct_key, t);
      AttackReport r = reset_and_scan_attack(plain.netlist, oracle);
      if (r.status == AttackStatus::Success && r.key == plain.correct_key) ++recovered;
      if (oracle.scan_shifts() == L && r.scan_shifts == L) ++exact_shifts;
    }
    {
      Oracle oracle(guarded.netlist, guarded.correct_key, t);
      AttackReport r = reset_and_scan_attack(guarded.netlist, oracle);
      if (r.status == AttackStatus::Blocked) ++blocked;
      leaked_bits += r.count(BitStatus::Recovered);
    }
  }
  if (recovered != kResetScanChains) o.fail("full key recovered on " + std::to_string(recovered) + " chains");
  if (exact_shifts != kResetScanChains) o.fail("exactly |chain| shifts on " + std::to_string(exact_shifts) + " chains");
  if (leaked_bits != 0) o.fail(std::to_string(leaked_bits) + " bits recovered through the controller");
  o.note("without controller: " + std::to_string(recovered) + "/" + std::to_string(kResetScanChains) +
         " keys recovered, " + std::to_string(exact_shifts) + " with exactly |chain| shifts");
  o.note("with controller: " + std::to_string(blocked) + "/" + std::to_string(kResetScanChains) + " blocked, " +
         std::to_string(leaked_bits) + " bits recovered");
  return o;
}

std::vector<Netlist> small_circuits() {
  std::vector<Netlist> out{fixtures::s27()};
  for (std::uint64_t s = 1; s <= 3; ++s) out.push_back(generate_circuit(s298_like(s)));
  for (std::uint64_t s = 1; s <= 3; ++s) out.push_back(generate_circuit(s344_like(s)));
  // Loosely coupled blocks, so cones cover a fraction of the inputs.
  for (std::uint64_t s = 1; s <= 3; ++s) out.push_back(generate_circuit({"blocks", 8, 8, 16, 80, 4, s}));
  return out;
}

std::string circuit_label(const Netlist& n, std::size_t index) {
  return n.name() + "#" + std::to_string(index);
}

Outcome scan_partition() {
  Outcome o;
  const auto circuits = small_circuits();
  std::size_t attacked = 0, strictly_below = 0;
  for (std::size_t i = 0; i < circuits.size(); ++i) {
    const Netlist& base = circuits[i];
    const std::string label = circuit_label(base, i);
    const std::size_t k = std::min<std::size_t>(kScanCircuitMaxKeys, lockable_nets(base).size());
    auto x = encrypt_xor_random(base, k, 100 + i);
    Netlist n = insert_scan(x.netlist);
    Complexity c = attack_complexity(n);
    if (c.cone_inputs > kScanCircuitMaxPis) {
      o.note(label + ": worst cone has " + std::to_string(c.cone_inputs) + " inputs, outside the class");
      continue;
    }
    ++attacked;
    const auto t0 = Clock::now();
    Oracle oracle(n, x.correct_key, i);
    ScanAttackOptions opt;
    opt.seed = 5 + i;
    AttackReport r = scan_partition_attack(n, oracle, opt);
    const double secs = seconds_since(t0);
    const bool correct = equivalence::check(n, x.correct_key, n, r.key, 31 + i).mismatches == 0;
    std::ostringstream line;
    line << label << ": K=" << k << " status " << to_string(r.status) << ", functionally correct "
         << (correct ? "yes" : "no") << ", exponent " << (r.scan_exponent ? std::to_string(*r.scan_exponent) : "-")
         << " vs brute " << r.brute_exponent << ", " << r.queries << " queries, " << fmt(secs, 3) << " s";
    o.note(line.str());
    if (r.status != AttackStatus::Success || !correct) o.fail(label + ": key not recovered");
    // Equal exponents are only possible when one cone holds every input and key.
    const bool spans_all = c.cone_inputs == c.brute_inputs && c.cone_keys == c.brute_keys;
    if (!r.scan_exponent) {
      o.fail(label + ": no scan exponent");
    } else if (*r.scan_exponent == r.brute_exponent && spans_all) {
      o.note(label + ": worst cone spans all inputs and keys, exponents equal");
    } else if (*r.scan_exponent >= r.brute_exponent) {
      o.fail(label + ": scan exponent not below brute");
    } else {
      ++strictly_below;
    }
    if (secs >= kScanAttackLimitS) o.fail(label + ": took " + fmt(secs) + " s");

    auto e = eff_case(base, kScanCircuitMaxKeys, 200 + i);
    if (!e) {
      o.note(label + ": no EFF candidates");
      continue;
    }
    Netlist en = insert_scan(e->enc.netlist);
    Oracle eo(en, e->enc.correct_key, i);
    AttackReport er = scan_partition_attack(en, eo, opt);
    o.note(label + ": EFF K=" + std::to_string(e->enc.correct_key.size()) + " status " + to_string(er.status));
    if (er.status != AttackStatus::KeylessCones) o.fail(label + ": EFF attack returned " + to_string(er.status));
  }
  if (attacked == 0) o.fail("no circuit in the class");
  if (strictly_below == 0) o.fail("no circuit with a scan exponent below brute force");
  return o;
}

Outcome equivalence_suite() {
  Outcome o;
  std::size_t runs = 0;
  std::uint64_t checked = 0, mismatches = 0;
  for (Scheme s : {Scheme::Eff, Scheme::Xor, Scheme::Mux, Scheme::Oc}) {
    std::uint64_t scheme_mismatch = 0;
    for (std::uint64_t seed = 1; seed <= kEquivalenceSeeds; ++seed) {
      for (Netlist base : {fixtures::s27(), generate_circuit(s298_like(seed)), generate_circuit(s344_like(seed))}) {
        EncryptionResult enc;
        switch (s) {
          case Scheme::Eff: {
            auto e = eff_case(base, 4, seed);
            if (!e) continue;
            enc = e->enc;
            break;
          }
          case Scheme::Xor: enc = encrypt_xor_random(base, 6, seed); break;
          case Scheme::Mux: enc = encrypt_mux_random(base, 6, seed); break;
          case Scheme::Oc: enc = encrypt_oc(base, 6, seed); break;
        }
        // Trace patterns are 4 cycles each.
        auto r = equivalence::check(base, {}, enc.netlist, enc.correct_key, seed, 10000, kEquivalenceTraceCycles / 4);
        ++runs;
        checked += r.checked;
        scheme_mismatch += r.mismatches;
      }
    }
    mismatches += scheme_mismatch;
    o.note(std::string(to_string(s)) + ": " + std::to_string(scheme_mismatch) + " mismatches");
    if (scheme_mismatch) o.fail(std::string(to_string(s)) + " differs from the original under the correct key");
  }
  o.note(std::to_string(runs) + " encryptions, " + std::to_string(checked) + " comparisons, " +
         std::to_string(mismatches) + " mismatches");
  return o;
}

// Flip-flops an output reaches through any number of D paths, including a
// flip-flop that drives the output directly.
std::set<std::string> output_reach(const Netlist& n, NodeId o) {
  auto r = oracles::reachable_ffs(n, o, true);
  if (n.kind(o) == GateKind::Dff) r.insert(n.name_of(o));
  return r;
}

Outcome selection_invariant() {
  Outcome o;
  std::vector<Netlist> benches;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    benches.push_back(generate_circuit(s344_like(s)));
    benches.push_back(generate_circuit({"blocks", 8, 8, 16, 80, 3, s}));
  }
  nlohmann::json manifest;
  if (auto dir = corpus_dir(); dir && fs::exists(*dir / "manifest.json")) {
    manifest = nlohmann::json::parse(read_text_file((*dir / "manifest.json").string()))["circuits"];
    for (const auto& [name, entry] : manifest.items()) {
      if (auto n = corpus_circuit(name)) {
        benches.push_back(std::move(*n));
      } else {
        o.note(name + ": not in the corpus");
      }
    }
  } else {
    o.note("no corpus found; synthetic circuits only");
  }
  for (const Netlist& n : benches) {
    SelectionResult r;
    try {
      r = select_flip_flops(n);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoCandidates) throw;
      o.note(n.name() + ": no candidates");
      continue;
    }
    std::set<std::string> affected;
    for (NodeId a : r.affected_outputs) affected.insert(n.name_of(a));
    std::size_t bad = 0;
    bool all_share = true;
    for (NodeId out : n.functional_outputs()) {
      const auto reach = output_reach(n, out);
      const bool in = affected.count(n.name_of(out)) != 0;
      for (NodeId ff : r.l_strong) {
        const bool hit = reach.count(n.name_of(ff)) != 0;
        if (hit != in) ++bad;
        all_share = all_share && hit;
      }
    }
    if (bad) o.fail(n.name() + ": " + std::to_string(bad) + " (output, strong flip-flop) pairs off");
    if (all_share && r.coverage_pct != 100.0) o.fail(n.name() + ": all outputs share L_strong but coverage < 100");
    if (manifest.contains(n.name())) {
      std::ostringstream line;
      line << n.name() << ": inputs " << n.functional_inputs().size() << ", outputs " << n.functional_outputs().size()
           << ", gates " << n.gate_count() << ", dffs " << n.design_dffs().size() << ", candidates "
           << r.l_strong.size() << ", affected " << r.affected_outputs.size() << ", coverage "
           << fmt(r.coverage_pct) << "%";
      const auto& pub = manifest[n.name()]["published"];
      if (!pub.is_null()) {
        line << " | published: inputs " << pub["inputs"] << ", outputs " << pub["outputs"] << ", gates "
             << pub["gates"] << ", dffs " << pub["dffs"] << ", candidates " << pub["candidate_dffs"] << ", affected "
             << pub["affected_outputs"] << ", coverage " << pub["coverage_pct"] << "%";
        // Scan-attack complexity at 128 random XOR keys.
        const std::size_t k = std::min<std::size_t>(128, lockable_nets(n).size());
        Complexity c = attack_complexity(encrypt_xor_random(n, k, 1).netlist);
        line << " | XOR K=" << k << ": 2^" << (c.scan_exponent ? *c.scan_exponent : 0) << " / 2^"
             << c.brute_exponent << " (published 2^" << pub["scan_exponent"] << " / 2^" << pub["brute_exponent"]
             << ")";
      }
      o.note(line.str());
    } else {
      o.note(n.name() + ": " + std::to_string(r.l_strong.size()) + " strong, coverage " + fmt(r.coverage_pct) +
             "%, invariant checked");
    }
  }
  return o;
}

Outcome corruption_confinement() {
  Outcome o;
  // Two benchmarks: corpus circuits when available, synthetic otherwise.
  std::vector<Netlist> benches;
  for (const char* name : {"s38417", "s13207"}) {
    if (auto n = corpus_circuit(name)) benches.push_back(std::move(*n));
  }
  for (std::uint64_t s = 1; benches.size() < 2; ++s) benches.push_back(generate_circuit({"multi", 10, 12, 24, 150, 3, s}));
  for (const Netlist& base : benches) {
    auto e = eff_case(base, 128, 11);
    if (!e) {
      o.fail(base.name() + ": no EFF candidates");
      continue;
    }
    const auto t0 = Clock::now();
    auto samples = corruption_samples(e->enc.netlist, e->enc.correct_key, e->affected, kWrongKeys,
                                      kCorruptionPatterns, 4, 3);
    std::uint64_t outside = 0;
    std::vector<double> frac, hd;
    for (const auto& s : samples) {
      outside += s.outside_hd_bits;
      frac.push_back(static_cast<double>(s.wrong_bits) / static_cast<double>(e->enc.correct_key.size()));
      hd.push_back(s.mean_hd_pct);
    }
    if (outside) o.fail(base.name() + ": " + std::to_string(outside) + " differing bits outside O'");
    o.note(base.name() + ": K=" + std::to_string(e->enc.correct_key.size()) + ", |O'|=" +
           std::to_string(e->affected.size()) + " of " + std::to_string(base.functional_outputs().size()) + ", " +
           std::to_string(kWrongKeys) + " keys x " + std::to_string(kCorruptionPatterns) +
           " patterns, outside-O' HD bits " + std::to_string(outside) + ", pearson(wrong fraction, HD%) " +
           fmt(pearson(frac, hd), 3) + ", " + fmt(seconds_since(t0)) + " s");
  }

  std::size_t fails = 0, runs = 0;
  for (std::uint64_t seed = 1; runs < kHillSeeds && seed <= 4 * kHillSeeds; ++seed) {
    auto e = eff_case(generate_circuit(s344_like(seed)), 8, seed);
    if (!e) continue;
    ++runs;
    Oracle oracle(e->enc.netlist, e->enc.correct_key, seed);
    HillClimbOptions opt;
    opt.max_iters = kHillIters;
    opt.seed = seed;
    HillClimbResult h = hill_climbing_attack(e->enc.netlist, oracle, opt);
    if (!h.reached_zero) ++fails;
  }
  const double rate = runs ? static_cast<double>(fails) / static_cast<double>(runs) : 0;
  o.note("hill climbing on EFF: failed to reach HD 0 on " + std::to_string(fails) + "/" + std::to_string(runs) +
         " seeds (" + fmt(100 * rate, 1) + "%, needs >= " + fmt(100 * kHillFailFraction, 0) + "%)");
  // Informational: the same climb on a large corpus circuit.
  if (auto big = corpus_circuit("s38417")) {
    std::size_t big_runs = 0, big_zero = 0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      auto e = eff_case(*big, 32, seed);
      if (!e) break;
      ++big_runs;
      Oracle oracle(e->enc.netlist, e->enc.correct_key, seed);
      HillClimbOptions opt;
      opt.max_iters = kHillIters;
      opt.seed = seed;
      if (hill_climbing_attack(e->enc.netlist, oracle, opt).reached_zero) ++big_zero;
    }
    o.note("hill climbing on EFF s38417 K=32: reached HD 0 on " + std::to_string(big_zero) + "/" +
           std::to_string(big_runs) + " seeds (not scored)");
  }
  if (runs == 0 || rate < kHillFailFraction) o.fail("hill climbing reached HD 0 too often");
  return o;
}

Outcome area_arithmetic() {
  Outcome o;
  const auto t = CellAreaTable::standard();
  struct Case {
    std::string what;
    double got;
    double want;
  };
  const double xor2 = 10, mux2 = 9, and2 = 5, nand2 = 4;
  const double K = 128, N = 128;
  const std::vector<Case> cases{
      {"SARLock K=128", area_estimate("sarlock", 128, 0, {}, t).total_extra, (K + 1) * xor2 + (2 * K + 1) * and2},
      {"SARLock literal", area_estimate("sarlock", 128, 0, {}, t).total_extra, 2575},
      {"Anti-SAT N=128", area_estimate("antisat", 0, 128, {}, t).total_extra,
       (3 * N + 1) * xor2 + N * mux2 + ((N - 2) * and2 + nand2) + (N - 1) * and2 + and2},
      {"EFF per key", area_estimate("eff", 1, 0, {}, t).key_gate_area, 9},
      {"XOR per key", area_estimate("xor", 1, 0, {}, t).key_gate_area, 10},
      {"EFF K=128 key gates", area_estimate("eff", 128, 0, {}, t).key_gate_area, 1152},
  };
  for (const auto& c : cases) {
    o.note(c.what + ": " + fmt(c.got, 1) + " (expected " + fmt(c.want, 1) + ")");
    if (std::abs(c.got - c.want) > kAreaTolerance) o.fail(c.what);
  }
  return o;
}

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome cli_determinism() {
  Outcome o;
  const std::string cli = FFLOCK_CLI;
  const fs::path root = fs::temp_directory_path() / "fflock_acceptance_cli";
  fs::remove_all(root);
  std::vector<std::string> files;
  for (const char* run : {"a", "b"}) {
    const fs::path d = root / run;
    fs::create_directories(d);
    const std::string D = d.string() + "/";
    const std::vector<std::string> steps{
        "generate --preset s344 --seed 4 -o " + D + "c.bench",
        "stats " + D + "c.bench --no-timing --json " + D + "stats.json",
        "analyze " + D + "c.bench --json " + D + "analyze.json",
        "encrypt " + D + "c.bench --scheme eff -k 4 --seed 6 --scan chain --controller -o " + D + "eff",
        "encrypt " + D + "c.bench --scheme xor -k 6 --seed 6 --scan chain -o " + D + "xor",
        "simulate " + D + "eff.bench --key-file " + D + "eff.key --patterns 100 --cycles 3 --csv " + D +
            "trace.csv --json " + D + "sim.json",
        "attack " + D + "eff.bench --key-file " + D + "eff.key --method suite --json " + D + "suite_eff.json",
        "attack " + D + "xor.bench --key-file " + D + "xor.key --method scan --report " + D + "scan_xor.json",
        "report " + D + "c.bench --scheme eff -k 4 --seed 6 --patterns 200 --csv " + D + "corr.csv --json " + D +
            "report.json",
    };
    for (const auto& s : steps) {
      if (int rc = shell(cli + " " + s + " > /dev/null 2>&1"); rc != 0) {
        o.fail("'" + s + "' exited " + std::to_string(rc));
      }
    }
    if (files.empty()) {
      for (const auto& entry : fs::directory_iterator(d)) files.push_back(entry.path().filename().string());
      std::sort(files.begin(), files.end());
    }
  }
  std::size_t same = 0;
  for (const auto& f : files) {
    const std::string a = read_text_file((root / "a" / f).string());
    if (!fs::exists(root / "b" / f) || a != read_text_file((root / "b" / f).string())) {
      o.fail(f + " differs between runs");
      continue;
    }
    if (a.find("config") == std::string::npos && f != "c.bench") o.fail(f + " has no config hash");
    ++same;
  }
  o.note(std::to_string(same) + "/" + std::to_string(files.size()) + " artifacts byte-identical across reruns");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "ten-cell chain golden vectors", golden_vectors},
      {2, "scan parity law", parity_law},
      {3, "reset-and-scan with and without controller", reset_and_scan},
      {4, "scan-partition attack on XOR, keyless cones on EFF", scan_partition},
      {5, "correct-key equivalence for four schemes", equivalence_suite},
      {6, "strong flip-flop invariant and Table II report", selection_invariant},
      {7, "corruption confinement and hill climbing", corruption_confinement},
      {8, "area arithmetic", area_arithmetic},
      {9, "CLI determinism", cli_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " (" << fmt(seconds_since(t0))
              << " s)\n";
    for (const auto& d : o.details) std::cout << "    " << d << "\n";
    std::cout.flush();
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << "\n";
  return failed ? 1 : 0;
}
