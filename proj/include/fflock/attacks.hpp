// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fflock/bits.hpp"
#include "fflock/netlist.hpp"
#include "fflock/sim.hpp"

namespace fflock {

enum class AttackStatus : std::uint8_t {
  Success,       // every key bit recovered or fixed to a validated alias
  Partial,       // some bits recovered, others unknown
  NoKeys,        // netlist carries no key inputs
  KeylessCones,  // no flip-flop input cone holds a key gate
  Infeasible,    // every keyed cone exceeds the exponent budget
  Blocked,       // the scan controller suppressed the scan
  Failed,
};

enum class BitStatus : std::uint8_t {
  Recovered,
  Alias,  // one member of a class of keys the observations cannot tell apart
  Unknown,
};

const char* to_string(AttackStatus status);
const char* to_string(BitStatus status);

struct AttackReport {
  std::string method;
  std::string scheme;  // detect_scheme of the attacked netlist
  AttackStatus status = AttackStatus::Failed;
  Bits key;  // unknown bits hold 0
  std::vector<BitStatus> bit_status;
  std::uint64_t queries = 0;
  std::uint64_t scan_shifts = 0;
  std::size_t brute_exponent = 0;               // M + K
  std::optional<std::size_t> scan_exponent;     // M1 + K1
  bool validated = false;
  std::string note;
  double wall_ms = 0;

  std::size_t count(BitStatus s) const;
};

// "none", "eff", "xor", "mux", "oc" or "mixed", from the key-gate structure.
std::string detect_scheme(const Netlist& encrypted);

struct ScanAttackOptions {
  std::size_t experiments = 64;  // scan experiments per round
  std::size_t max_rounds = 4;
  // A cone is attacked only if its primary inputs plus unknown keys stay
  // within this exponent.
  std::size_t budget_exp = 24;
  std::size_t validation_experiments = 1000;
  std::uint64_t seed = 1;
};

// Loads random states through the scan chain, runs one functional cycle,
// unloads the captured state and brute-forces each flip-flop cone's keys,
// fewest keys first. Keys outside every flip-flop cone are then attacked
// through the output cones.
AttackReport scan_partition_attack(const Netlist& encrypted, Oracle& oracle, const ScanAttackOptions& options = {});

struct LogicConeOptions {
  std::size_t patterns = 64;
  std::size_t budget_exp = 24;
  std::size_t validation_patterns = 1000;
  std::uint64_t seed = 1;
};

// Functional access only: brute-forces the keys of output cones that are
// purely combinational in the primary inputs. Cones reading a flip-flop are
// out of reach without state control.
AttackReport logic_cone_attack(const Netlist& encrypted, Oracle& oracle, const LogicConeOptions& options = {});

// Global reset, then exactly |chain| scan shifts. Each inversion in the
// unloaded all-zero state is matched to a Qbar link or an EFF key bit.
AttackReport reset_and_scan_attack(const Netlist& encrypted, Oracle& oracle);

struct ParityResult {
  AttackStatus status = AttackStatus::Failed;
  Bits loaded;
  Bits unloaded;
  bool total_odd = false;
  std::size_t structural_inversions = 0;  // Qbar links and swapped key muxes
  bool key_ones_odd = false;
  std::size_t entropy_bits_removed = 0;
  std::uint64_t queries = 0;
};

// Loads a random vector and unloads it straight back: the unload equals the
// load or its complement depending on the parity of in-chain inversions.
ParityResult parity_probe(const Netlist& encrypted, Oracle& oracle, std::uint64_t seed = 1);

struct HillClimbOptions {
  std::size_t max_iters = 10000;
  std::size_t patterns = 256;
  std::size_t cycles = 8;
  std::uint64_t seed = 1;
  std::optional<Bits> start_key;
  std::size_t validation_patterns = 1000;
};

struct HillClimbResult {
  AttackReport report;
  std::vector<double> hd_trace;   // HD% of the current key, one entry per iteration
  std::vector<Bits> key_trace;    // current key, one entry per iteration
  std::size_t iterations = 0;     // accepted flips
  bool reached_zero = false;
};

// Greedy single-bit flips on the Hamming distance between the oracle's and
// the candidate's output traces over a fixed pattern batch. Stops at the
// first iteration without improvement.
HillClimbResult hill_climbing_attack(const Netlist& encrypted, Oracle& oracle, const HillClimbOptions& options = {});

// Encrypted flip-flops that an attacker can sensitize: those whose D cone
// reads only primary inputs, and the first cell of the scan chain.
std::vector<NodeId> sensitization_vulnerable_ffs(const Netlist& encrypted);

// Design flip-flops whose D cone reads only primary inputs.
std::vector<NodeId> pi_controllable_ffs(const Netlist& netlist);

enum class Verdict : std::uint8_t { Resilient, Broken, NotApplicable, NoKeys };
const char* to_string(Verdict v);

struct SuiteOptions {
  std::uint64_t seed = 1;
  ScanAttackOptions scan;
  LogicConeOptions logic;
  HillClimbOptions hill;
};

struct SuiteReport {
  std::string scheme;
  std::vector<AttackReport> attacks;
  std::optional<ParityResult> parity;
  std::vector<NodeId> sensitization_vulnerable;
  // Resilience columns.
  Verdict path_sensitization = Verdict::NotApplicable;
  Verdict logic_cone = Verdict::NotApplicable;
  Verdict hill_climbing = Verdict::NotApplicable;
  Verdict sat = Verdict::NotApplicable;
  Verdict scan_based = Verdict::NotApplicable;
  // Bits each attack got right, summed over attacks.
  std::size_t correct_bits_recovered = 0;
};

// Runs every applicable attack against a fresh oracle holding `key`.
SuiteReport attack_suite(const Netlist& encrypted, const Bits& key, const SuiteOptions& options = {});

}  // namespace fflock
