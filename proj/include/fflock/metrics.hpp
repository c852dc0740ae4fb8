// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fflock/bits.hpp"
#include "fflock/encrypt.hpp"
#include "fflock/netlist.hpp"

namespace fflock {

// Cell areas in library units. The default table holds the five 2-input
// cells XOR2, XNOR2, MUX2, AND2 and NAND2.
class CellAreaTable {
 public:
  static CellAreaTable standard();

  // Throws InvalidArgument unless area > 0.
  void set(const std::string& cell, double area);
  // Throws MissingCell.
  double at(const std::string& cell) const;
  bool contains(const std::string& cell) const { return cells_.count(cell) != 0; }
  const std::map<std::string, double>& cells() const { return cells_; }

 private:
  std::map<std::string, double> cells_;
};

struct AreaReport {
  std::string scheme;
  std::size_t key_bits = 0;
  std::size_t block_inputs = 0;  // N for Anti-SAT
  double key_gate_area = 0;
  double block_area = 0;       // SARLock / Anti-SAT point-function block
  double controller_area = 0;  // EFF scan controller, DFF excluded
  double controller_dff_area = 0;
  double total_extra = 0;
  std::optional<double> base_area;
  std::optional<double> overhead_pct;
  std::vector<std::string> notes;
};

// Schemes: eff, xor, mux, oc, sarlock, antisat. `block_inputs` is Anti-SAT's
// N. Wide AND/NAND gates are costed as trees of 2-input cells. The
// controller's OR gate uses the AND2 cost.
AreaReport area_estimate(const std::string& scheme, std::size_t key_bits, std::size_t block_inputs,
                         std::optional<double> base_area, const CellAreaTable& table, double dff_area = 0);

// Area of the original netlist from the table, for overhead percentages:
// 2-input cells priced directly, n-input AND/NAND/OR/NOR/XOR/XNOR as trees,
// NOT/BUF/DFF only when the table has them. Throws MissingCell otherwise.
double netlist_area(const Netlist& netlist, const CellAreaTable& table);

struct Complexity {
  std::size_t brute_inputs = 0;  // M
  std::size_t brute_keys = 0;    // K
  std::size_t brute_exponent = 0;
  // Worst flip-flop cone: most keys, then most primary inputs.
  std::optional<NodeId> worst_ff;
  std::size_t cone_inputs = 0;  // M1
  std::size_t cone_keys = 0;    // K1
  // M1 + K1; empty when no flip-flop cone holds a key.
  std::optional<std::size_t> scan_exponent;
};

Complexity attack_complexity(const Netlist& encrypted);

struct CorruptionOptions {
  std::vector<double> grid;  // wrong-key fractions in percent; empty means 5,10,...,100
  std::size_t patterns = 1000;
  std::size_t cycles = 4;
  std::uint64_t seed = 1;
  bool restrict_to_affected = true;
};

struct CorruptionPoint {
  double wrong_pct = 0;
  std::size_t wrong_bits = 0;
  std::vector<double> hd_pct;  // per pattern, over the observed outputs
  double mean_hd_pct = 0;
  double min_hd_pct = 0;
  double max_hd_pct = 0;
  // Differing bits on functional outputs outside the observed set.
  std::uint64_t outside_hd_bits = 0;
};

struct CorruptionCurve {
  std::vector<NodeId> observed_outputs;
  std::vector<CorruptionPoint> points;
};

std::vector<double> default_grid();

// Per grid point, flips ceil(pct * K / 100) random key bits and compares the
// wrong-key and correct-key output traces pattern by pattern.
CorruptionCurve output_corruption(const Netlist& encrypted, const Bits& correct_key,
                                  const std::vector<NodeId>& affected_outputs, const CorruptionOptions& options);

std::string corruption_csv(const Netlist& encrypted, const CorruptionCurve& curve);

struct KeySample {
  std::size_t wrong_bits = 0;
  double mean_hd_pct = 0;  // over the observed outputs
  std::uint64_t outside_hd_bits = 0;
};

// One sample per random wrong key; the number of wrong bits is uniform in
// [1, K].
std::vector<KeySample> corruption_samples(const Netlist& encrypted, const Bits& correct_key,
                                          const std::vector<NodeId>& affected_outputs, std::size_t keys,
                                          std::size_t patterns, std::size_t cycles, std::uint64_t seed);

// Pearson correlation; 0 when either variance is zero.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

struct SchemeCorruption {
  Scheme scheme = Scheme::Xor;
  std::size_t key_bits = 0;
  std::size_t observed_outputs = 0;
  double mean_hd_pct = 0;      // observed outputs: O' for EFF, all for the rest
  double mean_hd_all_pct = 0;  // every functional output
};

// Encrypts `netlist` with each scheme (EFF draws its flip-flops from the
// selection), applies the all-wrong key and averages HD% over patterns. All
// schemes share the pattern seed.
std::vector<SchemeCorruption> avg_corruption_compare(const Netlist& netlist, const std::vector<Scheme>& schemes,
                                                     std::size_t key_bits, std::uint64_t seed,
                                                     std::size_t patterns = 1000, std::size_t cycles = 4);

std::string avg_corruption_csv(const std::vector<SchemeCorruption>& rows);

}  // namespace fflock
