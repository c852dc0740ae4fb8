// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fflock/bits.hpp"
#include "fflock/netlist.hpp"

namespace fflock {

// Levelized, 64-lane bit-parallel form of a netlist. Every node owns one
// 64-bit word per evaluation; lane i of every word belongs to the same
// independent simulation.
class CompiledCircuit {
 public:
  explicit CompiledCircuit(const Netlist& netlist);

  std::size_t num_nodes() const { return kinds_.size(); }

  // Evaluates every logic gate and Qbar tap in topological order. Words of
  // inputs, key inputs and flip-flops are read as given.
  void evaluate(std::span<std::uint64_t> values) const;
  // Positions, in evaluation order, of the gates in the combinational fanin
  // of `target`; evaluate_ops runs only those.
  std::vector<std::uint32_t> cone_ops(NodeId target) const;
  void evaluate_ops(std::span<std::uint64_t> values, std::span<const std::uint32_t> ops) const;

  // Next-state words, one per entry of dffs(), honoring the reset net.
  void next_state(std::span<const std::uint64_t> values, std::uint64_t reset_lanes,
                  std::span<std::uint64_t> next) const;

  const std::vector<NodeId>& inputs() const { return inputs_; }
  const std::vector<NodeId>& functional_inputs() const { return functional_inputs_; }
  const std::vector<NodeId>& outputs() const { return outputs_; }
  const std::vector<NodeId>& functional_outputs() const { return functional_outputs_; }
  const std::vector<NodeId>& keys() const { return keys_; }
  const std::vector<NodeId>& dffs() const { return dffs_; }
  // D-input node of dffs()[i].
  NodeId dff_input(std::size_t i) const { return dff_inputs_[i]; }
  // Index into dffs() of each design flip-flop (controller excluded).
  const std::vector<std::size_t>& design_dffs() const { return design_dffs_; }
  // Index into dffs() of each scan cell, in chain order.
  const std::vector<std::size_t>& chain() const { return chain_; }

  bool has_scan() const { return se_.has_value(); }
  std::optional<NodeId> scan_in() const { return si_; }
  std::optional<NodeId> scan_enable() const { return se_; }
  std::optional<NodeId> scan_out() const { return so_; }
  std::optional<NodeId> scan_select() const { return select_; }
  std::optional<NodeId> reset_port() const { return rst_; }
  std::optional<NodeId> reset_net() const { return reset_net_; }
  std::optional<std::size_t> controller_dff() const { return controller_dff_; }

 private:
  void run_op(std::span<std::uint64_t> values, std::uint32_t index) const;

  struct Op {
    GateKind kind;
    NodeId out;
    std::uint32_t first;
    std::uint32_t count;
  };

  std::vector<GateKind> kinds_;
  std::vector<Op> ops_;
  std::vector<std::uint32_t> op_of_node_;
  std::vector<NodeId> fanin_pool_;
  std::vector<NodeId> inputs_, functional_inputs_, outputs_, functional_outputs_, keys_, dffs_, dff_inputs_;
  std::vector<std::size_t> design_dffs_, chain_;
  std::optional<NodeId> si_, se_, so_, select_, rst_, reset_net_;
  std::optional<std::size_t> controller_dff_;
};

struct CombResult {
  Bits outputs;     // one per netlist.outputs()
  Bits next_state;  // one per netlist.dffs()
};

// Single-vector combinational evaluation. `inputs` covers every primary input
// (scan ports included), `state` every flip-flop, `key` every key input.
CombResult eval_comb(const Netlist& netlist, const Bits& inputs, const Bits& state, const Bits& key);

struct ShiftResult {
  bool out = false;
  // False when the scan controller held the scan-mux selects at 0, in which
  // case the cells captured their functional next state instead.
  bool enabled = true;
};

// Cycle-accurate two-valued simulation of one circuit instance with a bound
// key. Before the first reset the flip-flops hold seeded pseudo-random values.
class Simulator {
 public:
  Simulator(const Netlist& netlist, Bits key, std::uint64_t powerup_seed = 1);
  Simulator(std::shared_ptr<const CompiledCircuit> circuit, Bits key, std::uint64_t powerup_seed = 1);

  const CompiledCircuit& circuit() const { return *circuit_; }

  // Pin access. Inputs are the functional primary inputs.
  void set_inputs(const Bits& inputs);
  void set_scan_enable(bool on) { se_ = on; }
  void set_scan_in(bool bit) { si_ = bit; }
  void set_reset(bool on) { rst_ = on; }
  Bits outputs();
  bool scan_out_value();
  // Effective scan-mux select under the current pins and state.
  bool scan_select_value();
  void clock();

  // Functional cycle with SE=0: applies `inputs`, returns the outputs seen
  // before the clock edge, then clocks.
  Bits step(const Bits& inputs);
  // One scan cycle with SE=1. `out` is the SO value before the edge.
  ShiftResult scan_shift(bool in);
  // Shifts `vector` in, element 0 first.
  void scan_load(const Bits& vector);
  // Shifts |chain| bits out (feeding zeros in); element 0 is observed first.
  Bits scan_unload();
  // One clock cycle with RST=1; SE is left as set.
  void global_reset();

  Bits state() const;  // design flip-flops, netlist order
  void set_state(const Bits& state);
  Bits chain_values() const;  // scan cells, chain order

 private:
  void evaluate();

  std::shared_ptr<const CompiledCircuit> circuit_;
  Bits key_;
  std::vector<std::uint64_t> values_;
  std::vector<std::uint64_t> state_;
  Bits inputs_;
  bool se_ = false;
  bool si_ = false;
  bool rst_ = false;
};

// Primary-output words of a batch of multi-cycle patterns. Pattern p lives in
// lane p % 64 of batch p / 64; unused lanes of a partial batch are zero.
class PoTrace {
 public:
  PoTrace() = default;
  PoTrace(std::size_t patterns, std::size_t cycles, std::size_t width);

  std::size_t patterns() const { return patterns_; }
  std::size_t cycles() const { return cycles_; }
  std::size_t width() const { return width_; }
  std::size_t batches() const { return (patterns_ + 63) / 64; }

  std::uint64_t& word(std::size_t batch, std::size_t cycle, std::size_t output) {
    return words_[(batch * cycles_ + cycle) * width_ + output];
  }
  std::uint64_t word(std::size_t batch, std::size_t cycle, std::size_t output) const {
    return words_[(batch * cycles_ + cycle) * width_ + output];
  }
  bool at(std::size_t pattern, std::size_t cycle, std::size_t output) const {
    return (word(pattern / 64, cycle, output) >> (pattern % 64)) & 1U;
  }
  Bits row(std::size_t pattern, std::size_t cycle) const;

  bool operator==(const PoTrace&) const = default;

 private:
  std::size_t patterns_ = 0, cycles_ = 0, width_ = 0;
  std::vector<std::uint64_t> words_;
};

// Input stimulus for run_patterns: one word per (batch, cycle, functional
// input), drawn from a generator seeded with `seed`. Depends only on the
// seed and the three counts, so circuits with the same functional inputs see
// identical patterns.
std::vector<std::uint64_t> pattern_words(std::size_t patterns, std::size_t cycles, std::size_t inputs,
                                         std::uint64_t seed);

// Simulates `patterns` independent random input sequences of `cycles` cycles,
// each from the all-zero (reset) state with SE=0. Records functional outputs.
// Extracts the input vector of one pattern and cycle from pattern_words.
Bits pattern_inputs(std::span<const std::uint64_t> words, std::size_t cycles, std::size_t inputs,
                    std::size_t pattern, std::size_t cycle);

// run_patterns over explicit stimulus words laid out as in pattern_words.
PoTrace run_stimulus(const CompiledCircuit& circuit, const Bits& key, std::span<const std::uint64_t> words,
                     std::size_t patterns, std::size_t cycles);

PoTrace run_patterns(const CompiledCircuit& circuit, const Bits& key, std::size_t patterns, std::size_t cycles,
                     std::uint64_t seed);
PoTrace run_patterns(const Netlist& netlist, const Bits& key, std::size_t patterns, std::size_t cycles,
                     std::uint64_t seed);

std::string trace_csv(const PoTrace& trace);

// The activated chip: a hidden key behind pin-level access. Every pin
// interaction counts as one query; scan shifts are also counted separately.
class Oracle {
 public:
  Oracle(const Netlist& netlist, Bits key, std::uint64_t powerup_seed = 7);

  void set_inputs(const Bits& inputs);
  Bits read_outputs();
  void clock();
  void set_scan_enable(bool on);
  bool shift(bool scan_in);
  void pulse_reset();

  // Convenience sequences built from the pin operations above.
  Bits step(const Bits& inputs);  // SE=0, apply, read, clock
  void scan_load(const Bits& vector);
  Bits scan_unload();

  std::uint64_t queries() const { return queries_; }
  std::uint64_t scan_shifts() const { return shifts_; }
  std::size_t num_inputs() const;
  std::size_t num_outputs() const;
  std::size_t chain_length() const;

 private:
  Simulator sim_;
  std::uint64_t queries_ = 0;
  std::uint64_t shifts_ = 0;
};

}  // namespace fflock
