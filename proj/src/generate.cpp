// SPDX-License-Identifier: Apache-2.0
#include "fflock/generate.hpp"

#include <algorithm>

#include "fflock/bits.hpp"
#include "fflock/error.hpp"

namespace fflock {

namespace {

std::size_t share(std::size_t total, std::size_t blocks, std::size_t b) {
  return total / blocks + (b < total % blocks ? 1 : 0);
}

GateKind random_kind(Rng& rng) {
  static constexpr GateKind kinds[] = {GateKind::And, GateKind::Nand, GateKind::Or,
                                       GateKind::Nor, GateKind::Nand, GateKind::Nor,
                                       GateKind::Xor, GateKind::Not};
  return kinds[rng.below(std::size(kinds))];
}

class Builder {
 public:
  Builder(Netlist& n, Rng& rng) : n_(n), rng_(rng) {}

  void add_source(NodeId id) { signals_.push_back(id), uses_.push_back(0); }

  NodeId pick(bool prefer_unused) {
    if (prefer_unused) {
      std::vector<std::size_t> idle;
      for (std::size_t i = 0; i < signals_.size(); ++i) {
        if (uses_[i] == 0) idle.push_back(i);
      }
      if (!idle.empty()) return take(idle[rng_.below(idle.size())]);
    }
    return take(rng_.below(signals_.size()));
  }

  NodeId add_gate(std::size_t index) {
    GateKind kind = random_kind(rng_);
    std::size_t arity = kind == GateKind::Not ? 1 : (rng_.below(5) == 0 ? 3 : 2);
    arity = std::min(arity, signals_.size());
    if (arity < 2 && kind != GateKind::Not) kind = GateKind::Not;
    std::vector<NodeId> fanins;
    for (int attempt = 0; fanins.size() < arity && attempt < 16; ++attempt) {
      NodeId f = pick(rng_.below(10) < 6);
      if (std::find(fanins.begin(), fanins.end(), f) == fanins.end()) {
        fanins.push_back(f);
      } else {
        release(f);
      }
    }
    if (fanins.size() == 1 && kind != GateKind::Not) kind = GateKind::Not;
    NodeId id = n_.add_gate("n" + std::to_string(index), kind, fanins);
    add_source(id);
    return id;
  }

  std::vector<NodeId> unused() const {
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < signals_.size(); ++i) {
      if (uses_[i] == 0) out.push_back(signals_[i]);
    }
    return out;
  }

  NodeId pick_gate(bool prefer_unused) {
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < signals_.size(); ++i) {
      if (is_logic_gate(n_.kind(signals_[i])) && (!prefer_unused || uses_[i] == 0)) pool.push_back(i);
    }
    if (pool.empty()) return pick_gate(false);
    return take(pool[rng_.below(pool.size())]);
  }

  void mark_used(NodeId id) {
    for (std::size_t i = 0; i < signals_.size(); ++i) {
      if (signals_[i] == id) ++uses_[i];
    }
  }

 private:
  NodeId take(std::size_t i) {
    ++uses_[i];
    return signals_[i];
  }
  void release(NodeId id) {
    for (std::size_t i = 0; i < signals_.size(); ++i) {
      if (signals_[i] == id) {
        --uses_[i];
        return;
      }
    }
  }

  Netlist& n_;
  Rng& rng_;
  std::vector<NodeId> signals_;
  std::vector<std::size_t> uses_;
};

}  // namespace

Netlist generate_circuit(const GeneratorSpec& spec) {
  if (spec.blocks == 0 || spec.inputs < spec.blocks || spec.outputs < spec.blocks || spec.gates < 2 * spec.blocks) {
    throw Error(ErrorKind::InvalidArgument, "generator needs at least one input, output and two gates per block");
  }
  Netlist n(spec.name);
  Rng rng(spec.seed);
  std::size_t next_input = 0, next_dff = 0, next_gate = 0;
  std::vector<NodeId> outputs;
  for (std::size_t b = 0; b < spec.blocks; ++b) {
    Builder builder(n, rng);
    for (std::size_t i = share(spec.inputs, spec.blocks, b); i > 0; --i) {
      builder.add_source(n.add_input("I" + std::to_string(next_input++)));
    }
    std::vector<NodeId> ffs;
    for (std::size_t i = share(spec.dffs, spec.blocks, b); i > 0; --i) {
      NodeId ff = n.ref("F" + std::to_string(next_dff++));
      ffs.push_back(ff);
      builder.add_source(ff);
    }
    for (std::size_t i = share(spec.gates, spec.blocks, b); i > 0; --i) builder.add_gate(next_gate++);

    // Sinks: each flip-flop D and each output takes a gate, idle ones first.
    for (NodeId ff : ffs) n.define(ff, GateKind::Dff, {builder.pick_gate(true)});
    std::vector<NodeId> block_outputs;
    for (std::size_t i = share(spec.outputs, spec.blocks, b); i > 0; --i) {
      NodeId o = builder.pick_gate(true);
      if (std::find(block_outputs.begin(), block_outputs.end(), o) != block_outputs.end()) {
        o = builder.add_gate(next_gate++);
        builder.mark_used(o);
      }
      block_outputs.push_back(o);
    }
    // Fold any signal that still drives nothing into a flip-flop D input.
    for (NodeId idle : builder.unused()) {
      if (ffs.empty()) {
        block_outputs.push_back(idle);
        continue;
      }
      NodeId ff = ffs[rng.below(ffs.size())];
      NodeId d = n.fanins(ff)[0];
      NodeId merged = n.add_gate("n" + std::to_string(next_gate++), GateKind::Xor, {d, idle});
      n.set_fanin(ff, 0, merged);
    }
    outputs.insert(outputs.end(), block_outputs.begin(), block_outputs.end());
  }
  for (NodeId o : outputs) n.add_output(o);
  return n;
}

GeneratorSpec s298_like(std::uint64_t seed) {
  return {"s298_like", 3, 6, 14, 119, 1, seed};
}

GeneratorSpec s344_like(std::uint64_t seed) {
  return {"s344_like", 9, 11, 15, 160, 1, seed};
}

}  // namespace fflock
