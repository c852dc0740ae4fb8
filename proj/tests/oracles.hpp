// SPDX-License-Identifier: Apache-2.0
// Reference models written independently of the library internals. They are
// slow and simple; tests compare the library against them.
#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "fflock/bits.hpp"
#include "fflock/netlist.hpp"

namespace oracles {

using fflock::Bits;
using fflock::GateKind;
using fflock::Netlist;
using fflock::NodeId;

// Recursive memoized evaluation of one node. `memo` must already hold every
// input, key input and flip-flop by node id.
inline bool eval_node(const Netlist& n, NodeId id, std::unordered_map<NodeId, bool>& memo) {
  if (auto it = memo.find(id); it != memo.end()) return it->second;
  const auto& f = n.fanins(id);
  auto in = [&](std::size_t i) { return eval_node(n, f[i], memo); };
  bool v = false;
  switch (n.kind(id)) {
    case GateKind::And:
    case GateKind::Nand: {
      v = true;
      for (std::size_t i = 0; i < f.size(); ++i) v = v && in(i);
      if (n.kind(id) == GateKind::Nand) v = !v;
      break;
    }
    case GateKind::Or:
    case GateKind::Nor: {
      v = false;
      for (std::size_t i = 0; i < f.size(); ++i) v = v || in(i);
      if (n.kind(id) == GateKind::Nor) v = !v;
      break;
    }
    case GateKind::Xor:
    case GateKind::Xnor: {
      v = false;
      for (std::size_t i = 0; i < f.size(); ++i) v = v != in(i);
      if (n.kind(id) == GateKind::Xnor) v = !v;
      break;
    }
    case GateKind::Not: v = !in(0); break;
    case GateKind::Buf: v = in(0); break;
    case GateKind::Mux2: v = in(0) ? in(2) : in(1); break;
    case GateKind::Qbar: v = !in(0); break;
    default: throw std::logic_error("unassigned boundary node " + n.name_of(id));
  }
  memo[id] = v;
  return v;
}

// Cycle-level reference simulator with explicit pins.
class ReferenceSim {
 public:
  ReferenceSim(const Netlist& n, Bits key) : n_(n), key_(std::move(key)), state_(n.dffs().size(), false) {}

  void set_pin(const std::string& name, bool v) { pins_[n_.id(name)] = v; }
  void set_state(const std::vector<bool>& s) { state_ = s; }
  const std::vector<bool>& state() const { return state_; }

  std::unordered_map<NodeId, bool> frame(const Bits& functional_inputs) const {
    std::unordered_map<NodeId, bool> memo;
    for (NodeId i : n_.inputs()) memo[i] = false;
    for (auto [id, v] : pins_) memo[id] = v;
    const auto fin = n_.functional_inputs();
    for (std::size_t i = 0; i < fin.size(); ++i) memo[fin[i]] = functional_inputs[i] != 0;
    for (std::size_t i = 0; i < key_.size(); ++i) memo[n_.key_inputs()[i]] = key_[i] != 0;
    for (std::size_t i = 0; i < n_.dffs().size(); ++i) memo[n_.dffs()[i]] = state_[i];
    return memo;
  }

  Bits outputs(const Bits& inputs) const {
    auto memo = frame(inputs);
    Bits out;
    for (NodeId o : n_.functional_outputs()) out.push_back(eval_node(n_, o, memo));
    return out;
  }

  // Outputs before the edge, then clocks. With `reset` the design
  // flip-flops load 0.
  Bits step(const Bits& inputs, bool reset = false) {
    auto memo = frame(inputs);
    Bits out;
    for (NodeId o : n_.functional_outputs()) out.push_back(eval_node(n_, o, memo));
    std::vector<bool> next(state_.size());
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = eval_node(n_, n_.fanins(n_.dffs()[i])[0], memo);
    if (reset) {
      const auto design = n_.design_dffs();
      for (std::size_t i = 0; i < next.size(); ++i) {
        if (std::find(design.begin(), design.end(), n_.dffs()[i]) != design.end()) next[i] = false;
      }
    }
    state_ = next;
    return out;
  }

 private:
  const Netlist& n_;
  Bits key_;
  std::vector<bool> state_;
  std::unordered_map<NodeId, bool> pins_;
};

// Flip-flops `root` depends on, by reverse BFS over fanins. For a
// flip-flop root the walk starts at its D input. Flip-flops and Qbar taps
// are recorded; with `transitive` the walk continues through their D.
inline std::set<std::string> reachable_ffs(const Netlist& n, NodeId root, bool transitive) {
  std::set<std::string> out;
  std::vector<bool> seen(n.size(), false);
  std::deque<NodeId> q;
  auto push = [&](NodeId id) {
    if (!seen[id]) {
      seen[id] = true;
      q.push_back(id);
    }
  };
  push(n.kind(root) == GateKind::Dff ? n.fanins(root)[0] : root);
  while (!q.empty()) {
    NodeId id = q.front();
    q.pop_front();
    if (n.kind(id) == GateKind::Dff || n.kind(id) == GateKind::Qbar) {
      NodeId ff = n.kind(id) == GateKind::Qbar ? n.fanins(id)[0] : id;
      out.insert(n.name_of(ff));
      if (transitive) push(n.fanins(ff)[0]);
      continue;
    }
    for (NodeId f : n.fanins(id)) push(f);
  }
  return out;
}

// Combinational cycle check by Floyd-Warshall closure over gate edges.
inline bool has_combinational_cycle(const Netlist& n) {
  const std::size_t N = n.size();
  std::vector<std::vector<bool>> r(N, std::vector<bool>(N, false));
  for (NodeId i = 0; i < N; ++i) {
    if (n.kind(i) == GateKind::Dff) continue;
    for (NodeId f : n.fanins(i)) {
      if (n.kind(f) != GateKind::Dff) r[f][i] = true;
    }
  }
  for (std::size_t k = 0; k < N; ++k) {
    for (std::size_t i = 0; i < N; ++i) {
      if (!r[i][k]) continue;
      for (std::size_t j = 0; j < N; ++j) {
        if (r[k][j]) r[i][j] = true;
      }
    }
  }
  for (std::size_t i = 0; i < N; ++i) {
    if (r[i][i]) return true;
  }
  return false;
}

// Behavior of the reset-gated scan controller: after a reset the scan stays
// off until SE has been seen low on a clock edge.
struct ControllerModel {
  bool locked = false;
  // Returns whether the scan muxes select the chain during this cycle.
  bool cycle(bool rst, bool se) {
    const bool enabled = se && !locked;
    locked = rst || (locked && se);
    return enabled;
  }
};

// Bit-level scan chain: cell j passes cell ^ inv[j] onward.
struct ChainModel {
  std::vector<bool> cells;
  std::vector<bool> inv;
  bool shift(bool in) {
    const bool out = cells.back() != inv.back();
    for (std::size_t j = cells.size(); j-- > 1;) cells[j] = cells[j - 1] != inv[j - 1];
    cells[0] = in;
    return out;
  }
};

}  // namespace oracles
