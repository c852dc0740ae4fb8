// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "fflock/netlist.hpp"

namespace fflock {

// Input cone of dependency. All id sets are sorted by node name.
//
// Traversal stops at primary inputs, key inputs and flip-flop outputs. An
// Encrypt Flip-Flop key mux counts as its flip-flop's output, so its key is
// not part of any cone it feeds. Scan muxes are followed through the
// functional input only.
struct Cone {
  NodeId root = 0;
  std::vector<NodeId> primary_inputs;
  std::vector<NodeId> flip_flops;
  std::vector<NodeId> key_inputs;
  std::size_t gate_count = 0;
};

// For a flip-flop root, the cone of its D input; for any other node, the
// cone of the node's value. A flip-flop whose D logic reads its own output
// lists itself in flip_flops. With `through_key_muxes` an EFF key mux is
// traversed like any gate, so its key joins the cone.
Cone icod(const Netlist& netlist, NodeId root, bool through_key_muxes = false);
// Cone of the value carried by `signal`, which may itself be a flip-flop.
Cone signal_cone(const Netlist& netlist, NodeId signal, bool through_key_muxes = false);

// Flip-flop dependency sets over the functional outputs and design
// flip-flops, as bitsets indexed by position in `dffs`.
struct DependencyGraph {
  std::vector<NodeId> outputs;
  std::vector<NodeId> dffs;
  std::vector<boost::dynamic_bitset<>> combinational;  // per output
  std::vector<boost::dynamic_bitset<>> transitive;     // per output, through D paths
  std::vector<boost::dynamic_bitset<>> d_inputs;       // per dff: dffs read by its D cone
};

DependencyGraph dependency_graph(const Netlist& netlist);

struct FanoutOutputs {
  std::vector<NodeId> combinational;
  std::vector<NodeId> transitive;
};

// Functional outputs that `ff` reaches, sorted by name.
FanoutOutputs fanout_outputs(const Netlist& netlist, NodeId ff);

enum class Affects { Transitive, Combinational };

struct SelectionOptions {
  Affects affects = Affects::Transitive;
  // Greedy growth stops before the overlap would shrink below this size.
  std::size_t floor = 1;
};

struct SelectionResult {
  std::vector<NodeId> affected_outputs;
  std::vector<NodeId> l_overlap;
  std::vector<NodeId> l_weak;
  std::vector<NodeId> l_strong;
  std::size_t total_outputs = 0;
  double coverage_pct = 0.0;
};

// Flip-flop selection: grows an output set O' with the largest shared
// flip-flop cone, then drops flip-flops that also reach an output outside O'.
// Throws NoCandidates when nothing survives.
SelectionResult select_flip_flops(const Netlist& netlist, const SelectionOptions& options = {});

// k flip-flops drawn from l_strong minus `exclude`, returned sorted by name.
std::vector<NodeId> pick_key_ffs(const Netlist& netlist, const SelectionResult& selection, std::size_t k,
                                 std::uint64_t seed, const std::vector<NodeId>& exclude = {});

// Sorts ids by node name.
void sort_by_name(const Netlist& netlist, std::vector<NodeId>& ids);
std::vector<std::string> names_of(const Netlist& netlist, const std::vector<NodeId>& ids);

}  // namespace fflock
