// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fflock {

enum class GateKind : std::uint8_t {
  Input,
  KeyInput,
  And,
  Nand,
  Or,
  Nor,
  Xor,
  Xnor,
  Not,
  Buf,
  Mux2,  // fanins: select, in0, in1; output = select ? in1 : in0
  Dff,   // fanin: D; the node itself is the Q output
  Qbar,  // complement output of the Dff named by its single fanin
  Undefined,  // referenced but never declared
};

const char* to_string(GateKind kind);
bool is_logic_gate(GateKind kind);
// Inputs, key inputs and Dff/Qbar outputs: the points where cones are cut.
bool is_cone_boundary(GateKind kind);

using NodeId = std::uint32_t;

struct Node {
  std::string name;
  GateKind kind = GateKind::Undefined;
  std::vector<NodeId> fanins;
};

enum class LinkSource : std::uint8_t { Q, Qbar, KeyMux };

const char* to_string(LinkSource link);
std::optional<LinkSource> link_from_string(std::string_view text);

struct ScanPorts {
  std::string si = "scan_in";
  std::string so = "scan_out";
  std::string se = "scan_en";
  std::string rst = "scan_rst";

  bool operator==(const ScanPorts&) const = default;
};

struct ScanConfig {
  std::vector<std::string> chain;
  // links[i] is what chain[i] drives onward: into chain[i + 1], or into SO
  // for the last cell. KeyMux links pass through an Encrypt Flip-Flop mux.
  std::vector<LinkSource> links;
  bool controller = false;
  ScanPorts ports;
  // Net driving every scan-mux select: the SE port, or the controller's
  // XOR output when a controller is present.
  std::string select_net;
  // Controller internals; empty without a controller.
  std::string controller_ff;
  std::string reset_net;

  bool operator==(const ScanConfig&) const = default;
};

class Netlist {
 public:
  explicit Netlist(std::string name = {});

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  // Returns the id of `name`, creating an Undefined placeholder on first use.
  NodeId ref(std::string_view name);
  // Gives a placeholder its definition. Throws DuplicateDefinition if the
  // node is already defined.
  void define(NodeId id, GateKind kind, std::vector<NodeId> fanins, int line = 0);

  NodeId add_input(std::string_view name);
  NodeId add_key_input(std::string_view name);
  NodeId add_gate(std::string_view name, GateKind kind, std::vector<NodeId> fanins);
  NodeId add_dff(std::string_view name, NodeId d);
  NodeId add_qbar(std::string_view name, NodeId dff);
  void add_output(NodeId id);

  std::size_t size() const { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  const std::string& name_of(NodeId id) const { return nodes_.at(id).name; }
  GateKind kind(NodeId id) const { return nodes_.at(id).kind; }
  const std::vector<NodeId>& fanins(NodeId id) const { return nodes_.at(id).fanins; }
  std::optional<NodeId> find(std::string_view name) const;
  // Throws UnknownId.
  NodeId id(std::string_view name) const;

  const std::vector<NodeId>& inputs() const { return inputs_; }
  const std::vector<NodeId>& outputs() const { return outputs_; }
  const std::vector<NodeId>& dffs() const { return dffs_; }
  const std::vector<NodeId>& key_inputs() const { return keys_; }

  // Primary inputs/outputs minus scan and reset ports.
  std::vector<NodeId> functional_inputs() const;
  std::vector<NodeId> functional_outputs() const;
  // Dffs minus the scan controller's state flip-flop.
  std::vector<NodeId> design_dffs() const;

  // Logic gates only: ports, flip-flops and Qbar taps are not counted.
  std::size_t gate_count() const;

  std::optional<NodeId> qbar_of(NodeId dff) const;
  // Existing Qbar tap of `dff`, or a new one named after it.
  NodeId ensure_qbar(NodeId dff);

  std::vector<std::vector<NodeId>> fanouts() const;

  void set_fanin(NodeId id, std::size_t index, NodeId source);
  void rename(NodeId id, std::string_view new_name);
  // Points every fanin and primary-output reference to `from` at `to`,
  // skipping the nodes listed in `except`.
  void redirect_fanouts(NodeId from, NodeId to, std::span<const NodeId> except = {});
  std::string unique_name(std::string_view base) const;

  const std::optional<ScanConfig>& scan() const { return scan_; }
  void set_scan(std::optional<ScanConfig> scan) { scan_ = std::move(scan); }

 private:
  std::string name_;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, NodeId> by_name_;
  std::vector<NodeId> inputs_;
  std::vector<NodeId> outputs_;
  std::vector<NodeId> dffs_;
  std::vector<NodeId> keys_;
  std::optional<ScanConfig> scan_;
};

enum class DiagnosticKind {
  UndefinedSignal,
  CombinationalCycle,
  BadArity,
  BadQbar,
  DuplicateOutput,
  BadScanConfig,
};

const char* to_string(DiagnosticKind kind);

struct Diagnostic {
  DiagnosticKind kind;
  std::string id;
  std::string message;
};

// Empty iff every structural invariant holds.
std::vector<Diagnostic> validate(const Netlist& netlist);

// Name-based comparison of node kinds, fanins and port order. Returns a
// description of the first difference, or nullopt when isomorphic.
std::optional<std::string> difference(const Netlist& a, const Netlist& b);

// An Encrypt Flip-Flop key gate: a MUX2 whose select is a key input and whose
// data inputs are the Q and Qbar outputs of one flip-flop.
struct KeyMux {
  NodeId mux;
  NodeId dff;
  NodeId key;
  bool swapped;  // in0 = Qbar, in1 = Q
};

std::vector<KeyMux> find_key_muxes(const Netlist& netlist);

// Scan multiplexers in front of the chain flip-flops, in chain order.
std::vector<NodeId> scan_muxes(const Netlist& netlist);

}  // namespace fflock
