// SPDX-License-Identifier: Apache-2.0
#include "fflock/netlist.hpp"

#include <algorithm>
#include <set>

#include "fflock/error.hpp"

namespace fflock {

const char* to_string(GateKind kind) {
  switch (kind) {
    case GateKind::Input: return "INPUT";
    case GateKind::KeyInput: return "KEYINPUT";
    case GateKind::And: return "AND";
    case GateKind::Nand: return "NAND";
    case GateKind::Or: return "OR";
    case GateKind::Nor: return "NOR";
    case GateKind::Xor: return "XOR";
    case GateKind::Xnor: return "XNOR";
    case GateKind::Not: return "NOT";
    case GateKind::Buf: return "BUF";
    case GateKind::Mux2: return "MUX";
    case GateKind::Dff: return "DFF";
    case GateKind::Qbar: return "QBAR";
    case GateKind::Undefined: return "UNDEFINED";
  }
  return "?";
}

bool is_logic_gate(GateKind kind) {
  switch (kind) {
    case GateKind::And:
    case GateKind::Nand:
    case GateKind::Or:
    case GateKind::Nor:
    case GateKind::Xor:
    case GateKind::Xnor:
    case GateKind::Not:
    case GateKind::Buf:
    case GateKind::Mux2: return true;
    default: return false;
  }
}

bool is_cone_boundary(GateKind kind) {
  return kind == GateKind::Input || kind == GateKind::KeyInput || kind == GateKind::Dff ||
         kind == GateKind::Qbar;
}

const char* to_string(LinkSource link) {
  switch (link) {
    case LinkSource::Q: return "q";
    case LinkSource::Qbar: return "qbar";
    case LinkSource::KeyMux: return "keymux";
  }
  return "?";
}

std::optional<LinkSource> link_from_string(std::string_view text) {
  if (text == "q") return LinkSource::Q;
  if (text == "qbar") return LinkSource::Qbar;
  if (text == "keymux") return LinkSource::KeyMux;
  return std::nullopt;
}

const char* to_string(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::UndefinedSignal: return "UndefinedSignal";
    case DiagnosticKind::CombinationalCycle: return "CombinationalCycle";
    case DiagnosticKind::BadArity: return "BadArity";
    case DiagnosticKind::BadQbar: return "BadQbar";
    case DiagnosticKind::DuplicateOutput: return "DuplicateOutput";
    case DiagnosticKind::BadScanConfig: return "BadScanConfig";
  }
  return "?";
}

Netlist::Netlist(std::string name) : name_(std::move(name)) {}

NodeId Netlist::ref(std::string_view name) {
  if (auto it = by_name_.find(std::string(name)); it != by_name_.end()) return it->second;
  auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(Node{std::string(name), GateKind::Undefined, {}});
  by_name_.emplace(std::string(name), id);
  return id;
}

void Netlist::define(NodeId id, GateKind kind, std::vector<NodeId> fanins, int line) {
  Node& n = nodes_.at(id);
  if (n.kind != GateKind::Undefined) {
    throw Error(ErrorKind::DuplicateDefinition, "duplicate definition of '" + n.name + "'", line);
  }
  n.kind = kind;
  n.fanins = std::move(fanins);
  switch (kind) {
    case GateKind::Input: inputs_.push_back(id); break;
    case GateKind::KeyInput: keys_.push_back(id); break;
    case GateKind::Dff: dffs_.push_back(id); break;
    default: break;
  }
}

NodeId Netlist::add_input(std::string_view name) {
  NodeId id = ref(name);
  define(id, GateKind::Input, {});
  return id;
}

NodeId Netlist::add_key_input(std::string_view name) {
  NodeId id = ref(name);
  define(id, GateKind::KeyInput, {});
  return id;
}

NodeId Netlist::add_gate(std::string_view name, GateKind kind, std::vector<NodeId> fanins) {
  NodeId id = ref(name);
  define(id, kind, std::move(fanins));
  return id;
}

NodeId Netlist::add_dff(std::string_view name, NodeId d) { return add_gate(name, GateKind::Dff, {d}); }

NodeId Netlist::add_qbar(std::string_view name, NodeId dff) {
  return add_gate(name, GateKind::Qbar, {dff});
}

void Netlist::add_output(NodeId id) {
  (void)nodes_.at(id);
  outputs_.push_back(id);
}

std::optional<NodeId> Netlist::find(std::string_view name) const {
  if (auto it = by_name_.find(std::string(name)); it != by_name_.end()) return it->second;
  return std::nullopt;
}

NodeId Netlist::id(std::string_view name) const {
  if (auto found = find(name)) return *found;
  throw Error(ErrorKind::UnknownId, "unknown signal '" + std::string(name) + "'");
}

std::vector<NodeId> Netlist::functional_inputs() const {
  if (!scan_) return inputs_;
  std::vector<NodeId> out;
  for (NodeId id : inputs_) {
    const auto& nm = nodes_[id].name;
    if (nm == scan_->ports.si || nm == scan_->ports.se || nm == scan_->ports.rst) continue;
    out.push_back(id);
  }
  return out;
}

std::vector<NodeId> Netlist::functional_outputs() const {
  if (!scan_) return outputs_;
  std::vector<NodeId> out;
  for (NodeId id : outputs_) {
    if (nodes_[id].name == scan_->ports.so) continue;
    out.push_back(id);
  }
  return out;
}

std::vector<NodeId> Netlist::design_dffs() const {
  if (!scan_ || scan_->controller_ff.empty()) return dffs_;
  std::vector<NodeId> out;
  for (NodeId id : dffs_) {
    if (nodes_[id].name != scan_->controller_ff) out.push_back(id);
  }
  return out;
}

std::size_t Netlist::gate_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return is_logic_gate(n.kind); }));
}

std::optional<NodeId> Netlist::qbar_of(NodeId dff) const {
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].kind == GateKind::Qbar && nodes_[i].fanins.size() == 1 && nodes_[i].fanins[0] == dff) {
      return i;
    }
  }
  return std::nullopt;
}

NodeId Netlist::ensure_qbar(NodeId dff) {
  if (kind(dff) != GateKind::Dff) {
    throw Error(ErrorKind::InvalidArgument, "'" + name_of(dff) + "' is not a flip-flop");
  }
  if (auto q = qbar_of(dff)) return *q;
  return add_qbar(unique_name(name_of(dff) + "_qn"), dff);
}

std::vector<std::vector<NodeId>> Netlist::fanouts() const {
  std::vector<std::vector<NodeId>> out(nodes_.size());
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    for (NodeId f : nodes_[i].fanins) out[f].push_back(i);
  }
  return out;
}

void Netlist::set_fanin(NodeId id, std::size_t index, NodeId source) {
  nodes_.at(id).fanins.at(index) = source;
}

void Netlist::rename(NodeId id, std::string_view new_name) {
  std::string nm(new_name);
  if (by_name_.contains(nm)) {
    throw Error(ErrorKind::DuplicateDefinition, "name '" + nm + "' already in use");
  }
  by_name_.erase(nodes_.at(id).name);
  nodes_[id].name = nm;
  by_name_.emplace(std::move(nm), id);
}

void Netlist::redirect_fanouts(NodeId from, NodeId to, std::span<const NodeId> except) {
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    if (i == to || std::find(except.begin(), except.end(), i) != except.end()) continue;
    for (auto& f : nodes_[i].fanins) {
      if (f == from) f = to;
    }
  }
  for (auto& o : outputs_) {
    if (o == from) o = to;
  }
}

std::string Netlist::unique_name(std::string_view base) const {
  std::string candidate(base);
  for (int suffix = 1; by_name_.contains(candidate); ++suffix) {
    candidate = std::string(base) + "_" + std::to_string(suffix);
  }
  return candidate;
}

namespace {

bool arity_ok(GateKind kind, std::size_t n) {
  switch (kind) {
    case GateKind::Input:
    case GateKind::KeyInput:
    case GateKind::Undefined: return n == 0;
    case GateKind::Mux2: return n == 3;
    case GateKind::Not:
    case GateKind::Buf:
    case GateKind::Dff:
    case GateKind::Qbar: return n == 1;
    default: return n >= 2;
  }
}

// Names of nodes that lie on a combinational cycle, found as back-edge targets
// of an iterative DFS over fanin edges; flip-flop outputs are cut.
std::vector<std::string> cycle_nodes(const Netlist& n) {
  enum : std::uint8_t { White, Grey, Black };
  std::vector<std::uint8_t> color(n.size(), White);
  std::set<std::string> found;
  std::vector<std::pair<NodeId, std::size_t>> stack;
  auto cut = [&](NodeId id) { return n.kind(id) == GateKind::Dff || n.kind(id) == GateKind::Qbar; };
  for (NodeId root = 0; root < n.size(); ++root) {
    if (color[root] != White) continue;
    stack.emplace_back(root, 0);
    color[root] = Grey;
    while (!stack.empty()) {
      auto& [id, next] = stack.back();
      const auto& fi = n.fanins(id);
      if (cut(id) || next >= fi.size()) {
        color[id] = Black;
        stack.pop_back();
        continue;
      }
      NodeId child = fi[next++];
      if (color[child] == Grey) {
        found.insert(n.name_of(child));
      } else if (color[child] == White) {
        color[child] = Grey;
        stack.emplace_back(child, 0);
      }
    }
  }
  return {found.begin(), found.end()};
}

}  // namespace

std::vector<Diagnostic> validate(const Netlist& n) {
  std::vector<Diagnostic> out;
  for (NodeId i = 0; i < n.size(); ++i) {
    const Node& node = n.node(i);
    if (node.kind == GateKind::Undefined) {
      out.push_back({DiagnosticKind::UndefinedSignal, node.name, "signal '" + node.name + "' is never defined"});
      continue;
    }
    if (!arity_ok(node.kind, node.fanins.size())) {
      out.push_back({DiagnosticKind::BadArity, node.name,
                     std::string(to_string(node.kind)) + " '" + node.name + "' has " +
                         std::to_string(node.fanins.size()) + " fanins"});
    }
    if (node.kind == GateKind::Qbar && node.fanins.size() == 1 && n.kind(node.fanins[0]) != GateKind::Dff) {
      out.push_back({DiagnosticKind::BadQbar, node.name, "QBAR '" + node.name + "' does not tap a flip-flop"});
    }
  }
  for (const auto& name : cycle_nodes(n)) {
    out.push_back({DiagnosticKind::CombinationalCycle, name, "combinational cycle through '" + name + "'"});
  }
  std::set<NodeId> seen;
  for (NodeId o : n.outputs()) {
    if (!seen.insert(o).second) {
      out.push_back({DiagnosticKind::DuplicateOutput, n.name_of(o), "output '" + n.name_of(o) + "' listed twice"});
    }
  }
  if (const auto& sc = n.scan()) {
    auto bad = [&](const std::string& id, const std::string& what) {
      out.push_back({DiagnosticKind::BadScanConfig, id, what});
    };
    if (sc->links.size() != sc->chain.size()) bad(n.name(), "scan link count differs from chain length");
    std::set<std::string> members;
    for (const auto& ff : sc->chain) {
      auto id = n.find(ff);
      if (!id || n.kind(*id) != GateKind::Dff) bad(ff, "scan cell '" + ff + "' is not a flip-flop");
      if (!members.insert(ff).second) bad(ff, "scan cell '" + ff + "' appears twice");
    }
    for (const auto* port : {&sc->ports.si, &sc->ports.se}) {
      auto id = n.find(*port);
      if (!id || n.kind(*id) != GateKind::Input) bad(*port, "scan port '" + *port + "' is not an input");
    }
    if (!n.find(sc->ports.so)) bad(sc->ports.so, "scan-out port '" + sc->ports.so + "' missing");
    if (!sc->select_net.empty() && !n.find(sc->select_net)) bad(sc->select_net, "scan select net missing");
    if (sc->controller && (!n.find(sc->controller_ff) || !n.find(sc->reset_net))) {
      bad(n.name(), "scan controller nets missing");
    }
  }
  return out;
}

std::optional<std::string> difference(const Netlist& a, const Netlist& b) {
  auto names = [](const Netlist& n, const std::vector<NodeId>& ids) {
    std::vector<std::string> out;
    for (NodeId id : ids) out.push_back(n.name_of(id));
    return out;
  };
  if (names(a, a.inputs()) != names(b, b.inputs())) return "primary inputs differ";
  if (names(a, a.outputs()) != names(b, b.outputs())) return "primary outputs differ";
  if (names(a, a.dffs()) != names(b, b.dffs())) return "flip-flops differ";
  if (names(a, a.key_inputs()) != names(b, b.key_inputs())) return "key inputs differ";
  if (a.size() != b.size()) {
    return "node count " + std::to_string(a.size()) + " vs " + std::to_string(b.size());
  }
  for (NodeId i = 0; i < a.size(); ++i) {
    const Node& na = a.node(i);
    auto j = b.find(na.name);
    if (!j) return "node '" + na.name + "' missing";
    const Node& nb = b.node(*j);
    if (na.kind != nb.kind) return "node '" + na.name + "' kind differs";
    if (names(a, na.fanins) != names(b, nb.fanins)) return "node '" + na.name + "' fanins differ";
  }
  if (a.scan() != b.scan()) return "scan configuration differs";
  return std::nullopt;
}

std::vector<KeyMux> find_key_muxes(const Netlist& n) {
  std::vector<KeyMux> out;
  for (NodeId i = 0; i < n.size(); ++i) {
    const Node& node = n.node(i);
    if (node.kind != GateKind::Mux2 || node.fanins.size() != 3) continue;
    NodeId sel = node.fanins[0], a = node.fanins[1], b = node.fanins[2];
    if (n.kind(sel) != GateKind::KeyInput) continue;
    auto is_pair = [&](NodeId q, NodeId qn) {
      return n.kind(q) == GateKind::Dff && n.kind(qn) == GateKind::Qbar && n.fanins(qn)[0] == q;
    };
    if (is_pair(a, b)) {
      out.push_back({i, a, sel, false});
    } else if (is_pair(b, a)) {
      out.push_back({i, b, sel, true});
    }
  }
  return out;
}

std::vector<NodeId> scan_muxes(const Netlist& n) {
  std::vector<NodeId> out;
  if (!n.scan()) return out;
  for (const auto& ff : n.scan()->chain) {
    auto id = n.find(ff);
    if (!id || n.kind(*id) != GateKind::Dff) continue;
    NodeId d = n.fanins(*id)[0];
    if (n.kind(d) == GateKind::Mux2) out.push_back(d);
  }
  return out;
}

}  // namespace fflock
