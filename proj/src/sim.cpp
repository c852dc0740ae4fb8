// SPDX-License-Identifier: Apache-2.0
#include "fflock/sim.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <unordered_map>

#include "fflock/error.hpp"

namespace fflock {

namespace {

std::uint64_t lanes(bool bit) { return bit ? ~std::uint64_t{0} : 0; }

void check_width(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw Error(ErrorKind::WidthMismatch,
                std::string(what) + ": expected " + std::to_string(want) + " bits, got " + std::to_string(got));
  }
}

}  // namespace

CompiledCircuit::CompiledCircuit(const Netlist& n) {
  const std::size_t count = n.size();
  kinds_.resize(count);
  for (NodeId id = 0; id < count; ++id) {
    kinds_[id] = n.kind(id);
    if (kinds_[id] == GateKind::Undefined) {
      throw Error(ErrorKind::UndefinedSignal, "undefined signal '" + n.name_of(id) + "'");
    }
  }

  // Kahn's algorithm over the combinational part. Sources: inputs, keys, Dffs.
  std::vector<std::uint32_t> pending(count, 0);
  std::vector<std::vector<NodeId>> users(count);
  std::vector<NodeId> ready;
  for (NodeId id = 0; id < count; ++id) {
    GateKind k = kinds_[id];
    if (k == GateKind::Input || k == GateKind::KeyInput || k == GateKind::Dff) {
      ready.push_back(id);
      continue;
    }
    for (NodeId f : n.fanins(id)) {
      users[f].push_back(id);
      ++pending[id];
    }
  }
  op_of_node_.assign(count, UINT32_MAX);
  std::size_t visited = 0;
  for (std::size_t head = 0; head < ready.size(); ++head) {
    NodeId id = ready[head];
    ++visited;
    GateKind k = kinds_[id];
    if (k != GateKind::Input && k != GateKind::KeyInput && k != GateKind::Dff) {
      const auto& f = n.fanins(id);
      op_of_node_[id] = static_cast<std::uint32_t>(ops_.size());
      ops_.push_back({k, id, static_cast<std::uint32_t>(fanin_pool_.size()), static_cast<std::uint32_t>(f.size())});
      fanin_pool_.insert(fanin_pool_.end(), f.begin(), f.end());
    }
    for (NodeId u : users[id]) {
      if (--pending[u] == 0) ready.push_back(u);
    }
  }
  if (visited != count) {
    throw Error(ErrorKind::CombinationalCycle, "netlist '" + n.name() + "' has a combinational cycle");
  }

  inputs_ = n.inputs();
  functional_inputs_ = n.functional_inputs();
  outputs_ = n.outputs();
  functional_outputs_ = n.functional_outputs();
  keys_ = n.key_inputs();
  dffs_ = n.dffs();
  std::unordered_map<NodeId, std::size_t> dff_index;
  for (std::size_t i = 0; i < dffs_.size(); ++i) {
    dff_index[dffs_[i]] = i;
    dff_inputs_.push_back(n.fanins(dffs_[i]).at(0));
  }
  for (NodeId d : n.design_dffs()) design_dffs_.push_back(dff_index.at(d));

  if (const auto& scan = n.scan()) {
    for (const auto& cell : scan->chain) chain_.push_back(dff_index.at(n.id(cell)));
    si_ = n.find(scan->ports.si);
    se_ = n.find(scan->ports.se);
    so_ = n.find(scan->ports.so);
    select_ = n.find(scan->select_net.empty() ? scan->ports.se : scan->select_net);
    if (scan->controller) {
      rst_ = n.find(scan->ports.rst);
      reset_net_ = n.find(scan->reset_net);
      controller_dff_ = dff_index.at(n.id(scan->controller_ff));
    }
  }
}

void CompiledCircuit::run_op(std::span<std::uint64_t> v, std::uint32_t index) const {
  const Op& op = ops_[index];
  const NodeId* f = fanin_pool_.data() + op.first;
  std::uint64_t r = 0;
  switch (op.kind) {
    case GateKind::And:
    case GateKind::Nand:
      r = ~std::uint64_t{0};
      for (std::uint32_t i = 0; i < op.count; ++i) r &= v[f[i]];
      if (op.kind == GateKind::Nand) r = ~r;
      break;
    case GateKind::Or:
    case GateKind::Nor:
      for (std::uint32_t i = 0; i < op.count; ++i) r |= v[f[i]];
      if (op.kind == GateKind::Nor) r = ~r;
      break;
    case GateKind::Xor:
    case GateKind::Xnor:
      for (std::uint32_t i = 0; i < op.count; ++i) r ^= v[f[i]];
      if (op.kind == GateKind::Xnor) r = ~r;
      break;
    case GateKind::Not:
    case GateKind::Qbar:
      r = ~v[f[0]];
      break;
    case GateKind::Buf:
      r = v[f[0]];
      break;
    case GateKind::Mux2: {
      std::uint64_t s = v[f[0]];
      r = (v[f[1]] & ~s) | (v[f[2]] & s);
      break;
    }
    default:
      break;
  }
  v[op.out] = r;
}

void CompiledCircuit::evaluate(std::span<std::uint64_t> v) const {
  const auto n = static_cast<std::uint32_t>(ops_.size());
  for (std::uint32_t i = 0; i < n; ++i) run_op(v, i);
}

std::vector<std::uint32_t> CompiledCircuit::cone_ops(NodeId target) const {
  std::vector<std::uint32_t> out;
  std::vector<bool> seen(kinds_.size(), false);
  std::vector<NodeId> stack{target};
  while (!stack.empty()) {
    NodeId id = stack.back();
    stack.pop_back();
    if (seen[id]) continue;
    seen[id] = true;
    std::uint32_t op = op_of_node_[id];
    if (op == UINT32_MAX) continue;
    out.push_back(op);
    const Op& o = ops_[op];
    for (std::uint32_t i = 0; i < o.count; ++i) stack.push_back(fanin_pool_[o.first + i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void CompiledCircuit::evaluate_ops(std::span<std::uint64_t> v, std::span<const std::uint32_t> ops) const {
  for (std::uint32_t i : ops) run_op(v, i);
}

void CompiledCircuit::next_state(std::span<const std::uint64_t> values, std::uint64_t reset_lanes,
                                 std::span<std::uint64_t> next) const {
  for (std::size_t i = 0; i < dffs_.size(); ++i) next[i] = values[dff_inputs_[i]];
  if (reset_lanes != 0) {
    for (std::size_t i : design_dffs_) next[i] &= ~reset_lanes;
  }
}

CombResult eval_comb(const Netlist& n, const Bits& inputs, const Bits& state, const Bits& key) {
  CompiledCircuit c(n);
  check_width(inputs.size(), c.inputs().size(), "inputs");
  check_width(state.size(), c.dffs().size(), "state");
  check_width(key.size(), c.keys().size(), "key");
  std::vector<std::uint64_t> v(c.num_nodes(), 0);
  for (std::size_t i = 0; i < inputs.size(); ++i) v[c.inputs()[i]] = lanes(inputs[i]);
  for (std::size_t i = 0; i < state.size(); ++i) v[c.dffs()[i]] = lanes(state[i]);
  for (std::size_t i = 0; i < key.size(); ++i) v[c.keys()[i]] = lanes(key[i]);
  c.evaluate(v);
  CombResult r;
  for (NodeId o : c.outputs()) r.outputs.push_back(v[o] & 1U);
  for (std::size_t i = 0; i < c.dffs().size(); ++i) r.next_state.push_back(v[c.dff_input(i)] & 1U);
  return r;
}

Simulator::Simulator(const Netlist& n, Bits key, std::uint64_t seed)
    : Simulator(std::make_shared<const CompiledCircuit>(n), std::move(key), seed) {}

Simulator::Simulator(std::shared_ptr<const CompiledCircuit> c, Bits key, std::uint64_t seed)
    : circuit_(std::move(c)), key_(std::move(key)) {
  check_width(key_.size(), circuit_->keys().size(), "key");
  values_.assign(circuit_->num_nodes(), 0);
  state_.assign(circuit_->dffs().size(), 0);
  inputs_.assign(circuit_->functional_inputs().size(), 0);
  Rng rng(seed);
  for (auto& s : state_) s = lanes(rng.coin());
}

void Simulator::set_inputs(const Bits& inputs) {
  check_width(inputs.size(), inputs_.size(), "inputs");
  inputs_ = inputs;
}

void Simulator::evaluate() {
  const auto& c = *circuit_;
  for (NodeId i : c.inputs()) values_[i] = 0;
  for (std::size_t i = 0; i < inputs_.size(); ++i) values_[c.functional_inputs()[i]] = lanes(inputs_[i]);
  if (c.scan_in()) values_[*c.scan_in()] = lanes(si_);
  if (c.scan_enable()) values_[*c.scan_enable()] = lanes(se_);
  if (c.reset_port()) values_[*c.reset_port()] = lanes(rst_);
  for (std::size_t i = 0; i < key_.size(); ++i) values_[c.keys()[i]] = lanes(key_[i]);
  for (std::size_t i = 0; i < state_.size(); ++i) values_[c.dffs()[i]] = state_[i];
  c.evaluate(values_);
}

Bits Simulator::outputs() {
  evaluate();
  Bits out;
  for (NodeId o : circuit_->functional_outputs()) out.push_back(values_[o] & 1U);
  return out;
}

bool Simulator::scan_out_value() {
  if (!circuit_->scan_out()) throw Error(ErrorKind::InvalidArgument, "circuit has no scan chain");
  evaluate();
  return values_[*circuit_->scan_out()] & 1U;
}

bool Simulator::scan_select_value() {
  if (!circuit_->scan_select()) return false;
  evaluate();
  return values_[*circuit_->scan_select()] & 1U;
}

void Simulator::clock() {
  evaluate();
  std::uint64_t reset = 0;
  if (circuit_->reset_net()) {
    reset = values_[*circuit_->reset_net()];
  } else {
    reset = lanes(rst_);
  }
  std::vector<std::uint64_t> next(state_.size());
  circuit_->next_state(values_, reset, next);
  state_ = std::move(next);
}

Bits Simulator::step(const Bits& inputs) {
  set_inputs(inputs);
  se_ = false;
  Bits out = outputs();
  clock();
  return out;
}

ShiftResult Simulator::scan_shift(bool in) {
  if (!circuit_->has_scan()) throw Error(ErrorKind::InvalidArgument, "circuit has no scan chain");
  se_ = true;
  si_ = in;
  evaluate();
  ShiftResult r;
  r.out = values_[*circuit_->scan_out()] & 1U;
  r.enabled = circuit_->scan_select() ? (values_[*circuit_->scan_select()] & 1U) : true;
  clock();
  return r;
}

void Simulator::scan_load(const Bits& vector) {
  check_width(vector.size(), circuit_->chain().size(), "scan vector");
  for (auto b : vector) scan_shift(b != 0);
}

Bits Simulator::scan_unload() {
  Bits out;
  for (std::size_t i = 0; i < circuit_->chain().size(); ++i) out.push_back(scan_shift(false).out);
  return out;
}

void Simulator::global_reset() {
  rst_ = true;
  clock();
  rst_ = false;
}

Bits Simulator::state() const {
  Bits out;
  for (std::size_t i : circuit_->design_dffs()) out.push_back(state_[i] & 1U);
  return out;
}

void Simulator::set_state(const Bits& s) {
  check_width(s.size(), circuit_->design_dffs().size(), "state");
  for (std::size_t i = 0; i < s.size(); ++i) state_[circuit_->design_dffs()[i]] = lanes(s[i]);
}

Bits Simulator::chain_values() const {
  Bits out;
  for (std::size_t i : circuit_->chain()) out.push_back(state_[i] & 1U);
  return out;
}

PoTrace::PoTrace(std::size_t patterns, std::size_t cycles, std::size_t width)
    : patterns_(patterns), cycles_(cycles), width_(width), words_(((patterns + 63) / 64) * cycles * width, 0) {}

Bits PoTrace::row(std::size_t pattern, std::size_t cycle) const {
  Bits out(width_);
  for (std::size_t o = 0; o < width_; ++o) out[o] = at(pattern, cycle, o);
  return out;
}

std::vector<std::uint64_t> pattern_words(std::size_t patterns, std::size_t cycles, std::size_t inputs,
                                         std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const std::size_t batches = (patterns + 63) / 64;
  std::vector<std::uint64_t> words(batches * cycles * inputs);
  for (auto& w : words) w = gen();
  return words;
}

Bits pattern_inputs(std::span<const std::uint64_t> words, std::size_t cycles, std::size_t inputs,
                    std::size_t pattern, std::size_t cycle) {
  Bits out(inputs);
  const std::uint64_t* in = words.data() + ((pattern / 64) * cycles + cycle) * inputs;
  for (std::size_t i = 0; i < inputs; ++i) out[i] = (in[i] >> (pattern % 64)) & 1U;
  return out;
}

PoTrace run_patterns(const CompiledCircuit& c, const Bits& key, std::size_t patterns, std::size_t cycles,
                     std::uint64_t seed) {
  const auto stimulus = pattern_words(patterns, cycles, c.functional_inputs().size(), seed);
  return run_stimulus(c, key, stimulus, patterns, cycles);
}

PoTrace run_stimulus(const CompiledCircuit& c, const Bits& key, std::span<const std::uint64_t> stimulus,
                     std::size_t patterns, std::size_t cycles) {
  check_width(key.size(), c.keys().size(), "key");
  const auto& pis = c.functional_inputs();
  const auto& pos = c.functional_outputs();
  PoTrace trace(patterns, cycles, pos.size());
  check_width(stimulus.size(), trace.batches() * cycles * pis.size(), "stimulus words");
  std::vector<std::uint64_t> v(c.num_nodes(), 0);
  std::vector<std::uint64_t> state(c.dffs().size()), next(c.dffs().size());
  for (std::size_t i = 0; i < key.size(); ++i) v[c.keys()[i]] = lanes(key[i]);

  for (std::size_t b = 0; b < trace.batches(); ++b) {
    const std::size_t live = std::min<std::size_t>(64, patterns - b * 64);
    const std::uint64_t mask = live == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << live) - 1);
    std::fill(state.begin(), state.end(), 0);
    for (std::size_t t = 0; t < cycles; ++t) {
      const std::uint64_t* in = stimulus.data() + (b * cycles + t) * pis.size();
      for (std::size_t i = 0; i < pis.size(); ++i) v[pis[i]] = in[i];
      for (std::size_t i = 0; i < state.size(); ++i) v[c.dffs()[i]] = state[i];
      c.evaluate(v);
      for (std::size_t o = 0; o < pos.size(); ++o) trace.word(b, t, o) = v[pos[o]] & mask;
      std::uint64_t reset = c.reset_net() ? v[*c.reset_net()] : 0;
      c.next_state(v, reset, next);
      std::swap(state, next);
    }
  }
  return trace;
}

PoTrace run_patterns(const Netlist& n, const Bits& key, std::size_t patterns, std::size_t cycles,
                     std::uint64_t seed) {
  return run_patterns(CompiledCircuit(n), key, patterns, cycles, seed);
}

std::string trace_csv(const PoTrace& trace) {
  std::ostringstream out;
  out << "pattern_index,cycle,po_bits\n";
  for (std::size_t p = 0; p < trace.patterns(); ++p) {
    for (std::size_t t = 0; t < trace.cycles(); ++t) {
      out << p << ',' << t << ',' << to_string(trace.row(p, t)) << '\n';
    }
  }
  return out.str();
}

Oracle::Oracle(const Netlist& n, Bits key, std::uint64_t seed) : sim_(n, std::move(key), seed) {}

void Oracle::set_inputs(const Bits& inputs) {
  ++queries_;
  sim_.set_inputs(inputs);
}

Bits Oracle::read_outputs() {
  ++queries_;
  return sim_.outputs();
}

void Oracle::clock() {
  ++queries_;
  sim_.clock();
}

void Oracle::set_scan_enable(bool on) {
  ++queries_;
  sim_.set_scan_enable(on);
}

bool Oracle::shift(bool scan_in) {
  ++queries_;
  ++shifts_;
  return sim_.scan_shift(scan_in).out;
}

void Oracle::pulse_reset() {
  ++queries_;
  sim_.global_reset();
}

Bits Oracle::step(const Bits& inputs) {
  set_scan_enable(false);
  set_inputs(inputs);
  Bits out = read_outputs();
  clock();
  return out;
}

void Oracle::scan_load(const Bits& vector) {
  for (auto b : vector) shift(b != 0);
}

Bits Oracle::scan_unload() {
  Bits out;
  for (std::size_t i = 0; i < chain_length(); ++i) out.push_back(shift(false));
  return out;
}

std::size_t Oracle::num_inputs() const { return sim_.circuit().functional_inputs().size(); }
std::size_t Oracle::num_outputs() const { return sim_.circuit().functional_outputs().size(); }
std::size_t Oracle::chain_length() const { return sim_.circuit().chain().size(); }

}  // namespace fflock
