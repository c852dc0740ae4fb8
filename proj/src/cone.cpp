// SPDX-License-Identifier: Apache-2.0
#include "fflock/cone.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "fflock/bits.hpp"
#include "fflock/error.hpp"

namespace fflock {

namespace {

class ConeWalker {
 public:
  explicit ConeWalker(const Netlist& n, bool through_key_muxes = false) : n_(n), stamp_(n.size(), 0) {
    if (!through_key_muxes) {
      for (const auto& km : find_key_muxes(n)) key_mux_dff_[km.mux] = km.dff;
    }
    for (NodeId m : scan_muxes(n)) scan_mux_.insert(m);
  }

  // Visits the cone of `start`; `on_boundary` sees each boundary node once
  // with its kind normalized (key muxes and Qbar taps report their Dff).
  template <typename F>
  std::size_t walk(NodeId start, F&& on_boundary) {
    ++epoch_;
    std::size_t gates = 0;
    stack_.assign(1, start);
    while (!stack_.empty()) {
      NodeId id = stack_.back();
      stack_.pop_back();
      if (stamp_[id] == epoch_) continue;
      stamp_[id] = epoch_;
      GateKind k = n_.kind(id);
      if (auto it = key_mux_dff_.find(id); it != key_mux_dff_.end()) {
        on_boundary(it->second, GateKind::Dff);
        continue;
      }
      switch (k) {
        case GateKind::Input:
        case GateKind::KeyInput:
        case GateKind::Dff:
          on_boundary(id, k);
          continue;
        case GateKind::Qbar:
          on_boundary(n_.fanins(id)[0], GateKind::Dff);
          continue;
        case GateKind::Undefined:
          continue;
        default:
          break;
      }
      const auto& f = n_.fanins(id);
      if (scan_mux_.count(id) != 0) {
        stack_.push_back(f[1]);
        continue;
      }
      ++gates;
      for (auto it = f.rbegin(); it != f.rend(); ++it) stack_.push_back(*it);
    }
    return gates;
  }

 private:
  const Netlist& n_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<NodeId> stack_;
  std::unordered_map<NodeId, NodeId> key_mux_dff_;
  std::unordered_set<NodeId> scan_mux_;
};

Cone collect(const Netlist& n, ConeWalker& walker, NodeId root, NodeId start) {
  Cone c;
  c.root = root;
  std::unordered_set<NodeId> ffs;
  c.gate_count = walker.walk(start, [&](NodeId id, GateKind k) {
    if (k == GateKind::Input) {
      c.primary_inputs.push_back(id);
    } else if (k == GateKind::KeyInput) {
      c.key_inputs.push_back(id);
    } else if (ffs.insert(id).second) {
      c.flip_flops.push_back(id);
    }
  });
  sort_by_name(n, c.primary_inputs);
  sort_by_name(n, c.flip_flops);
  sort_by_name(n, c.key_inputs);
  return c;
}

boost::dynamic_bitset<> ff_set(ConeWalker& walker, NodeId start, const std::unordered_map<NodeId, std::size_t>& index) {
  boost::dynamic_bitset<> bits(index.size());
  walker.walk(start, [&](NodeId id, GateKind k) {
    if (k != GateKind::Dff) return;
    if (auto it = index.find(id); it != index.end()) bits.set(it->second);
  });
  return bits;
}

bool name_less(const Netlist& n, NodeId a, NodeId b) { return n.name_of(a) < n.name_of(b); }

std::vector<NodeId> to_ids(const boost::dynamic_bitset<>& bits, const std::vector<NodeId>& universe) {
  std::vector<NodeId> out;
  for (auto i = bits.find_first(); i != boost::dynamic_bitset<>::npos; i = bits.find_next(i)) {
    out.push_back(universe[i]);
  }
  return out;
}

}  // namespace

void sort_by_name(const Netlist& n, std::vector<NodeId>& ids) {
  std::sort(ids.begin(), ids.end(), [&](NodeId a, NodeId b) { return name_less(n, a, b); });
}

std::vector<std::string> names_of(const Netlist& n, const std::vector<NodeId>& ids) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (NodeId id : ids) out.push_back(n.name_of(id));
  return out;
}

Cone icod(const Netlist& n, NodeId root, bool through_key_muxes) {
  if (root >= n.size()) throw Error(ErrorKind::UnknownId, "unknown node id " + std::to_string(root));
  ConeWalker walker(n, through_key_muxes);
  NodeId start = n.kind(root) == GateKind::Dff ? n.fanins(root).at(0) : root;
  return collect(n, walker, root, start);
}

Cone signal_cone(const Netlist& n, NodeId signal, bool through_key_muxes) {
  if (signal >= n.size()) throw Error(ErrorKind::UnknownId, "unknown node id " + std::to_string(signal));
  ConeWalker walker(n, through_key_muxes);
  return collect(n, walker, signal, signal);
}

DependencyGraph dependency_graph(const Netlist& n) {
  DependencyGraph g;
  g.outputs = n.functional_outputs();
  g.dffs = n.design_dffs();
  std::unordered_map<NodeId, std::size_t> index;
  for (std::size_t i = 0; i < g.dffs.size(); ++i) index[g.dffs[i]] = i;

  ConeWalker walker(n);
  for (NodeId ff : g.dffs) g.d_inputs.push_back(ff_set(walker, n.fanins(ff).at(0), index));
  for (NodeId o : g.outputs) g.combinational.push_back(ff_set(walker, o, index));

  std::vector<std::size_t> queue;
  for (const auto& comb : g.combinational) {
    boost::dynamic_bitset<> reached = comb;
    queue.clear();
    for (auto i = comb.find_first(); i != boost::dynamic_bitset<>::npos; i = comb.find_next(i)) queue.push_back(i);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const auto& d = g.d_inputs[queue[head]];
      for (auto j = d.find_first(); j != boost::dynamic_bitset<>::npos; j = d.find_next(j)) {
        if (!reached.test(j)) {
          reached.set(j);
          queue.push_back(j);
        }
      }
    }
    g.transitive.push_back(std::move(reached));
  }
  return g;
}

FanoutOutputs fanout_outputs(const Netlist& n, NodeId ff) {
  if (ff >= n.size() || n.kind(ff) != GateKind::Dff) {
    throw Error(ErrorKind::UnknownId, "'" + (ff < n.size() ? n.name_of(ff) : std::to_string(ff)) +
                                          "' is not a flip-flop");
  }
  const auto g = dependency_graph(n);
  auto pos = std::find(g.dffs.begin(), g.dffs.end(), ff);
  FanoutOutputs out;
  if (pos == g.dffs.end()) return out;
  const std::size_t i = static_cast<std::size_t>(pos - g.dffs.begin());
  for (std::size_t o = 0; o < g.outputs.size(); ++o) {
    if (g.combinational[o].test(i)) out.combinational.push_back(g.outputs[o]);
    if (g.transitive[o].test(i)) out.transitive.push_back(g.outputs[o]);
  }
  sort_by_name(n, out.combinational);
  sort_by_name(n, out.transitive);
  return out;
}

SelectionResult select_flip_flops(const Netlist& n, const SelectionOptions& options) {
  const auto g = dependency_graph(n);
  if (g.dffs.empty()) throw Error(ErrorKind::NoCandidates, "netlist has no flip-flops");
  if (g.outputs.empty()) throw Error(ErrorKind::NoCandidates, "netlist has no functional outputs");
  const auto& cones = options.affects == Affects::Transitive ? g.transitive : g.combinational;
  const std::size_t num_out = g.outputs.size();
  const std::size_t num_ff = g.dffs.size();

  // Outputs in name order; every tie below resolves to the earlier name.
  std::vector<std::size_t> order(num_out);
  for (std::size_t i = 0; i < num_out; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return name_less(n, g.outputs[a], g.outputs[b]); });

  // An overlap flip-flop is strong iff no output outside O' contains it,
  // i.e. its containing-output count equals |O'|.
  std::vector<std::size_t> containing(num_ff, 0);
  for (const auto& c : cones) {
    for (auto i = c.find_first(); i != boost::dynamic_bitset<>::npos; i = c.find_next(i)) ++containing[i];
  }

  struct Candidate {
    std::vector<std::size_t> outputs;  // name-ordered ranks
    boost::dynamic_bitset<> overlap;
    boost::dynamic_bitset<> strong;
  };
  std::optional<Candidate> best;
  auto consider = [&](const std::vector<std::size_t>& ranks, const boost::dynamic_bitset<>& overlap) {
    boost::dynamic_bitset<> strong(num_ff);
    for (auto i = overlap.find_first(); i != boost::dynamic_bitset<>::npos; i = overlap.find_next(i)) {
      if (containing[i] == ranks.size()) strong.set(i);
    }
    std::vector<std::size_t> sorted = ranks;
    std::sort(sorted.begin(), sorted.end());
    bool better = !best;
    if (!better) {
      std::size_t s = strong.count(), bs = best->strong.count();
      if (s != bs) {
        better = s > bs;
      } else if (sorted.size() != best->outputs.size()) {
        better = sorted.size() > best->outputs.size();
      } else {
        better = sorted < best->outputs;
      }
    }
    if (better) best = Candidate{std::move(sorted), overlap, std::move(strong)};
  };

  std::vector<bool> in_set(num_out);
  for (std::size_t seed_rank = 0; seed_rank < num_out; ++seed_rank) {
    std::fill(in_set.begin(), in_set.end(), false);
    std::vector<std::size_t> ranks{seed_rank};
    in_set[seed_rank] = true;
    boost::dynamic_bitset<> overlap = cones[order[seed_rank]];
    if (overlap.count() < options.floor) continue;
    consider(ranks, overlap);
    while (ranks.size() < num_out) {
      std::size_t pick = num_out, pick_size = 0;
      for (std::size_t r = 0; r < num_out; ++r) {
        if (in_set[r]) continue;
        std::size_t s = (overlap & cones[order[r]]).count();
        if (pick == num_out || s > pick_size) {
          pick = r;
          pick_size = s;
        }
      }
      if (pick_size < options.floor || pick_size == 0) break;
      in_set[pick] = true;
      ranks.push_back(pick);
      overlap &= cones[order[pick]];
      consider(ranks, overlap);
    }
  }

  if (!best || best->strong.none()) {
    throw Error(ErrorKind::NoCandidates, "no flip-flop is confined to a single output group");
  }
  SelectionResult r;
  for (std::size_t rank : best->outputs) r.affected_outputs.push_back(g.outputs[order[rank]]);
  r.l_overlap = to_ids(best->overlap, g.dffs);
  r.l_strong = to_ids(best->strong, g.dffs);
  r.l_weak = to_ids(best->overlap - best->strong, g.dffs);
  sort_by_name(n, r.affected_outputs);
  sort_by_name(n, r.l_overlap);
  sort_by_name(n, r.l_strong);
  sort_by_name(n, r.l_weak);
  r.total_outputs = num_out;
  r.coverage_pct = 100.0 * static_cast<double>(r.affected_outputs.size()) / static_cast<double>(num_out);
  return r;
}

std::vector<NodeId> pick_key_ffs(const Netlist& n, const SelectionResult& sel, std::size_t k, std::uint64_t seed,
                                 const std::vector<NodeId>& exclude) {
  std::unordered_set<NodeId> skip(exclude.begin(), exclude.end());
  std::vector<NodeId> pool;
  for (NodeId id : sel.l_strong) {
    if (skip.count(id) == 0) pool.push_back(id);
  }
  if (k > pool.size()) {
    throw Error(ErrorKind::KeyTooLarge,
                "requested " + std::to_string(k) + " key bits but only " + std::to_string(pool.size()) +
                    " candidate flip-flops are available");
  }
  sort_by_name(n, pool);
  Rng rng(seed);
  rng.shuffle(pool);
  pool.resize(k);
  sort_by_name(n, pool);
  return pool;
}

}  // namespace fflock
