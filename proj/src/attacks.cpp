// SPDX-License-Identifier: Apache-2.0
#include "fflock/attacks.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <memory>
#include <unordered_map>
#include <unordered_set>

#include "fflock/cone.hpp"
#include "fflock/error.hpp"
#include "fflock/metrics.hpp"

namespace fflock {

const char* to_string(AttackStatus s) {
  switch (s) {
    case AttackStatus::Success: return "success";
    case AttackStatus::Partial: return "partial";
    case AttackStatus::NoKeys: return "no-keys";
    case AttackStatus::KeylessCones: return "keyless-cones";
    case AttackStatus::Infeasible: return "infeasible";
    case AttackStatus::Blocked: return "blocked";
    case AttackStatus::Failed: return "failed";
  }
  return "?";
}

const char* to_string(BitStatus s) {
  switch (s) {
    case BitStatus::Recovered: return "recovered";
    case BitStatus::Alias: return "eliminated-class";
    case BitStatus::Unknown: return "unknown";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Resilient: return "resilient";
    case Verdict::Broken: return "broken";
    case Verdict::NotApplicable: return "n/a";
    case Verdict::NoKeys: return "no-keys";
  }
  return "?";
}

std::size_t AttackReport::count(BitStatus s) const {
  return static_cast<std::size_t>(std::count(bit_status.begin(), bit_status.end(), s));
}

std::string detect_scheme(const Netlist& n) {
  if (n.key_inputs().empty()) return "none";
  std::unordered_set<NodeId> keys(n.key_inputs().begin(), n.key_inputs().end());
  std::unordered_set<NodeId> key_muxes;
  for (const auto& km : find_key_muxes(n)) key_muxes.insert(km.mux);
  const auto fan = n.fanouts();
  std::unordered_set<std::string> seen;
  for (NodeId k : n.key_inputs()) {
    for (NodeId g : fan[k]) {
      const GateKind kind = n.kind(g);
      if (kind == GateKind::Xor || kind == GateKind::Xnor) {
        seen.insert("xor");
      } else if (kind == GateKind::Mux2 && key_muxes.count(g) != 0) {
        seen.insert("eff");
      } else if (kind == GateKind::Mux2) {
        const auto& f = n.fanins(g);
        auto complement = [&](NodeId a, NodeId b) {
          return n.kind(b) == GateKind::Not && n.fanins(b)[0] == a;
        };
        seen.insert(complement(f[1], f[2]) || complement(f[2], f[1]) ? "oc" : "mux");
      } else {
        seen.insert("mixed");
      }
    }
  }
  if (seen.size() != 1) return "mixed";
  return *seen.begin();
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

AttackReport blank_report(const Netlist& enc, const char* method) {
  AttackReport r;
  r.method = method;
  r.scheme = detect_scheme(enc);
  const std::size_t k = enc.key_inputs().size();
  r.key.assign(k, 0);
  r.bit_status.assign(k, BitStatus::Unknown);
  const Complexity cx = attack_complexity(enc);
  r.brute_exponent = cx.brute_exponent;
  r.scan_exponent = cx.scan_exponent;
  return r;
}

constexpr std::size_t kDistinguishRounds = 32;

std::uint64_t lane_mask(std::size_t live) {
  return live >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << live) - 1);
}

// A keyed cone seen by the attacker: the node whose value is observed, the
// keys that reach it combinationally and the gates to evaluate.
struct Target {
  NodeId node = 0;
  std::string name;
  std::size_t observation = 0;  // index into Batch::observed
  bool flip_flop = false;
  std::size_t inputs = 0;       // M1
  std::size_t state_inputs = 0;
  std::vector<std::size_t> keys;  // indices into the key vector
  std::vector<std::uint32_t> ops;
};

// Up to 64 experiments as node words, plus the oracle's observed words for
// every observation slot.
struct Batch {
  std::vector<std::uint64_t> values;
  std::uint64_t mask = 0;
  std::vector<std::uint64_t> observed;
};

struct Search {
  std::uint64_t consistent = 0;
  std::uint64_t first = 0;
  std::uint64_t all_and = ~std::uint64_t{0};
  std::uint64_t all_or = 0;
  std::vector<std::uint64_t> kept;  // first consistent candidates, up to the cap
};

// Candidate assignments of `unknown` (bit i of a candidate is key
// unknown[i]) that reproduce every observation of the target.
Search brute_force(const CompiledCircuit& c, const Target& t, const std::vector<std::size_t>& unknown,
                   const Bits& key, std::vector<Batch>& batches, std::size_t keep = 0) {
  Search s;
  const std::uint64_t total = std::uint64_t{1} << unknown.size();
  for (auto& b : batches) {
    for (std::size_t i = 0; i < key.size(); ++i) b.values[c.keys()[i]] = key[i] ? ~std::uint64_t{0} : 0;
  }
  for (std::uint64_t cand = 0; cand < total; ++cand) {
    bool ok = true;
    for (auto& b : batches) {
      for (std::size_t i = 0; i < unknown.size(); ++i) {
        b.values[c.keys()[unknown[i]]] = ((cand >> i) & 1U) ? ~std::uint64_t{0} : 0;
      }
      c.evaluate_ops(b.values, t.ops);
      if (((b.values[t.node] ^ b.observed[t.observation]) & b.mask) != 0) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    if (s.consistent == 0) s.first = cand;
    if (s.kept.size() < keep) s.kept.push_back(cand);
    ++s.consistent;
    s.all_and &= cand;
    s.all_or |= cand;
  }
  return s;
}

struct Probe {
  Bits state;  // chain order
  Bits inputs;
};

class KeySolver {
 public:
  KeySolver(const CompiledCircuit& c, std::vector<Target> targets, std::size_t budget_exp, AttackReport& report)
      : c_(c), targets_(std::move(targets)), budget_(budget_exp), r_(report), done_(targets_.size(), false),
        infeasible_(targets_.size(), false) {}

  std::vector<Batch>& batches() { return batches_; }

  std::vector<std::size_t> unknown_keys(const Target& t) const {
    std::vector<std::size_t> u;
    for (std::size_t k : t.keys) {
      if (r_.bit_status[k] == BitStatus::Unknown) u.push_back(k);
    }
    return u;
  }

  // Resolves every target whose consistent candidates agree on each bit.
  // Returns true if any bit was recovered.
  bool pass(bool flip_flops) {
    bool any = false;
    bool progress = true;
    while (progress) {
      progress = false;
      for (std::size_t i : order(flip_flops)) {
        const Target& t = targets_[i];
        auto u = unknown_keys(t);
        if (u.empty()) {
          done_[i] = true;
          continue;
        }
        if (t.inputs + u.size() > budget_) {
          infeasible_[i] = true;
          continue;
        }
        infeasible_[i] = false;
        Search s = brute_force(c_, t, u, r_.key, batches_);
        if (s.consistent == 0) {
          conflict_ = true;
          done_[i] = true;
          continue;
        }
        bool resolved_all = true;
        for (std::size_t b = 0; b < u.size(); ++b) {
          const bool agree = ((s.all_and ^ s.all_or) >> b & 1U) == 0;
          if (agree) {
            r_.key[u[b]] = (s.all_and >> b) & 1U;
            r_.bit_status[u[b]] = BitStatus::Recovered;
            progress = any = true;
          } else {
            resolved_all = false;
          }
        }
        if (resolved_all) done_[i] = true;
      }
    }
    return any;
  }

  // Picks the first consistent candidate on each still-ambiguous target.
  void settle_aliases() {
    for (bool ffs : {true, false}) {
      for (std::size_t i : order(ffs)) {
        const Target& t = targets_[i];
        auto u = unknown_keys(t);
        if (u.empty() || t.inputs + u.size() > budget_) continue;
        Search s = brute_force(c_, t, u, r_.key, batches_);
        if (s.consistent == 0) {
          conflict_ = true;
          continue;
        }
        for (std::size_t b = 0; b < u.size(); ++b) {
          r_.key[u[b]] = (s.first >> b) & 1U;
          r_.bit_status[u[b]] = BitStatus::Alias;
        }
        pass(ffs);
      }
    }
  }

  // Experiments that separate surviving candidates of ambiguous targets,
  // found by simulating our own copy on random cone inputs. An empty result
  // means every remaining ambiguity looked like a true alias.
  std::vector<Probe> distinguishing_probes(const std::vector<std::size_t>& chain_dff, Rng& rng) {
    constexpr std::size_t kCandidates = 16;
    constexpr std::size_t kSampleBatches = 256;
    std::vector<Probe> probes;
    const auto& pis = c_.functional_inputs();
    std::vector<std::uint64_t> a(c_.num_nodes()), b(c_.num_nodes());
    for (std::size_t i = 0; i < targets_.size(); ++i) {
      const Target& t = targets_[i];
      auto u = unknown_keys(t);
      if (u.empty() || t.inputs + u.size() > budget_) continue;
      Search s = brute_force(c_, t, u, r_.key, batches_, kCandidates);
      if (s.kept.size() < 2) continue;
      auto set_key = [&](std::vector<std::uint64_t>& v, std::uint64_t cand) {
        for (std::size_t k = 0; k < r_.key.size(); ++k) v[c_.keys()[k]] = r_.key[k] ? ~std::uint64_t{0} : 0;
        for (std::size_t k = 0; k < u.size(); ++k) v[c_.keys()[u[k]]] = ((cand >> k) & 1U) ? ~std::uint64_t{0} : 0;
      };
      for (std::size_t other = 1; other < s.kept.size(); ++other) {
        for (std::size_t sample = 0; sample < kSampleBatches; ++sample) {
          for (NodeId pi : pis) a[pi] = rng.next();
          for (NodeId ff : c_.dffs()) a[ff] = rng.next();
          b = a;
          set_key(a, s.kept[0]);
          set_key(b, s.kept[other]);
          c_.evaluate_ops(a, t.ops);
          c_.evaluate_ops(b, t.ops);
          const std::uint64_t diff = a[t.node] ^ b[t.node];
          if (diff == 0) continue;
          const int lane = std::countr_zero(diff);
          Probe p{Bits(chain_dff.size()), Bits(pis.size())};
          for (std::size_t j = 0; j < chain_dff.size(); ++j) p.state[j] = (a[c_.dffs()[chain_dff[j]]] >> lane) & 1U;
          for (std::size_t k = 0; k < pis.size(); ++k) p.inputs[k] = (a[pis[k]] >> lane) & 1U;
          probes.push_back(std::move(p));
          break;
        }
      }
    }
    return probes;
  }

  bool any_infeasible() const { return std::find(infeasible_.begin(), infeasible_.end(), true) != infeasible_.end(); }
  bool conflict() const { return conflict_; }

  // Keys in no attacked target influence nothing the attacker observes.
  void mark_unobservable() {
    std::vector<bool> reached(r_.key.size(), false);
    for (const auto& t : targets_) {
      for (std::size_t k : t.keys) reached[k] = true;
    }
    for (std::size_t k = 0; k < reached.size(); ++k) {
      if (!reached[k] && r_.bit_status[k] == BitStatus::Unknown) r_.bit_status[k] = BitStatus::Alias;
    }
  }

 private:
  std::vector<std::size_t> order(bool flip_flops) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < targets_.size(); ++i) {
      if (targets_[i].flip_flop == flip_flops && !done_[i]) idx.push_back(i);
    }
    std::vector<std::size_t> unknown(targets_.size());
    for (std::size_t i : idx) unknown[i] = unknown_keys(targets_[i]).size();
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      if (unknown[a] != unknown[b]) return unknown[a] < unknown[b];
      if (targets_[a].inputs != targets_[b].inputs) return targets_[a].inputs < targets_[b].inputs;
      return targets_[a].name < targets_[b].name;
    });
    return idx;
  }

  const CompiledCircuit& c_;
  std::vector<Target> targets_;
  std::size_t budget_;
  AttackReport& r_;
  std::vector<Batch> batches_;
  std::vector<bool> done_, infeasible_;
  bool conflict_ = false;
};

std::unordered_map<NodeId, std::size_t> key_index(const Netlist& n) {
  std::unordered_map<NodeId, std::size_t> m;
  for (std::size_t i = 0; i < n.key_inputs().size(); ++i) m[n.key_inputs()[i]] = i;
  return m;
}

Target make_target(const Netlist& n, const CompiledCircuit& c, const std::unordered_map<NodeId, std::size_t>& keys,
                   NodeId root, NodeId observed_node, std::size_t observation, bool flip_flop) {
  Cone cone = icod(n, root, true);
  Target t;
  t.node = observed_node;
  t.name = n.name_of(root);
  t.observation = observation;
  t.flip_flop = flip_flop;
  t.inputs = cone.primary_inputs.size();
  t.state_inputs = cone.flip_flops.size();
  for (NodeId k : cone.key_inputs) t.keys.push_back(keys.at(k));
  std::sort(t.keys.begin(), t.keys.end());
  t.ops = c.cone_ops(observed_node);
  return t;
}

// Chain inversion profile: prefix[j] is the XOR of inversions before cell j,
// suffix[j] the XOR from cell j to the end.
struct ChainParity {
  std::vector<std::uint8_t> prefix, suffix;
};

ChainParity chain_parity(const ScanConfig& sc) {
  const std::size_t L = sc.links.size();
  ChainParity p{std::vector<std::uint8_t>(L, 0), std::vector<std::uint8_t>(L, 0)};
  std::uint8_t acc = 0;
  for (std::size_t j = 0; j < L; ++j) {
    p.prefix[j] = acc;
    acc ^= sc.links[j] == LinkSource::Qbar ? 1 : 0;
  }
  acc = 0;
  for (std::size_t j = L; j-- > 0;) {
    acc ^= sc.links[j] == LinkSource::Qbar ? 1 : 0;
    p.suffix[j] = acc;
  }
  return p;
}

struct ScanExperiment {
  Bits state;  // chain order
  Bits inputs;
  Bits outputs;
  Bits next;  // chain order
};

// Pipelined scan experiments: each load also unloads the previous capture.
// `ex` arrives with state and inputs filled in.
void run_scan_experiments(Oracle& oracle, const ChainParity& par, std::vector<ScanExperiment>& ex) {
  const std::size_t L = par.prefix.size();
  auto shift_vector = [&](const Bits& load, ScanExperiment* previous) {
    oracle.set_scan_enable(true);
    Bits out(L);
    for (std::size_t k = 0; k < L; ++k) out[k] = oracle.shift(load[k] != 0);
    if (previous) {
      previous->next.assign(L, 0);
      for (std::size_t j = 0; j < L; ++j) previous->next[j] = out[L - 1 - j] ^ par.suffix[j];
    }
  };
  for (std::size_t e = 0; e < ex.size(); ++e) {
    Bits load(L);
    for (std::size_t j = 0; j < L; ++j) load[L - 1 - j] = ex[e].state[j] ^ par.prefix[j];
    shift_vector(load, e > 0 ? &ex[e - 1] : nullptr);
    oracle.set_scan_enable(false);
    oracle.set_inputs(ex[e].inputs);
    ex[e].outputs = oracle.read_outputs();
    oracle.clock();
  }
  if (!ex.empty()) shift_vector(Bits(L, 0), &ex.back());
}

std::vector<ScanExperiment> run_scan_experiments(Oracle& oracle, const ChainParity& par, std::size_t count,
                                                 std::size_t num_inputs, Rng& rng) {
  std::vector<ScanExperiment> ex(count);
  for (auto& e : ex) {
    e.state = rng.bits(par.prefix.size());
    e.inputs = rng.bits(num_inputs);
  }
  run_scan_experiments(oracle, par, ex);
  return ex;
}

// Packs experiments into 64-lane batches. Observation slots: one per design
// flip-flop (chain order), then one per functional output.
std::vector<Batch> pack(const CompiledCircuit& c, const std::vector<ScanExperiment>& ex,
                        const std::vector<std::size_t>& chain_dff) {
  std::vector<Batch> out;
  const auto& pis = c.functional_inputs();
  const std::size_t L = chain_dff.size();
  const std::size_t O = c.functional_outputs().size();
  for (std::size_t base = 0; base < ex.size(); base += 64) {
    Batch b;
    b.values.assign(c.num_nodes(), 0);
    b.observed.assign(L + O, 0);
    const std::size_t live = std::min<std::size_t>(64, ex.size() - base);
    b.mask = lane_mask(live);
    for (std::size_t lane = 0; lane < live; ++lane) {
      const auto& e = ex[base + lane];
      const std::uint64_t bit = std::uint64_t{1} << lane;
      for (std::size_t i = 0; i < pis.size(); ++i) {
        if (e.inputs[i]) b.values[pis[i]] |= bit;
      }
      for (std::size_t j = 0; j < L; ++j) {
        if (!e.state.empty() && e.state[j]) b.values[c.dffs()[chain_dff[j]]] |= bit;
        if (!e.next.empty() && e.next[j]) b.observed[j] |= bit;
      }
      for (std::size_t o = 0; o < O; ++o) {
        if (e.outputs[o]) b.observed[L + o] |= bit;
      }
    }
    out.push_back(std::move(b));
  }
  return out;
}

// Full-circuit check of a key against fresh batches on every observation.
bool matches(const CompiledCircuit& c, const Bits& key, std::vector<Batch>& batches,
             const std::vector<std::size_t>& chain_dff, bool check_state) {
  const std::size_t L = chain_dff.size();
  for (auto& b : batches) {
    for (std::size_t i = 0; i < key.size(); ++i) b.values[c.keys()[i]] = key[i] ? ~std::uint64_t{0} : 0;
    c.evaluate(b.values);
    if (check_state) {
      for (std::size_t j = 0; j < L; ++j) {
        if (((b.values[c.dff_input(chain_dff[j])] ^ b.observed[j]) & b.mask) != 0) return false;
      }
    }
    const auto& pos = c.functional_outputs();
    for (std::size_t o = 0; o < pos.size(); ++o) {
      if (((b.values[pos[o]] ^ b.observed[L + o]) & b.mask) != 0) return false;
    }
  }
  return true;
}

void finish_status(AttackReport& r, const KeySolver& solver) {
  const std::size_t unknown = r.count(BitStatus::Unknown);
  const std::size_t known = r.key.size() - unknown;
  if (unknown == 0 && r.validated) {
    r.status = AttackStatus::Success;
  } else if (known == 0 && solver.any_infeasible()) {
    r.status = AttackStatus::Infeasible;
  } else if (known > 0) {
    r.status = AttackStatus::Partial;
  } else {
    r.status = AttackStatus::Failed;
  }
  if (solver.conflict()) r.note += (r.note.empty() ? "" : "; ") + std::string("a cone had no consistent key");
  if (solver.any_infeasible()) r.note += (r.note.empty() ? "" : "; ") + std::string("cones over budget skipped");
}

}  // namespace

AttackReport scan_partition_attack(const Netlist& enc, Oracle& oracle, const ScanAttackOptions& opt) {
  const auto start = Clock::now();
  AttackReport r = blank_report(enc, "scan");
  auto done = [&]() {
    r.queries = oracle.queries();
    r.scan_shifts = oracle.scan_shifts();
    r.wall_ms = elapsed_ms(start);
    return r;
  };
  if (enc.key_inputs().empty()) {
    r.status = AttackStatus::NoKeys;
    return done();
  }
  bool keyed_ff_cone = false;
  for (NodeId ff : enc.design_dffs()) {
    if (!icod(enc, ff).key_inputs.empty()) {
      keyed_ff_cone = true;
      break;
    }
  }
  if (!keyed_ff_cone) {
    r.status = AttackStatus::KeylessCones;
    r.note = "no key gate in any flip-flop input cone";
    return done();
  }
  const auto& sc = enc.scan();
  if (!sc) {
    r.note = "netlist has no scan chain";
    return done();
  }
  if (sc->chain.size() != enc.design_dffs().size() ||
      std::any_of(sc->links.begin(), sc->links.end(), [](LinkSource l) { return l == LinkSource::KeyMux; })) {
    r.note = "scan chain passes through key gates or misses flip-flops";
    return done();
  }

  const CompiledCircuit c(enc);
  const auto keys = key_index(enc);
  std::unordered_map<NodeId, std::size_t> dff_pos;
  for (std::size_t i = 0; i < c.dffs().size(); ++i) dff_pos[c.dffs()[i]] = i;
  std::vector<std::size_t> chain_dff;
  for (const auto& name : sc->chain) chain_dff.push_back(dff_pos.at(enc.id(name)));
  const std::size_t L = chain_dff.size();

  std::vector<Target> targets;
  for (std::size_t j = 0; j < L; ++j) {
    NodeId ff = c.dffs()[chain_dff[j]];
    Target t = make_target(enc, c, keys, ff, c.dff_input(chain_dff[j]), j, true);
    if (!t.keys.empty()) targets.push_back(std::move(t));
  }
  const auto pos = c.functional_outputs();
  for (std::size_t o = 0; o < pos.size(); ++o) {
    Target t = make_target(enc, c, keys, pos[o], pos[o], L + o, false);
    if (!t.keys.empty()) targets.push_back(std::move(t));
  }

  KeySolver solver(c, std::move(targets), opt.budget_exp, r);
  const ChainParity par = chain_parity(*sc);
  Rng rng(derive_seed(opt.seed, "scan-experiments"));
  oracle.set_scan_enable(false);
  oracle.clock();
  for (std::size_t round = 0; round < std::max<std::size_t>(1, opt.max_rounds); ++round) {
    auto ex = run_scan_experiments(oracle, par, opt.experiments, c.functional_inputs().size(), rng);
    auto fresh = pack(c, ex, chain_dff);
    solver.batches().insert(solver.batches().end(), fresh.begin(), fresh.end());
    solver.pass(true);
    solver.pass(false);
    if (r.count(BitStatus::Unknown) == 0) break;
  }
  Rng drng(derive_seed(opt.seed, "scan-distinguish"));
  for (std::size_t round = 0; round < kDistinguishRounds; ++round) {
    auto probes = solver.distinguishing_probes(chain_dff, drng);
    if (probes.empty()) break;
    std::vector<ScanExperiment> ex(probes.size());
    for (std::size_t i = 0; i < probes.size(); ++i) {
      ex[i].state = std::move(probes[i].state);
      ex[i].inputs = std::move(probes[i].inputs);
    }
    run_scan_experiments(oracle, par, ex);
    auto fresh = pack(c, ex, chain_dff);
    solver.batches().insert(solver.batches().end(), fresh.begin(), fresh.end());
    solver.pass(true);
    solver.pass(false);
  }
  solver.settle_aliases();
  solver.mark_unobservable();

  Rng vrng(derive_seed(opt.seed, "scan-validation"));
  auto vex = run_scan_experiments(oracle, par, opt.validation_experiments, c.functional_inputs().size(), vrng);
  auto vb = pack(c, vex, chain_dff);
  r.validated = matches(c, r.key, vb, chain_dff, true);
  finish_status(r, solver);
  if (!r.validated) r.note += (r.note.empty() ? "" : "; ") + std::string("validation mismatch");
  return done();
}

AttackReport logic_cone_attack(const Netlist& enc, Oracle& oracle, const LogicConeOptions& opt) {
  const auto start = Clock::now();
  AttackReport r = blank_report(enc, "logic-cone");
  auto done = [&]() {
    r.queries = oracle.queries();
    r.scan_shifts = oracle.scan_shifts();
    r.wall_ms = elapsed_ms(start);
    return r;
  };
  if (enc.key_inputs().empty()) {
    r.status = AttackStatus::NoKeys;
    return done();
  }
  const CompiledCircuit c(enc);
  const auto keys = key_index(enc);
  const auto pos = c.functional_outputs();
  std::vector<Target> targets;
  for (std::size_t o = 0; o < pos.size(); ++o) {
    Target t = make_target(enc, c, keys, pos[o], pos[o], o, false);
    if (!t.keys.empty() && t.state_inputs == 0) targets.push_back(std::move(t));
  }
  if (targets.empty()) {
    r.note = "every keyed output cone reads a flip-flop";
    return done();
  }

  auto collect = [&](std::size_t count, Rng& rng) {
    std::vector<ScanExperiment> ex(count);
    for (auto& e : ex) {
      e.inputs = rng.bits(c.functional_inputs().size());
      oracle.set_inputs(e.inputs);
      e.outputs = oracle.read_outputs();
    }
    return pack(c, ex, {});
  };
  KeySolver solver(c, std::move(targets), opt.budget_exp, r);
  Rng rng(derive_seed(opt.seed, "logic-cone-patterns"));
  solver.batches() = collect(opt.patterns, rng);
  solver.pass(false);
  if (r.count(BitStatus::Unknown) != 0) {
    auto more = collect(opt.patterns, rng);
    solver.batches().insert(solver.batches().end(), more.begin(), more.end());
    solver.pass(false);
  }
  solver.settle_aliases();

  // Only the purely combinational outputs are checked; the rest depend on
  // state the attacker cannot set.
  Rng vrng(derive_seed(opt.seed, "logic-cone-validation"));
  auto vb = collect(opt.validation_patterns, vrng);
  std::vector<bool> comb(pos.size(), false);
  for (std::size_t o = 0; o < pos.size(); ++o) comb[o] = icod(enc, pos[o], true).flip_flops.empty();
  r.validated = true;
  for (auto& b : vb) {
    for (std::size_t i = 0; i < r.key.size(); ++i) b.values[c.keys()[i]] = r.key[i] ? ~std::uint64_t{0} : 0;
    c.evaluate(b.values);
    for (std::size_t o = 0; o < pos.size(); ++o) {
      if (comb[o] && ((b.values[pos[o]] ^ b.observed[o]) & b.mask) != 0) r.validated = false;
    }
  }
  finish_status(r, solver);
  return done();
}

AttackReport reset_and_scan_attack(const Netlist& enc, Oracle& oracle) {
  const auto start = Clock::now();
  AttackReport r = blank_report(enc, "reset-scan");
  auto done = [&]() {
    r.queries = oracle.queries();
    r.scan_shifts = oracle.scan_shifts();
    r.wall_ms = elapsed_ms(start);
    return r;
  };
  if (enc.key_inputs().empty()) {
    r.status = AttackStatus::NoKeys;
    return done();
  }
  const auto& sc = enc.scan();
  if (!sc) {
    r.note = "netlist has no scan chain";
    return done();
  }
  const std::size_t L = sc->chain.size();

  // The attacker replays the sequence on their own copy of the netlist to
  // see whether the scan-mux selects actually switch.
  Simulator model(enc, Bits(enc.key_inputs().size(), 0));
  model.set_scan_enable(false);
  model.global_reset();
  bool blocked = false;
  for (std::size_t i = 0; i < L; ++i) {
    if (!model.scan_shift(false).enabled) blocked = true;
  }

  oracle.set_scan_enable(false);
  oracle.pulse_reset();
  oracle.set_scan_enable(true);
  Bits out(L);
  for (std::size_t k = 0; k < L; ++k) out[k] = oracle.shift(false);
  if (blocked) {
    r.status = AttackStatus::Blocked;
    r.note = "scan controller held the chain in functional mode after reset";
    return done();
  }

  std::unordered_map<std::string, KeyMux> mux_of;
  for (const auto& km : find_key_muxes(enc)) mux_of[enc.name_of(km.dff)] = km;
  const auto keys = key_index(enc);
  bool consistent = true;
  for (std::size_t j = 0; j < L; ++j) {
    const std::uint8_t here = out[L - 1 - j];
    const std::uint8_t before = j + 1 < L ? out[L - 2 - j] : 0;
    const std::uint8_t inv = here ^ before;
    switch (sc->links[j]) {
      case LinkSource::Q: consistent = consistent && inv == 0; break;
      case LinkSource::Qbar: consistent = consistent && inv == 1; break;
      case LinkSource::KeyMux: {
        const KeyMux& km = mux_of.at(sc->chain[j]);
        const std::size_t k = keys.at(km.key);
        r.key[k] = inv ^ (km.swapped ? 1 : 0);
        r.bit_status[k] = BitStatus::Recovered;
        break;
      }
    }
  }
  if (!consistent) {
    r.status = AttackStatus::Failed;
    r.note = "inversion pattern disagrees with the structural links";
    std::fill(r.bit_status.begin(), r.bit_status.end(), BitStatus::Unknown);
    return done();
  }
  const std::size_t known = r.count(BitStatus::Recovered);
  r.validated = known > 0;
  if (known == 0) {
    r.status = AttackStatus::Failed;
    r.note = "no key gate on the scan path";
  } else {
    r.status = known == r.key.size() ? AttackStatus::Success : AttackStatus::Partial;
  }
  return done();
}

ParityResult parity_probe(const Netlist& enc, Oracle& oracle, std::uint64_t seed) {
  ParityResult p;
  const auto& sc = enc.scan();
  if (!sc) return p;
  for (std::size_t j = 0; j < sc->links.size(); ++j) {
    if (sc->links[j] == LinkSource::Qbar) ++p.structural_inversions;
  }
  std::unordered_set<std::string> swapped;
  for (const auto& km : find_key_muxes(enc)) {
    if (km.swapped) swapped.insert(enc.name_of(km.dff));
  }
  for (std::size_t j = 0; j < sc->links.size(); ++j) {
    if (sc->links[j] == LinkSource::KeyMux && swapped.count(sc->chain[j]) != 0) ++p.structural_inversions;
  }
  const std::uint64_t before = oracle.queries();
  oracle.set_scan_enable(false);
  oracle.clock();
  Rng rng(derive_seed(seed, "parity-vector"));
  p.loaded = rng.bits(sc->chain.size());
  oracle.set_scan_enable(true);
  oracle.scan_load(p.loaded);
  p.unloaded = oracle.scan_unload();
  p.queries = oracle.queries() - before;
  Bits flipped = p.loaded;
  for (auto& b : flipped) b ^= 1;
  if (p.unloaded == p.loaded) {
    p.total_odd = false;
  } else if (p.unloaded == flipped) {
    p.total_odd = true;
  } else {
    return p;
  }
  p.status = AttackStatus::Success;
  p.key_ones_odd = p.total_odd != (p.structural_inversions % 2 == 1);
  p.entropy_bits_removed = 1;
  return p;
}

namespace {

// Bit differences between two traces.
std::uint64_t trace_distance(const PoTrace& a, const PoTrace& b) {
  std::uint64_t d = 0;
  for (std::size_t bt = 0; bt < a.batches(); ++bt) {
    for (std::size_t t = 0; t < a.cycles(); ++t) {
      for (std::size_t o = 0; o < a.width(); ++o) d += std::popcount(a.word(bt, t, o) ^ b.word(bt, t, o));
    }
  }
  return d;
}

// Oracle trace with the layout of run_stimulus: each pattern starts from a
// global reset.
PoTrace oracle_trace(Oracle& oracle, std::span<const std::uint64_t> words, std::size_t patterns, std::size_t cycles,
                     std::size_t inputs) {
  PoTrace t(patterns, cycles, oracle.num_outputs());
  for (std::size_t p = 0; p < patterns; ++p) {
    oracle.set_scan_enable(false);
    oracle.pulse_reset();
    for (std::size_t cy = 0; cy < cycles; ++cy) {
      Bits out = oracle.step(pattern_inputs(words, cycles, inputs, p, cy));
      for (std::size_t o = 0; o < out.size(); ++o) {
        if (out[o]) t.word(p / 64, cy, o) |= std::uint64_t{1} << (p % 64);
      }
    }
  }
  return t;
}

}  // namespace

HillClimbResult hill_climbing_attack(const Netlist& enc, Oracle& oracle, const HillClimbOptions& opt) {
  const auto start = Clock::now();
  HillClimbResult h;
  h.report = blank_report(enc, "hill");
  AttackReport& r = h.report;
  const std::size_t K = enc.key_inputs().size();
  auto done = [&]() {
    r.queries = oracle.queries();
    r.scan_shifts = oracle.scan_shifts();
    r.wall_ms = elapsed_ms(start);
    return h;
  };
  if (K == 0) {
    r.status = AttackStatus::NoKeys;
    return done();
  }
  const CompiledCircuit c(enc);
  const std::size_t inputs = c.functional_inputs().size();
  const auto words = pattern_words(opt.patterns, opt.cycles, inputs, derive_seed(opt.seed, "hill-patterns"));
  const PoTrace golden = oracle_trace(oracle, words, opt.patterns, opt.cycles, inputs);
  const double total = static_cast<double>(opt.patterns * opt.cycles * golden.width());
  auto distance = [&](const Bits& key) {
    return trace_distance(golden, run_stimulus(c, key, words, opt.patterns, opt.cycles));
  };
  auto pct = [&](std::uint64_t d) { return total > 0 ? 100.0 * static_cast<double>(d) / total : 0.0; };

  Bits key;
  if (opt.start_key) {
    if (opt.start_key->size() != K) throw Error(ErrorKind::WidthMismatch, "start key width differs from key count");
    key = *opt.start_key;
  } else {
    Rng rng(derive_seed(opt.seed, "hill-start"));
    key = rng.bits(K);
  }
  std::uint64_t cur = distance(key);
  h.hd_trace.push_back(pct(cur));
  h.key_trace.push_back(key);
  while (cur > 0 && h.iterations < opt.max_iters) {
    std::uint64_t best = cur;
    std::size_t best_bit = K;
    for (std::size_t b = 0; b < K; ++b) {
      key[b] ^= 1;
      const std::uint64_t d = distance(key);
      key[b] ^= 1;
      if (d < best) {
        best = d;
        best_bit = b;
      }
    }
    if (best_bit == K) break;
    key[best_bit] ^= 1;
    cur = best;
    ++h.iterations;
    h.hd_trace.push_back(pct(cur));
    h.key_trace.push_back(key);
  }
  h.reached_zero = cur == 0;
  r.key = key;
  if (h.reached_zero) {
    const auto vwords = pattern_words(opt.validation_patterns, opt.cycles, inputs, derive_seed(opt.seed, "hill-validation"));
    const PoTrace vgold = oracle_trace(oracle, vwords, opt.validation_patterns, opt.cycles, inputs);
    r.validated = vgold == run_stimulus(c, key, vwords, opt.validation_patterns, opt.cycles);
  }
  if (r.validated) {
    r.status = AttackStatus::Success;
    r.bit_status.assign(K, BitStatus::Recovered);
  } else {
    r.status = AttackStatus::Failed;
    r.note = h.reached_zero ? "zero distance on the sample but not on validation"
                            : "stopped at a local minimum with nonzero distance";
  }
  return done();
}

std::vector<NodeId> pi_controllable_ffs(const Netlist& n) {
  std::vector<NodeId> out;
  for (NodeId ff : n.design_dffs()) {
    const Cone cone = icod(n, ff);
    if (cone.flip_flops.empty() && cone.key_inputs.empty()) out.push_back(ff);
  }
  sort_by_name(n, out);
  return out;
}

std::vector<NodeId> sensitization_vulnerable_ffs(const Netlist& enc) {
  std::vector<NodeId> out;
  std::optional<NodeId> first;
  if (const auto& sc = enc.scan(); sc && !sc->chain.empty()) first = enc.id(sc->chain.front());
  for (const auto& km : find_key_muxes(enc)) {
    const Cone cone = icod(enc, km.dff);
    if ((cone.flip_flops.empty() && cone.key_inputs.empty()) || (first && *first == km.dff)) out.push_back(km.dff);
  }
  sort_by_name(enc, out);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SuiteReport attack_suite(const Netlist& enc, const Bits& key, const SuiteOptions& opt) {
  SuiteReport s;
  s.scheme = detect_scheme(enc);
  if (enc.key_inputs().empty()) {
    s.path_sensitization = s.logic_cone = s.hill_climbing = s.sat = s.scan_based = Verdict::NoKeys;
    return s;
  }
  auto oracle = [&](const char* purpose) { return Oracle(enc, key, derive_seed(opt.seed, purpose)); };
  std::vector<bool> correct(key.size(), false);
  auto tally = [&](const AttackReport& r) {
    for (std::size_t i = 0; i < key.size(); ++i) {
      if (r.bit_status[i] == BitStatus::Recovered && r.key[i] == key[i]) correct[i] = true;
    }
  };
  auto broke = [](const AttackReport& r) {
    return r.status == AttackStatus::Success || r.status == AttackStatus::Partial;
  };

  {
    Oracle o = oracle("oracle-scan");
    s.attacks.push_back(scan_partition_attack(enc, o, opt.scan));
  }
  const bool scan_broke = broke(s.attacks.back());
  tally(s.attacks.back());
  bool reset_broke = false;
  if (enc.scan()) {
    Oracle o = oracle("oracle-reset-scan");
    s.attacks.push_back(reset_and_scan_attack(enc, o));
    reset_broke = broke(s.attacks.back());
    tally(s.attacks.back());
    Oracle po = oracle("oracle-parity");
    s.parity = parity_probe(enc, po, derive_seed(opt.seed, "parity"));
  }
  s.scan_based = enc.scan() ? (scan_broke || reset_broke ? Verdict::Broken : Verdict::Resilient)
                            : Verdict::NotApplicable;
  {
    Oracle o = oracle("oracle-logic-cone");
    s.attacks.push_back(logic_cone_attack(enc, o, opt.logic));
    s.logic_cone = broke(s.attacks.back()) ? Verdict::Broken : Verdict::Resilient;
    tally(s.attacks.back());
  }
  {
    Oracle o = oracle("oracle-hill");
    HillClimbResult h = hill_climbing_attack(enc, o, opt.hill);
    s.hill_climbing = broke(h.report) ? Verdict::Broken : Verdict::Resilient;
    tally(h.report);
    s.attacks.push_back(std::move(h.report));
  }
  if (s.scheme == "eff") {
    s.sensitization_vulnerable = sensitization_vulnerable_ffs(enc);
    s.path_sensitization = s.sensitization_vulnerable.empty() ? Verdict::Resilient : Verdict::Broken;
  }
  s.correct_bits_recovered = static_cast<std::size_t>(std::count(correct.begin(), correct.end(), true));
  return s;
}

}  // namespace fflock
