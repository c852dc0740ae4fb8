// SPDX-License-Identifier: Apache-2.0
#include "fflock/encrypt.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "fflock/error.hpp"

namespace fflock {

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::Eff: return "eff";
    case Scheme::Xor: return "xor";
    case Scheme::Mux: return "mux";
    case Scheme::Oc: return "oc";
  }
  return "?";
}

std::optional<Scheme> scheme_from_string(std::string_view t) {
  if (t == "eff") return Scheme::Eff;
  if (t == "xor") return Scheme::Xor;
  if (t == "mux") return Scheme::Mux;
  if (t == "oc") return Scheme::Oc;
  return std::nullopt;
}

const char* to_string(ScanOrder o) {
  switch (o) {
    case ScanOrder::Declaration: return "declaration";
    case ScanOrder::EncryptedFirst: return "encrypted-first";
    case ScanOrder::UnencryptedFirst: return "unencrypted-first";
    case ScanOrder::Random: return "random";
  }
  return "?";
}

std::optional<ScanOrder> scan_order_from_string(std::string_view t) {
  if (t == "declaration") return ScanOrder::Declaration;
  if (t == "encrypted-first") return ScanOrder::EncryptedFirst;
  if (t == "unencrypted-first") return ScanOrder::UnencryptedFirst;
  if (t == "random") return ScanOrder::Random;
  return std::nullopt;
}

namespace {

NodeId new_key_input(Netlist& n) {
  return n.add_key_input(n.unique_name("keyinput" + std::to_string(n.key_inputs().size())));
}

void require_fresh(const Netlist& n) {
  if (!n.key_inputs().empty()) {
    throw Error(ErrorKind::InvalidArgument, "netlist '" + n.name() + "' is already encrypted");
  }
}

void require_sites(std::size_t k, std::size_t available) {
  if (k > available) {
    throw Error(ErrorKind::KeyTooLarge, "requested " + std::to_string(k) + " key gates but only " +
                                            std::to_string(available) + " lockable nets exist");
  }
}

// Moves net `site` behind a new gate: the original driver is renamed and the
// new gate takes over the net's name, fanouts and output entries.
NodeId splice(Netlist& n, NodeId site, GateKind kind, const std::vector<NodeId>& fanins_with_placeholder,
              NodeId placeholder) {
  std::string name = n.name_of(site);
  n.rename(site, n.unique_name(name + "_lk"));
  std::vector<NodeId> fanins = fanins_with_placeholder;
  for (auto& f : fanins) {
    if (f == placeholder) f = site;
  }
  NodeId gate = n.add_gate(name, kind, fanins);
  return gate;
}

std::vector<NodeId> sample_sites(const Netlist& n, std::size_t k, Rng& rng) {
  auto pool = lockable_nets(n);
  require_sites(k, pool.size());
  std::sort(pool.begin(), pool.end(), [&](NodeId a, NodeId b) { return n.name_of(a) < n.name_of(b); });
  rng.shuffle(pool);
  pool.resize(k);
  return pool;
}

// Nodes whose value combinationally depends on `from` (including itself).
std::vector<bool> comb_fanout(const Netlist& n, const std::vector<std::vector<NodeId>>& fanouts, NodeId from) {
  std::vector<bool> seen(n.size(), false);
  std::vector<NodeId> stack{from};
  seen[from] = true;
  while (!stack.empty()) {
    NodeId id = stack.back();
    stack.pop_back();
    for (NodeId u : fanouts[id]) {
      if (seen[u] || n.kind(u) == GateKind::Dff) continue;
      seen[u] = true;
      stack.push_back(u);
    }
  }
  return seen;
}

}  // namespace

std::vector<NodeId> map_outputs(const Netlist& from, const Netlist& to, const std::vector<NodeId>& outputs) {
  const auto a = from.functional_outputs();
  const auto b = to.functional_outputs();
  if (a.size() != b.size()) throw Error(ErrorKind::WidthMismatch, "netlists have different output counts");
  std::vector<NodeId> out;
  for (NodeId o : outputs) {
    auto it = std::find(a.begin(), a.end(), o);
    if (it == a.end()) throw Error(ErrorKind::UnknownId, "'" + from.name_of(o) + "' is not a functional output");
    out.push_back(b[static_cast<std::size_t>(it - a.begin())]);
  }
  return out;
}

std::vector<NodeId> lockable_nets(const Netlist& n) {
  std::vector<bool> excluded(n.size(), false);
  if (const auto& scan = n.scan()) {
    const auto fanouts = n.fanouts();
    std::vector<NodeId> roots;
    for (const auto* port : {&scan->ports.si, &scan->ports.se, &scan->ports.rst, &scan->controller_ff}) {
      if (auto id = n.find(*port)) roots.push_back(*id);
    }
    for (NodeId r : roots) {
      auto reach = comb_fanout(n, fanouts, r);
      for (NodeId i = 0; i < n.size(); ++i) {
        if (reach[i]) excluded[i] = true;
      }
    }
    if (auto so = n.find(scan->ports.so)) excluded[*so] = true;
  }
  for (const auto& km : find_key_muxes(n)) excluded[km.mux] = true;
  std::vector<NodeId> out;
  for (NodeId i = 0; i < n.size(); ++i) {
    if (is_logic_gate(n.kind(i)) && !excluded[i]) out.push_back(i);
  }
  return out;
}

EncryptionResult encrypt_flip_flop(const Netlist& original, const std::vector<NodeId>& ffs, std::uint64_t seed,
                                   const EffOptions& options) {
  require_fresh(original);
  std::unordered_set<NodeId> seen;
  for (NodeId ff : ffs) {
    if (ff >= original.size() || original.kind(ff) != GateKind::Dff) {
      throw Error(ErrorKind::UnknownId, "'" + (ff < original.size() ? original.name_of(ff) : std::to_string(ff)) +
                                            "' is not a flip-flop");
    }
    if (!seen.insert(ff).second) {
      throw Error(ErrorKind::InvalidArgument, "flip-flop '" + original.name_of(ff) + "' listed twice");
    }
  }

  EncryptionResult r{original, {}, {}};
  Netlist& n = r.netlist;
  Rng rng(seed);
  for (NodeId ff : ffs) {
    const bool swap = options.randomize_polarity && rng.coin();
    const auto existing_qbar = n.qbar_of(ff);
    const auto fan = n.fanouts();
    auto functional_users = [&](NodeId net) {
      std::size_t count = 0;
      for (NodeId u : fan[net]) {
        if (n.kind(u) != GateKind::Qbar) ++count;
      }
      count += static_cast<std::size_t>(std::count(n.outputs().begin(), n.outputs().end(), net));
      return count;
    };
    const bool uses_qbar = existing_qbar && functional_users(*existing_qbar) > 0;
    if (uses_qbar && functional_users(ff) > 0) {
      throw Error(ErrorKind::InvalidArgument,
                  "flip-flop '" + n.name_of(ff) + "' drives logic from both Q and Qbar");
    }
    NodeId key = new_key_input(n);
    NodeId qn = n.ensure_qbar(ff);
    std::vector<NodeId> fanins = swap ? std::vector<NodeId>{key, qn, ff} : std::vector<NodeId>{key, ff, qn};
    NodeId used = uses_qbar ? qn : ff;
    NodeId mux = n.add_gate(n.unique_name(n.name_of(ff) + "_eff"), GateKind::Mux2, fanins);
    const NodeId skip[] = {mux, qn};
    n.redirect_fanouts(used, mux, skip);
    const std::uint8_t bit = uses_qbar ? !swap : swap;
    r.correct_key.push_back(bit);
    r.placements.push_back({r.correct_key.size() - 1, n.name_of(key), Scheme::Eff, n.name_of(ff), swap});
  }
  return r;
}

EncryptionResult encrypt_xor_random(const Netlist& original, std::size_t k, std::uint64_t seed) {
  require_fresh(original);
  EncryptionResult r{original, {}, {}};
  Netlist& n = r.netlist;
  Rng rng(seed);
  const auto sites = sample_sites(n, k, rng);
  for (NodeId site : sites) {
    const bool xnor = rng.coin();
    const std::string net = n.name_of(site);
    NodeId key = new_key_input(n);
    NodeId gate = splice(n, site, xnor ? GateKind::Xnor : GateKind::Xor, {site, key}, site);
    const NodeId skip[] = {gate};
    n.redirect_fanouts(site, gate, skip);
    r.correct_key.push_back(xnor ? 1 : 0);
    r.placements.push_back({r.correct_key.size() - 1, n.name_of(key), Scheme::Xor, net, xnor});
  }
  return r;
}

EncryptionResult encrypt_mux_random(const Netlist& original, std::size_t k, std::uint64_t seed) {
  require_fresh(original);
  EncryptionResult r{original, {}, {}};
  Netlist& n = r.netlist;
  Rng rng(seed);
  const auto sites = sample_sites(n, k, rng);
  for (NodeId site : sites) {
    const auto fan = n.fanouts();
    const auto downstream = comb_fanout(n, fan, site);
    std::vector<NodeId> decoys;
    for (NodeId i = 0; i < n.size(); ++i) {
      GateKind kind = n.kind(i);
      bool signal = is_logic_gate(kind) || kind == GateKind::Input || kind == GateKind::Dff;
      if (signal && !downstream[i]) decoys.push_back(i);
    }
    if (const auto& scan = n.scan()) {
      std::erase_if(decoys, [&](NodeId i) {
        const auto& nm = n.name_of(i);
        return nm == scan->ports.si || nm == scan->ports.se || nm == scan->ports.rst;
      });
    }
    if (decoys.empty()) {
      throw Error(ErrorKind::KeyTooLarge, "no decoy net available for '" + n.name_of(site) + "'");
    }
    std::sort(decoys.begin(), decoys.end(), [&](NodeId a, NodeId b) { return n.name_of(a) < n.name_of(b); });
    NodeId decoy = decoys[rng.below(decoys.size())];
    const bool swap = rng.coin();
    const std::string net = n.name_of(site);
    NodeId key = new_key_input(n);
    std::vector<NodeId> fanins = swap ? std::vector<NodeId>{key, decoy, site} : std::vector<NodeId>{key, site, decoy};
    NodeId gate = splice(n, site, GateKind::Mux2, fanins, site);
    const NodeId skip[] = {gate};
    n.redirect_fanouts(site, gate, skip);
    r.correct_key.push_back(swap ? 1 : 0);
    r.placements.push_back({r.correct_key.size() - 1, n.name_of(key), Scheme::Mux, net, swap});
  }
  return r;
}

EncryptionResult encrypt_oc(const Netlist& original, std::size_t k, std::uint64_t seed) {
  require_fresh(original);
  EncryptionResult r{original, {}, {}};
  Netlist& n = r.netlist;
  Rng rng(seed);
  const auto sites = sample_sites(n, k, rng);
  for (NodeId site : sites) {
    const bool swap = rng.coin();
    const std::string net = n.name_of(site);
    NodeId key = new_key_input(n);
    NodeId inv = n.add_gate(n.unique_name(net + "_ocn"), GateKind::Not, {site});
    std::vector<NodeId> fanins = swap ? std::vector<NodeId>{key, inv, site} : std::vector<NodeId>{key, site, inv};
    NodeId gate = splice(n, site, GateKind::Mux2, fanins, site);
    const NodeId skip[] = {gate, inv};
    n.redirect_fanouts(site, gate, skip);
    r.correct_key.push_back(swap ? 1 : 0);
    r.placements.push_back({r.correct_key.size() - 1, n.name_of(key), Scheme::Oc, net, swap});
  }
  return r;
}

std::vector<NodeId> scan_order(const Netlist& n, ScanOrder policy, std::uint64_t seed) {
  auto dffs = n.design_dffs();
  if (policy == ScanOrder::Declaration) return dffs;
  if (policy == ScanOrder::Random) {
    Rng rng(seed);
    rng.shuffle(dffs);
    return dffs;
  }
  std::unordered_set<NodeId> encrypted;
  for (const auto& km : find_key_muxes(n)) encrypted.insert(km.dff);
  std::stable_partition(dffs.begin(), dffs.end(), [&](NodeId d) {
    return (encrypted.count(d) != 0) == (policy == ScanOrder::EncryptedFirst);
  });
  return dffs;
}

Netlist insert_scan(const Netlist& original, const ScanOptions& options) {
  if (original.scan()) throw Error(ErrorKind::InvalidArgument, "netlist already has a scan chain");
  Netlist n = original;
  std::vector<NodeId> order = options.order.empty() ? n.design_dffs() : options.order;
  {
    auto expect = n.design_dffs();
    auto got = order;
    std::sort(expect.begin(), expect.end());
    std::sort(got.begin(), got.end());
    if (expect != got) {
      throw Error(ErrorKind::NotPermutation, "scan order is not a permutation of the flip-flops");
    }
  }
  if (order.empty()) throw Error(ErrorKind::InvalidArgument, "netlist has no flip-flops to chain");
  for (const auto* port : {&options.ports.si, &options.ports.se, &options.ports.so}) {
    if (n.find(*port)) throw Error(ErrorKind::InvalidArgument, "port name '" + *port + "' already in use");
  }
  std::unordered_set<std::size_t> qbar_links(options.qbar_links.begin(), options.qbar_links.end());
  for (std::size_t l : qbar_links) {
    if (l >= order.size()) {
      throw Error(ErrorKind::InvalidArgument, "Qbar link index " + std::to_string(l) + " out of range");
    }
  }
  std::unordered_map<NodeId, NodeId> key_mux;
  for (const auto& km : find_key_muxes(n)) key_mux[km.dff] = km.mux;

  NodeId si = n.add_input(options.ports.si);
  NodeId se = n.add_input(options.ports.se);
  ScanConfig config;
  config.ports = options.ports;
  config.select_net = options.ports.se;

  // Sources chosen against the pre-scan structure, then muxes spliced in.
  std::vector<NodeId> link_out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    NodeId ff = order[i];
    config.chain.push_back(n.name_of(ff));
    auto km = key_mux.find(ff);
    if (options.tap == ScanTap::KeyMux && km != key_mux.end()) {
      if (qbar_links.count(i) != 0) {
        throw Error(ErrorKind::InvalidArgument,
                    "link " + std::to_string(i) + " leaves encrypted flip-flop '" + n.name_of(ff) +
                        "' through its key mux and cannot also use Qbar");
      }
      link_out.push_back(km->second);
      config.links.push_back(LinkSource::KeyMux);
    } else if (qbar_links.count(i) != 0) {
      link_out.push_back(n.ensure_qbar(ff));
      config.links.push_back(LinkSource::Qbar);
    } else {
      link_out.push_back(ff);
      config.links.push_back(LinkSource::Q);
    }
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    NodeId ff = order[i];
    NodeId d = n.fanins(ff)[0];
    NodeId scan_src = i == 0 ? si : link_out[i - 1];
    NodeId mux = n.add_gate(n.unique_name(n.name_of(ff) + "_smux"), GateKind::Mux2, {se, d, scan_src});
    n.set_fanin(ff, 0, mux);
  }
  NodeId so = n.add_gate(options.ports.so, GateKind::Buf, {link_out.back()});
  n.add_output(so);
  n.set_scan(config);
  return n;
}

Netlist insert_scan_controller(const Netlist& original) {
  if (!original.scan()) throw Error(ErrorKind::InvalidArgument, "insert a scan chain before the controller");
  if (original.scan()->controller) {
    throw Error(ErrorKind::ControllerPresent, "netlist already has a scan controller");
  }
  Netlist n = original;
  ScanConfig config = *n.scan();
  if (n.find(config.ports.rst)) {
    throw Error(ErrorKind::InvalidArgument, "port name '" + config.ports.rst + "' already in use");
  }
  const auto muxes = scan_muxes(n);
  NodeId se = n.id(config.ports.se);
  NodeId rst = n.add_input(config.ports.rst);

  NodeId a = n.ref(n.unique_name("ctl_a"));
  NodeId q = n.add_dff(n.unique_name("ctl_q"), a);
  NodeId b = n.add_gate(n.unique_name("ctl_b"), GateKind::And, {q, se});
  n.define(a, GateKind::Or, {rst, b});
  NodeId c = n.add_gate(n.unique_name("ctl_c"), GateKind::Xor, {b, se});
  NodeId d = n.add_gate(n.unique_name("ctl_d"), GateKind::And, {rst, a});
  for (NodeId m : muxes) n.set_fanin(m, 0, c);

  config.controller = true;
  config.select_net = n.name_of(c);
  config.controller_ff = n.name_of(q);
  config.reset_net = n.name_of(d);
  n.set_scan(config);
  return n;
}

}  // namespace fflock
