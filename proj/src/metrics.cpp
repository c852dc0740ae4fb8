// SPDX-License-Identifier: Apache-2.0
#include "fflock/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "fflock/cone.hpp"
#include "fflock/error.hpp"
#include "fflock/sim.hpp"

namespace fflock {

CellAreaTable CellAreaTable::standard() {
  CellAreaTable t;
  t.set("XOR2", 10);
  t.set("XNOR2", 10);
  t.set("MUX2", 9);
  t.set("AND2", 5);
  t.set("NAND2", 4);
  return t;
}

void CellAreaTable::set(const std::string& cell, double area) {
  if (!(area > 0)) throw Error(ErrorKind::InvalidArgument, "cell area for " + cell + " must be positive");
  cells_[cell] = area;
}

double CellAreaTable::at(const std::string& cell) const {
  auto it = cells_.find(cell);
  if (it == cells_.end()) throw Error(ErrorKind::MissingCell, "cell area table has no entry for " + cell);
  return it->second;
}

namespace {

// n-input gate as a tree: (n - 2) plain 2-input cells and one output cell.
double tree(const CellAreaTable& t, std::size_t inputs, const char* plain, const char* last) {
  if (inputs < 2) return 0;
  return static_cast<double>(inputs - 2) * t.at(plain) + t.at(last);
}

}  // namespace

AreaReport area_estimate(const std::string& scheme, std::size_t k, std::size_t n_block, std::optional<double> base,
                         const CellAreaTable& t, double dff_area) {
  AreaReport r;
  r.scheme = scheme;
  r.key_bits = k;
  const double kd = static_cast<double>(k);
  if (scheme == "eff") {
    r.key_gate_area = kd * t.at("MUX2");
    r.controller_area = t.at("XOR2") + 2 * t.at("AND2") + t.at("AND2");
    r.controller_dff_area = dff_area;
    r.notes.push_back("controller OR gate costed as AND2");
    if (dff_area == 0) r.notes.push_back("controller flip-flop area not included");
  } else if (scheme == "xor") {
    r.key_gate_area = kd * t.at("XOR2");
  } else if (scheme == "mux") {
    r.key_gate_area = kd * t.at("MUX2");
  } else if (scheme == "oc") {
    r.key_gate_area = kd * (t.at("MUX2") + t.at("NOT"));
  } else if (scheme == "sarlock") {
    r.block_area = (kd + 1) * t.at("XOR2") + (2 * kd + 1) * t.at("AND2");
  } else if (scheme == "antisat") {
    if (n_block < 2) throw Error(ErrorKind::InvalidArgument, "Anti-SAT needs a block width N >= 2");
    const double nd = static_cast<double>(n_block);
    r.block_inputs = n_block;
    r.block_area = (3 * nd + 1) * t.at("XOR2") + nd * t.at("MUX2") + tree(t, n_block, "AND2", "NAND2") +
                   (nd - 1) * t.at("AND2") + t.at("AND2");
    r.notes.push_back("N-input NAND as (N-2) AND2 + NAND2; N-input AND as (N-1) AND2");
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown area scheme '" + scheme + "'");
  }
  r.total_extra = r.key_gate_area + r.block_area + r.controller_area + r.controller_dff_area;
  r.base_area = base;
  if (base && *base > 0) r.overhead_pct = 100.0 * r.total_extra / *base;
  return r;
}

double netlist_area(const Netlist& n, const CellAreaTable& t) {
  double area = 0;
  for (NodeId i = 0; i < n.size(); ++i) {
    const auto k = n.kind(i);
    const std::size_t w = n.fanins(i).size();
    switch (k) {
      case GateKind::And: area += static_cast<double>(w - 1) * t.at("AND2"); break;
      case GateKind::Nand: area += tree(t, w, "AND2", "NAND2"); break;
      case GateKind::Or: area += static_cast<double>(w - 1) * t.at("OR2"); break;
      case GateKind::Nor: area += tree(t, w, "OR2", "NOR2"); break;
      case GateKind::Xor: area += static_cast<double>(w - 1) * t.at("XOR2"); break;
      case GateKind::Xnor: area += tree(t, w, "XOR2", "XNOR2"); break;
      case GateKind::Mux2: area += t.at("MUX2"); break;
      case GateKind::Not: area += t.at("NOT"); break;
      case GateKind::Buf: area += t.at("BUF"); break;
      case GateKind::Dff: area += t.at("DFF"); break;
      default: break;
    }
  }
  return area;
}

Complexity attack_complexity(const Netlist& enc) {
  Complexity c;
  c.brute_inputs = enc.functional_inputs().size();
  c.brute_keys = enc.key_inputs().size();
  c.brute_exponent = c.brute_inputs + c.brute_keys;
  std::vector<NodeId> dffs = enc.design_dffs();
  sort_by_name(enc, dffs);
  for (NodeId ff : dffs) {
    Cone cone = icod(enc, ff);
    const std::size_t keys = cone.key_inputs.size(), pis = cone.primary_inputs.size();
    if (keys == 0) continue;
    if (!c.worst_ff || keys > c.cone_keys || (keys == c.cone_keys && pis > c.cone_inputs)) {
      c.worst_ff = ff;
      c.cone_keys = keys;
      c.cone_inputs = pis;
    }
  }
  if (c.worst_ff) c.scan_exponent = c.cone_inputs + c.cone_keys;
  return c;
}

std::vector<double> default_grid() {
  std::vector<double> g;
  for (int p = 5; p <= 100; p += 5) g.push_back(p);
  return g;
}

namespace {

struct Comparison {
  std::vector<double> hd_pct;  // per pattern over observed outputs
  std::uint64_t outside_bits = 0;
};

Comparison compare(const PoTrace& good, const PoTrace& bad, const std::vector<bool>& observed) {
  Comparison c;
  std::size_t observed_count = static_cast<std::size_t>(std::count(observed.begin(), observed.end(), true));
  c.hd_pct.assign(good.patterns(), 0.0);
  std::vector<std::uint64_t> per_pattern(good.patterns(), 0);
  for (std::size_t b = 0; b < good.batches(); ++b) {
    for (std::size_t t = 0; t < good.cycles(); ++t) {
      for (std::size_t o = 0; o < good.width(); ++o) {
        std::uint64_t diff = good.word(b, t, o) ^ bad.word(b, t, o);
        if (diff == 0) continue;
        if (!observed[o]) {
          c.outside_bits += static_cast<std::uint64_t>(std::popcount(diff));
          continue;
        }
        while (diff != 0) {
          per_pattern[b * 64 + static_cast<std::size_t>(std::countr_zero(diff))] += 1;
          diff &= diff - 1;
        }
      }
    }
  }
  const double denom = static_cast<double>(observed_count * good.cycles());
  for (std::size_t p = 0; p < good.patterns(); ++p) {
    c.hd_pct[p] = denom > 0 ? 100.0 * static_cast<double>(per_pattern[p]) / denom : 0.0;
  }
  return c;
}

std::vector<bool> observed_mask(const Netlist& enc, const std::vector<NodeId>& affected, bool restrict) {
  const auto outs = enc.functional_outputs();
  std::vector<bool> mask(outs.size(), !restrict);
  if (!restrict) return mask;
  std::unordered_set<NodeId> a(affected.begin(), affected.end());
  for (std::size_t i = 0; i < outs.size(); ++i) mask[i] = a.count(outs[i]) != 0;
  return mask;
}

Bits flip_random(const Bits& key, std::size_t count, Rng& rng) {
  std::vector<std::size_t> idx(key.size());
  std::iota(idx.begin(), idx.end(), 0);
  rng.shuffle(idx);
  Bits out = key;
  for (std::size_t i = 0; i < count; ++i) out[idx[i]] ^= 1U;
  return out;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

CorruptionCurve output_corruption(const Netlist& enc, const Bits& correct_key, const std::vector<NodeId>& affected,
                                  const CorruptionOptions& options) {
  if (options.restrict_to_affected && affected.empty()) {
    throw Error(ErrorKind::EmptyAffectedOutputs, "no affected outputs to measure corruption on");
  }
  if (options.patterns == 0) throw Error(ErrorKind::InvalidArgument, "pattern count must be positive");
  CompiledCircuit circuit(enc);
  const auto mask = observed_mask(enc, affected, options.restrict_to_affected);
  const auto good = run_patterns(circuit, correct_key, options.patterns, options.cycles, options.seed);
  const auto grid = options.grid.empty() ? default_grid() : options.grid;

  CorruptionCurve curve;
  const auto outs = enc.functional_outputs();
  for (std::size_t i = 0; i < outs.size(); ++i) {
    if (mask[i]) curve.observed_outputs.push_back(outs[i]);
  }
  Rng rng(derive_seed(options.seed, "wrong-keys"));
  for (double pct : grid) {
    if (pct < 0 || pct > 100) throw Error(ErrorKind::InvalidArgument, "wrong-key percentage out of range");
    CorruptionPoint pt;
    pt.wrong_pct = pct;
    pt.wrong_bits = static_cast<std::size_t>(std::ceil(pct * static_cast<double>(correct_key.size()) / 100.0 - 1e-9));
    const Bits wrong = flip_random(correct_key, pt.wrong_bits, rng);
    const auto bad = run_patterns(circuit, wrong, options.patterns, options.cycles, options.seed);
    auto cmp = compare(good, bad, mask);
    pt.hd_pct = std::move(cmp.hd_pct);
    pt.outside_hd_bits = cmp.outside_bits;
    pt.mean_hd_pct = mean(pt.hd_pct);
    pt.min_hd_pct = *std::min_element(pt.hd_pct.begin(), pt.hd_pct.end());
    pt.max_hd_pct = *std::max_element(pt.hd_pct.begin(), pt.hd_pct.end());
    curve.points.push_back(std::move(pt));
  }
  return curve;
}

std::string corruption_csv(const Netlist&, const CorruptionCurve& curve) {
  std::ostringstream out;
  out << "wrong_pct,wrong_bits,pattern,hd_pct\n";
  for (const auto& pt : curve.points) {
    for (std::size_t p = 0; p < pt.hd_pct.size(); ++p) {
      out << pt.wrong_pct << ',' << pt.wrong_bits << ',' << p << ',' << pt.hd_pct[p] << '\n';
    }
  }
  return out.str();
}

std::vector<KeySample> corruption_samples(const Netlist& enc, const Bits& correct_key,
                                          const std::vector<NodeId>& affected, std::size_t keys,
                                          std::size_t patterns, std::size_t cycles, std::uint64_t seed) {
  if (affected.empty()) throw Error(ErrorKind::EmptyAffectedOutputs, "no affected outputs to measure corruption on");
  if (correct_key.empty()) throw Error(ErrorKind::InvalidArgument, "netlist has no key bits");
  CompiledCircuit circuit(enc);
  const auto mask = observed_mask(enc, affected, true);
  const auto stimulus = pattern_words(patterns, cycles, circuit.functional_inputs().size(), seed);
  const auto good = run_stimulus(circuit, correct_key, stimulus, patterns, cycles);
  Rng rng(derive_seed(seed, "sample-keys"));
  std::vector<KeySample> out;
  for (std::size_t i = 0; i < keys; ++i) {
    KeySample s;
    s.wrong_bits = 1 + static_cast<std::size_t>(rng.below(correct_key.size()));
    const Bits wrong = flip_random(correct_key, s.wrong_bits, rng);
    const auto bad = run_stimulus(circuit, wrong, stimulus, patterns, cycles);
    auto cmp = compare(good, bad, mask);
    s.mean_hd_pct = mean(cmp.hd_pct);
    s.outside_hd_bits = cmp.outside_bits;
    out.push_back(s);
  }
  return out;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error(ErrorKind::WidthMismatch, "pearson: series lengths differ");
  if (x.size() < 2) return 0;
  const double mx = mean(x), my = mean(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<SchemeCorruption> avg_corruption_compare(const Netlist& n, const std::vector<Scheme>& schemes,
                                                     std::size_t k, std::uint64_t seed, std::size_t patterns,
                                                     std::size_t cycles) {
  std::vector<SchemeCorruption> rows;
  for (Scheme s : schemes) {
    EncryptionResult enc;
    std::vector<NodeId> affected;
    const std::uint64_t enc_seed = derive_seed(seed, std::string("encrypt-") + to_string(s));
    switch (s) {
      case Scheme::Eff: {
        auto sel = select_flip_flops(n);
        auto ffs = pick_key_ffs(n, sel, k, derive_seed(seed, "pick"));
        enc = encrypt_flip_flop(n, ffs, enc_seed);
        affected = sel.affected_outputs;
        break;
      }
      case Scheme::Xor: enc = encrypt_xor_random(n, k, enc_seed); break;
      case Scheme::Mux: enc = encrypt_mux_random(n, k, enc_seed); break;
      case Scheme::Oc: enc = encrypt_oc(n, k, enc_seed); break;
    }
    SchemeCorruption row;
    row.scheme = s;
    row.key_bits = k;
    CompiledCircuit circuit(enc.netlist);
    const auto stimulus = pattern_words(patterns, cycles, circuit.functional_inputs().size(), seed);
    Bits wrong = enc.correct_key;
    for (auto& b : wrong) b ^= 1U;
    const auto good = run_stimulus(circuit, enc.correct_key, stimulus, patterns, cycles);
    const auto bad = run_stimulus(circuit, wrong, stimulus, patterns, cycles);
    const auto all = observed_mask(enc.netlist, {}, false);
    row.mean_hd_all_pct = mean(compare(good, bad, all).hd_pct);
    if (s == Scheme::Eff) {
      const auto mapped = map_outputs(n, enc.netlist, affected);
      const auto mask = observed_mask(enc.netlist, mapped, true);
      row.observed_outputs = mapped.size();
      row.mean_hd_pct = mean(compare(good, bad, mask).hd_pct);
    } else {
      row.observed_outputs = all.size();
      row.mean_hd_pct = row.mean_hd_all_pct;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string avg_corruption_csv(const std::vector<SchemeCorruption>& rows) {
  std::ostringstream out;
  out << "scheme,key_bits,observed_outputs,mean_hd_pct,mean_hd_all_pct\n";
  for (const auto& r : rows) {
    out << to_string(r.scheme) << ',' << r.key_bits << ',' << r.observed_outputs << ',' << r.mean_hd_pct << ','
        << r.mean_hd_all_pct << '\n';
  }
  return out.str();
}

}  // namespace fflock
