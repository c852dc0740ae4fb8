// SPDX-License-Identifier: Apache-2.0
// Small hand-built circuits shared by the tests.
#pragma once

#include <string>
#include <vector>

#include "fflock/bench.hpp"
#include "fflock/encrypt.hpp"
#include "fflock/netlist.hpp"

#ifndef FFLOCK_TEST_DATA
#define FFLOCK_TEST_DATA "tests/data"
#endif

namespace fixtures {

inline fflock::Netlist s27() { return fflock::read_bench_file(std::string(FFLOCK_TEST_DATA) + "/s27.bench"); }

// Two XOR-locked cones over six inputs. O2 sees all six inputs and both keys.
inline fflock::Netlist keyed_cones() {
  return fflock::parse_bench(R"(
INPUT(I1)
INPUT(I2)
INPUT(I3)
INPUT(I4)
INPUT(I5)
INPUT(I6)
KEYINPUT(k0)
KEYINPUT(k1)
OUTPUT(O1)
OUTPUT(O2)
A = DFF(g4)
B = DFF(g7)
g1 = AND(I1, I2)
g2 = XOR(g1, k0)
g3 = OR(I3, B)
g4 = NAND(g2, g3)
g5 = XNOR(I4, k1)
g6 = AND(g5, I5)
g7 = NOR(g6, I6)
O1 = AND(A, g2)
O2 = OR(g4, g7)
)",
                             "keyed_cones");
}

// Four flip-flops; DFF1 loads from inputs only, the others read state.
inline fflock::Netlist four_ff() {
  return fflock::parse_bench(R"(
INPUT(I1)
INPUT(I2)
INPUT(I3)
OUTPUT(O1)
DFF1 = DFF(d1)
DFF2 = DFF(d2)
DFF3 = DFF(d3)
DFF4 = DFF(d4)
d1 = AND(I1, I2)
d2 = OR(DFF1, I3)
d3 = XOR(DFF2, DFF4)
d4 = AND(DFF3, I1)
O1 = XOR(DFF4, DFF3)
)",
                             "four_ff");
}

// Six outputs over ten input-fed flip-flops. Hand-computed selection:
// O' = {O1, O2, O3}, overlap {F1, F2, F3}, strong {F2, F3}, weak {F1}.
inline fflock::Netlist selection_graph() {
  std::string text;
  for (int i = 1; i <= 10; ++i) text += "INPUT(I" + std::to_string(i) + ")\n";
  for (int i = 1; i <= 6; ++i) text += "OUTPUT(O" + std::to_string(i) + ")\n";
  for (int i = 1; i <= 10; ++i) text += "F" + std::to_string(i) + " = DFF(I" + std::to_string(i) + ")\n";
  text += R"(
O1 = AND(F1, F2, F3, F4)
O2 = AND(F1, F2, F3, F5)
O3 = AND(F1, F2, F3, F6)
O4 = AND(F7, F8)
O5 = AND(F8, F9)
O6 = AND(F10, F1)
)";
  return fflock::parse_bench(text, "selection_graph");
}

// A ring of `length` flip-flops DFF1..DFFn, each loading AND(I0, next).
inline fflock::Netlist ring(std::size_t length) {
  using namespace fflock;
  Netlist n("ring" + std::to_string(length));
  NodeId i0 = n.add_input("I0");
  std::vector<NodeId> ff;
  for (std::size_t i = 0; i < length; ++i) ff.push_back(n.ref("DFF" + std::to_string(i + 1)));
  for (std::size_t i = 0; i < length; ++i) {
    NodeId g = n.add_gate("d" + std::to_string(i + 1), GateKind::And, {i0, ff[(i + 1) % length]});
    n.define(ff[i], GateKind::Dff, {g});
  }
  n.add_output(n.add_gate("O1", GateKind::Xor, {i0, ff[0]}));
  return n;
}

// EFF keys on the listed ring cells (0-based), unswapped unless
// `random_polarity`, then a declaration-order chain with Qbar links.
inline fflock::EncryptionResult scanned_ring(std::size_t length, const std::vector<std::size_t>& encrypted,
                                             const std::vector<std::size_t>& qbar_links, bool controller = false,
                                             bool random_polarity = false, std::uint64_t seed = 1) {
  using namespace fflock;
  Netlist base = ring(length);
  std::vector<NodeId> ffs;
  for (std::size_t i : encrypted) ffs.push_back(base.id("DFF" + std::to_string(i + 1)));
  EncryptionResult r = encrypt_flip_flop(base, ffs, seed, EffOptions{random_polarity});
  ScanOptions so;
  so.qbar_links = qbar_links;
  r.netlist = insert_scan(r.netlist, so);
  if (controller) r.netlist = insert_scan_controller(r.netlist);
  return r;
}

// The ten-cell chain example: cells 1, 3, 5, 8 and 9 encrypted with K1..K5,
// cell 6 drives the chain from Qbar.
inline fflock::EncryptionResult ten_cell_chain(bool controller = false) {
  return scanned_ring(10, {0, 2, 4, 7, 8}, {5}, controller);
}

}  // namespace fixtures
