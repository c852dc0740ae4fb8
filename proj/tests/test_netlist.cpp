// SPDX-License-Identifier: Apache-2.0
#include <string>

#include "doctest.h"
#include "fflock/bench.hpp"
#include "fflock/encrypt.hpp"
#include "fflock/error.hpp"
#include "fflock/generate.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace fflock;

namespace {

ErrorKind parse_error(const std::string& text, int* line = nullptr) {
  try {
    parse_bench(text);
  } catch (const Error& e) {
    if (line) *line = e.line();
    return e.kind();
  }
  FAIL("parse succeeded");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("s27 interface counts") {
  Netlist n = fixtures::s27();
  CHECK(n.name() == "s27");
  CHECK(n.inputs().size() == 4);
  CHECK(n.outputs().size() == 1);
  CHECK(n.dffs().size() == 3);
  CHECK(n.gate_count() == 10);
  CHECK(n.key_inputs().empty());
  CHECK(validate(n).empty());
  CHECK(n.kind(n.id("G11")) == GateKind::Nor);
  CHECK(n.fanins(n.id("G5")) == std::vector<NodeId>{n.id("G10")});
}

TEST_CASE("extended syntax") {
  Netlist n = parse_bench(R"(
INPUT(a)
KEYINPUT(k)
OUTPUT(y)
q = DFF(d)
qn = QBAR(q)
d = xor(a, qn)
y = MUX(k, q, qn)
)");
  CHECK(n.key_inputs().size() == 1);
  CHECK(n.kind(n.id("qn")) == GateKind::Qbar);
  CHECK(n.qbar_of(n.id("q")) == n.id("qn"));
  CHECK(n.gate_count() == 2);
  auto km = find_key_muxes(n);
  REQUIRE(km.size() == 1);
  CHECK(km[0].dff == n.id("q"));
  CHECK_FALSE(km[0].swapped);
}

TEST_CASE("parse errors carry kind and line") {
  int line = 0;
  CHECK(parse_error("INPUT(a)\nOUTPUT(y)\ny = AND(a, b)\n", &line) == ErrorKind::UndefinedSignal);
  CHECK(line == 3);
  CHECK(parse_error("INPUT(a)\ny = NOT(a)\ny = BUF(a)\n", &line) == ErrorKind::DuplicateDefinition);
  CHECK(line == 3);
  CHECK(parse_error("INPUT(a)\nOUTPUT(x)\nx = AND(a, z)\nz = OR(a, x)\n") == ErrorKind::CombinationalCycle);
  CHECK(parse_error("INPUT(a)\nx = NOT(a, a)\n", &line) == ErrorKind::BadArity);
  CHECK(line == 2);
  CHECK(parse_error("INPUT(a)\nx = FROB(a)\n") == ErrorKind::Syntax);
  CHECK(parse_error("INPUT a\n") == ErrorKind::Syntax);
  CHECK(parse_error("INPUT(a)\nx = MUX(a, a)\n") == ErrorKind::BadArity);
}

TEST_CASE("empty netlist is valid") {
  Netlist n = parse_bench("# nothing here\n");
  CHECK(n.size() == 0);
  CHECK(validate(n).empty());
}

TEST_CASE("feedback through a flip-flop is not a cycle") {
  Netlist n = parse_bench("INPUT(a)\nOUTPUT(q)\nq = DFF(d)\nd = AND(a, q)\n");
  CHECK(validate(n).empty());
}

TEST_CASE("writer round trip keeps structure and scan metadata") {
  auto enc = fixtures::ten_cell_chain(true);
  const std::string text = write_bench(enc.netlist, {"round trip"});
  Netlist back = parse_bench(text, enc.netlist.name());
  CHECK_FALSE(difference(enc.netlist, back).has_value());
  REQUIRE(back.scan().has_value());
  CHECK(*back.scan() == *enc.netlist.scan());
  CHECK(write_bench(back, {"round trip"}) == text);
}

TEST_CASE("difference reports a changed gate") {
  Netlist a = fixtures::s27();
  Netlist b = parse_bench(write_bench(a));
  CHECK_FALSE(difference(a, b).has_value());
  Netlist c = parse_bench("INPUT(G0)\nOUTPUT(G17)\nG17 = NOT(G0)\n");
  CHECK(difference(a, c).has_value());
}

TEST_CASE("key file round trip") {
  KeyFile k{bits_from_string("10110"), {"a", "b", "c", "d", "e"}};
  KeyFile back = parse_key_file(write_key_file(k, {"seed 3"}));
  CHECK(back.key == k.key);
  CHECK(back.sites == k.sites);
}

TEST_CASE("generated circuits validate, are acyclic and round trip") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GeneratorSpec spec{"g", 5, 3, 6, 30, 1 + seed % 3, seed};
    Netlist n = generate_circuit(spec);
    CAPTURE(seed);
    CHECK(validate(n).empty());
    CHECK_FALSE(oracles::has_combinational_cycle(n));
    CHECK(n.inputs().size() == 5);
    CHECK(n.outputs().size() == 3);
    CHECK(n.dffs().size() == 6);
    Netlist back = parse_bench(write_bench(n), n.name());
    CHECK_FALSE(difference(n, back).has_value());
  }
}

TEST_CASE("cycle detection agrees with the closure oracle") {
  Rng rng(11);
  int cyclic = 0;
  for (int trial = 0; trial < 300; ++trial) {
    // Random AND graph over 8 nodes; some edges pass through flip-flops.
    Netlist n;
    NodeId a = n.add_input("a");
    const int gates = 8;
    std::vector<NodeId> g;
    for (int i = 0; i < gates; ++i) g.push_back(n.ref("n" + std::to_string(i)));
    for (int i = 0; i < gates; ++i) {
      NodeId x = g[rng.below(gates)];
      NodeId y = rng.coin() ? a : g[rng.below(gates)];
      if (rng.below(4) == 0) x = n.add_dff("f" + std::to_string(i), x);
      n.define(g[i], GateKind::And, {x, y});
    }
    const bool oracle = oracles::has_combinational_cycle(n);
    bool found = false;
    for (const auto& d : validate(n)) found = found || d.kind == DiagnosticKind::CombinationalCycle;
    CHECK(found == oracle);
    cyclic += oracle ? 1 : 0;
  }
  CHECK(cyclic > 0);
  CHECK(cyclic < 300);
}

TEST_CASE("unique names and redirect") {
  Netlist n = fixtures::s27();
  CHECK(n.unique_name("G5") != "G5");
  CHECK(n.unique_name("fresh") == "fresh");
  NodeId buf = n.add_gate("G11_copy", GateKind::Buf, {n.id("G11")});
  const NodeId skip[] = {buf};
  n.redirect_fanouts(n.id("G11"), buf, skip);
  CHECK(n.fanins(n.id("G17"))[0] == buf);
  CHECK(n.fanins(n.id("G6"))[0] == buf);
  CHECK(validate(n).empty());
}
