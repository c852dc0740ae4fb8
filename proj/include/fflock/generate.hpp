// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "fflock/netlist.hpp"

namespace fflock {

// Shape of a random sequential circuit. With blocks > 1 the circuit is a
// union of independent sub-circuits that share nothing, so flip-flops of
// one block never reach the outputs of another.
struct GeneratorSpec {
  std::string name = "synth";
  std::size_t inputs = 4;
  std::size_t outputs = 2;
  std::size_t dffs = 4;
  std::size_t gates = 20;
  std::size_t blocks = 1;
  std::uint64_t seed = 1;
};

// Every gate drives something; flip-flop D inputs and outputs are gates.
// A few extra gates may be added to absorb otherwise dangling nets.
Netlist generate_circuit(const GeneratorSpec& spec);

// Presets matching the interface counts of the ISCAS'89 circuits they are
// named after (inputs, outputs, flip-flops, approximate gates).
GeneratorSpec s298_like(std::uint64_t seed);
GeneratorSpec s344_like(std::uint64_t seed);

}  // namespace fflock
