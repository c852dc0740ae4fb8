// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fflock/bits.hpp"
#include "fflock/netlist.hpp"

namespace fflock {

enum class Scheme : std::uint8_t { Eff, Xor, Mux, Oc };

const char* to_string(Scheme scheme);
std::optional<Scheme> scheme_from_string(std::string_view text);

struct Placement {
  std::size_t key_index = 0;
  std::string key_name;
  Scheme scheme = Scheme::Eff;
  // Flip-flop for EFF, the locked net for the others.
  std::string site;
  // EFF: mux inputs swapped. XOR: XNOR used. MUX/OC: true line on in1.
  bool inverted = false;
};

struct EncryptionResult {
  Netlist netlist;
  Bits correct_key;
  std::vector<Placement> placements;
};

struct EffOptions {
  // Swap each key mux's data inputs on a seeded coin flip, so the correct
  // key is uniformly random. When false every correct bit selects the
  // output the design used.
  bool randomize_polarity = true;
};

// Puts a MUX(key, Q, Qbar) behind each listed flip-flop and moves the
// flip-flop's functional fanout onto it.
EncryptionResult encrypt_flip_flop(const Netlist& netlist, const std::vector<NodeId>& ffs, std::uint64_t seed,
                                   const EffOptions& options = {});

// XOR/XNOR key gates on k distinct random logic-gate outputs.
EncryptionResult encrypt_xor_random(const Netlist& netlist, std::size_t k, std::uint64_t seed);
// MUX key gates choosing between the locked net and a random net outside
// its combinational fanout.
EncryptionResult encrypt_mux_random(const Netlist& netlist, std::size_t k, std::uint64_t seed);
// Obfuscation cells: MUX between the locked net and its complement.
EncryptionResult encrypt_oc(const Netlist& netlist, std::size_t k, std::uint64_t seed);

// Encryption keeps the order of functional outputs but may rename an output
// driven straight from an encrypted flip-flop; this maps output ids of
// `from` to the ids at the same positions in `to`.
std::vector<NodeId> map_outputs(const Netlist& from, const Netlist& to, const std::vector<NodeId>& outputs);

// Nets eligible as XOR/MUX/OC sites: functional logic-gate outputs.
std::vector<NodeId> lockable_nets(const Netlist& netlist);

enum class ScanTap : std::uint8_t {
  KeyMux,  // an encrypted cell drives the chain through its key mux
  RawQ,    // every cell drives the chain from Q (or Qbar when listed)
};

struct ScanOptions {
  // Permutation of the design flip-flops; empty means declaration order.
  std::vector<NodeId> order;
  // Link indices whose cell drives the chain from Qbar.
  std::vector<std::size_t> qbar_links;
  ScanTap tap = ScanTap::KeyMux;
  ScanPorts ports;
};

// Replaces every flip-flop with a mux-D scan cell and chains them SI to SO.
Netlist insert_scan(const Netlist& netlist, const ScanOptions& options = {});

enum class ScanOrder : std::uint8_t { Declaration, EncryptedFirst, UnencryptedFirst, Random };

const char* to_string(ScanOrder order);
std::optional<ScanOrder> scan_order_from_string(std::string_view text);

// Chain order for a policy. Encrypted flip-flops are those behind an EFF key
// mux; relative order inside each group follows declaration order.
std::vector<NodeId> scan_order(const Netlist& netlist, ScanOrder policy, std::uint64_t seed = 0);

// Adds the reset-gated scan controller: a scan attempted right after a
// global reset stays disabled until SE returns to 0.
Netlist insert_scan_controller(const Netlist& netlist);

}  // namespace fflock
