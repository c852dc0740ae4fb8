// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fflock/bits.hpp"
#include "fflock/netlist.hpp"

namespace fflock {

// Reads ISCAS'89 .bench text extended with KEYINPUT(x), MUX(sel, in0, in1),
// q_n = QBAR(q) and the `# SCAN...` metadata comments. Throws Error on
// syntax errors, undefined signals, duplicate definitions, wrong arity and
// combinational cycles.
Netlist parse_bench(std::string_view text, std::string name = {});
Netlist read_bench_file(const std::string& path);

// `header` lines are emitted as `# ` comments before the declarations.
std::string write_bench(const Netlist& netlist, const std::vector<std::string>& header = {});

// Sidecar key file: `key = <bits>`, then one `k<i> @ <site>` line per key
// gate, bit i belonging to key_inputs[i].
struct KeyFile {
  Bits key;
  std::vector<std::string> sites;
};

KeyFile parse_key_file(std::string_view text);
std::string write_key_file(const KeyFile& key, const std::vector<std::string>& header = {});

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace fflock
