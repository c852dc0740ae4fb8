// SPDX-License-Identifier: Apache-2.0
#include "fflock/bench.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "fflock/error.hpp"

namespace fflock {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  return std::none_of(s.begin(), s.end(), [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '=' || c == '(' || c == ')' || c == ',' ||
           c == '#';
  });
}

std::vector<std::string> split_args(std::string_view body, int line, bool names = true) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto comma = body.find(',', start);
    auto piece = trim(body.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (names && !valid_name(piece)) throw Error(ErrorKind::Syntax, "bad signal name '" + std::string(piece) + "'", line);
    out.emplace_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Parses "WORD(args)" into WORD and its argument text.
bool split_call(std::string_view s, std::string_view& word, std::string_view& args) {
  auto open = s.find('(');
  if (open == std::string_view::npos || s.back() != ')') return false;
  word = trim(s.substr(0, open));
  args = s.substr(open + 1, s.size() - open - 2);
  return !word.empty();
}

std::optional<GateKind> gate_keyword(const std::string& word) {
  static const std::map<std::string, GateKind> table = {
      {"AND", GateKind::And},   {"NAND", GateKind::Nand}, {"OR", GateKind::Or},     {"NOR", GateKind::Nor},
      {"XOR", GateKind::Xor},   {"XNOR", GateKind::Xnor}, {"NOT", GateKind::Not},   {"INV", GateKind::Not},
      {"BUF", GateKind::Buf},   {"BUFF", GateKind::Buf},  {"MUX", GateKind::Mux2},  {"MUX2", GateKind::Mux2},
      {"DFF", GateKind::Dff},   {"QBAR", GateKind::Qbar},
  };
  if (auto it = table.find(word); it != table.end()) return it->second;
  return std::nullopt;
}

bool arity_ok(GateKind kind, std::size_t n) {
  switch (kind) {
    case GateKind::Mux2: return n == 3;
    case GateKind::Not:
    case GateKind::Buf:
    case GateKind::Dff:
    case GateKind::Qbar: return n == 1;
    default: return n >= 2;
  }
}

// key=value pairs separated by commas.
std::map<std::string, std::string> parse_pairs(std::string_view args, int line) {
  std::map<std::string, std::string> out;
  for (const auto& item : split_args(args, line, false)) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Syntax, "expected KEY=VALUE in '" + item + "'", line);
    if (!valid_name(std::string_view(item).substr(eq + 1))) {
      throw Error(ErrorKind::Syntax, "bad signal name in '" + item + "'", line);
    }
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

class Parser {
 public:
  explicit Parser(std::string name) : netlist_(std::move(name)) {}

  void line(std::string_view raw, int lineno) {
    auto text = trim(raw);
    if (text.empty()) return;
    if (text.front() == '#') {
      metadata(trim(text.substr(1)), lineno);
      return;
    }
    if (auto hash = text.find('#'); hash != std::string_view::npos) text = trim(text.substr(0, hash));

    auto eq = text.find('=');
    std::string_view word, args;
    if (eq == std::string_view::npos) {
      if (!split_call(text, word, args)) throw Error(ErrorKind::Syntax, "unrecognized line", lineno);
      auto kw = upper(word);
      auto names = split_args(args, lineno);
      if (names.size() != 1) throw Error(ErrorKind::Syntax, kw + " takes one signal", lineno);
      if (kw == "INPUT") {
        define(names[0], GateKind::Input, {}, lineno);
      } else if (kw == "KEYINPUT") {
        define(names[0], GateKind::KeyInput, {}, lineno);
      } else if (kw == "OUTPUT") {
        output_names_.emplace_back(names[0], lineno);
      } else {
        throw Error(ErrorKind::Syntax, "unknown declaration '" + std::string(word) + "'", lineno);
      }
      return;
    }

    auto lhs = trim(text.substr(0, eq));
    auto rhs = trim(text.substr(eq + 1));
    if (!valid_name(lhs)) throw Error(ErrorKind::Syntax, "bad signal name '" + std::string(lhs) + "'", lineno);
    if (!split_call(rhs, word, args)) throw Error(ErrorKind::Syntax, "expected FUNC(args)", lineno);
    auto kind = gate_keyword(upper(word));
    if (!kind) throw Error(ErrorKind::Syntax, "unknown gate '" + std::string(word) + "'", lineno);
    auto names = split_args(args, lineno);
    if (!arity_ok(*kind, names.size())) {
      throw Error(ErrorKind::BadArity,
                  std::string(to_string(*kind)) + " '" + std::string(lhs) + "' has " + std::to_string(names.size()) +
                      " fanins",
                  lineno);
    }
    std::vector<NodeId> fanins;
    for (const auto& nm : names) fanins.push_back(use(nm, lineno));
    define(std::string(lhs), *kind, std::move(fanins), lineno);
  }

  Netlist finish() {
    for (const auto& [nm, lineno] : output_names_) netlist_.add_output(use(nm, lineno));
    if (scan_) netlist_.set_scan(*scan_);
    for (const auto& d : validate(netlist_)) {
      int lineno = 0;
      if (auto id = netlist_.find(d.id)) {
        if (auto it = line_of_.find(*id); it != line_of_.end()) lineno = it->second;
      }
      switch (d.kind) {
        case DiagnosticKind::UndefinedSignal: throw Error(ErrorKind::UndefinedSignal, d.message, lineno);
        case DiagnosticKind::CombinationalCycle: throw Error(ErrorKind::CombinationalCycle, d.message, lineno);
        case DiagnosticKind::BadArity: throw Error(ErrorKind::BadArity, d.message, lineno);
        default: throw Error(ErrorKind::Syntax, d.message, lineno);
      }
    }
    return std::move(netlist_);
  }

 private:
  NodeId use(const std::string& nm, int lineno) {
    NodeId id = netlist_.ref(nm);
    line_of_.try_emplace(id, lineno);
    return id;
  }

  void define(const std::string& nm, GateKind kind, std::vector<NodeId> fanins, int lineno) {
    NodeId id = netlist_.ref(nm);
    netlist_.define(id, kind, std::move(fanins), lineno);
    line_of_[id] = lineno;
  }

  void metadata(std::string_view text, int lineno) {
    std::string_view word, args;
    if (text.rfind("SCAN", 0) != 0 || !split_call(text, word, args)) return;
    if (!scan_) scan_.emplace();
    if (word == "SCANCHAIN") {
      scan_->chain = split_args(args, lineno);
    } else if (word == "SCANLINKS") {
      for (const auto& s : split_args(args, lineno)) {
        auto link = link_from_string(s);
        if (!link) throw Error(ErrorKind::Syntax, "unknown scan link '" + s + "'", lineno);
        scan_->links.push_back(*link);
      }
    } else if (word == "SCANPORTS") {
      auto kv = parse_pairs(args, lineno);
      scan_->ports.si = kv["SI"];
      scan_->ports.so = kv["SO"];
      scan_->ports.se = kv["SE"];
      scan_->ports.rst = kv["RST"];
    } else if (word == "SCANSELECT") {
      scan_->select_net = std::string(trim(args));
    } else if (word == "SCANCONTROLLER") {
      auto kv = parse_pairs(args, lineno);
      scan_->controller = true;
      scan_->controller_ff = kv["FF"];
      scan_->reset_net = kv["RESET"];
    } else {
      throw Error(ErrorKind::Syntax, "unknown scan metadata '" + std::string(word) + "'", lineno);
    }
  }

  Netlist netlist_;
  std::unordered_map<NodeId, int> line_of_;
  std::vector<std::pair<std::string, int>> output_names_;
  std::optional<ScanConfig> scan_;
};

// Flip-flops in declaration order, then the remaining gates topologically
// with ties broken by name. Independent of node ids, so writing a parsed
// file reproduces it.
std::vector<NodeId> definition_order(const Netlist& n) {
  std::vector<NodeId> order(n.dffs().begin(), n.dffs().end());
  auto is_source = [&](NodeId id) {
    const auto k = n.kind(id);
    return k == GateKind::Input || k == GateKind::KeyInput || k == GateKind::Undefined || k == GateKind::Dff;
  };
  const auto fanouts = n.fanouts();
  std::vector<std::size_t> pending(n.size(), 0);
  std::set<std::pair<std::string, NodeId>> ready;
  for (NodeId id = 0; id < n.size(); ++id) {
    if (is_source(id)) continue;
    for (NodeId f : n.fanins(id)) {
      if (!is_source(f)) ++pending[id];
    }
    if (pending[id] == 0) ready.emplace(n.name_of(id), id);
  }
  while (!ready.empty()) {
    const NodeId id = ready.begin()->second;
    ready.erase(ready.begin());
    order.push_back(id);
    for (NodeId g : fanouts[id]) {
      if (!is_source(g) && --pending[g] == 0) ready.emplace(n.name_of(g), g);
    }
  }
  return order;
}

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

}  // namespace

Netlist parse_bench(std::string_view text, std::string name) {
  Parser parser(std::move(name));
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    parser.line(line, ++lineno);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return parser.finish();
}

Netlist read_bench_file(const std::string& path) {
  auto text = read_text_file(path);
  auto slash = path.find_last_of('/');
  auto base = path.substr(slash == std::string::npos ? 0 : slash + 1);
  if (auto dot = base.rfind('.'); dot != std::string::npos) base = base.substr(0, dot);
  return parse_bench(text, base);
}

std::string write_bench(const Netlist& n, const std::vector<std::string>& header) {
  std::ostringstream out;
  for (const auto& h : header) out << "# " << h << '\n';
  for (NodeId id : n.inputs()) out << "INPUT(" << n.name_of(id) << ")\n";
  for (NodeId id : n.key_inputs()) out << "KEYINPUT(" << n.name_of(id) << ")\n";
  for (NodeId id : n.outputs()) out << "OUTPUT(" << n.name_of(id) << ")\n";
  if (const auto& sc = n.scan()) {
    std::vector<std::string> links;
    for (auto l : sc->links) links.emplace_back(to_string(l));
    out << "# SCANCHAIN(" << join(sc->chain, ",") << ")\n";
    out << "# SCANLINKS(" << join(links, ",") << ")\n";
    out << "# SCANPORTS(SI=" << sc->ports.si << ",SO=" << sc->ports.so << ",SE=" << sc->ports.se
        << ",RST=" << sc->ports.rst << ")\n";
    if (!sc->select_net.empty()) out << "# SCANSELECT(" << sc->select_net << ")\n";
    if (sc->controller) {
      out << "# SCANCONTROLLER(FF=" << sc->controller_ff << ",RESET=" << sc->reset_net << ")\n";
    }
  }
  bool first = true;
  for (NodeId id : definition_order(n)) {
    const Node& node = n.node(id);
    if (first) {
      out << '\n';
      first = false;
    }
    out << node.name << " = " << to_string(node.kind) << '(';
    for (std::size_t i = 0; i < node.fanins.size(); ++i) {
      if (i) out << ", ";
      out << n.name_of(node.fanins[i]);
    }
    out << ")\n";
  }
  return out.str();
}

KeyFile parse_key_file(std::string_view text) {
  KeyFile kf;
  bool have_key = false;
  std::map<std::size_t, std::string> sites;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (auto at = line.find('@'); at != std::string_view::npos) {
      auto label = trim(line.substr(0, at));
      auto site = trim(line.substr(at + 1));
      if (label.size() < 2 || label.front() != 'k' ||
          !std::all_of(label.begin() + 1, label.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        throw Error(ErrorKind::Syntax, "bad key label '" + std::string(label) + "'", lineno);
      }
      sites[std::stoul(std::string(label.substr(1)))] = std::string(site);
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos || trim(line.substr(0, eq)) != "key") {
      throw Error(ErrorKind::Syntax, "expected 'key = <bits>'", lineno);
    }
    kf.key = bits_from_string(trim(line.substr(eq + 1)));
    have_key = true;
  }
  if (!have_key) throw Error(ErrorKind::Syntax, "key file has no 'key =' line");
  for (const auto& [i, site] : sites) {
    if (i != kf.sites.size()) throw Error(ErrorKind::Syntax, "key gate labels are not contiguous");
    kf.sites.push_back(site);
  }
  if (!kf.sites.empty() && kf.sites.size() != kf.key.size()) {
    throw Error(ErrorKind::Syntax, "key length does not match key gate count");
  }
  return kf;
}

std::string write_key_file(const KeyFile& kf, const std::vector<std::string>& header) {
  std::ostringstream out;
  for (const auto& h : header) out << "# " << h << '\n';
  out << "key = " << to_string(kf.key) << '\n';
  for (std::size_t i = 0; i < kf.sites.size(); ++i) out << 'k' << i << " @ " << kf.sites[i] << '\n';
  return out.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out << text;
}

}  // namespace fflock
