#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Fetch the ISCAS'89 netlists shipped in the circuitgraph wheel and convert
them to .bench files under corpus/.

The wheel carries resynthesized gate-level Verilog (nand/nor/not cells and a
`fflopd` D flip-flop). Outputs tied to a constant have no .bench encoding and
are dropped; the number dropped is written into each file's header and into
corpus/conversion.json.

Usage: tools/fetch_corpus.py [--wheel PATH] [--out DIR]
"""

import argparse
import hashlib
import json
import re
import subprocess
import sys
import tempfile
import zipfile
from pathlib import Path

WHEEL = "circuitgraph==0.2.1"
CIRCUITS = ["s27", "s13207", "s38417", "s38584"]
GATES = {"and": "AND", "nand": "NAND", "or": "OR", "nor": "NOR", "xor": "XOR",
         "xnor": "XNOR", "not": "NOT", "buf": "BUF"}
FLOPS = {"fflopd", "ff", "dff"}


def strip_comments(text):
    text = re.sub(r"/\*.*?\*/", "", text, flags=re.S)
    return re.sub(r"//[^\n]*", "", text)


def names(decl):
    return [n.strip() for n in decl.split(",") if n.strip()]


def convert(verilog, name):
    text = strip_comments(verilog)
    # Only the first module is the design; cell models follow it.
    module = re.search(r"\bmodule\s+(\w+)\s*\((.*?)\);(.*?)\bendmodule", text, flags=re.S)
    if not module:
        raise ValueError(f"{name}: no module found")
    body = module.group(3)
    inputs, outputs = [], []
    for kind, decl in re.findall(r"\b(input|output)\s+([^;]*);", body):
        (inputs if kind == "input" else outputs).extend(names(decl))
    lines, dffs = [], []
    constants = {}
    for lhs, rhs in re.findall(r"\bassign\s+(\w+)\s*=\s*([^;]+);", body):
        rhs = rhs.strip()
        const = re.fullmatch(r"1'b([01])", rhs)
        if const:
            constants[lhs] = const.group(1)
        else:
            lines.append(f"{lhs} = BUF({rhs})")
    clocks = set()
    for cell, args in re.findall(r"^\s*(\w+)\s+\w+\s*\((.*?)\)\s*;", body, flags=re.S | re.M):
        if cell in ("input", "output", "wire", "assign", "reg"):
            continue
        if cell in FLOPS:
            ports = dict(re.findall(r"\.(\w+)\s*\(\s*(\w+)\s*\)", args))
            clocks.add(ports.get("CK") or ports.get("CLK") or ports.get("clk"))
            dffs.append(f"{ports['Q']} = DFF({ports['D']})")
            continue
        if cell not in GATES:
            raise ValueError(f"{name}: unsupported cell '{cell}'")
        pins = names(args)
        lines.append(f"{pins[0]} = {GATES[cell]}({', '.join(pins[1:])})")
    used = set()
    for line in lines + dffs:
        used.update(re.findall(r"\w+", line.split("=", 1)[1]))
    if any(c in used for c in constants):
        raise ValueError(f"{name}: a constant drives logic")
    inputs = [i for i in inputs if i not in clocks]
    kept = [o for o in outputs if o not in constants]
    dropped = len(outputs) - len(kept)
    out = [f"# {name}: converted from circuitgraph {WHEEL.split('==')[1]}",
           f"# dropped constant outputs: {dropped}"]
    out += [f"INPUT({i})" for i in inputs]
    out += [f"OUTPUT({o})" for o in kept]
    out += [""] + dffs + lines
    return "\n".join(out) + "\n", dropped


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--wheel", help="local circuitgraph wheel (default: pip download)")
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "corpus"))
    args = ap.parse_args()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        wheel = args.wheel
        if not wheel:
            subprocess.run([sys.executable, "-m", "pip", "download", WHEEL, "--no-deps", "-d", tmp, "-q"],
                           check=True)
            wheel = str(next(Path(tmp).glob("circuitgraph-*.whl")))
        report = {}
        with zipfile.ZipFile(wheel) as z:
            for c in CIRCUITS:
                verilog = z.read(f"circuitgraph/netlists/{c}.v").decode()
                bench, dropped = convert(verilog, c)
                (out_dir / f"{c}.bench").write_text(bench)
                report[c] = {"sha256": hashlib.sha256(bench.encode()).hexdigest(),
                             "dropped_constant_outputs": dropped}
                print(f"{c}: {dropped} constant outputs dropped")
    (out_dir / "conversion.json").write_text(json.dumps(report, indent=2) + "\n")
    manifest = out_dir / "manifest.json"
    if manifest.exists():
        expected = json.loads(manifest.read_text())["circuits"]
        for c, r in report.items():
            want = expected.get(c, {}).get("sha256")
            if want and want != r["sha256"]:
                print(f"warning: {c}.bench checksum differs from manifest", file=sys.stderr)


if __name__ == "__main__":
    main()
