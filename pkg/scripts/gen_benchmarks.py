#!/usr/bin/env python3
"""Generate the bundled stand-in benchmark circuits.

The classic ISCAS-85 bench files for c432/c499/c880 cannot be redistributed
from here, so the package ships deterministic stand-ins with the same
interface widths and a comparable gate count, built from heavily repeated
slices so that structural clustering has material to work with:

* gen432 - 36 in / 7 out: three 9-wide request banks with enables, prefix
  grant chains, and cross-bank combine logic.
* gen499 - 41 in / 32 out: 32 data bits with 8 syndrome parity trees, pair
  decoders, and per-bit correction slices.
* gen880 - 60 in / 26 out: a 16-bit two-operand ALU slice array with dual
  ripple carry chains, operation decode, masking, and flag trees.

The script is pure construction (no RNG); run it from the repo root to
regenerate the .bench files under src/simll/benchmarks/.
"""

from __future__ import annotations

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from simll.bench import Gate, GateType, Netlist, validate, write_bench

OUT_DIR = pathlib.Path(__file__).resolve().parents[1] / "src" / "simll" / "benchmarks"


class Builder:
    def __init__(self, name: str):
        self.name = name
        self.inputs: list[str] = []
        self.outputs: list[str] = []
        self.gates: list[Gate] = []

    def inp(self, name: str) -> str:
        self.inputs.append(name)
        return name

    def gate(self, name: str, kind: GateType, *ins: str) -> str:
        self.gates.append(Gate(name, kind, tuple(ins)))
        return name

    def tree(self, prefix: str, kind: GateType, leaves: list[str]) -> str:
        """Balanced 2-input reduction tree over ``leaves``."""
        level = list(leaves)
        step = 0
        while len(level) > 1:
            nxt = []
            for i in range(0, len(level) - 1, 2):
                nxt.append(
                    self.gate(f"{prefix}_t{step}_{i // 2}", kind, level[i], level[i + 1])
                )
            if len(level) % 2:
                nxt.append(level[-1])
            level = nxt
            step += 1
        return level[0]

    def outtree(self, name: str, kind: GateType, leaves: list[str]) -> str:
        """Reduction tree whose root is buffered into output ``name``."""
        root = self.tree(f"{name}w", kind, leaves)
        out = self.gate(name, GateType.BUF, root)
        self.outputs.append(out)
        return out

    def build(self) -> Netlist:
        n = Netlist(
            name=self.name,
            inputs=tuple(self.inputs),
            key_inputs=(),
            outputs=tuple(self.outputs),
            gates=tuple(self.gates),
        )
        diags = validate(n)
        if diags:
            raise SystemExit(f"{self.name}: generated netlist invalid: {diags[0].message}")
        return n


def gen432() -> Netlist:
    b = Builder("gen432")
    req = [[b.inp(f"r{bank * 9 + i}") for i in range(9)] for bank in range(3)]
    en = [b.inp(f"e{i}") for i in range(9)]

    masked = [
        [b.gate(f"m{bank}_{i}", GateType.AND, req[bank][i], en[i]) for i in range(9)]
        for bank in range(3)
    ]
    parity = [b.tree(f"par{bank}", GateType.XOR, masked[bank]) for bank in range(3)]

    # prefix chains, first-grant extraction, and a binary grant-index
    # encoder per bank; XOR encoders keep every grant wire observable
    enc: list[list[str]] = []
    qlast = []
    for bank in range(3):
        q = [masked[bank][0]]
        for i in range(1, 9):
            q.append(b.gate(f"q{bank}_{i}", GateType.OR, q[i - 1], masked[bank][i]))
        qlast.append(q[8])
        grants = {}
        for i in range(1, 8):
            nq = b.gate(f"nq{bank}_{i}", GateType.NOT, q[i])
            grants[i] = b.gate(f"gr{bank}_{i}", GateType.AND, masked[bank][i + 1], nq)
        enc.append(
            [
                b.tree(
                    f"enc{bank}_{j}",
                    GateType.XOR,
                    [grants[i] for i in range(1, 8) if (i >> j) & 1],
                )
                for j in range(3)
            ]
        )

    # cross-bank per-slot compare, observed both ways: any-hit OR and parity
    combined = []
    for i in range(9):
        c = b.gate(f"c{i}", GateType.XNOR, masked[0][i], masked[1][i])
        combined.append(b.gate(f"d{i}", GateType.XOR, c, masked[2][i]))
    dsum = b.tree("dsum", GateType.OR, combined)
    dmix = b.tree("dmix", GateType.XOR, combined)

    for bank in range(3):
        gated = b.gate(f"oa{bank}", GateType.NAND, qlast[bank], dsum)
        b.outputs.append(b.gate(f"oact{bank}", GateType.XNOR, gated, dmix))
        mixed = b.tree(
            f"oe{bank}", GateType.XOR, [enc[k][bank] for k in range(3)] + [qlast[bank]]
        )
        b.outputs.append(b.gate(f"oenc{bank}", GateType.XOR, mixed, parity[bank]))
    t = b.gate("oglob_t", GateType.NAND, qlast[1], qlast[2])
    b.outputs.append(b.gate("oglob", GateType.NAND, qlast[0], t))
    return b.build()


def gen499() -> Netlist:
    b = Builder("gen499")
    data = [b.inp(f"d{i}") for i in range(32)]
    chk = [b.inp(f"p{j}") for j in range(8)]
    en = b.inp("en")

    # per-data-bit 8-bit codes; low five bits are the index, high three mirror
    # the low ones so every syndrome tree gets leaves
    codes = [i | ((i & 0b111) << 5) for i in range(32)]

    syn = []
    for j in range(8):
        leaves = [data[i] for i in range(32) if (codes[i] >> j) & 1] + [chk[j]]
        syn.append(b.tree(f"s{j}", GateType.XOR, leaves))
    nsyn = [b.gate(f"ns{j}", GateType.NOT, syn[j]) for j in range(8)]

    # pair decoders: for syndrome pair (2p, 2p+1) build all four value terms
    terms: dict[tuple[int, int], str] = {}
    for p in range(4):
        lo, hi = syn[2 * p], syn[2 * p + 1]
        nlo, nhi = nsyn[2 * p], nsyn[2 * p + 1]
        terms[(p, 0)] = b.gate(f"t{p}_0", GateType.AND, nlo, nhi)
        terms[(p, 1)] = b.gate(f"t{p}_1", GateType.AND, lo, nhi)
        terms[(p, 2)] = b.gate(f"t{p}_2", GateType.AND, nlo, hi)
        terms[(p, 3)] = b.gate(f"t{p}_3", GateType.AND, lo, hi)

    # corrected data with syndrome and match diagnostics folded in; the
    # half-width match terms fire often enough to stay observable
    for i in range(32):
        code = codes[i]
        picks = [terms[(p, (code >> (2 * p)) & 3)] for p in range(4)]
        lo = b.gate(f"f{i}_lo", GateType.AND, picks[0], picks[1])
        hi = b.gate(f"f{i}_hi", GateType.AND, picks[2], picks[3])
        fm = b.gate(f"fm{i}", GateType.AND, lo, en)
        b.outputs.append(
            b.gate(f"o{i}", GateType.XOR, data[i], fm, syn[i % 8], hi)
        )
    return b.build()


def gen880() -> Netlist:
    b = Builder("gen880")
    a = [b.inp(f"a{i}") for i in range(16)]
    bb = [b.inp(f"b{i}") for i in range(16)]
    mask = [b.inp(f"m{i}") for i in range(16)]
    sel = [b.inp(f"sel{i}") for i in range(4)]
    cin = b.inp("cin")
    en2 = b.inp("en2")
    flg = [b.inp(f"f{i}") for i in range(6)]

    prop = [b.gate(f"p{i}", GateType.XOR, a[i], bb[i]) for i in range(16)]
    gen = [b.gate(f"g{i}", GateType.AND, a[i], bb[i]) for i in range(16)]
    disj = [b.gate(f"u{i}", GateType.OR, a[i], bb[i]) for i in range(16)]

    def carry_chain(tag: str, c0: str) -> list[str]:
        chain = [c0]
        for i in range(16):
            w = b.gate(f"{tag}w{i}", GateType.AND, prop[i], chain[i])
            chain.append(b.gate(f"{tag}c{i + 1}", GateType.OR, gen[i], w))
        return chain

    carry = carry_chain("", cin)
    ncin = b.gate("ncin", GateType.NOT, cin)
    carry1 = carry_chain("k", ncin)

    sums = [b.gate(f"sum{i}", GateType.XOR, prop[i], carry[i]) for i in range(16)]

    nsel0 = b.gate("nsel0", GateType.NOT, sel[0])
    nsel1 = b.gate("nsel1", GateType.NOT, sel[1])
    dand = b.gate("dand", GateType.AND, nsel0, nsel1)
    dor = b.gate("dor", GateType.AND, sel[0], nsel1)
    dxor = b.gate("dxor", GateType.AND, nsel0, sel[1])
    dadd = b.gate("dadd", GateType.AND, sel[0], sel[1])

    q = b.gate("q", GateType.NAND, en2, sel[2], sel[3])

    res = []
    raw = []
    for i in range(16):
        va = b.gate(f"ra{i}", GateType.AND, dand, gen[i])
        vo = b.gate(f"ro{i}", GateType.AND, dor, disj[i])
        vx = b.gate(f"rx{i}", GateType.AND, dxor, prop[i])
        vs = b.gate(f"rs{i}", GateType.AND, dadd, sums[i])
        r = b.tree(f"r{i}", GateType.OR, [va, vo, vx, vs])
        rm = b.gate(f"rm{i}", GateType.XNOR, r, mask[i])
        raw.append(r)
        res.append(rm)
        # carry folded in keeps the adder observable on every op code
        b.outputs.append(b.gate(f"out{i}", GateType.XNOR, rm, q, carry[i + 1]))

    b.outputs.append(b.gate("parity", GateType.XOR, *res))
    b.outputs.append(b.gate("cout", GateType.BUF, carry[16]))
    b.outputs.append(b.gate("ovf", GateType.XOR, carry[16], carry[15]))
    b.outputs.append(b.gate("cout1", GateType.BUF, carry1[16]))
    # XOR observability trees: the spare chain, the raw sums and operand
    # disjunctions (reachable on every op code, unlike the muxed result),
    # and the comparator slices
    b.outtree("kpar", GateType.XOR, carry1[1:])
    b.outtree("spar", GateType.XOR, sums)
    b.outtree("upar", GateType.XOR, disj)
    b.outtree("rpar", GateType.XOR, raw)
    eqs = [b.gate(f"eq{i}", GateType.XNOR, a[i], bb[i]) for i in range(16)]
    b.outtree("eqpar", GateType.XOR, eqs)

    b.outtree("fpar", GateType.XOR, list(flg))
    return b.build()


def main() -> None:
    for build in (gen432, gen499, gen880):
        n = build()
        path = OUT_DIR / f"{n.name}.bench"
        path.write_text(write_bench(n))
        print(
            f"{n.name}: {len(n.inputs)} inputs, {len(n.outputs)} outputs, "
            f"{len(n.gates)} gates -> {path}"
        )


if __name__ == "__main__":
    main()
