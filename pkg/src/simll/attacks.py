"""Oracle-less attacks for self-assessing locked netlists.

Every attack sees only the locked netlist (plus, for the link
indistinguishability oracle, the ground-truth records, since it answers
"could a structural model tell the candidates apart" rather than "what would
one guess").  Results are per-bit guesses over {0, 1, X} with evidence notes.
"""

from __future__ import annotations

import random
import re
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from .bench import Gate, GateType, Netlist, floating_wires
from .graph import to_graph
from .locking import LockRecord
from .sim import KeyGuess
from .similarity import DEFAULT_HOPS, StateInterner, link_fingerprint


class AttackError(ValueError):
    pass


@dataclass(frozen=True)
class AttackResult:
    attack: str
    guess: KeyGuess
    evidence: tuple[str, ...]  # one note per key bit
    params: dict

    def __post_init__(self):
        if len(self.guess.bits) != len(self.evidence):
            raise AttackError("evidence must cover every key bit")


def _key_nets(locked: Netlist) -> tuple[str, ...]:
    """Key inputs ordered by index; they must be contiguous from 0."""
    if not locked.key_inputs:
        raise AttackError("netlist has no key inputs")
    by_index = sorted(locked.key_inputs, key=lambda s: int(re.search(r"\d+$", s).group()))
    for i, net in enumerate(by_index):
        if net != f"keyinput{i}":
            raise AttackError(f"key inputs are not contiguous: missing keyinput{i}")
    return tuple(by_index)


# ---- structural collapse ----------------------------------------------


def collapse_keys(n: Netlist, assignment: Mapping[str, int]) -> Netlist:
    """Hard-code key bits that drive MUX selects and drop the bypassed MUXes.

    Every assigned key must drive only MUX select pins; each such MUX is
    removed and its readers rewired to the selected data net.  Unassigned
    keys are untouched.  The result deliberately keeps any wire the collapse
    left unread, so structural analysis can look for floats.
    """
    for net in assignment:
        if net not in n.key_inputs:
            raise AttackError(f"{net!r} is not a key input of this netlist")
    alias: dict[str, str] = {}
    dropped: set[str] = set()
    for g in n.gates:
        if g.kind is GateType.MUX and g.inputs[0] in assignment:
            sel = assignment[g.inputs[0]]
            alias[g.output] = g.inputs[1 + (1 if sel else 0)]
            dropped.add(g.output)
        else:
            for src in g.inputs:
                if src in assignment:
                    raise AttackError(
                        f"key {src!r} feeds gate {g.output!r} other than as a MUX select; "
                        "cannot collapse structurally"
                    )

    def resolve(net: str) -> str:
        seen = set()
        while net in alias:
            if net in seen:
                raise AttackError(f"alias cycle through {net!r}")
            seen.add(net)
            net = alias[net]
        return net

    gates = []
    for g in n.gates:
        if g.output in dropped:
            continue
        gates.append(Gate(g.output, g.kind, tuple(resolve(s) for s in g.inputs)))
    outputs = list(n.outputs)
    for i, net in enumerate(outputs):
        if net in dropped:
            # keep the port name alive
            gates.append(Gate(net, GateType.BUF, (resolve(net),)))
            dropped.discard(net)
    return Netlist(
        name=n.name,
        inputs=n.inputs,
        key_inputs=tuple(k for k in n.key_inputs if k not in assignment),
        outputs=n.outputs,
        gates=tuple(gates),
    )


def saam_attack(locked: Netlist) -> AttackResult:
    """Per-bit structural probe: a key value that leaves a wire floating is wrong.

    For each bit, both values are substituted (collapsing the MUXes that bit
    controls); if exactly one substitution produces a floating internal wire,
    the other value is predicted, otherwise the bit stays X.
    """
    keys = _key_nets(locked)
    bits: list[int | None] = []
    notes: list[str] = []
    controlled: dict[str, bool] = {k: False for k in keys}
    for g in locked.gates:
        if g.kind is GateType.MUX and g.inputs[0] in controlled:
            controlled[g.inputs[0]] = True
    base_floats = set(floating_wires(locked))
    for k in keys:
        if not controlled[k]:
            bits.append(None)
            notes.append("no controlled MUX")
            continue
        floats = []
        for v in (0, 1):
            collapsed = collapse_keys(locked, {k: v})
            floats.append(sorted(set(floating_wires(collapsed)) - base_floats))
        f0, f1 = floats
        if f0 and not f1:
            bits.append(1)
            notes.append(f"value 0 floats {f0[0]}")
        elif f1 and not f0:
            bits.append(0)
            notes.append(f"value 1 floats {f1[0]}")
        elif f0 and f1:
            bits.append(None)
            notes.append("floats under both values")
        else:
            bits.append(None)
            notes.append("no float under either value")
    return AttackResult("saam", KeyGuess(tuple(bits)), tuple(notes), {})


# ---- constant propagation ---------------------------------------------


@dataclass(frozen=True)
class FeatureVector:
    gate_count: int
    net_count: int
    type_counts: tuple[tuple[str, int], ...]  # (gate type, count), sorted by type

    def delta(self, other: "FeatureVector") -> dict[str, int]:
        d = {"gate_count": self.gate_count - other.gate_count,
             "net_count": self.net_count - other.net_count}
        a, b = dict(self.type_counts), dict(other.type_counts)
        for t in sorted(set(a) | set(b)):
            d[f"type_{t}"] = a.get(t, 0) - b.get(t, 0)
        return d


def feature_vector(n: Netlist) -> FeatureVector:
    counts = Counter(g.kind.value for g in n.gates)
    return FeatureVector(
        gate_count=len(n.gates),
        net_count=len(n.nets),
        type_counts=tuple(sorted(counts.items())),
    )


_CONST0 = "<0>"
_CONST1 = "<1>"


def simplify_const(n: Netlist, assignment: Mapping[str, int] | None = None) -> Netlist:
    """Constant propagation plus dead-logic removal.

    ``assignment`` pins inputs (key or primary) to constants.  Gates are
    folded through every type (MUX selects included), aliases are rewired,
    and gates feeding nothing reachable from an output are dropped.  Output
    ports always survive: an output that folds to an alias becomes a BUF, an
    output that folds to a constant is materialized as XOR/XNOR of a live
    input.  The result simulates identically to ``n`` under the assignment.
    """
    assignment = assignment or {}
    known = set(n.nets)
    for net in assignment:
        if net not in known:
            raise AttackError(f"assignment references unknown net {net!r}")

    # value: folded nets only -> net name or const marker
    value: dict[str, str] = {}
    for net in n.inputs + n.key_inputs:
        if net in assignment:
            value[net] = _CONST1 if assignment[net] else _CONST0

    def resolve(net: str) -> str:
        while net in value:
            net = value[net]
        return net

    taken = set(n.nets)

    def fresh(base: str) -> str:
        cand = base
        i = 1
        while cand in taken:
            cand = f"{base}_{i}"
            i += 1
        taken.add(cand)
        return cand

    emitted: list[Gate] = []
    for g in n.topo_order:
        folded = _fold_gate(g, [resolve(s) for s in g.inputs], fresh)
        if isinstance(folded, str):
            value[g.output] = folded
        else:
            emitted.extend(folded)

    live_inputs = [x for x in n.inputs + n.key_inputs if x not in assignment]
    out_gates: list[Gate] = []
    for net in n.outputs:
        r = resolve(net)
        if r == net:
            continue
        if r in (_CONST0, _CONST1):
            src = live_inputs[0] if live_inputs else next(
                (g.output for g in emitted), None
            )
            if src is None:
                raise AttackError(
                    f"output {net!r} folds to a constant but no live net remains to express it"
                )
            kind = GateType.XNOR if r == _CONST1 else GateType.XOR
            out_gates.append(Gate(net, kind, (src, src)))
        else:
            out_gates.append(Gate(net, GateType.BUF, (r,)))

    # Dead-logic sweep: keep exactly the transitive fan-in of the outputs.
    by_out = {g.output: g for g in emitted + out_gates}
    needed: set[str] = set()
    stack = [net for net in n.outputs if net in by_out]
    while stack:
        cur = stack.pop()
        if cur in needed:
            continue
        needed.add(cur)
        for src in by_out[cur].inputs:
            if src in by_out:
                stack.append(src)
    # Canonical gate order (by output net) so repeated runs compare equal.
    final_gates = tuple(
        sorted(
            (g for g in emitted + out_gates if g.output in needed),
            key=lambda g: g.output,
        )
    )
    return Netlist(
        name=n.name,
        inputs=tuple(i for i in n.inputs if i not in assignment),
        key_inputs=tuple(k for k in n.key_inputs if k not in assignment),
        outputs=n.outputs,
        gates=final_gates,
    )


def _fold_gate(g: Gate, ins: list[str], fresh) -> list[Gate] | str:
    """Fold one gate given resolved inputs.

    Returns either a value string (alias net or const marker) or the gates
    to emit (a helper inverter may precede the main gate; the last gate
    always drives ``g.output``).
    """
    kind = g.kind
    out = g.output
    if kind is GateType.MUX:
        s, a, b = ins
        if s == _CONST0:
            return a
        if s == _CONST1:
            return b
        if a == b:
            return a
        consts = (a in (_CONST0, _CONST1), b in (_CONST0, _CONST1))
        if all(consts):
            # MUX(s,0,1) = s; MUX(s,1,0) = NOT s
            return s if a == _CONST0 else [Gate(out, GateType.NOT, (s,))]
        if a == _CONST0:
            return [Gate(out, GateType.AND, (s, b))]
        if b == _CONST1:
            return [Gate(out, GateType.OR, (s, a))]
        if a == _CONST1:
            ns = fresh(f"{out}_ns")
            return [Gate(ns, GateType.NOT, (s,)), Gate(out, GateType.OR, (ns, b))]
        if b == _CONST0:
            ns = fresh(f"{out}_ns")
            return [Gate(ns, GateType.NOT, (s,)), Gate(out, GateType.AND, (ns, a))]
        return [Gate(out, kind, (s, a, b))]
    if kind is GateType.BUF:
        return ins[0]
    if kind is GateType.NOT:
        x = ins[0]
        if x == _CONST0:
            return _CONST1
        if x == _CONST1:
            return _CONST0
        return [Gate(out, kind, (x,))]
    if kind in (GateType.AND, GateType.NAND):
        live = [x for x in ins if x != _CONST1]
        if _CONST0 in live:
            return _CONST1 if kind is GateType.NAND else _CONST0
        if not live:
            return _CONST0 if kind is GateType.NAND else _CONST1
        if len(live) == 1:
            return live[0] if kind is GateType.AND else [Gate(out, GateType.NOT, (live[0],))]
        return [Gate(out, kind, tuple(live))]
    if kind in (GateType.OR, GateType.NOR):
        live = [x for x in ins if x != _CONST0]
        if _CONST1 in live:
            return _CONST0 if kind is GateType.NOR else _CONST1
        if not live:
            return _CONST1 if kind is GateType.NOR else _CONST0
        if len(live) == 1:
            return live[0] if kind is GateType.OR else [Gate(out, GateType.NOT, (live[0],))]
        return [Gate(out, kind, tuple(live))]
    if kind in (GateType.XOR, GateType.XNOR):
        parity = 1 if kind is GateType.XNOR else 0
        live = []
        for x in ins:
            if x == _CONST1:
                parity ^= 1
            elif x != _CONST0:
                live.append(x)
        if not live:
            return _CONST1 if parity else _CONST0
        if len(live) == 1:
            return live[0] if parity == 0 else [Gate(out, GateType.NOT, (live[0],))]
        return [Gate(out, GateType.XNOR if parity else GateType.XOR, tuple(live))]
    raise AttackError(f"unhandled gate type {kind}")


def cp_attack(locked: Netlist, margin: float = 0.0) -> AttackResult:
    """Constant-propagation attack with decision margin.

    For each key bit both constants are propagated and the netlist
    re-simplified; the wrong value tends to strand the displaced logic cone,
    so the value whose branch keeps more gates alive is predicted.  The bit
    is decided only when the gate-count reduction gap exceeds ``margin``.
    """
    keys = _key_nets(locked)
    bits: list[int | None] = []
    notes: list[str] = []
    base = feature_vector(locked).gate_count
    for k in keys:
        reductions = []
        for v in (0, 1):
            simplified = simplify_const(locked, {k: v})
            reductions.append(base - feature_vector(simplified).gate_count)
        gap = reductions[0] - reductions[1]  # >0: value 0 removes more logic
        if gap > margin:
            bits.append(1)
        elif gap < -margin:
            bits.append(0)
        else:
            bits.append(None)
        notes.append(f"reduction0={reductions[0]} reduction1={reductions[1]}")
    return AttackResult("cp", KeyGuess(tuple(bits)), tuple(notes), {"margin": margin})


# ---- link indistinguishability oracle ----------------------------------


@dataclass(frozen=True)
class LinkVerdict:
    mux: str
    key_index: int
    indistinguishable: bool
    true_digest: str
    false_digest: str


@dataclass(frozen=True)
class WlReport:
    hops: int
    verdicts: tuple[LinkVerdict, ...]
    rate: float  # fraction of key gates whose candidates cannot be told apart
    guess: KeyGuess  # X where indistinguishable, true bit where distinguishable

    @property
    def n_indistinguishable(self) -> int:
        return sum(1 for v in self.verdicts if v.indistinguishable)


def wl_distinguishability(
    locked: Netlist, records: Sequence[LockRecord], hops: int = DEFAULT_HOPS
) -> WlReport:
    """Can a structural model of depth ``hops`` separate true from false wire?

    Mirrors the link-prediction setup: all key MUXes and key inputs are
    removed from the graph, then for each record the two candidate links
    (true source -> load, false source -> load) are fingerprinted.  Equal
    fingerprints mean no message-passing model of that depth can prefer
    either candidate.  Self-assessment tool: it consumes ground truth and
    reports what an upper-bound attacker could resolve, predicting the true
    bit wherever the candidate pair is distinguishable.
    """
    if not records:
        raise AttackError("no lock records supplied")
    keys = _key_nets(locked)
    gate_map = locked.gate_map
    mux_names = set()
    for r in records:
        mux = gate_map.get(r.mux)
        if mux is None or mux.kind is not GateType.MUX:
            raise AttackError(f"record MUX {r.mux!r} not found in netlist")
        mux_names.add(r.mux)
    g = to_graph(locked).without_nodes(mux_names | set(locked.key_inputs))
    interner = StateInterner()
    verdicts: list[LinkVerdict] = []
    per_key_true: dict[int, int] = {}
    per_key_dist: dict[int, bool] = {}
    for r in records:
        for net in (r.true_link[0], r.false_link[0], r.true_link[1]):
            if net not in g.index:
                raise AttackError(f"record net {net!r} missing from MUX-free graph")
        load = r.true_link[1]
        fp_true = link_fingerprint(g, (r.true_link[0], load), hops, interner)
        fp_false = link_fingerprint(g, (r.false_link[0], load), hops, interner)
        same = fp_true.tokens == fp_false.tokens
        verdicts.append(
            LinkVerdict(
                mux=r.mux,
                key_index=r.key_index,
                indistinguishable=same,
                true_digest=fp_true.digest,
                false_digest=fp_false.digest,
            )
        )
        per_key_true[r.key_index] = r.true_slot
        if not same:
            per_key_dist[r.key_index] = True
    rate = sum(1 for v in verdicts if v.indistinguishable) / len(verdicts)
    bits: list[int | None] = []
    notes: list[str] = []
    for i, net in enumerate(keys):
        if i not in per_key_true:
            bits.append(None)
            notes.append("no record for this bit")
        elif per_key_dist.get(i):
            bits.append(per_key_true[i])
            notes.append("candidates distinguishable")
        else:
            bits.append(None)
            notes.append("candidates indistinguishable")
    return WlReport(
        hops=hops,
        verdicts=tuple(verdicts),
        rate=rate,
        guess=KeyGuess(tuple(bits)),
    )


def wl_attack(
    locked: Netlist, records: Sequence[LockRecord], hops: int = DEFAULT_HOPS
) -> AttackResult:
    """AttackResult wrapper around :func:`wl_distinguishability`."""
    report = wl_distinguishability(locked, records, hops)
    keys = _key_nets(locked)
    notes = []
    for i in range(len(keys)):
        vs = [v for v in report.verdicts if v.key_index == i]
        if not vs:
            notes.append("no record for this bit")
        elif all(v.indistinguishable for v in vs):
            notes.append("candidates indistinguishable")
        else:
            notes.append("candidates distinguishable")
    return AttackResult(
        "wl",
        report.guess,
        tuple(notes),
        {"hops": hops, "rate": report.rate},
    )


def random_guess(locked: Netlist, seed: int = 0) -> AttackResult:
    """Uniform random key guess; the no-information baseline."""
    keys = _key_nets(locked)
    rng = random.Random(seed)
    bits = tuple(rng.getrandbits(1) for _ in keys)
    return AttackResult(
        "random",
        KeyGuess(bits),
        tuple("coin flip" for _ in keys),
        {"seed": seed},
    )


# ---- guess files --------------------------------------------------------

_GUESS_LINE_RE = re.compile(r"^(keyinput\d+)\s*=\s*([01X])$")


def write_guess_file(result: AttackResult) -> str:
    lines = [f"# attack={result.attack}"]
    for k, v in sorted(result.params.items()):
        lines.append(f"# {k}={v}")
    for i, b in enumerate(result.guess.bits):
        val = "X" if b is None else str(b)
        lines.append(f"keyinput{i}={val}")
    return "\n".join(lines) + "\n"


def parse_guess_file(text: str) -> KeyGuess:
    found: dict[int, int | None] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _GUESS_LINE_RE.match(line)
        if not m:
            raise AttackError(f"guess file line {lineno}: cannot parse {raw.strip()!r}")
        idx = int(m.group(1)[len("keyinput"):])
        if idx in found:
            raise AttackError(f"guess file line {lineno}: duplicate bit keyinput{idx}")
        v = m.group(2)
        found[idx] = None if v == "X" else int(v)
    if not found:
        raise AttackError("guess file holds no bits")
    if set(found) != set(range(len(found))):
        raise AttackError("guess file key indices are not contiguous from 0")
    return KeyGuess(tuple(found[i] for i in range(len(found))))
