"""Combinational netlists in the ISCAS-85 ``.bench`` dialect.

The dialect understood here is the classic one (``INPUT(n)``, ``OUTPUT(n)``,
``n = GATE(a, b, ...)``) extended with a three-input ``MUX`` primitive and
with key inputs: any input whose name matches ``keyinput<digits>`` is treated
as a key bit rather than a primary input.  ``MUX(s, a, b)`` selects ``a`` when
``s = 0`` and ``b`` when ``s = 1``.  Only combinational circuits are handled;
sequential elements such as DFF are rejected at parse time.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping


class GateType(enum.Enum):
    AND = "AND"
    NAND = "NAND"
    OR = "OR"
    NOR = "NOR"
    XOR = "XOR"
    XNOR = "XNOR"
    NOT = "NOT"
    BUF = "BUF"
    MUX = "MUX"

    @property
    def min_arity(self) -> int:
        if self in (GateType.NOT, GateType.BUF):
            return 1
        if self is GateType.MUX:
            return 3
        return 2

    @property
    def max_arity(self) -> int | None:
        """Maximum fan-in, or None when unbounded."""
        if self in (GateType.NOT, GateType.BUF):
            return 1
        if self is GateType.MUX:
            return 3
        return None


# Sequential/unsupported cell names that deserve a pointed error message.
_SEQUENTIAL_TYPES = {"DFF", "DFFSR", "LATCH", "SDFF", "FF"}

KEY_INPUT_RE = re.compile(r"^keyinput(\d+)$")

_GATE_LINE_RE = re.compile(r"^(?P<out>[^\s=]+)\s*=\s*(?P<type>[A-Za-z]+)\s*\((?P<args>.*)\)$")
_IO_LINE_RE = re.compile(r"^(?P<kw>INPUT|OUTPUT)\s*\((?P<net>[^()\s]+)\)$", re.IGNORECASE)


class BenchError(ValueError):
    """Raised for malformed or unsupported bench content."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CycleError(BenchError):
    """Raised when the combinational network contains a directed cycle."""

    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__("combinational cycle through: " + " -> ".join(cycle))


@dataclass(frozen=True)
class Gate:
    """One named gate: ``output = kind(inputs...)``."""

    output: str
    kind: GateType
    inputs: tuple[str, ...]


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" or "warning"
    message: str
    location: str | None = None


@dataclass(frozen=True)
class Netlist:
    """An immutable combinational netlist.

    ``inputs`` holds primary inputs, ``key_inputs`` the ``keyinput<i>`` nets,
    both in declaration order.  ``gates`` keeps file order; topological order
    is derived on demand.  Construction does not validate; use
    :func:`validate` or :func:`parse_bench` (which rejects broken files).
    """

    name: str
    inputs: tuple[str, ...]
    key_inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    gates: tuple[Gate, ...]

    @cached_property
    def gate_map(self) -> dict[str, Gate]:
        return {g.output: g for g in self.gates}

    @cached_property
    def nets(self) -> tuple[str, ...]:
        """All declared nets: inputs, key inputs, then gate outputs, in order."""
        return self.inputs + self.key_inputs + tuple(g.output for g in self.gates)

    @cached_property
    def readers(self) -> dict[str, tuple[str, ...]]:
        """Map from net to the distinct gates (by output net) reading it."""
        out: dict[str, list[str]] = {n: [] for n in self.nets}
        for g in self.gates:
            for src in dict.fromkeys(g.inputs):
                if src in out:
                    out[src].append(g.output)
        return {n: tuple(v) for n, v in out.items()}

    def fanout(self, net: str) -> int:
        """Number of distinct gates reading ``net``."""
        return len(self.readers.get(net, ()))

    def is_input(self, net: str) -> bool:
        return net in self._input_set

    @cached_property
    def _input_set(self) -> frozenset[str]:
        return frozenset(self.inputs) | frozenset(self.key_inputs)

    @cached_property
    def topo_order(self) -> tuple[Gate, ...]:
        """Gates in topological order (ties broken by file order).

        Raises :class:`CycleError` when the gate network is cyclic.
        """
        indeg: dict[str, int] = {}
        dependents: dict[str, list[str]] = {}
        gm = self.gate_map
        for g in self.gates:
            gate_preds = {s for s in g.inputs if s in gm}
            indeg[g.output] = len(gate_preds)
            for s in gate_preds:
                dependents.setdefault(s, []).append(g.output)
        ready = [g.output for g in self.gates if indeg[g.output] == 0]
        order: list[Gate] = []
        seen = 0
        while ready:
            nxt: list[str] = []
            for name in ready:
                order.append(gm[name])
                seen += 1
                for d in dependents.get(name, ()):
                    indeg[d] -= 1
                    if indeg[d] == 0:
                        nxt.append(d)
            ready = nxt
        if seen != len(self.gates):
            raise CycleError(_find_cycle(gm))
        return tuple(order)


def _find_cycle(gate_map: Mapping[str, Gate]) -> list[str]:
    """Locate one directed cycle among gates, as a closed node list."""
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {name: WHITE for name in gate_map}
    stack: list[str] = []

    def visit(name: str) -> list[str] | None:
        color[name] = GRAY
        stack.append(name)
        for s in gate_map[name].inputs:
            if s not in gate_map:
                continue
            if color[s] == GRAY:
                i = stack.index(s)
                return stack[i:] + [s]
            if color[s] == WHITE:
                found = visit(s)
                if found:
                    return found
        stack.pop()
        color[name] = BLACK
        return None

    for name in gate_map:
        if color[name] == WHITE:
            found = visit(name)
            if found:
                return found
    raise AssertionError("no cycle found in cyclic netlist")


def parse_bench(text: str, name: str = "bench") -> Netlist:
    """Parse bench-format ``text`` into a :class:`Netlist`.

    Raises :class:`BenchError` with a line number for syntax problems,
    duplicate drivers, undefined nets, bad arity, or sequential elements, and
    :class:`CycleError` for combinational cycles.  Net names are
    case-sensitive; keywords and gate type names are not.
    """
    inputs: list[str] = []
    key_inputs: list[str] = []
    outputs: list[str] = []
    gates: list[Gate] = []
    declared: dict[str, int] = {}  # net -> line where it got a driver
    output_seen: dict[str, int] = {}

    def declare(net: str, lineno: int) -> None:
        if net in declared:
            raise BenchError(
                f"net {net!r} already driven (first declared on line {declared[net]})",
                lineno,
            )
        declared[net] = lineno

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _IO_LINE_RE.match(line)
        if m:
            net = m.group("net")
            if m.group("kw").upper() == "INPUT":
                declare(net, lineno)
                if KEY_INPUT_RE.match(net):
                    key_inputs.append(net)
                else:
                    inputs.append(net)
            else:
                if net in output_seen:
                    raise BenchError(
                        f"net {net!r} already marked OUTPUT on line {output_seen[net]}",
                        lineno,
                    )
                output_seen[net] = lineno
                outputs.append(net)
            continue
        m = _GATE_LINE_RE.match(line)
        if m:
            type_name = m.group("type").upper()
            if type_name in _SEQUENTIAL_TYPES:
                raise BenchError(
                    f"sequential element {type_name} is not supported; "
                    "only combinational circuits are handled",
                    lineno,
                )
            try:
                kind = GateType(type_name)
            except ValueError:
                raise BenchError(f"unknown gate type {type_name!r}", lineno) from None
            args = tuple(a.strip() for a in m.group("args").split(",") if a.strip())
            if len(args) < kind.min_arity or (
                kind.max_arity is not None and len(args) > kind.max_arity
            ):
                raise BenchError(
                    f"{type_name} expects "
                    + (
                        f"exactly {kind.min_arity}"
                        if kind.max_arity == kind.min_arity
                        else f"at least {kind.min_arity}"
                    )
                    + f" input(s), got {len(args)}",
                    lineno,
                )
            out = m.group("out")
            declare(out, lineno)
            gates.append(Gate(out, kind, args))
            continue
        raise BenchError(f"cannot parse line: {raw.strip()!r}", lineno)

    for g in gates:
        for src in g.inputs:
            if src not in declared:
                raise BenchError(f"gate {g.output!r} reads undefined net {src!r}")
    for net in outputs:
        if net not in declared:
            raise BenchError(f"OUTPUT({net}) references undefined net")

    n = Netlist(name, tuple(inputs), tuple(key_inputs), tuple(outputs), tuple(gates))
    n.topo_order  # raises CycleError on cyclic input
    return n


def load_bench(path) -> Netlist:
    """Read and parse a ``.bench`` file; the netlist is named after the file stem."""
    import pathlib

    p = pathlib.Path(path)
    return parse_bench(p.read_text(), name=p.stem)


class MuxStyle(enum.Enum):
    PRIMITIVE = "primitive"
    DECOMPOSED = "decomposed"


def write_bench(n: Netlist, mux_style: MuxStyle = MuxStyle.PRIMITIVE) -> str:
    """Serialize ``n`` to bench text.

    ``MuxStyle.PRIMITIVE`` keeps ``MUX`` lines as-is; ``DECOMPOSED`` expands
    each MUX into NOT/AND/AND/OR so the file loads in tools without the MUX
    extension.  Decomposition preserves the MUX output net name and is
    simulation-equivalent.
    """
    lines: list[str] = [f"# {n.name}"]
    for net in n.inputs:
        lines.append(f"INPUT({net})")
    for net in n.key_inputs:
        lines.append(f"INPUT({net})")
    for net in n.outputs:
        lines.append(f"OUTPUT({net})")
    lines.append("")
    if mux_style is MuxStyle.PRIMITIVE:
        for g in n.gates:
            lines.append(f"{g.output} = {g.kind.value}({', '.join(g.inputs)})")
    else:
        taken = set(n.nets)

        def fresh(base: str) -> str:
            cand = base
            i = 1
            while cand in taken:
                cand = f"{base}_{i}"
                i += 1
            taken.add(cand)
            return cand

        for g in n.gates:
            if g.kind is not GateType.MUX:
                lines.append(f"{g.output} = {g.kind.value}({', '.join(g.inputs)})")
                continue
            s, a, b = g.inputs
            sel_n = fresh(f"{g.output}_seln")
            path_a = fresh(f"{g.output}_a")
            path_b = fresh(f"{g.output}_b")
            lines.append(f"{sel_n} = NOT({s})")
            lines.append(f"{path_a} = AND({sel_n}, {a})")
            lines.append(f"{path_b} = AND({s}, {b})")
            lines.append(f"{g.output} = OR({path_a}, {path_b})")
    lines.append("")
    return "\n".join(lines)


def floating_wires(n: Netlist) -> tuple[str, ...]:
    """Gate outputs that nothing reads and that are not primary outputs."""
    out_set = set(n.outputs)
    return tuple(
        g.output
        for g in n.gates
        if g.output not in out_set and not n.readers.get(g.output, ())
    )


def validate(n: Netlist) -> list[Diagnostic]:
    """Structural checks; returns an empty list for a well-formed netlist.

    Reported as errors: undefined input nets, duplicate drivers, bad gate
    arity, combinational cycles, and floating wires (gate outputs that no
    gate reads and that are not primary outputs).  Unread primary inputs are
    not flagged; an input port is not a floating internal wire.
    """
    diags: list[Diagnostic] = []
    driven: dict[str, str] = {}
    for net in n.inputs + n.key_inputs:
        if net in driven:
            diags.append(Diagnostic("error", f"net {net!r} declared more than once", net))
        driven[net] = "input"
    for g in n.gates:
        if g.output in driven:
            diags.append(Diagnostic("error", f"net {g.output!r} has multiple drivers", g.output))
        driven[g.output] = "gate"
        arity = len(g.inputs)
        if arity < g.kind.min_arity or (
            g.kind.max_arity is not None and arity > g.kind.max_arity
        ):
            diags.append(
                Diagnostic(
                    "error",
                    f"gate {g.output!r}: {g.kind.value} with {arity} input(s)",
                    g.output,
                )
            )
    for g in n.gates:
        for src in g.inputs:
            if src not in driven:
                diags.append(
                    Diagnostic("error", f"gate {g.output!r} reads undefined net {src!r}", g.output)
                )
    for net in n.outputs:
        if net not in driven:
            diags.append(Diagnostic("error", f"OUTPUT({net}) references undefined net", net))
    try:
        n.topo_order
    except CycleError as e:
        diags.append(Diagnostic("error", str(e), e.cycle[0] if e.cycle else None))
    for net in floating_wires(n):
        diags.append(
            Diagnostic(
                "error",
                f"floating wire: gate output {net!r} has no reader and is not an output",
                net,
            )
        )
    return diags
