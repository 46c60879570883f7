"""Gate-level simulation and locking quality metrics.

Two evaluation paths: a plain scalar evaluator (one pattern at a time) and a
bit-parallel engine that packs one pattern per bit into Python integers, so a
single pass over the gates evaluates the whole pattern set.  Metrics follow
the usual oracle-less locking conventions: key accuracy AC, precision PC,
fault coverage FC (fraction of patterns with any corrupted output), and
Hamming distance HD (average corrupted output bits per pattern, raw and as a
percent of output width).
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .bench import GateType, Netlist

DEFAULT_PATTERNS = 200_000
DESK_PATTERNS = 10_000
EXHAUSTIVE_INPUT_LIMIT = 16
DEFAULT_X_RESOLUTIONS = 10


class SimulationError(ValueError):
    pass


def _eval_scalar(kind: GateType, vals: Sequence[int]) -> int:
    if kind is GateType.AND:
        return int(all(vals))
    if kind is GateType.NAND:
        return int(not all(vals))
    if kind is GateType.OR:
        return int(any(vals))
    if kind is GateType.NOR:
        return int(not any(vals))
    if kind is GateType.XOR:
        return sum(vals) & 1
    if kind is GateType.XNOR:
        return (sum(vals) & 1) ^ 1
    if kind is GateType.NOT:
        return vals[0] ^ 1
    if kind is GateType.BUF:
        return vals[0]
    if kind is GateType.MUX:
        s, a, b = vals
        return b if s else a
    raise SimulationError(f"unhandled gate type {kind}")


def simulate(n: Netlist, assignment: Mapping[str, int]) -> dict[str, int]:
    """Evaluate one pattern; returns primary output values.

    ``assignment`` must give a 0/1 value for every primary input and key
    input.  Evaluation is scalar and in topological order.
    """
    values = _check_assignment(n, assignment, width=1)
    for g in n.topo_order:
        values[g.output] = _eval_scalar(g.kind, [values[s] for s in g.inputs])
    return {o: values[o] for o in n.outputs}


def _check_assignment(
    n: Netlist, assignment: Mapping[str, int], width: int
) -> dict[str, int]:
    mask = (1 << width) - 1
    values: dict[str, int] = {}
    for net in n.inputs + n.key_inputs:
        if net not in assignment:
            raise SimulationError(f"no value for input {net!r}")
        v = assignment[net]
        if v < 0 or v > mask:
            raise SimulationError(f"value for {net!r} does not fit {width} pattern bit(s)")
        values[net] = v
    return values


def simulate_packed(
    n: Netlist, columns: Mapping[str, int], width: int
) -> dict[str, int]:
    """Bit-parallel evaluation: bit j of each column is pattern j's value.

    ``columns`` maps every input and key input to a packed integer; the
    result maps every net (inputs and gate outputs) to its packed column.
    """
    if width <= 0:
        raise SimulationError("pattern width must be positive")
    mask = (1 << width) - 1
    values = _check_assignment(n, columns, width)
    for g in n.topo_order:
        ins = g.inputs
        kind = g.kind
        if kind is GateType.AND or kind is GateType.NAND:
            acc = mask
            for s in ins:
                acc &= values[s]
            if kind is GateType.NAND:
                acc ^= mask
        elif kind is GateType.OR or kind is GateType.NOR:
            acc = 0
            for s in ins:
                acc |= values[s]
            if kind is GateType.NOR:
                acc ^= mask
        elif kind is GateType.XOR or kind is GateType.XNOR:
            acc = 0
            for s in ins:
                acc ^= values[s]
            if kind is GateType.XNOR:
                acc ^= mask
        elif kind is GateType.NOT:
            acc = values[ins[0]] ^ mask
        elif kind is GateType.BUF:
            acc = values[ins[0]]
        else:  # MUX
            s, a, b = (values[x] for x in ins)
            acc = (a & ~s) | (b & s)
        values[g.output] = acc & mask
    return values


@dataclass(frozen=True)
class PatternSet:
    """A batch of input patterns in packed-column form.

    ``columns[name]`` holds one bit per pattern (bit j = pattern j); the
    generator ``kind``/``seed`` pair makes any batch reproducible.
    """

    names: tuple[str, ...]
    count: int
    columns: dict[str, int]
    kind: str  # "random", "exhaustive", or "explicit"
    seed: int | None = None

    def pattern(self, index: int) -> dict[str, int]:
        """Scalar view of pattern ``index``."""
        if not 0 <= index < self.count:
            raise IndexError(index)
        return {name: (self.columns[name] >> index) & 1 for name in self.names}


def random_patterns(names: Sequence[str], count: int, seed: int) -> PatternSet:
    """``count`` uniform random patterns over ``names``, reproducible by seed."""
    if count <= 0:
        raise SimulationError("pattern count must be positive")
    rng = random.Random(seed)
    cols = {name: rng.getrandbits(count) for name in names}
    return PatternSet(tuple(names), count, cols, "random", seed)


def exhaustive_patterns(names: Sequence[str]) -> PatternSet:
    """All 2^k patterns over ``names`` (k capped at EXHAUSTIVE_INPUT_LIMIT)."""
    k = len(names)
    if k > EXHAUSTIVE_INPUT_LIMIT:
        raise SimulationError(
            f"{k} inputs is past the exhaustive limit of {EXHAUSTIVE_INPUT_LIMIT}"
        )
    count = 1 << k
    cols: dict[str, int] = {}
    for i, name in enumerate(names):
        period = 1 << i
        block = (1 << period) - 1  # pattern j has bit (j >> i) & 1
        col = 0
        j = period
        while j < count:
            col |= block << j
            j += 2 * period
        cols[name] = col
    return PatternSet(tuple(names), count, cols, "exhaustive", None)


def _key_columns(key: Mapping[str, int], key_nets: Iterable[str], mask: int) -> dict[str, int]:
    cols = {}
    for net in key_nets:
        if net not in key:
            raise SimulationError(f"key assignment missing bit {net!r}")
        cols[net] = mask if key[net] else 0
    return cols


def _check_interfaces(oracle: Netlist, locked: Netlist) -> None:
    if tuple(oracle.inputs) != tuple(locked.inputs):
        raise SimulationError("primary input interfaces differ")
    if tuple(oracle.outputs) != tuple(locked.outputs):
        raise SimulationError("primary output interfaces differ")
    if oracle.key_inputs:
        raise SimulationError("oracle netlist must not have key inputs")


@dataclass(frozen=True)
class CorruptionReport:
    fc: float
    hd_raw: float
    hd_pct: float
    n_patterns: int
    n_outputs: int


_CHUNK = 1 << 16


def corruption(
    oracle: Netlist,
    locked: Netlist,
    key: Mapping[str, int],
    patterns: PatternSet,
) -> CorruptionReport:
    """FC and HD of ``locked`` under ``key`` against ``oracle`` on ``patterns``.

    Patterns are processed in chunks; the per-chunk counts reduce
    associatively, so the result is independent of chunking.
    """
    _check_interfaces(oracle, locked)
    if set(patterns.names) != set(oracle.inputs):
        raise SimulationError("pattern set does not cover the primary inputs")
    m = len(oracle.outputs)
    err_patterns = 0
    err_bits = 0
    done = 0
    while done < patterns.count:
        width = min(_CHUNK, patterns.count - done)
        mask = (1 << width) - 1
        cols = {name: (patterns.columns[name] >> done) & mask for name in patterns.names}
        ref = simulate_packed(oracle, cols, width)
        cols.update(_key_columns(key, locked.key_inputs, mask))
        dut = simulate_packed(locked, cols, width)
        any_diff = 0
        for o in oracle.outputs:
            diff = ref[o] ^ dut[o]
            err_bits += diff.bit_count()
            any_diff |= diff
        err_patterns += any_diff.bit_count()
        done += width
    fc_val = err_patterns / patterns.count
    hd_raw = err_bits / patterns.count
    hd_pct = (hd_raw / m) * 100.0 if m else 0.0
    return CorruptionReport(fc_val, hd_raw, hd_pct, patterns.count, m)


def fc(
    oracle: Netlist, locked: Netlist, key: Mapping[str, int], patterns: PatternSet
) -> float:
    """Fraction of patterns where any output differs from the oracle."""
    return corruption(oracle, locked, key, patterns).fc


def hd(
    oracle: Netlist, locked: Netlist, key: Mapping[str, int], patterns: PatternSet
) -> tuple[float, float]:
    """Average differing output bits per pattern: (raw, percent of width)."""
    rep = corruption(oracle, locked, key, patterns)
    return rep.hd_raw, rep.hd_pct


@dataclass(frozen=True)
class KeyGuess:
    """Per-bit key prediction; None encodes an undecided (X) bit."""

    bits: tuple[int | None, ...]

    def __len__(self) -> int:
        return len(self.bits)

    @property
    def n_decided(self) -> int:
        return sum(1 for b in self.bits if b is not None)

    @property
    def n_x(self) -> int:
        return sum(1 for b in self.bits if b is None)


def ac_pc(guess: KeyGuess, truth: Sequence[int]) -> tuple[float, float]:
    """Key accuracy and precision, both as percentages.

    AC counts exactly-correct bits; PC additionally credits X bits (an X is
    never wrong, merely undecided).
    """
    if len(guess.bits) != len(truth):
        raise SimulationError(
            f"guess has {len(guess.bits)} bits, truth has {len(truth)}"
        )
    total = len(truth)
    if total == 0:
        raise SimulationError("empty key")
    correct = sum(1 for g, t in zip(guess.bits, truth) if g is not None and g == t)
    undecided = guess.n_x
    ac = correct / total * 100.0
    pc = (correct + undecided) / total * 100.0
    return ac, pc


def resolve_x(guess: KeyGuess, seed: int) -> KeyGuess:
    """Replace every X with a uniform random bit (seeded)."""
    rng = random.Random(seed)
    return KeyGuess(tuple(b if b is not None else rng.getrandbits(1) for b in guess.bits))


@dataclass(frozen=True)
class EquivalenceVerdict:
    equivalent: bool
    mode: str  # "exhaustive" or "random"
    n_patterns: int
    counterexample: dict[str, int] | None = None
    mismatched_outputs: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.equivalent


def equivalence_check(
    oracle: Netlist,
    locked: Netlist,
    key: Mapping[str, int],
    n_random: int = DESK_PATTERNS,
    seed: int = 0,
) -> EquivalenceVerdict:
    """Check ``locked`` under ``key`` against ``oracle``.

    Exhaustive when the circuit has at most 16 primary inputs, otherwise
    ``n_random`` random patterns.  On failure the verdict carries the first
    failing pattern and the outputs that differ on it.
    """
    _check_interfaces(oracle, locked)
    if len(oracle.inputs) <= EXHAUSTIVE_INPUT_LIMIT:
        patterns = exhaustive_patterns(oracle.inputs)
        mode = "exhaustive"
    else:
        patterns = random_patterns(oracle.inputs, n_random, seed)
        mode = "random"
    mask = (1 << patterns.count) - 1
    ref = simulate_packed(oracle, patterns.columns, patterns.count)
    cols = dict(patterns.columns)
    cols.update(_key_columns(key, locked.key_inputs, mask))
    dut = simulate_packed(locked, cols, patterns.count)
    any_diff = 0
    for o in oracle.outputs:
        any_diff |= ref[o] ^ dut[o]
    if not any_diff:
        return EquivalenceVerdict(True, mode, patterns.count)
    first = (any_diff & -any_diff).bit_length() - 1
    cex = patterns.pattern(first)
    bad = tuple(
        o for o in oracle.outputs if ((ref[o] ^ dut[o]) >> first) & 1
    )
    return EquivalenceVerdict(False, mode, patterns.count, cex, bad)


@dataclass(frozen=True)
class MetricsReport:
    """Full evaluation of one attack guess against one locked design."""

    key_size: int
    ac: float
    pc: float
    n_correct: int
    n_x: int
    fc_avg: float
    hd_raw_avg: float
    hd_pct_avg: float
    n_patterns: int
    n_resolutions: int
    pattern_seed: int
    resolution_seed: int

    def to_kv(self) -> str:
        rows = self._rows()
        return "\n".join(f"{k}={v}" for k, v in rows) + "\n"

    def to_table(self) -> str:
        rows = self._rows()
        width = max(len(k) for k, _ in rows)
        lines = [f"{k.ljust(width)}  {v}" for k, v in rows]
        bar = "-" * max(len(s) for s in lines)
        return "\n".join([bar] + lines + [bar]) + "\n"

    def _rows(self) -> list[tuple[str, str]]:
        return [
            ("key_size", str(self.key_size)),
            ("ac", f"{self.ac:.4f}"),
            ("pc", f"{self.pc:.4f}"),
            ("n_correct", str(self.n_correct)),
            ("n_x", str(self.n_x)),
            ("fc", f"{self.fc_avg:.6f}"),
            ("hd_raw", f"{self.hd_raw_avg:.6f}"),
            ("hd_pct", f"{self.hd_pct_avg:.4f}"),
            ("patterns", str(self.n_patterns)),
            ("x_resolutions", str(self.n_resolutions)),
            ("pattern_seed", str(self.pattern_seed)),
            ("resolution_seed", str(self.resolution_seed)),
        ]


def _corruption_round(
    args: tuple[Netlist, Netlist, dict[str, int], PatternSet],
) -> CorruptionReport:
    oracle, locked, key, patterns = args
    return corruption(oracle, locked, key, patterns)


def evaluate_guess(
    oracle: Netlist,
    locked: Netlist,
    truth: Sequence[int],
    guess: KeyGuess,
    n_patterns: int = DESK_PATTERNS,
    n_resolutions: int = DEFAULT_X_RESOLUTIONS,
    pattern_seed: int = 0,
    resolution_seed: int = 0,
    threads: int = 1,
) -> MetricsReport:
    """AC/PC of ``guess`` plus FC/HD averaged over X-resolutions.

    FC and HD need concrete keys, so every X bit is replaced by a random bit
    ``n_resolutions`` times (or once when the guess has no X) and the
    corruption metrics are averaged across resolutions on a shared pattern
    set.  With ``threads`` > 1 the resolution rounds run on a process pool;
    the result is identical either way because rounds are independently
    seeded and averaged in fixed order.
    """
    ac, pc = ac_pc(guess, truth)
    correct = sum(1 for g, t in zip(guess.bits, truth) if g is not None and g == t)
    patterns = random_patterns(oracle.inputs, n_patterns, pattern_seed)
    rounds = n_resolutions if guess.n_x else 1
    keys = []
    for r in range(rounds):
        resolved = resolve_x(guess, resolution_seed + r)
        keys.append({net: resolved.bits[i] for i, net in enumerate(locked.key_inputs)})
    if threads > 1 and rounds > 1:
        with ProcessPoolExecutor(max_workers=min(threads, rounds)) as pool:
            reports = list(
                pool.map(_corruption_round, ((oracle, locked, k, patterns) for k in keys))
            )
    else:
        reports = [corruption(oracle, locked, k, patterns) for k in keys]
    fc_sum = hd_sum = hdp_sum = 0.0
    for rep in reports:
        fc_sum += rep.fc
        hd_sum += rep.hd_raw
        hdp_sum += rep.hd_pct
    return MetricsReport(
        key_size=len(truth),
        ac=ac,
        pc=pc,
        n_correct=correct,
        n_x=guess.n_x,
        fc_avg=fc_sum / rounds,
        hd_raw_avg=hd_sum / rounds,
        hd_pct_avg=hdp_sum / rounds,
        n_patterns=n_patterns,
        n_resolutions=rounds,
        pattern_seed=pattern_seed,
        resolution_seed=resolution_seed,
    )
