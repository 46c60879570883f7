"""MUX key-gate insertion.

Four strategies re-route existing wires through key-controlled MUXes:

* S1: two multi-output sources, two MUXes, two key bits.
* S2: one multi-output true source, one multi-output decoy, one MUX/key bit.
* S3: like S2 but with a single-output decoy whose own wire is untouched.
* S4: two sources of any fan-out, two MUXes sharing one key bit, wired so the
  wrong value swaps both paths.

The similarity-guided locker pairs links and nodes that share a structural
cluster; the random locker picks candidates uniformly.  Both guarantee that
the result is acyclic and free of floating wires under every key assignment:
a gate serves as a source at most once across a run, so a multi-output source
always keeps one untouched wire, and S4's cross-wiring keeps single-output
sources connected under either key value.  The naive locker deliberately
drops the re-routing guarantee and is only useful as a negative control.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .bench import KEY_INPUT_RE, Gate, GateType, Netlist, validate
from .graph import to_graph
from .similarity import DEFAULT_HOPS, ClusterSet, StateInterner, link_clusters, node_clusters

STRATEGIES = ("S1", "S2", "S3", "S4")

PROV_LINK_CLUSTER = "LINK_CLUSTER"
PROV_NODE_CLUSTER = "NODE_CLUSTER"
PROV_RANDOM = "RANDOM"

STRATEGY_DMUX_FALLBACK = "DMUX_FALLBACK"
STRATEGY_NAIVE = "NAIVE"


class LockingError(ValueError):
    pass


class CapacityError(LockingError):
    """Key budget exceeds what the circuit can absorb."""

    def __init__(self, requested: int, placed: int):
        self.requested = requested
        self.placed = placed
        self.shortfall = requested - placed
        super().__init__(
            f"placed {placed} of {requested} requested key bits; "
            f"no candidates remain for the outstanding {self.shortfall}"
        )


@dataclass(frozen=True)
class LockRecord:
    """Ground truth for one inserted MUX."""

    key_index: int
    strategy: str  # S1..S4, DMUX_FALLBACK, or NAIVE
    mux: str  # MUX output net
    true_link: tuple[str, str]  # (source, destination gate) restored by the correct key
    false_link: tuple[str, str]
    true_slot: int  # data slot (0 or 1) holding the true source; equals the key bit
    provenance: str  # LINK_CLUSTER, NODE_CLUSTER, or RANDOM


@dataclass(frozen=True)
class KeyVector:
    """Correct key bits in index order, with per-bit consumption flags."""

    bits: tuple[int, ...]
    consumed: tuple[bool, ...]

    def __len__(self) -> int:
        return len(self.bits)

    def names(self) -> tuple[str, ...]:
        return tuple(f"keyinput{i}" for i in range(len(self.bits)))

    def assignment(self) -> dict[str, int]:
        return {f"keyinput{i}": b for i, b in enumerate(self.bits)}


@dataclass(frozen=True)
class LockedDesign:
    netlist: Netlist
    key: KeyVector
    records: tuple[LockRecord, ...]
    scheme: str  # "simll", "dmux", or "naive"
    hops: int | None
    seed: int

    def key_assignment(self) -> dict[str, int]:
        return self.key.assignment()


def _check_lockable(n: Netlist, key_size: int) -> None:
    if key_size < 1:
        raise LockingError("key_size must be at least 1")
    if n.key_inputs:
        raise LockingError("netlist already contains key inputs")
    clashes = [net for net in n.nets if KEY_INPUT_RE.match(net)]
    if clashes:
        raise LockingError(
            f"net name(s) {clashes[:3]} collide with the key input namespace"
        )
    diags = validate(n)
    if diags:
        raise LockingError(f"netlist fails validation: {diags[0].message}")


class _Locker:
    """Mutable working state for one locking run.

    Tracks the evolving directed graph for loop checks, the set of replaced
    (driver, reader) pairs, and single-use source bookkeeping.
    """

    def __init__(self, n: Netlist, key_size: int, rng: random.Random):
        self.base = n
        self.rng = rng
        self.key_size = key_size
        self.gates: list[Gate] = list(n.gates)
        self.gate_idx: dict[str, int] = {g.output: i for i, g in enumerate(n.gates)}
        g = to_graph(n)
        self.succ: dict[str, set[str]] = {v: set(g.succ[v]) for v in g.nodes}
        self.fanout0: dict[str, int] = {v: len(g.succ[v]) for v in g.nodes}
        self.original_succ: dict[str, tuple[str, ...]] = dict(g.succ)
        self.outputs = frozenset(n.outputs)
        self.input_set = frozenset(n.inputs)
        self.existing = set(n.nets)
        self.records: list[LockRecord] = []
        self.key_bits: list[int] = []
        self.locked_pairs: set[tuple[str, str]] = set()
        self.used_sources: set[str] = set()
        self.mux_seq = 0

    @property
    def keys_left(self) -> int:
        return self.key_size - len(self.key_bits)

    def take_key(self, value: int) -> int:
        index = len(self.key_bits)
        self.key_bits.append(value)
        return index

    def reaches(self, src: str, dst: str) -> bool:
        if src == dst:
            return True
        seen = {src}
        stack = [src]
        while stack:
            u = stack.pop()
            for w in self.succ.get(u, ()):
                if w == dst:
                    return True
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return False

    def _fresh_mux(self) -> str:
        while True:
            name = f"keymux{self.mux_seq}"
            self.mux_seq += 1
            if name not in self.existing:
                self.existing.add(name)
                return name

    def insert_mux(
        self,
        key_index: int,
        true_src: str,
        false_src: str,
        dest: str,
        slot: int,
        strategy: str,
        provenance: str,
    ) -> LockRecord:
        """Splice a MUX into the (true_src, dest) wire; no validity checking."""
        mux = self._fresh_mux()
        key_net = f"keyinput{key_index}"
        data = (true_src, false_src) if slot == 0 else (false_src, true_src)
        gate = self.gates[self.gate_idx[dest]]
        new_inputs = tuple(mux if s == true_src else s for s in gate.inputs)
        self.gates[self.gate_idx[dest]] = Gate(gate.output, gate.kind, new_inputs)
        self.gates.append(Gate(mux, GateType.MUX, (key_net, data[0], data[1])))
        self.gate_idx[mux] = len(self.gates) - 1
        self.succ[true_src].discard(dest)
        self.succ[true_src].add(mux)
        self.succ[false_src].add(mux)
        self.succ.setdefault(key_net, set()).add(mux)
        self.succ[mux] = {dest}
        self.locked_pairs.add((true_src, dest))
        rec = LockRecord(
            key_index=key_index,
            strategy=strategy,
            mux=mux,
            true_link=(true_src, dest),
            false_link=(false_src, dest),
            true_slot=slot,
            provenance=provenance,
        )
        self.records.append(rec)
        return rec

    # ---- candidate predicates ----------------------------------------

    def is_gate_source(self, net: str) -> bool:
        """True for internal gate outputs usable as D-MUX style sources."""
        return (
            net in self.gate_idx
            and net not in self.outputs
            and self.fanout0.get(net, 0) >= 1
        )

    def link_ok(self, f: str, g: str) -> bool:
        return (f, g) not in self.locked_pairs and f not in self.used_sources

    def pair_ok(self, f_i: str, g_i: str, f_j: str, g_j: str) -> bool:
        """Two-MUX feasibility: distinct ends, not locked, sources fresh, loop-free."""
        return (
            f_i != f_j
            and g_i != g_j
            and self.link_ok(f_i, g_i)
            and self.link_ok(f_j, g_j)
            and not self.reaches(g_i, f_j)
            and not self.reaches(g_j, f_i)
        )

    def single_ok(self, f_i: str, g_i: str, f_j: str) -> bool:
        """Single-MUX feasibility for S2/S3: decoy f_j forms no loop into g_i."""
        return (
            f_i != f_j
            and self.link_ok(f_i, g_i)
            and f_j not in self.used_sources
            and not self.reaches(g_i, f_j)
        )

    # ---- strategy applications ----------------------------------------

    def do_s1(
        self, f_i: str, g_i: str, f_j: str, g_j: str, provenance: str, strategy: str = "S1"
    ) -> list[LockRecord]:
        slot_i = self.rng.getrandbits(1)
        slot_j = self.rng.getrandbits(1)
        k_i = self.take_key(slot_i)
        k_j = self.take_key(slot_j)
        recs = [
            self.insert_mux(k_i, f_i, f_j, g_i, slot_i, strategy, provenance),
            self.insert_mux(k_j, f_j, f_i, g_j, slot_j, strategy, provenance),
        ]
        self.used_sources.update((f_i, f_j))
        return recs

    def do_single(
        self, f_i: str, g_i: str, f_j: str, provenance: str, strategy: str
    ) -> list[LockRecord]:
        """S2/S3 shape: one MUX, decoy f_j never rerouted."""
        slot = self.rng.getrandbits(1)
        k = self.take_key(slot)
        rec = self.insert_mux(k, f_i, f_j, g_i, slot, strategy, provenance)
        self.used_sources.update((f_i, f_j))
        return [rec]

    def do_s4(
        self, f_i: str, g_i: str, f_j: str, g_j: str, provenance: str, strategy: str = "S4"
    ) -> list[LockRecord]:
        slot = self.rng.getrandbits(1)
        k = self.take_key(slot)
        recs = [
            self.insert_mux(k, f_i, f_j, g_i, slot, strategy, provenance),
            self.insert_mux(k, f_j, f_i, g_j, slot, strategy, provenance),
        ]
        self.used_sources.update((f_i, f_j))
        return recs

    def finish(self, scheme: str, hops: int | None, seed: int) -> LockedDesign:
        key = KeyVector(
            bits=tuple(self.key_bits),
            consumed=tuple(True for _ in self.key_bits),
        )
        netlist = Netlist(
            name=self.base.name,
            inputs=self.base.inputs,
            key_inputs=tuple(f"keyinput{i}" for i in range(len(self.key_bits))),
            outputs=self.base.outputs,
            gates=tuple(self.gates),
        )
        return LockedDesign(
            netlist=netlist,
            key=key,
            records=tuple(self.records),
            scheme=scheme,
            hops=hops,
            seed=seed,
        )


# ---- public single-strategy operations -------------------------------


def _one_shot_locker(n: Netlist, key_budget: int, seed_or_rng) -> _Locker:
    rng = seed_or_rng if isinstance(seed_or_rng, random.Random) else random.Random(seed_or_rng)
    return _Locker(n, key_budget, rng)


def _require_multi(lk: _Locker, net: str, role: str) -> None:
    if not lk.is_gate_source(net) or lk.fanout0.get(net, 0) < 2:
        raise LockingError(f"{role} must be an internal gate output with fan-out >= 2: {net!r}")


def _require_link(lk: _Locker, f: str, g: str) -> None:
    if g not in lk.original_succ.get(f, ()):
        raise LockingError(f"({f!r}, {g!r}) is not a wire of the netlist")


def apply_s1(
    n: Netlist, f_i: str, f_j: str, g_i: str, g_j: str, rng: random.Random | int = 0
) -> tuple[Netlist, list[LockRecord], tuple[int, int]]:
    """Standalone S1 on a fresh netlist; returns (locked, records, key bits)."""
    lk = _one_shot_locker(n, 2, rng)
    _require_multi(lk, f_i, "f_i")
    _require_multi(lk, f_j, "f_j")
    _require_link(lk, f_i, g_i)
    _require_link(lk, f_j, g_j)
    if f_i == f_j:
        raise LockingError("S1 needs two distinct sources")
    if lk.reaches(g_i, f_j) or lk.reaches(g_j, f_i):
        raise LockingError("S1 false edge would close a combinational loop")
    recs = lk.do_s1(f_i, g_i, f_j, g_j, PROV_RANDOM)
    design = lk.finish("s1", None, 0)
    return design.netlist, recs, (design.key.bits[0], design.key.bits[1])


def apply_s2(
    n: Netlist, f_i: str, f_j: str, g_i: str, rng: random.Random | int = 0
) -> tuple[Netlist, list[LockRecord], int]:
    lk = _one_shot_locker(n, 1, rng)
    _require_multi(lk, f_i, "f_i")
    _require_multi(lk, f_j, "f_j")
    _require_link(lk, f_i, g_i)
    if f_i == f_j:
        raise LockingError("S2 needs two distinct sources")
    if lk.reaches(g_i, f_j):
        raise LockingError("S2 false edge would close a combinational loop")
    recs = lk.do_single(f_i, g_i, f_j, PROV_RANDOM, "S2")
    design = lk.finish("s2", None, 0)
    return design.netlist, recs, design.key.bits[0]


def apply_s3(
    n: Netlist,
    f_i: str,
    f_j: str,
    g_i: str,
    rng: random.Random | int = 0,
    drive_single_consumer: bool = False,
) -> tuple[Netlist, list[LockRecord], int]:
    """S3: multi-output true source, single-output decoy.

    With ``drive_single_consumer`` the MUX instead replaces the decoy's own
    wire (the alternative reading of the strategy); that variant loses the
    no-float guarantee under the wrong key and exists only for comparison.
    """
    lk = _one_shot_locker(n, 1, rng)
    _require_multi(lk, f_i, "f_i")
    if not lk.is_gate_source(f_j) or lk.fanout0.get(f_j, 0) != 1:
        raise LockingError(f"f_j must be an internal gate output with fan-out 1: {f_j!r}")
    if drive_single_consumer:
        g_j = lk.original_succ[f_j][0]
        if lk.reaches(g_j, f_i):
            raise LockingError("S3 false edge would close a combinational loop")
        recs = lk.do_single(f_j, g_j, f_i, PROV_RANDOM, "S3")
    else:
        _require_link(lk, f_i, g_i)
        if lk.reaches(g_i, f_j):
            raise LockingError("S3 false edge would close a combinational loop")
        recs = lk.do_single(f_i, g_i, f_j, PROV_RANDOM, "S3")
    design = lk.finish("s3", None, 0)
    return design.netlist, recs, design.key.bits[0]


def apply_s4(
    n: Netlist, f_i: str, f_j: str, g_i: str, g_j: str, rng: random.Random | int = 0
) -> tuple[Netlist, list[LockRecord], int]:
    """S4: two MUXes sharing one key bit; sources may have any fan-out."""
    lk = _one_shot_locker(n, 1, rng)
    for f, role in ((f_i, "f_i"), (f_j, "f_j")):
        if not lk.is_gate_source(f):
            raise LockingError(f"{role} must be an internal gate output: {f!r}")
    _require_link(lk, f_i, g_i)
    _require_link(lk, f_j, g_j)
    if f_i == f_j or g_i == g_j:
        raise LockingError("S4 needs distinct sources and distinct destinations")
    if lk.reaches(g_i, f_j) or lk.reaches(g_j, f_i):
        raise LockingError("S4 false edge would close a combinational loop")
    recs = lk.do_s4(f_i, g_i, f_j, g_j, PROV_RANDOM)
    design = lk.finish("s4", None, 0)
    return design.netlist, recs, design.key.bits[0]


# ---- similarity-guided locking ---------------------------------------


def _split_links(
    lk: _Locker, members: Iterable[tuple[str, str]]
) -> tuple[list[tuple[str, str]], list[tuple[str, str]]]:
    """Partition cluster links into multi-output-source and single-output-source
    sets, dropping links that are no longer lockable."""
    multi: list[tuple[str, str]] = []
    single: list[tuple[str, str]] = []
    for f, g in members:
        if g not in lk.gate_idx:  # destination must be a gate
            continue
        if not lk.link_ok(f, g):
            continue
        (multi if lk.fanout0.get(f, 0) >= 2 else single).append((f, g))
    return multi, single


def _first_valid_pair(
    lk: _Locker, pool: list[tuple[str, str]]
) -> tuple[tuple[str, str], tuple[str, str]] | None:
    for a in range(len(pool)):
        f_i, g_i = pool[a]
        if not lk.link_ok(f_i, g_i):
            continue
        for b in range(a + 1, len(pool)):
            f_j, g_j = pool[b]
            if lk.pair_ok(f_i, g_i, f_j, g_j):
                return pool[a], pool[b]
    return None


def _lock_link_clusters(lk: _Locker, lc: ClusterSet, strategies: Sequence[str]) -> None:
    allow_s1 = "S1" in strategies
    allow_s4 = "S4" in strategies
    for cluster in lc.clusters:
        if lk.keys_left == 0:
            return
        if cluster.size < 2:
            continue
        multi, single = _split_links(lk, cluster.members)
        while allow_s1 and lk.keys_left >= 2 and len(multi) >= 2:
            pair = _first_valid_pair(lk, multi)
            if pair is None:
                break
            (f_i, g_i), (f_j, g_j) = pair
            lk.do_s1(f_i, g_i, f_j, g_j, PROV_LINK_CLUSTER)
            multi = [l for l in multi if l not in pair and lk.link_ok(*l)]
        while allow_s4 and lk.keys_left >= 1 and len(single) >= 2:
            pair = _first_valid_pair(lk, single)
            if pair is None:
                break
            (f_i, g_i), (f_j, g_j) = pair
            lk.do_s4(f_i, g_i, f_j, g_j, PROV_LINK_CLUSTER)
            single = [l for l in single if l not in pair and lk.link_ok(*l)]


def _node_candidates(lk: _Locker, members: Iterable[str]) -> tuple[list[str], list[str]]:
    multi: list[str] = []
    single: list[str] = []
    for v in members:
        if not lk.is_gate_source(v) or v in lk.used_sources:
            continue
        (multi if lk.fanout0[v] >= 2 else single).append(v)
    return multi, single


def _open_fanouts(lk: _Locker, f: str) -> list[str]:
    return [g for g in lk.original_succ[f] if (f, g) not in lk.locked_pairs]


def _try_node_pair_two_mux(
    lk: _Locker,
    f_pool: Sequence[str],
    provenance: str,
    label: str,
    two_keys: bool,
) -> bool:
    """Pick f_i, f_j from one pool plus random fan-outs; S1/S4 shaped.

    ``two_keys`` selects S1 wiring (independent key bits) over S4 wiring
    (one shared bit, cross-swapped paths).
    """
    for a in range(len(f_pool)):
        f_i = f_pool[a]
        for b in range(len(f_pool)):
            if a == b:
                continue
            f_j = f_pool[b]
            gs_i = _open_fanouts(lk, f_i)
            gs_j = _open_fanouts(lk, f_j)
            lk.rng.shuffle(gs_i)
            lk.rng.shuffle(gs_j)
            for g_i in gs_i:
                for g_j in gs_j:
                    if g_i == g_j:
                        continue
                    if lk.pair_ok(f_i, g_i, f_j, g_j):
                        if two_keys:
                            lk.do_s1(f_i, g_i, f_j, g_j, provenance, label)
                        else:
                            lk.do_s4(f_i, g_i, f_j, g_j, provenance, label)
                        return True
    return False


def _try_node_pair_single_mux(
    lk: _Locker,
    f_i_pool: Sequence[str],
    f_j_pool: Sequence[str],
    provenance: str,
    strategy: str,
) -> bool:
    for f_i in f_i_pool:
        for f_j in f_j_pool:
            if f_i == f_j:
                continue
            gs_i = _open_fanouts(lk, f_i)
            lk.rng.shuffle(gs_i)
            for g_i in gs_i:
                if lk.single_ok(f_i, g_i, f_j):
                    lk.do_single(f_i, g_i, f_j, provenance, strategy)
                    return True
    return False


def _guarded_node_attempt(
    lk: _Locker,
    strategy: str,
    multi: list[str],
    single: list[str],
    provenance: str,
    label: str | None = None,
) -> bool:
    """One strategy attempt under the guard conditions; True when a lock landed."""
    label = label or strategy
    if strategy == "S1" and len(multi) >= 2 and lk.keys_left >= 2:
        return _try_node_pair_two_mux(lk, multi, provenance, label, two_keys=True)
    if strategy == "S2" and len(multi) >= 2:
        return _try_node_pair_single_mux(lk, multi, multi, provenance, label)
    if strategy == "S3" and len(multi) >= 1 and len(single) >= 1:
        return _try_node_pair_single_mux(lk, multi, single, provenance, label)
    if strategy == "S4" and len(multi) + len(single) >= 2:
        return _try_node_pair_two_mux(lk, multi + single, provenance, label, two_keys=False)
    return False


def _lock_node_clusters(lk: _Locker, nc: ClusterSet, strategies: Sequence[str]) -> None:
    for cluster in nc.clusters:
        if lk.keys_left == 0:
            return
        while lk.keys_left >= 1:
            multi, single = _node_candidates(lk, cluster.members)
            if len(multi) + len(single) < 2:
                break
            order = list(strategies)
            lk.rng.shuffle(order)
            applied = False
            for strat in order:
                if _guarded_node_attempt(lk, strat, multi, single, PROV_NODE_CLUSTER):
                    applied = True
                    break
            if not applied:
                break


# ---- random (D-MUX) locking -----------------------------------------


def _random_fill(
    lk: _Locker, strategies: Sequence[str], strategy_label: str | None
) -> None:
    """Place key gates on random candidates until the budget or the circuit
    is exhausted.  ``strategy_label`` overrides the per-record strategy name
    (used to mark fallback records)."""
    while lk.keys_left >= 1:
        multi = [
            v
            for v in lk.base.nets
            if lk.is_gate_source(v) and v not in lk.used_sources and lk.fanout0[v] >= 2
        ]
        single = [
            v
            for v in lk.base.nets
            if lk.is_gate_source(v) and v not in lk.used_sources and lk.fanout0[v] == 1
        ]
        order = list(strategies)
        lk.rng.shuffle(order)
        applied = False
        for strat in order:
            label = strategy_label or strat
            if _guarded_node_attempt(lk, strat, multi, single, PROV_RANDOM, label):
                applied = True
                break
        if not applied:
            raise CapacityError(lk.key_size, len(lk.key_bits))


def simll_lock(
    n: Netlist,
    key_size: int,
    hops: int = DEFAULT_HOPS,
    strategies: Sequence[str] = STRATEGIES,
    seed: int = 0,
) -> LockedDesign:
    """Similarity-guided MUX locking.

    Links sharing a structural cluster are locked pairwise first (S1 for
    multi-output sources, S4 for single-output ones), then nodes sharing a
    cluster are locked under a per-iteration random strategy choice, and any
    leftover key bits fall back to random placement.  Raises
    :class:`CapacityError` when the circuit cannot absorb ``key_size`` bits.
    """
    _check_strategies(strategies)
    _check_lockable(n, key_size)
    if not 1 <= hops <= 4:
        raise LockingError("hops must be between 1 and 4")
    rng = random.Random(seed)
    g = to_graph(n)
    interner = StateInterner()
    nc = node_clusters(g, hops, interner)
    lc = link_clusters(g, hops, interner)
    lk = _Locker(n, key_size, rng)
    _lock_link_clusters(lk, lc, strategies)
    if lk.keys_left:
        _lock_node_clusters(lk, nc, strategies)
    if lk.keys_left:
        _random_fill(lk, strategies, STRATEGY_DMUX_FALLBACK)
    return lk.finish("simll", hops, seed)


def dmux_lock(
    n: Netlist,
    key_size: int,
    strategies: Sequence[str] = STRATEGIES,
    seed: int = 0,
) -> LockedDesign:
    """Random MUX locking baseline over the same strategy set."""
    _check_strategies(strategies)
    _check_lockable(n, key_size)
    lk = _Locker(n, key_size, random.Random(seed))
    _random_fill(lk, strategies, None)
    return lk.finish("dmux", None, seed)


def _check_strategies(strategies: Sequence[str]) -> None:
    if not strategies:
        raise LockingError("empty strategy set")
    unknown = [s for s in strategies if s not in STRATEGIES]
    if unknown:
        raise LockingError(f"unknown strategies: {unknown}")


def naive_mux_lock(n: Netlist, key_size: int, seed: int = 0) -> LockedDesign:
    """Insert MUXes without re-routing the displaced wire.

    The decoy input is a random net; under the wrong key the true wire is
    left floating, which structural analysis detects immediately.  Negative
    control only.
    """
    _check_lockable(n, key_size)
    rng = random.Random(seed)
    lk = _Locker(n, key_size, rng)
    eligible = [
        v
        for v in n.nets
        if lk.is_gate_source(v) and lk.fanout0[v] == 1
    ]
    if len(eligible) < key_size:
        raise LockingError(
            f"only {len(eligible)} single-reader internal wires available "
            f"for {key_size} key bits"
        )
    true_wires = rng.sample(eligible, key_size)
    true_set = set(true_wires)
    for f in true_wires:
        g = lk.original_succ[f][0]
        decoys = [
            net
            for net in n.nets
            if net not in true_set
            and net != f
            and net != g
            and not lk.reaches(g, net)
        ]
        if not decoys:
            raise LockingError(f"no loop-free decoy net available for wire ({f}, {g})")
        decoy = rng.choice(decoys)
        slot = rng.getrandbits(1)
        k = lk.take_key(slot)
        lk.insert_mux(k, f, decoy, g, slot, STRATEGY_NAIVE, PROV_RANDOM)
        lk.used_sources.add(f)
    return lk.finish("naive", None, seed)


# ---- key and lock-report files ---------------------------------------

_KEY_LINE_RE = re.compile(r"^(keyinput\d+)\s*=\s*([01])$")


def write_key_file(key: Mapping[str, int] | KeyVector) -> str:
    if isinstance(key, KeyVector):
        key = key.assignment()
    lines = [f"{net}={int(bool(key[net]))}" for net in sorted(key, key=_key_order)]
    return "\n".join(lines) + "\n"


def _key_order(name: str) -> int:
    m = re.search(r"(\d+)$", name)
    return int(m.group(1)) if m else 0


def parse_key_file(text: str) -> dict[str, int]:
    out: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _KEY_LINE_RE.match(line)
        if not m:
            raise LockingError(f"key file line {lineno}: cannot parse {raw.strip()!r}")
        net, bit = m.groups()
        if net in out:
            raise LockingError(f"key file line {lineno}: duplicate bit {net}")
        out[net] = int(bit)
    if not out:
        raise LockingError("key file holds no bits")
    return out


def write_lock_report(design: LockedDesign) -> str:
    """Ground-truth record file: evaluation-side input, never shown to attacks."""
    lines = [
        f"# scheme={design.scheme} keys={len(design.key)} "
        f"hops={design.hops if design.hops is not None else '-'} seed={design.seed}"
    ]
    for r in design.records:
        lines.append(
            f"key={r.key_index} strategy={r.strategy} provenance={r.provenance} "
            f"mux={r.mux} true={r.true_link[0]}->{r.true_link[1]} "
            f"false={r.false_link[0]}->{r.false_link[1]} slot={r.true_slot}"
        )
    return "\n".join(lines) + "\n"


def parse_lock_report(text: str) -> list[LockRecord]:
    records: list[LockRecord] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields: dict[str, str] = {}
        for token in line.split():
            if "=" not in token:
                raise LockingError(f"lock report line {lineno}: bad token {token!r}")
            k, v = token.split("=", 1)
            fields[k] = v
        try:
            t_src, t_dst = fields["true"].split("->")
            f_src, f_dst = fields["false"].split("->")
            records.append(
                LockRecord(
                    key_index=int(fields["key"]),
                    strategy=fields["strategy"],
                    mux=fields["mux"],
                    true_link=(t_src, t_dst),
                    false_link=(f_src, f_dst),
                    true_slot=int(fields["slot"]),
                    provenance=fields["provenance"],
                )
            )
        except (KeyError, ValueError) as e:
            raise LockingError(f"lock report line {lineno}: {e}") from None
    return records
