"""Structural similarity via iterative neighborhood refinement.

Nodes start from their gate-type label and repeatedly absorb the multiset of
neighbor states.  The update is made exactly injective by interning each
distinct state string as a fresh integer token, so two nodes share a token
after round k if and only if their k-hop neighborhood trees are identical.
Equality checks use tokens; reporting uses a content-derived hash chain that
is stable across runs and interners.

Link similarity applies the same refinement inside the h-hop enclosing
subgraph of each link, seeded with gate type plus distance-to-endpoints
label; the sorted multiset of final tokens is the link's fingerprint.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .graph import CircuitGraph, extract_enclosing_subgraph

DEFAULT_HOPS = 2


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


class StateInterner:
    """Bijection between state strings and small integer tokens.

    Sharing one interner across refinements makes their tokens directly
    comparable.  Each token also carries a content digest computed from the
    digests of its constituents, so it does not depend on insertion order.
    """

    def __init__(self) -> None:
        self._token_of: dict[str, int] = {}
        self._digests: list[str] = []

    def __len__(self) -> int:
        return len(self._token_of)

    def _intern(self, text: str, digest_source: str) -> int:
        tok = self._token_of.get(text)
        if tok is None:
            tok = len(self._digests)
            self._token_of[text] = tok
            self._digests.append(_sha(digest_source))
        return tok

    def leaf(self, label: str) -> int:
        return self._intern(f"L|{label}", f"L|{label}")

    def node(self, own: int, neighbors: Sequence[int]) -> int:
        text = f"N|{own}|" + ",".join(map(str, neighbors))
        source = f"N|{self._digests[own]}|" + ",".join(self._digests[t] for t in neighbors)
        return self._intern(text, source)

    def digest(self, token: int) -> str:
        return self._digests[token]


def update_state(interner: StateInterner, own: int, neighbor_states: Iterable[int]) -> int:
    """One refinement round for one node: combine own state with the sorted
    multiset of neighbor states into a fresh token."""
    return interner.node(own, sorted(neighbor_states))


def refine(
    order: Sequence[str],
    neighbors: Mapping[str, tuple[str, ...]],
    initial: Mapping[str, str],
    rounds: int,
    interner: StateInterner,
) -> dict[str, int]:
    """Run ``rounds`` synchronized refinement rounds; returns final tokens.

    All nodes advance in lockstep each round (new states are computed from
    the previous round only), so the result does not depend on ``order``
    beyond reproducibility of token numbering.
    """
    state = {v: interner.leaf(initial[v]) for v in order}
    for _ in range(rounds):
        state = {
            v: update_state(interner, state[v], (state[w] for w in neighbors[v]))
            for v in order
        }
    return state


@dataclass(frozen=True)
class NodeState:
    node: str
    token: int
    digest: str


@dataclass(frozen=True)
class Cluster:
    """One similarity class; ``members`` are nodes or ``(u, v)`` links."""

    digest: str
    members: tuple

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class ClusterSet:
    kind: str  # "node" or "link"
    hops: int
    clusters: tuple[Cluster, ...]

    def sizes(self) -> tuple[int, ...]:
        return tuple(c.size for c in self.clusters)

    def total_members(self) -> int:
        return sum(c.size for c in self.clusters)


def _group_clusters(
    kind: str,
    hops: int,
    keyed: list[tuple[object, object, str]],
    member_order: Mapping[object, int],
) -> ClusterSet:
    """Group (key, member, digest) rows into size-descending clusters."""
    groups: dict[object, list] = {}
    digests: dict[object, str] = {}
    for key, member, digest in keyed:
        groups.setdefault(key, []).append(member)
        digests[key] = digest
    clusters = []
    for key, members in groups.items():
        members.sort(key=member_order.__getitem__)
        clusters.append(Cluster(digest=digests[key], members=tuple(members)))
    clusters.sort(key=lambda c: (-c.size, member_order[c.members[0]]))
    return ClusterSet(kind=kind, hops=hops, clusters=tuple(clusters))


def node_states(
    g: CircuitGraph, hops: int = DEFAULT_HOPS, interner: StateInterner | None = None
) -> dict[str, NodeState]:
    """Refined state of every node after ``hops`` rounds on the whole graph."""
    interner = StateInterner() if interner is None else interner
    tokens = refine(
        g.nodes,
        g.undirected,
        g.features,
        hops,
        interner,
    )
    return {n: NodeState(n, t, interner.digest(t)) for n, t in tokens.items()}


def node_clusters(
    g: CircuitGraph, hops: int = DEFAULT_HOPS, interner: StateInterner | None = None
) -> ClusterSet:
    """Partition nodes into similarity classes (equal tokens after ``hops`` rounds)."""
    states = node_states(g, hops, interner)
    rows = [(s.token, n, s.digest) for n, s in states.items()]
    return _group_clusters("node", hops, rows, g.index)


@dataclass(frozen=True)
class LinkFingerprint:
    link: tuple[str, str]
    tokens: tuple[int, ...]  # sorted multiset of final node tokens
    digest: str


def link_fingerprint(
    g: CircuitGraph,
    link: tuple[str, str],
    hops: int = DEFAULT_HOPS,
    interner: StateInterner | None = None,
    remove_target_link: bool = True,
) -> LinkFingerprint:
    """Fingerprint of the ``hops``-hop enclosing subgraph around ``link``.

    Fingerprints are comparable only when computed through one shared
    interner.  The target link itself is removed from the subgraph before
    labeling and refinement unless ``remove_target_link`` is cleared.
    """
    interner = StateInterner() if interner is None else interner
    sub = extract_enclosing_subgraph(g, link, hops, remove_target_link)
    tokens = refine(sub.nodes, sub.adj, sub.features, hops, interner)
    multiset = tuple(sorted(tokens.values()))
    digest = _sha("F|" + ",".join(interner.digest(t) for t in multiset))
    return LinkFingerprint(link=link, tokens=multiset, digest=digest)


def link_clusters(
    g: CircuitGraph,
    hops: int = DEFAULT_HOPS,
    interner: StateInterner | None = None,
    remove_target_link: bool = True,
) -> ClusterSet:
    """Partition all directed links into classes of equal fingerprints."""
    interner = StateInterner() if interner is None else interner
    edge_order = {e: i for i, e in enumerate(g.edges)}
    rows = []
    for e in g.edges:
        fp = link_fingerprint(g, e, hops, interner, remove_target_link)
        rows.append((fp.tokens, e, fp.digest))
    return _group_clusters("link", hops, rows, edge_order)


@dataclass(frozen=True)
class ClusterStats:
    kind: str
    hops: int
    total_members: int
    n_clusters: int
    n_singletons: int
    largest: int
    grouped_fraction: float  # members sharing their class with at least one other
    size_histogram: tuple[tuple[int, int], ...]  # (size, count), size ascending


def cluster_stats(cs: ClusterSet) -> ClusterStats:
    sizes = cs.sizes()
    total = sum(sizes)
    hist: dict[int, int] = {}
    for s in sizes:
        hist[s] = hist.get(s, 0) + 1
    grouped = sum(s for s in sizes if s >= 2)
    return ClusterStats(
        kind=cs.kind,
        hops=cs.hops,
        total_members=total,
        n_clusters=len(sizes),
        n_singletons=hist.get(1, 0),
        largest=max(sizes) if sizes else 0,
        grouped_fraction=(grouped / total) if total else 0.0,
        size_histogram=tuple(sorted(hist.items())),
    )
