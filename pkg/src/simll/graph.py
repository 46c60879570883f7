"""Directed circuit graph with the undirected views used for clustering.

Nodes are nets (inputs, key inputs, gate outputs); a directed edge runs from
each gate input net to the gate's output net, so ``u -> v`` means "u drives
v".  Loop and reachability questions use the directed graph; neighborhoods,
enclosing subgraphs, and distance labels use the undirected view.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property

from .bench import Netlist

# Node feature for nets driven by ports rather than gates.
INPUT_FEATURE = "IN"


@dataclass(frozen=True)
class CircuitGraph:
    """Immutable graph view of a netlist.

    ``nodes`` fixes the canonical order (declaration order of the source
    netlist); all adjacency tuples are sorted by that order so traversals
    are reproducible.
    """

    nodes: tuple[str, ...]
    features: dict[str, str]  # node -> gate type name, or INPUT_FEATURE
    succ: dict[str, tuple[str, ...]]  # u -> nets driven by u
    pred: dict[str, tuple[str, ...]]  # v -> nets driving v

    @cached_property
    def index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.nodes)}

    @cached_property
    def edges(self) -> tuple[tuple[str, str], ...]:
        """Directed edges in canonical (source, then destination) order."""
        out = []
        for u in self.nodes:
            for v in self.succ[u]:
                out.append((u, v))
        return tuple(out)

    def undirected_neighbors(self, node: str) -> tuple[str, ...]:
        return self.undirected[node]

    @cached_property
    def undirected(self) -> dict[str, tuple[str, ...]]:
        idx = self.index
        return {
            n: tuple(sorted(set(self.succ[n]) | set(self.pred[n]), key=idx.__getitem__))
            for n in self.nodes
        }

    def bfs_distances(self, source: str, max_hops: int | None = None) -> dict[str, int]:
        """Undirected hop distances from ``source``, capped at ``max_hops``.

        Unreachable nodes are absent from the result.
        """
        if source not in self.index:
            raise KeyError(f"unknown node {source!r}")
        dist = {source: 0}
        frontier = deque([source])
        while frontier:
            u = frontier.popleft()
            d = dist[u]
            if max_hops is not None and d >= max_hops:
                continue
            for w in self.undirected[u]:
                if w not in dist:
                    dist[w] = d + 1
                    frontier.append(w)
        return dist

    def reaches(self, src: str, dst: str) -> bool:
        """True when a directed path ``src -> ... -> dst`` exists (or src == dst)."""
        if src not in self.index or dst not in self.index:
            raise KeyError(f"unknown node in reaches({src!r}, {dst!r})")
        if src == dst:
            return True
        seen = {src}
        stack = [src]
        while stack:
            u = stack.pop()
            for w in self.succ[u]:
                if w == dst:
                    return True
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return False

    def without_nodes(self, drop: set[str] | frozenset[str]) -> "CircuitGraph":
        """Copy with ``drop`` nodes and their incident edges removed."""
        keep = tuple(n for n in self.nodes if n not in drop)
        return CircuitGraph(
            nodes=keep,
            features={n: self.features[n] for n in keep},
            succ={n: tuple(v for v in self.succ[n] if v not in drop) for n in keep},
            pred={n: tuple(v for v in self.pred[n] if v not in drop) for n in keep},
        )


def to_graph(n: Netlist) -> CircuitGraph:
    """Build the circuit graph of ``n``; parallel pins collapse to one edge."""
    nodes = n.nets
    order = {net: i for i, net in enumerate(nodes)}
    features: dict[str, str] = {}
    succ: dict[str, set[str]] = {net: set() for net in nodes}
    pred: dict[str, set[str]] = {net: set() for net in nodes}
    for net in n.inputs + n.key_inputs:
        features[net] = INPUT_FEATURE
    for g in n.gates:
        features[g.output] = g.kind.value
        for src in g.inputs:
            succ[src].add(g.output)
            pred[g.output].add(src)
    return CircuitGraph(
        nodes=nodes,
        features=features,
        succ={u: tuple(sorted(s, key=order.__getitem__)) for u, s in succ.items()},
        pred={u: tuple(sorted(s, key=order.__getitem__)) for u, s in pred.items()},
    )


def drnl_label(dist_u: int | None, dist_v: int | None) -> int:
    """Distance-pair label for a node in an enclosing subgraph.

    ``dist_u``/``dist_v`` are hop distances to the two link endpoints;
    ``None`` means unreachable, which maps (as does any unreachable side) to
    the reserved label 0.  The two endpoints themselves get label 1.
    """
    if dist_u is None or dist_v is None:
        return 0
    if dist_u == 0 and dist_v == 0:
        raise ValueError("a node cannot coincide with both link endpoints")
    if dist_u == 0 or dist_v == 0:
        return 1
    d = dist_u + dist_v
    half, rem = divmod(d, 2)
    return 1 + min(dist_u, dist_v) + half * (half + rem - 1)


@dataclass(frozen=True)
class EnclosingSubgraph:
    """The h-hop neighborhood of a link, with per-node distance labels.

    ``adj`` is the undirected adjacency restricted to ``nodes`` (minus the
    target link itself when ``target_link_removed``); ``labels`` carries the
    DRNL value per node and ``features`` the combined ``<type>|<label>``
    string used to seed refinement.
    """

    link: tuple[str, str]
    hops: int
    nodes: tuple[str, ...]
    adj: dict[str, tuple[str, ...]]
    labels: dict[str, int]
    features: dict[str, str]
    target_link_removed: bool

    @cached_property
    def edges(self) -> tuple[tuple[str, str], ...]:
        """Undirected edges, each reported once, in canonical order."""
        pos = {n: i for i, n in enumerate(self.nodes)}
        out = []
        for u in self.nodes:
            for v in self.adj[u]:
                if pos[u] < pos[v]:
                    out.append((u, v))
        return tuple(out)


def _subgraph_distances(
    nodes: set[str],
    adj: dict[str, tuple[str, ...]],
    source: str,
) -> dict[str, int]:
    dist = {source: 0}
    frontier = deque([source])
    while frontier:
        u = frontier.popleft()
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                frontier.append(w)
    return dist


def extract_enclosing_subgraph(
    g: CircuitGraph,
    link: tuple[str, str],
    hops: int,
    remove_target_link: bool = True,
) -> EnclosingSubgraph:
    """Extract the ``hops``-hop enclosing subgraph around ``link``.

    Membership is decided on the full graph: every node within ``hops``
    undirected hops of either endpoint.  Distance labels are then computed
    inside the extracted subgraph, after removing the target link itself when
    ``remove_target_link`` is set, so the labels do not leak the link under
    test.  Endpoints are force-labeled 1; nodes unreachable from an endpoint
    inside the subgraph get label 0.
    """
    u, v = link
    if u not in g.index or v not in g.index:
        raise KeyError(f"link endpoint missing from graph: {link!r}")
    if u == v:
        raise ValueError("self-link has no enclosing subgraph")
    du_full = g.bfs_distances(u, hops)
    dv_full = g.bfs_distances(v, hops)
    members = set(du_full) | set(dv_full)
    idx = g.index
    nodes = tuple(sorted(members, key=idx.__getitem__))
    adj = {n: tuple(w for w in g.undirected_neighbors(n) if w in members) for n in nodes}
    if remove_target_link:
        adj[u] = tuple(w for w in adj[u] if w != v)
        adj[v] = tuple(w for w in adj[v] if w != u)
    du = _subgraph_distances(members, adj, u)
    dv = _subgraph_distances(members, adj, v)
    labels: dict[str, int] = {}
    for n in nodes:
        if n == u or n == v:
            labels[n] = 1
        else:
            labels[n] = drnl_label(du.get(n), dv.get(n))
    features = {n: f"{g.features[n]}|{labels[n]}" for n in nodes}
    return EnclosingSubgraph(
        link=(u, v),
        hops=hops,
        nodes=nodes,
        adj=adj,
        labels=labels,
        features=features,
        target_link_removed=remove_target_link,
    )


def export_subgraph(sub: EnclosingSubgraph) -> str:
    """Debug dump: labeled node lines, then one ``u v`` line per edge."""
    lines = [f"# link {sub.link[0]} -> {sub.link[1]} h={sub.hops}"]
    for n in sub.nodes:
        lines.append(f"# node {n} {sub.features[n]}")
    for u, v in sub.edges:
        lines.append(f"{u} {v}")
    lines.append("")
    return "\n".join(lines)
