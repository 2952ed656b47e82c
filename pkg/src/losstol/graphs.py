"""Graph topologies for graph states.

A GraphSpec is a plain adjacency-set description of the entangling
structure: vertices 0..n-1 and undirected edges.  Constructors cover the
topologies this package analyzes (paths, complete graphs, trees built
from a branching vector, plus-shaped clusters) plus free-form graphs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

Edge = tuple[int, int]


def _normalize_edges(edges: Iterable[Edge]) -> frozenset[Edge]:
    out = set()
    for a, b in edges:
        if a == b:
            raise ValueError(f"self-loop on vertex {a}")
        out.add((min(a, b), max(a, b)))
    return frozenset(out)


@dataclass(frozen=True)
class GraphSpec:
    """Topology of a graph state: vertex count, edge set, and a kind tag."""

    n: int
    edges: frozenset[Edge]
    kind: str = "custom"
    branching: tuple[int, ...] | None = None
    arm_length: int | None = None

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        object.__setattr__(self, "edges", _normalize_edges(self.edges))
        for a, b in self.edges:
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise ValueError(f"edge ({a},{b}) references vertex >= {self.n}")
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        object.__setattr__(self, "_adjacency", tuple(frozenset(s) for s in adj))

    def neighbors(self, vertex: int) -> frozenset[int]:
        if not 0 <= vertex < self.n:
            raise ValueError(f"vertex {vertex} out of range")
        return self._adjacency[vertex]  # type: ignore[attr-defined]

    def degree(self, vertex: int) -> int:
        return len(self.neighbors(vertex))

    def components(self) -> list[frozenset[int]]:
        """Connected components, each as a frozenset of vertices."""
        seen: set[int] = set()
        comps: list[frozenset[int]] = []
        for start in range(self.n):
            if start in seen:
                continue
            stack, comp = [start], {start}
            seen.add(start)
            while stack:
                v = stack.pop()
                for w in self.neighbors(v):
                    if w not in comp:
                        comp.add(w)
                        seen.add(w)
                        stack.append(w)
            comps.append(frozenset(comp))
        return comps

    def entangled_components(self) -> list[frozenset[int]]:
        """Components with at least one edge (isolated vertices dropped)."""
        return [c for c in self.components() if len(c) > 1]

    def without_vertices(self, drop: Iterable[int], kind: str = "custom") -> "GraphSpec":
        """Same vertex labels, with all edges touching ``drop`` removed.

        Dropped vertices stay in the vertex set as isolated vertices so
        qubit indices remain stable across surgery operations.
        """
        gone = set(drop)
        kept = frozenset(e for e in self.edges if e[0] not in gone and e[1] not in gone)
        return GraphSpec(self.n, kept, kind)


def linear(n: int) -> GraphSpec:
    """Path graph on n vertices: 0-1-...-(n-1)."""
    if n < 1:
        raise ValueError("linear graph needs at least one vertex")
    return GraphSpec(n, frozenset((i, i + 1) for i in range(n - 1)), "linear")


def complete(n: int) -> GraphSpec:
    """Complete graph K_n."""
    if n < 1:
        raise ValueError("complete graph needs at least one vertex")
    edges = frozenset((i, j) for i in range(n) for j in range(i + 1, n))
    return GraphSpec(n, edges, "complete")


def tree_vertex_count(branching: Sequence[int]) -> int:
    """1 (root) plus the number of vertices at each level of the tree."""
    total, level = 1, 1
    for b in branching:
        level *= b
        total += level
    return total


def tree_level_slices(branching: Sequence[int]) -> list[range]:
    """Vertex index ranges per level, root level first."""
    slices, start, width = [range(0, 1)], 1, 1
    for b in branching:
        width *= b
        slices.append(range(start, start + width))
        start += width
    return slices


def tree(branching: Sequence[int]) -> GraphSpec:
    """Rooted tree from a branching vector.

    Level-k internal vertices each have branching[k] children; vertices
    are numbered level by level with the root at index 0.
    """
    branching = tuple(int(b) for b in branching)
    if not branching:
        raise ValueError("branching vector must have at least one level")
    if any(b < 1 for b in branching):
        raise ValueError("branching factors must be positive")
    edges = set()
    slices = tree_level_slices(branching)
    for level, b in enumerate(branching):
        parents = slices[level]
        children = slices[level + 1]
        for i, parent in enumerate(parents):
            for j in range(b):
                edges.add((parent, children[i * b + j]))
    return GraphSpec(tree_vertex_count(branching), frozenset(edges), "tree",
                     branching=branching)


def plus_cluster(arm_length: int) -> GraphSpec:
    """Central vertex 0 with four path arms of the given length."""
    if arm_length < 0:
        raise ValueError("arm length must be non-negative")
    edges = set()
    for arm in range(4):
        prev = 0
        for k in range(arm_length):
            cur = 1 + arm * arm_length + k
            edges.add((prev, cur))
            prev = cur
    return GraphSpec(4 * arm_length + 1, frozenset(edges), "plus-cluster",
                     arm_length=arm_length)


def custom(n: int, edges: Iterable[Edge]) -> GraphSpec:
    return GraphSpec(n, frozenset(edges), "custom")


@dataclass(frozen=True)
class LossMask:
    """Set of qubit indices flagged as lost (located erasure)."""

    lost: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(self, "lost", frozenset(self.lost))
        if any(q < 0 for q in self.lost):
            raise ValueError("lost qubit indices must be non-negative")

    def validate_for(self, spec: GraphSpec) -> None:
        out = [q for q in self.lost if q >= spec.n]
        if out:
            raise ValueError(f"lost qubits {sorted(out)} outside 0..{spec.n - 1}")
