"""Immutable simple graphs with oriented edges, incidence matrices, and blocks.

The edge order and the orientation of every edge are fixed when the graph is
built and never change afterwards: they define the coordinates of edge space,
so everything downstream (cycle vectors, edge-space images of equilibria,
dedup lattices) is reproducible across runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .defaults import rank_tolerance
from .errors import DuplicateEdgeError, SelfLoopError, ValidationError


class Graph:
    """Simple undirected graph with oriented, ordered edges.

    Attributes
    ----------
    n : int
        Vertex count; vertices are labelled 0..n-1.
    edges : tuple[tuple[int, int], ...]
        Oriented edges (tail, head) in construction order.
    component_of : tuple[int, ...]
        Connected-component index of every vertex.
    c : int
        Number of connected components.
    neighbors : tuple[tuple[int, ...], ...]
        Adjacency lists, sorted.
    """

    __slots__ = ("n", "edges", "component_of", "c", "neighbors", "_edge_lookup")

    def __init__(self, edges, n: int | None = None):
        edges = [tuple(e) for e in edges]
        seen = set()
        for e in edges:
            if len(e) != 2:
                raise ValidationError(f"edge {e!r} is not a vertex pair")
            j, k = e
            if not (isinstance(j, (int, np.integer)) and isinstance(k, (int, np.integer))):
                raise ValidationError(f"edge {e!r} has non-integer endpoints")
            if j < 0 or k < 0:
                raise ValidationError(f"edge {e!r} has a negative vertex label")
            if j == k:
                raise SelfLoopError(f"self-loop on vertex {j}")
            key = frozenset((j, k))
            if key in seen:
                raise DuplicateEdgeError(f"edge {{{j}, {k}}} appears more than once")
            seen.add(key)
        n_min = max((max(e) for e in edges), default=-1) + 1
        if n is None:
            n = n_min
        elif n < n_min:
            raise ValidationError(f"n={n} is smaller than the largest vertex label")
        self.n = int(n)
        self.edges = tuple((int(j), int(k)) for j, k in edges)

        adj = [[] for _ in range(self.n)]
        for j, k in self.edges:
            adj[j].append(k)
            adj[k].append(j)
        self.neighbors = tuple(tuple(sorted(a)) for a in adj)

        comp = [-1] * self.n
        c = 0
        for root in range(self.n):
            if comp[root] != -1:
                continue
            stack = [root]
            comp[root] = c
            while stack:
                v = stack.pop()
                for w in self.neighbors[v]:
                    if comp[w] == -1:
                        comp[w] = c
                        stack.append(w)
            c += 1
        self.component_of = tuple(comp)
        self.c = c

        lookup = {}
        for idx, (j, k) in enumerate(self.edges):
            lookup[(j, k)] = (idx, 1)
            lookup[(k, j)] = (idx, -1)
        self._edge_lookup = lookup

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge_index(self, j: int, k: int) -> tuple[int, int]:
        """Return (edge index, +1 or -1) for the pair (j, k); sign is +1 when
        the stored orientation is (j, k)."""
        return self._edge_lookup[(j, k)]

    def has_edge(self, j: int, k: int) -> bool:
        return (j, k) in self._edge_lookup

    def degree(self, v: int) -> int:
        return len(self.neighbors[v])

    def is_connected(self) -> bool:
        return self.c <= 1

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m}, c={self.c})"


def build_graph(edge_list, n: int | None = None) -> Graph:
    """Build an immutable graph from a sequence of vertex pairs.

    Isolated trailing vertices are allowed through the explicit ``n``
    override; otherwise n is one more than the largest label.
    """
    return Graph(edge_list, n=n)


@dataclass(frozen=True)
class IncidenceMatrix:
    """Vertex-by-edge incidence matrix with one -1 (tail) and +1 (head) per column."""

    B: np.ndarray  # shape (n, m), integer entries in {-1, 0, +1}

    @property
    def n(self) -> int:
        return self.B.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    def rank(self, tol: float | None = None) -> int:
        """Numerical rank via singular values; defaults to the pivoted-scale cutoff."""
        if self.B.size == 0:
            return 0
        s = np.linalg.svd(self.B.astype(float), compute_uv=False)
        if tol is None:
            tol = rank_tolerance(self.n, self.m, float(s[0]) if s.size else 0.0)
        return int(np.sum(s > tol))


def incidence_matrix(G: Graph) -> IncidenceMatrix:
    """Incidence matrix B with B[i, e] = +1 if i is the head of e, -1 if the tail."""
    B = np.zeros((G.n, G.m), dtype=np.int64)
    for e, (j, k) in enumerate(G.edges):
        B[j, e] = -1
        B[k, e] = 1
    B.setflags(write=False)
    return IncidenceMatrix(B)


def component_indicators(G: Graph) -> np.ndarray:
    """0/1 indicator vectors of the connected components, shape (c, n).

    These span the kernel of B^T and generate the translational symmetries of
    the dynamics.
    """
    D = np.zeros((G.c, G.n))
    for v, comp in enumerate(G.component_of):
        D[comp, v] = 1.0
    D.setflags(write=False)
    return D


@dataclass(frozen=True)
class BlockDecomposition:
    """Biconnected components (blocks) and cut vertices.

    Every edge lies in exactly one block; bridges are 2-vertex blocks; two
    blocks share at most one vertex, which is then a cut vertex.
    """

    blocks: tuple[tuple[int, ...], ...]        # vertex sets, sorted
    block_edges: tuple[tuple[int, ...], ...]   # edge indices per block, sorted
    cut_vertices: tuple[int, ...]


def block_decomposition(G: Graph) -> BlockDecomposition:
    """Standard biconnected-component decomposition (iterative Hopcroft-Tarjan)."""
    disc = [-1] * G.n
    low = [0] * G.n
    parent_edge = [-1] * G.n
    cut = set()
    blocks_e: list[list[int]] = []
    stack_e: list[int] = []
    timer = 0

    for root in range(G.n):
        if disc[root] != -1:
            continue
        root_children = 0
        # iterative DFS: frame = (vertex, iterator over incident (edge, other))
        incident = lambda v: [(G.edge_index(v, w)[0], w) for w in G.neighbors[v]]
        frames = [(root, iter(incident(root)))]
        disc[root] = low[root] = timer
        timer += 1
        while frames:
            v, it = frames[-1]
            advanced = False
            for eidx, w in it:
                if eidx == parent_edge[v]:
                    continue
                if disc[w] == -1:
                    stack_e.append(eidx)
                    parent_edge[w] = eidx
                    disc[w] = low[w] = timer
                    timer += 1
                    if v == root:
                        root_children += 1
                    frames.append((w, iter(incident(w))))
                    advanced = True
                    break
                elif disc[w] < disc[v]:
                    stack_e.append(eidx)
                    low[v] = min(low[v], disc[w])
            if advanced:
                continue
            frames.pop()
            if frames:
                u = frames[-1][0]
                low[u] = min(low[u], low[v])
                if low[v] >= disc[u]:
                    # u closes a block; pop the edge stack down to u-v's edge
                    blk = []
                    while stack_e:
                        eidx = stack_e.pop()
                        blk.append(eidx)
                        if eidx == parent_edge[v]:
                            break
                    blocks_e.append(blk)
                    if u != root:
                        cut.add(u)
        if root_children > 1:
            cut.add(root)

    blocks_v = []
    for blk in blocks_e:
        verts = set()
        for eidx in blk:
            verts.update(G.edges[eidx])
        blocks_v.append(tuple(sorted(verts)))
    order = sorted(range(len(blocks_e)), key=lambda i: (min(blocks_e[i]), blocks_v[i]))
    return BlockDecomposition(
        blocks=tuple(blocks_v[i] for i in order),
        block_edges=tuple(tuple(sorted(blocks_e[i])) for i in order),
        cut_vertices=tuple(sorted(cut)),
    )


def induced_subgraph(G: Graph, vertices) -> tuple[Graph, dict[int, int]]:
    """Subgraph induced by ``vertices`` with relabelled 0..k-1 vertex set.

    Returns the subgraph and the old->new vertex map. Edge order and
    orientation follow the parent graph.
    """
    verts = sorted(set(vertices))
    relabel = {v: i for i, v in enumerate(verts)}
    sub_edges = [(relabel[j], relabel[k]) for j, k in G.edges if j in relabel and k in relabel]
    return Graph(sub_edges, n=len(verts)), relabel


def graph_to_dict(G: Graph) -> dict:
    return {"n": G.n, "edges": [[j, k] for j, k in G.edges]}


def graph_from_dict(data: dict) -> Graph:
    if "edges" not in data:
        raise ValidationError("graph JSON needs an 'edges' field")
    return Graph([tuple(e) for e in data["edges"]], n=data.get("n"))


def parse_edge_list(text: str) -> Graph:
    """Parse the plain-text edge format: one 'j k' pair per line, '#' comments."""
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValidationError(f"line {lineno}: expected 'j k', got {raw!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise ValidationError(f"line {lineno}: non-integer vertex in {raw!r}") from exc
    return Graph(edges)
