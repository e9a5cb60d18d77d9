"""Shared test utilities: random graph generation and independent oracles."""

from fractions import Fraction
from itertools import permutations

import numpy as np

from oddcoupling import build_graph


def random_connected_graph(rng, n_max=10, extra_max=5):
    """Random spanning tree plus extra edges; always connected."""
    n = int(rng.integers(2, n_max + 1))
    edges = []
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges.append((u, v))
    existing = {frozenset(e) for e in edges}
    for _ in range(int(rng.integers(0, extra_max + 1))):
        u, v = rng.choice(n, size=2, replace=False)
        key = frozenset((int(u), int(v)))
        if key not in existing:
            existing.add(key)
            edges.append((int(u), int(v)))
    return build_graph(edges, n=n)


def random_graph(rng, n_max=10, p=0.35):
    """Erdos-Renyi-ish, possibly disconnected."""
    n = int(rng.integers(2, n_max + 1))
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)
             if rng.random() < p]
    return build_graph(edges, n=n)


def elimination_rank(M):
    """Exact rank by Gaussian elimination over the rationals."""
    rows = [[Fraction(int(v)) for v in row] for row in np.asarray(M)]
    rank = 0
    n_cols = len(rows[0]) if rows else 0
    col = 0
    for col in range(n_cols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pivot_row = rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                factor = rows[r][col] / pivot_row[col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], pivot_row)]
        rank += 1
    return rank


def brute_force_simple_cycles(G):
    """All simple cycles as frozensets of edge indices, by checking every
    vertex subset and every cyclic order. Exponential; tiny graphs only."""
    cycles = set()
    verts = list(range(G.n))
    for size in range(3, G.n + 1):
        for subset in _subsets(verts, size):
            first = subset[0]
            for perm in permutations(subset[1:]):
                walk = (first,) + perm
                if all(G.has_edge(walk[i], walk[(i + 1) % size])
                       for i in range(size)):
                    cycles.add(frozenset(G.edge_index(walk[i], walk[(i + 1) % size])[0]
                                         for i in range(size)))
    return cycles


def _subsets(items, size):
    from itertools import combinations
    return combinations(items, size)


def brute_force_cycle_chain(G):
    """Maximum cycle-chain length by naive DFS over frozenset cycles."""
    cycles = sorted(brute_force_simple_cycles(G), key=sorted)
    best = 0

    def extend(chain):
        nonlocal best
        best = max(best, len(chain))
        before = frozenset().union(*chain[:-1]) if len(chain) > 1 else frozenset()
        for c in cycles:
            if len(c & chain[-1]) == 1 and not (c & before):
                extend(chain + [c])

    for c in cycles:
        extend([c])
    return best
