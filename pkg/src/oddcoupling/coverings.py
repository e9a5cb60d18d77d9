"""Graph coverings, generalized coverings, equilibrium lifting, and
automorphisms.

A vertex surjection phi: V(G) -> V(H) is a covering map when it restricts to
a bijection on every neighborhood. The generalized form first discards the
neighbors that share the vertex's own image (their interaction terms cancel)
and then asks the restriction to be d_i-to-one onto the image neighborhood.
Equilibria of H lift to equilibria of G through x_i = y_{phi(i)}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coupling import CouplingFunction
from .defaults import DEDUP_DISTANCE, SEARCH_VERTEX_CAP, eq_tolerance
from .equilibria import (
    EquilibriumPoint,
    equilibrium_point,
    points_equivalent,
)
from .errors import (
    NotAnEquilibriumError,
    NumericalError,
    SearchBudgetExceededError,
    ValidationError,
)
from .graphs import Graph

__all__ = [
    "VertexMap",
    "AutomorphismSet",
    "is_covering",
    "is_generalized_covering",
    "find_generalized_coverings",
    "lift_equilibrium",
    "automorphisms",
    "apply_permutation",
    "orbit_of_equilibrium",
    "OrbitResult",
]


@dataclass(frozen=True)
class VertexMap:
    """A vertex map G -> H; fiber degrees are filled in once validated as a
    generalized covering. external_equitable notes the all-degrees-equal case."""

    phi: tuple[int, ...]
    fiber_degrees: tuple[int, ...] | None = None
    external_equitable: bool | None = None

    def to_dict(self) -> dict:
        out: dict = {"phi": list(self.phi)}
        if self.fiber_degrees is not None:
            out["fiber_degrees"] = list(self.fiber_degrees)
            out["external_equitable"] = self.external_equitable
        return out


def _check_phi(phi, G: Graph, H: Graph) -> tuple[int, ...]:
    phi = tuple(int(v) for v in phi)
    if len(phi) != G.n:
        raise ValidationError(f"phi must assign all {G.n} vertices")
    if any(not 0 <= v < H.n for v in phi):
        raise ValidationError("phi maps outside the target vertex set")
    return phi


def is_covering(phi, G: Graph, H: Graph) -> bool:
    """True iff phi is surjective and bijects every N_G(i) onto N_H(phi(i))."""
    phi = _check_phi(phi, G, H)
    if set(phi) != set(range(H.n)):
        return False
    for i in range(G.n):
        images = [phi[j] for j in G.neighbors[i]]
        target = set(H.neighbors[phi[i]])
        if len(images) != len(set(images)):
            return False
        if set(images) != target:
            return False
    return True


def is_generalized_covering(phi, G: Graph, H: Graph) -> tuple[bool, tuple[int, ...] | None]:
    """Check the d_i-to-one condition after removing same-image neighbors.

    Returns (valid, fiber_degrees). Well-definedness (images of the remaining
    neighbors land in N_H(phi(i))) is checked before counting; failure of
    either is a plain False.
    """
    phi = _check_phi(phi, G, H)
    if set(phi) != set(range(H.n)):
        return False, None
    degrees = []
    for i in range(G.n):
        rest = [j for j in G.neighbors[i] if phi[j] != phi[i]]
        target = H.neighbors[phi[i]]
        counts = dict.fromkeys(target, 0)
        for j in rest:
            if phi[j] not in counts:
                return False, None  # image leaves the neighborhood
        for j in rest:
            counts[phi[j]] += 1
        if not target:
            if rest:
                return False, None
            degrees.append(1)
            continue
        vals = set(counts.values())
        if len(vals) != 1 or 0 in vals:
            return False, None
        degrees.append(vals.pop())
    return True, tuple(degrees)


def validated_vertex_map(phi, G: Graph, H: Graph) -> VertexMap:
    ok, degrees = is_generalized_covering(phi, G, H)
    if not ok:
        raise ValidationError("phi is not a generalized covering map")
    return VertexMap(phi=tuple(int(v) for v in phi), fiber_degrees=degrees,
                     external_equitable=len(set(degrees)) == 1)


def find_generalized_coverings(G: Graph, H: Graph, cap: int = 10_000) -> list[VertexMap]:
    """All generalized covering maps G -> H by backtracking, in lexicographic
    order of the assignment vector. Raises SearchBudgetExceededError when more
    than ``cap`` maps exist."""
    if G.n > SEARCH_VERTEX_CAP:
        raise ValidationError(f"search capped at {SEARCH_VERTEX_CAP} vertices "
                              f"(got {G.n}); exponential backtracking")
    deg_H = [H.degree(v) for v in range(H.n)]
    phi = [-1] * G.n
    found: list[VertexMap] = []

    def feasible(v: int, h: int) -> bool:
        if G.degree(v) < deg_H[h]:
            return False
        for w in G.neighbors[v]:
            hw = phi[w]
            if hw == -1 or hw == h:
                continue
            if not H.has_edge(h, hw):
                return False
        return True

    def backtrack(v: int):
        if v == G.n:
            ok, degrees = is_generalized_covering(phi, G, H)
            if ok:
                found.append(VertexMap(phi=tuple(phi), fiber_degrees=degrees,
                                       external_equitable=len(set(degrees)) == 1))
                if len(found) > cap:
                    raise SearchBudgetExceededError(
                        f"more than {cap} generalized coverings")
            return
        for h in range(H.n):
            if feasible(v, h):
                phi[v] = h
                backtrack(v + 1)
                phi[v] = -1

    backtrack(0)
    return found


def lift_equilibrium(phi: VertexMap, y_point: EquilibriumPoint, G: Graph, H: Graph,
                     f: CouplingFunction) -> EquilibriumPoint:
    """Pull an equilibrium of H back to G through a generalized covering:
    x_i = y_{phi(i)}. The interaction sums cancel fiber by fiber, so the lift
    is an equilibrium up to d_i-scaled roundoff."""
    if phi.fiber_degrees is None:
        phi = validated_vertex_map(phi.phi, G, H)
    if y_point.residual > eq_tolerance(y_point.x):
        raise NotAnEquilibriumError(
            f"input residual {y_point.residual:.3e} exceeds tolerance")
    x = np.array([y_point.x[phi.phi[i]] for i in range(G.n)])
    lifted = equilibrium_point(G, f, x)
    allowed = max(phi.fiber_degrees) * y_point.residual + 1e-12
    if lifted.residual > max(allowed, eq_tolerance(x)):
        raise NumericalError(
            f"lift residual {lifted.residual:.3e} exceeds {allowed:.3e}")
    return lifted


@dataclass(frozen=True)
class AutomorphismSet:
    """Adjacency-preserving vertex permutations; a group when complete."""

    permutations: tuple[tuple[int, ...], ...]
    complete: bool

    def __len__(self):
        return len(self.permutations)


def automorphisms(G: Graph, cap: int = 100_000) -> AutomorphismSet:
    """All graph automorphisms by backtracking with degree pruning."""
    if G.n > SEARCH_VERTEX_CAP:
        raise ValidationError(f"search capped at {SEARCH_VERTEX_CAP} vertices")
    deg = [G.degree(v) for v in range(G.n)]
    nbr_deg = [tuple(sorted(deg[w] for w in G.neighbors[v])) for v in range(G.n)]
    sigma = [-1] * G.n
    used = [False] * G.n
    perms: list[tuple[int, ...]] = []
    hit_cap = False

    def consistent(v: int, u: int) -> bool:
        # edges into edges suffices: a vertex bijection mapping all m edges
        # onto edges is automatically adjacency-preserving both ways
        if deg[u] != deg[v] or nbr_deg[u] != nbr_deg[v]:
            return False
        for w in G.neighbors[v]:
            if sigma[w] != -1 and not G.has_edge(u, sigma[w]):
                return False
        return True

    def backtrack(v: int):
        nonlocal hit_cap
        if hit_cap:
            return
        if v == G.n:
            perms.append(tuple(sigma))
            if len(perms) >= cap:
                hit_cap = True
            return
        for u in range(G.n):
            if not used[u] and consistent(v, u):
                sigma[v] = u
                used[u] = True
                backtrack(v + 1)
                used[u] = False
                sigma[v] = -1

    backtrack(0)
    perms.sort()
    return AutomorphismSet(permutations=tuple(perms), complete=not hit_cap)


def apply_permutation(perm, x: np.ndarray) -> np.ndarray:
    """Coordinate action: (sigma.x)[sigma(v)] = x[v]."""
    out = np.empty_like(np.asarray(x, dtype=float))
    out[np.asarray(perm)] = x
    return out


@dataclass(frozen=True)
class OrbitResult:
    """Orbit of an equilibrium under the automorphism action.

    stabilizer_sizes counts, per orbit representative, the automorphisms
    fixing it (up to translational/winding identification); a stabilizer
    larger than one marks a candidate singular point where symmetric
    manifolds of equilibria may intersect.
    """

    points: tuple[EquilibriumPoint, ...]
    stabilizer_sizes: tuple[int, ...]

    @property
    def singular_candidates(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.stabilizer_sizes) if s > 1)


def orbit_of_equilibrium(auts: AutomorphismSet, G: Graph, f: CouplingFunction,
                         p: EquilibriumPoint,
                         distance: float = DEDUP_DISTANCE) -> OrbitResult:
    """Apply every automorphism to p, dedup, and verify each image.

    Equivariance makes every image an equilibrium with the same residual; the
    verification guards against mixed-up graphs rather than roundoff.
    """
    if p.residual > eq_tolerance(p.x):
        raise NotAnEquilibriumError(f"residual {p.residual:.3e} too large")
    reps: list[EquilibriumPoint] = []
    stab: list[int] = []
    for perm in auts.permutations:
        q = equilibrium_point(G, f, apply_permutation(perm, p.x))
        if q.residual > 10 * eq_tolerance(q.x):
            raise NumericalError("automorphism image failed the residual check; "
                                 "is the permutation really an automorphism?")
        for i, r in enumerate(reps):
            if points_equivalent(G, f, q, r, distance):
                stab[i] += 1
                break
        else:
            reps.append(q)
            stab.append(1)
    return OrbitResult(points=tuple(reps), stabilizer_sizes=tuple(stab))
