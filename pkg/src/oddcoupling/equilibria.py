"""Vector field, energy, equilibrium finding, and equilibrium bookkeeping.

States live in vertex space; the edge-space image y = B^T x kills the
translational symmetry and is the canonical coordinate for comparing
equilibria. For periodic coupling, images that differ by full periods wound
around cycles are identified through the integer lattice {B^T k : k integer}.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from . import homology
from .coupling import CouplingFunction, SIGN_MIXED, zeros_in
from .defaults import (
    DEDUP_DISTANCE,
    EQ_TOL_SCALE,
    ZERO_PATTERN_VERTEX_CAP,
    eq_tolerance,
    rank_tolerance,
)
from .errors import NoConvergenceError, NotARootError, ValidationError
from .graphs import Graph, component_indicators, incidence_matrix


@lru_cache(maxsize=256)
def _operators(G: Graph) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(B, B^T, component indicator matrix) as float arrays."""
    B = incidence_matrix(G).B.astype(float)
    B.setflags(write=False)
    Bt = np.ascontiguousarray(B.T)
    Bt.setflags(write=False)
    D = component_indicators(G)
    return B, Bt, D


def vector_field(G: Graph, f: CouplingFunction, x) -> np.ndarray:
    """Right-hand side -B f(B^T x); equals minus the energy gradient."""
    B, Bt, _ = _operators(G)
    x = np.asarray(x, dtype=float)
    return -(B @ np.asarray(f(Bt @ x)))


def energy(G: Graph, f: CouplingFunction, x) -> float:
    """Sum over oriented edges of g(x_head - x_tail), g the primitive of f.

    Defined only up to a constant (g(0) = 0 normalisation); compare energy
    differences, never absolute values.
    """
    _, Bt, _ = _operators(G)
    x = np.asarray(x, dtype=float)
    return float(np.sum(f.primitive(Bt @ x)))


def canonical_form(G: Graph, x) -> np.ndarray:
    """Project out the per-component mean (the translational symmetry)."""
    _, _, D = _operators(G)
    x = np.asarray(x, dtype=float)
    means = (D @ x) / D.sum(axis=1)
    return x - D.T @ means


@dataclass(frozen=True)
class EquilibriumPoint:
    """A state with its edge-space image, residual, and canonical form."""

    x: np.ndarray
    y: np.ndarray          # B^T x
    residual: float        # ||F(x)||_2
    canonical: np.ndarray  # x with zero mean on every component

    def accepted(self, tol_scale: float = EQ_TOL_SCALE) -> bool:
        return self.residual <= eq_tolerance(self.x, tol_scale)


def equilibrium_point(G: Graph, f: CouplingFunction, x) -> EquilibriumPoint:
    x = np.array(x, dtype=float)
    _, Bt, _ = _operators(G)
    y = Bt @ x
    res = float(np.linalg.norm(vector_field(G, f, x)))
    canon = canonical_form(G, x)
    for arr in (x, y, canon):
        arr.setflags(write=False)
    return EquilibriumPoint(x=x, y=y, residual=res, canonical=canon)


# ---------------------------------------------------------------------------
# periodic identification lattice
# ---------------------------------------------------------------------------

def _integer_potential(G: Graph, z: np.ndarray) -> np.ndarray | None:
    """Vertex vector k with k_head - k_tail = z_e on every edge, or None.

    Existence is exactly the statement that the integer edge vector z is a
    cut vector B^T k; it is decided by propagating a potential along a
    spanning tree and verifying the remaining edges.
    """
    k = np.zeros(G.n)
    seen = [False] * G.n
    for root in range(G.n):
        if seen[root]:
            continue
        seen[root] = True
        stack = [root]
        while stack:
            v = stack.pop()
            for w in G.neighbors[v]:
                if seen[w]:
                    continue
                idx, sign = G.edge_index(v, w)
                k[w] = k[v] + sign * z[idx]
                seen[w] = True
                stack.append(w)
    for idx, (u, v) in enumerate(G.edges):
        if k[v] - k[u] != z[idx]:
            return None
    return k


def winding_shift(G: Graph, delta_y, period: float,
                  tol: float | None = None) -> np.ndarray | None:
    """Integer vertex vector k with delta_y = period * B^T k, if one exists.

    Edge-space images of states that are equal on the torus (all coordinates
    mod period) differ by exactly such a shift.
    """
    delta_y = np.asarray(delta_y, dtype=float)
    if tol is None:
        tol = 1e-7 * max(1.0, period)
    z = np.round(delta_y / period)
    if float(np.linalg.norm(delta_y - period * z)) > tol:
        return None
    return _integer_potential(G, z)


def edge_space_distance(G: Graph, y1, y2, period: float | None = None) -> float:
    """Euclidean distance in edge space, reduced by the winding lattice when
    the coupling is periodic."""
    delta = np.asarray(y1, dtype=float) - np.asarray(y2, dtype=float)
    d0 = float(np.linalg.norm(delta))
    if period is None or d0 == 0.0:
        return d0
    z = np.round(delta / period)
    if not z.any():
        return d0
    if _integer_potential(G, z) is None:
        return d0
    return float(np.linalg.norm(delta - period * z))


def points_equivalent(G: Graph, f: CouplingFunction, p: EquilibriumPoint,
                      q: EquilibriumPoint, distance: float = DEDUP_DISTANCE) -> bool:
    """Equivalence used for dedup: translations always, winding for periodic f."""
    return edge_space_distance(G, p.y, q.y, period=f.periodic) <= distance


def wrap_to_fundamental(G: Graph, x, period: float) -> np.ndarray:
    """Shift every coordinate by integer periods so the state lies in a
    bounded fundamental domain (anchored at each component's first vertex)."""
    _, _, D = _operators(G)
    x = np.array(x, dtype=float)
    for comp in range(G.c):
        idx = np.nonzero(D[comp])[0]
        anchor = x[idx[0]]
        x[idx] -= period * np.round((x[idx] - anchor) / period)
    return x


# ---------------------------------------------------------------------------
# Newton solver and multistart atlas
# ---------------------------------------------------------------------------

def newton_solve(G: Graph, f: CouplingFunction, x0, max_iter: int = 60,
                 tol_scale: float = EQ_TOL_SCALE) -> EquilibriumPoint:
    """Damped Newton iteration on F(x) = -B f(B^T x).

    The Jacobian is symmetric and singular (translations, and tangentially
    along any manifold of equilibria), so steps use a truncated pseudo-inverse;
    the minimum-norm step is automatically orthogonal to the kernel. Progress
    is enforced by a backtracking line search on ||F||^2.
    """
    B, Bt, _ = _operators(G)
    x = np.array(x0, dtype=float)
    if x.shape != (G.n,):
        raise ValidationError(f"x0 must have length {G.n}")
    if not np.all(np.isfinite(x)):
        raise ValidationError("x0 must be finite")

    Fx = -(B @ np.asarray(f(Bt @ x)))
    res = float(np.linalg.norm(Fx))
    for _ in range(max_iter):
        if res <= eq_tolerance(x, tol_scale):
            return equilibrium_point(G, f, x)
        J = -(B * np.asarray(f.deriv(Bt @ x))) @ Bt
        U, s, Vt = np.linalg.svd(J)
        cutoff = rank_tolerance(G.n, G.n, float(s[0]) if s.size else 0.0)
        inv = np.where(s > cutoff, 1.0 / np.where(s > cutoff, s, 1.0), 0.0)
        delta = -(Vt.T @ (inv * (U.T @ Fx)))
        t = 1.0
        base = res * res
        while t > 1e-7:
            x_t = x + t * delta
            F_t = -(B @ np.asarray(f(Bt @ x_t)))
            r_t = float(np.linalg.norm(F_t))
            if r_t * r_t <= (1.0 - 1e-4 * t) * base:
                x, Fx, res = x_t, F_t, r_t
                break
            t *= 0.5
        else:
            raise NoConvergenceError(f"line search stalled at residual {res:.3e}")
    if res <= eq_tolerance(x, tol_scale):
        return equilibrium_point(G, f, x)
    raise NoConvergenceError(f"no convergence after {max_iter} iterations "
                             f"(residual {res:.3e})")


@dataclass(frozen=True)
class EquilibriumAtlas:
    """Deduplicated equilibria found by multistart, sorted for reproducibility."""

    points: tuple[EquilibriumPoint, ...]
    n_starts: int
    n_converged: int
    seed: int
    box_radius: float
    dedup_distance: float
    periodic_identification: bool

    def to_dict(self) -> dict:
        return {
            "n_starts": self.n_starts,
            "n_converged": self.n_converged,
            "seed": self.seed,
            "box_radius": self.box_radius,
            "dedup_distance": self.dedup_distance,
            "periodic_identification": self.periodic_identification,
            "points": [
                {
                    "x": list(p.x),
                    "y": list(p.y),
                    "residual": p.residual,
                    "canonical": list(p.canonical),
                }
                for p in self.points
            ],
        }


def multistart_atlas(G: Graph, f: CouplingFunction, n_starts: int, seed: int,
                     box_radius: float, max_iter: int = 80, threads: int = 1,
                     dedup_distance: float = DEDUP_DISTANCE) -> EquilibriumAtlas:
    """Newton solves from seeded uniform starts in [-box, box]^n, deduplicated.

    Points on the same continuum are intentionally kept as distinct samples;
    only points within ``dedup_distance`` in (identified) edge space merge.
    Output order is (residual, canonical coordinates), independent of the
    worker schedule.
    """
    if n_starts < 1:
        raise ValidationError("n_starts must be >= 1")
    rng = np.random.default_rng(seed)
    starts = rng.uniform(-box_radius, box_radius, size=(n_starts, G.n))

    def attempt(x0):
        try:
            return newton_solve(G, f, x0, max_iter=max_iter)
        except NoConvergenceError:
            return None

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            solved = list(pool.map(attempt, starts))
    else:
        solved = [attempt(x0) for x0 in starts]

    converged = [p for p in solved if p is not None]
    converged.sort(key=lambda p: (p.residual, tuple(p.canonical)))
    kept: list[EquilibriumPoint] = []
    for p in converged:
        if all(not points_equivalent(G, f, p, q, dedup_distance) for q in kept):
            kept.append(p)
    return EquilibriumAtlas(
        points=tuple(kept),
        n_starts=n_starts,
        n_converged=len(converged),
        seed=seed,
        box_radius=box_radius,
        dedup_distance=dedup_distance,
        periodic_identification=f.periodic is not None,
    )


# ---------------------------------------------------------------------------
# constructive families and membership checks
# ---------------------------------------------------------------------------

def zero_pattern_equilibria(G: Graph, f: CouplingFunction, z: float) -> list[EquilibriumPoint]:
    """The 2^(n-1) equilibria with coordinates in {0, z}, z a nonzero root of f.

    Vertex 0 is pinned at 0; every edge difference lies in {0, +z, -z}, where
    f vanishes, so the residuals are zero up to roundoff.
    """
    if not G.is_connected():
        raise ValidationError("zero-pattern enumeration needs a connected graph")
    if G.n > ZERO_PATTERN_VERTEX_CAP:
        raise ValidationError(f"2^(n-1) enumeration capped at n <= {ZERO_PATTERN_VERTEX_CAP}")
    if abs(z) < 1e-12:
        raise NotARootError("z must be a nonzero root of f")
    if abs(float(f(z))) > 1e-10:
        raise NotARootError(f"f({z}) = {float(f(z)):.3e} is not zero")
    points = []
    for bits in range(2 ** (G.n - 1)):
        x = np.zeros(G.n)
        for v in range(1, G.n):
            if bits & (1 << (v - 1)):
                x[v] = z
        points.append(equilibrium_point(G, f, x))
    return points


@dataclass(frozen=True)
class MembershipReport:
    """Edge-space equilibrium certificates.

    An equilibrium image y must be orthogonal to cycle space, have f(y) inside
    cycle space, and satisfy the skew identity sum_e y_e f(y_e) = 0.
    """

    skew_norm: float
    dist_f_from_cycle_space: float
    dist_y_from_cocycle_space: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return max(self.skew_norm, self.dist_f_from_cycle_space,
                   self.dist_y_from_cocycle_space) <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "skew_norm": self.skew_norm,
            "dist_f_from_cycle_space": self.dist_f_from_cycle_space,
            "dist_y_from_cocycle_space": self.dist_y_from_cocycle_space,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@lru_cache(maxsize=256)
def _cycle_projector(G: Graph) -> np.ndarray | None:
    C = homology.cycle_space_matrix(G).astype(float)
    if C.shape[1] == 0:
        return None
    Q, _ = np.linalg.qr(C)
    Q.setflags(write=False)
    return Q


def membership_tests(G: Graph, f: CouplingFunction, p: EquilibriumPoint,
                     tolerance: float | None = None) -> MembershipReport:
    if tolerance is None:
        tolerance = 10.0 * eq_tolerance(p.x)
    y = p.y
    fy = np.asarray(f(y))
    skew = abs(float(y @ fy))
    Q = _cycle_projector(G)
    if Q is None:
        dist_f = float(np.linalg.norm(fy))
        dist_y = 0.0
    else:
        dist_f = float(np.linalg.norm(fy - Q @ (Q.T @ fy)))
        dist_y = float(np.linalg.norm(Q.T @ y))
    return MembershipReport(
        skew_norm=skew,
        dist_f_from_cycle_space=dist_f,
        dist_y_from_cocycle_space=dist_y,
        tolerance=float(tolerance),
    )


class EquilibriaClass(str, Enum):
    ONLY_ZERO = "only_zero"
    DISCRETE = "discrete"
    NO_CONCLUSION = "no_conclusion"


@dataclass(frozen=True)
class EquilibriaPrediction:
    kind: EquilibriaClass
    global_convergence: bool          # increasing coupling: every trajectory -> 0
    nonzero_roots: tuple[float, ...]  # witnesses found in the scanned range
    scanned: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "class": self.kind.value,
            "global_convergence": self.global_convergence,
            "nonzero_roots": list(self.nonzero_roots),
            "scanned": list(self.scanned),
        }


def predict_equilibria_class(G: Graph, f: CouplingFunction) -> EquilibriaPrediction:
    """What the zero set of f alone says about the set of equilibria.

    Exhaustive for polynomials (roots are inside the Cauchy bound) and for
    periodic couplings (one period determines the zero set).
    """
    if G.m < 1:
        raise ValidationError("prediction needs a graph with at least one edge")
    if f.periodic is not None:
        lo, hi = 1e-9, f.periodic - 1e-9
    else:
        lo, hi = 1e-9, f.cauchy_root_bound() + 1.0
    # roots below 1e-6 are the forced root at the origin leaking into the
    # scan window (every odd f vanishes at 0)
    roots = tuple(r for r in zeros_in(f, (lo, hi)).values() if r > 1e-6)
    flags_sign = f.sign_on_positives
    if not roots:
        kind = EquilibriaClass.ONLY_ZERO
    elif flags_sign != SIGN_MIXED:
        kind = EquilibriaClass.DISCRETE
    else:
        kind = EquilibriaClass.NO_CONCLUSION
    return EquilibriaPrediction(
        kind=kind,
        global_convergence=f.increasing,
        nonzero_roots=roots,
        scanned=(lo, hi),
    )
