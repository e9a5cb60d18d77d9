"""Shared numerical tolerances and budget defaults.

Every threshold used by more than one module lives here so the CLI can
override them in one place and so the kernel threshold used by the stability
verdicts and by local-dimension estimation stay consistent.
"""

import numpy as np

# equilibrium acceptance: ||F(x)||_2 <= EQ_TOL_SCALE * (1 + ||x||_inf)
EQ_TOL_SCALE = 1e-9

# zero-eigenvalue bucket: |lambda| <= ZERO_TOL_SCALE * max(1, |lambda|_max)
ZERO_TOL_SCALE = 1e-7

# absolute tolerance for roots of the coupling function
ROOT_TOL = 1e-12
ROOT_MAX_BISECT = 60

# edge-space distance below which two equilibria are considered the same
DEDUP_DISTANCE = 1e-6

# pseudo-arclength step (edge-space arclength)
CONTINUATION_STEP = 0.05

# integrator defaults
ODE_RTOL = 1e-8
ODE_ATOL = 1e-10
ODE_T_END = 200.0

# energy-monotonicity slack: 1e-7 * (1 + |E(x0)|)
MONO_TOL_SCALE = 1e-7

# enumeration / search budgets
CYCLE_CAP = 10_000
SEARCH_VERTEX_CAP = 16
ZERO_PATTERN_VERTEX_CAP = 20

# fixed default seed so every run is reproducible unless told otherwise
DEFAULT_SEED = 1729


def eq_tolerance(x, scale: float = EQ_TOL_SCALE) -> float:
    """Residual acceptance threshold at state ``x``."""
    return scale * (1.0 + float(np.max(np.abs(x), initial=0.0)))


def zero_tolerance(eigenvalues, scale: float = ZERO_TOL_SCALE) -> float:
    """Threshold separating the zero bucket of a symmetric spectrum."""
    lmax = float(np.max(np.abs(eigenvalues), initial=0.0))
    return scale * max(1.0, lmax)


def rank_tolerance(n: int, m: int, sigma_max: float) -> float:
    """Singular-value cutoff for numerical rank of an n-by-m matrix."""
    return max(n, m) * np.finfo(float).eps * sigma_max


def mono_tolerance(e0: float, scale: float = MONO_TOL_SCALE) -> float:
    """Allowed energy increase between consecutive trajectory samples."""
    return scale * (1.0 + abs(e0))
