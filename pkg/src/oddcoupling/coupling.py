"""Odd analytic coupling functions from three closed families.

The families are odd polynomials, integer-harmonic sine combinations, and
anti-periodic sine series with a free half-period P. Restricting to closed
families keeps the derivative and the primitive exact, which the stability
and energy machinery rely on. Oddness holds by construction: polynomials are
evaluated as x * p(x^2) and the sine bases are odd termwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .defaults import ROOT_MAX_BISECT, ROOT_TOL
from .errors import AllZeroError, ValidationError

SIGN_NONNEG = "nonneg"
SIGN_NONPOS = "nonpos"
SIGN_MIXED = "mixed"


@dataclass(frozen=True)
class Root:
    value: float
    sign_change: bool


@dataclass(frozen=True)
class ZeroSet:
    """Real roots of f in a bounded interval, each bracketed by a certified
    sign change or flagged as tangential."""

    interval: tuple[float, float]
    roots: tuple[Root, ...]

    def values(self) -> list[float]:
        return [r.value for r in self.roots]


class CouplingFunction:
    """Base class; subclasses provide exact eval / deriv / primitive.

    Derived flags:
      periodic      -- period, or None
      antiperiod    -- P with f(P + x) = -f(x), or None
      finite_fibers -- every value has finitely many preimages
    """

    periodic: float | None = None
    antiperiod: float | None = None
    finite_fibers: bool = False

    def __call__(self, x):
        raise NotImplementedError

    def deriv(self, x):
        raise NotImplementedError

    def deriv2(self, x):
        raise NotImplementedError

    def primitive(self, x):
        """Primitive g with g(0) = 0 and g' = f. Energies built from g are
        only defined up to a constant; compare differences, not values."""
        raise NotImplementedError

    def scan_resolution(self, a: float, b: float) -> int:
        """Suggested grid size for root isolation on [a, b]."""
        raise NotImplementedError

    @property
    def increasing(self) -> bool:
        return classify(self).increasing

    @property
    def sign_on_positives(self) -> str:
        return classify(self).sign_on_positives

    def to_dict(self) -> dict:
        raise NotImplementedError


class OddPolynomial(CouplingFunction):
    """f(x) = sum_k c_k x^(2k+1), stored by the odd-power coefficients c_k."""

    def __init__(self, coeffs):
        coeffs = [float(c) for c in coeffs]
        while coeffs and coeffs[-1] == 0.0:
            coeffs.pop()
        if not coeffs or all(c == 0.0 for c in coeffs):
            raise AllZeroError("odd polynomial needs at least one nonzero coefficient")
        self.coeffs = tuple(coeffs)
        self.finite_fibers = True
        self._flags: CouplingFlags | None = None

    def _horner(self, coeffs, u):
        acc = np.zeros_like(u)
        for c in reversed(coeffs):
            acc = acc * u + c
        return acc

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return x * self._horner(self.coeffs, x * x)

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        d = [(2 * k + 1) * c for k, c in enumerate(self.coeffs)]
        return self._horner(d, x * x)

    def deriv2(self, x):
        x = np.asarray(x, dtype=float)
        d2 = [(2 * k + 1) * (2 * k) * c for k, c in enumerate(self.coeffs)][1:]
        return x * self._horner(d2, x * x)

    def primitive(self, x):
        x = np.asarray(x, dtype=float)
        u = x * x
        p = [c / (2 * k + 2) for k, c in enumerate(self.coeffs)]
        return u * self._horner(p, u)

    def full_coefficients(self) -> np.ndarray:
        """Dense coefficient array [a_0, a_1, ...] of f, lowest degree first."""
        full = np.zeros(2 * len(self.coeffs))
        full[1::2] = self.coeffs
        return full

    def cauchy_root_bound(self) -> float:
        lead = self.coeffs[-1]
        return 1.0 + max(abs(c / lead) for c in self.coeffs)

    def scan_resolution(self, a, b):
        return max(256, 64 * (2 * len(self.coeffs) + 1))

    def to_dict(self):
        return {"family": "odd_poly", "coeffs": list(self.coeffs)}

    def __repr__(self):
        return f"OddPolynomial(coeffs={self.coeffs})"


def _clean_terms(terms) -> tuple[tuple[int, float], ...]:
    cleaned = []
    for k, a in dict(terms).items():
        k = int(k)
        a = float(a)
        if k < 1:
            raise ValidationError(f"harmonic index {k} must be a positive integer")
        if a != 0.0:
            cleaned.append((k, a))
    if not cleaned:
        raise AllZeroError("sine combination needs at least one nonzero amplitude")
    return tuple(sorted(cleaned))


class SineCombination(CouplingFunction):
    """f(x) = sum_k b_k sin(k x); period 2*pi / gcd of the harmonics."""

    def __init__(self, terms):
        self.terms = _clean_terms(terms)
        ks = [k for k, _ in self.terms]
        g = math.gcd(*ks) if len(ks) > 1 else ks[0]
        self.periodic = 2.0 * math.pi / g
        self.antiperiod = math.pi if all(k % 2 == 1 for k in ks) else None
        self.finite_fibers = False
        self._flags: CouplingFlags | None = None

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for k, a in self.terms:
            out += a * np.sin(k * x)
        return out

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for k, a in self.terms:
            out += a * k * np.cos(k * x)
        return out

    def deriv2(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for k, a in self.terms:
            out -= a * k * k * np.sin(k * x)
        return out

    def primitive(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for k, a in self.terms:
            out += a * (1.0 - np.cos(k * x)) / k
        return out

    def scan_resolution(self, a, b):
        kmax = max(k for k, _ in self.terms)
        return max(256, int(32 * kmax * (b - a) / math.pi) + 32)

    def deriv2_amplitude_bound(self) -> float:
        return sum(abs(a) * k * k for k, a in self.terms)

    def to_dict(self):
        return {"family": "sine_sum", "terms": {str(k): a for k, a in self.terms}}

    def __repr__(self):
        return f"SineCombination(terms={dict(self.terms)})"


class SineSeries(CouplingFunction):
    """f(x) = sum over odd m of a_m sin(m pi x / P); satisfies f(P+x) = -f(x)."""

    def __init__(self, half_period: float, terms):
        if not half_period > 0:
            raise ValidationError("half-period P must be positive")
        self.P = float(half_period)
        self.terms = _clean_terms(terms)
        for m, _ in self.terms:
            if m % 2 == 0:
                raise ValidationError(f"sine series admits odd harmonics only, got {m}")
        self.periodic = 2.0 * self.P
        self.antiperiod = self.P
        self.finite_fibers = False
        self._flags: CouplingFlags | None = None

    def _omega(self, m: int) -> float:
        return m * math.pi / self.P

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for m, a in self.terms:
            out += a * np.sin(self._omega(m) * x)
        return out

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for m, a in self.terms:
            out += a * self._omega(m) * np.cos(self._omega(m) * x)
        return out

    def deriv2(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for m, a in self.terms:
            out -= a * self._omega(m) ** 2 * np.sin(self._omega(m) * x)
        return out

    def primitive(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for m, a in self.terms:
            w = self._omega(m)
            out += a * (1.0 - np.cos(w * x)) / w
        return out

    def scan_resolution(self, a, b):
        mmax = max(m for m, _ in self.terms)
        return max(256, int(32 * mmax * (b - a) / self.P) + 32)

    def deriv2_amplitude_bound(self) -> float:
        return sum(abs(a) * self._omega(m) ** 2 for m, a in self.terms)

    def to_dict(self):
        return {"family": "sine_series", "P": self.P,
                "terms": {str(m): a for m, a in self.terms}}

    def __repr__(self):
        return f"SineSeries(P={self.P}, terms={dict(self.terms)})"


def make_polynomial(odd_coefficients) -> OddPolynomial:
    """Coupling f(x) = sum_k c_k x^(2k+1) from the odd-power coefficients."""
    return OddPolynomial(odd_coefficients)


def make_sine_combination(amplitudes) -> SineCombination:
    """Coupling f(x) = sum_k b_k sin(k x) from an integer->amplitude map."""
    return SineCombination(amplitudes)


def make_sine_series(half_period: float, amplitudes) -> SineSeries:
    """Anti-periodic coupling sum_{m odd} a_m sin(m pi x / P)."""
    return SineSeries(half_period, amplitudes)


def coupling_from_dict(data: dict) -> CouplingFunction:
    family = data.get("family")
    if family == "odd_poly":
        return make_polynomial(data["coeffs"])
    if family == "sine_sum":
        return make_sine_combination({int(k): v for k, v in data["terms"].items()})
    if family == "sine_series":
        return make_sine_series(data["P"], {int(k): v for k, v in data["terms"].items()})
    raise ValidationError(f"unknown coupling family {family!r}")


def _bisect(fun, lo, hi, flo):
    """Shrink a sign-change bracket; returns the midpoint root."""
    for _ in range(ROOT_MAX_BISECT):
        if hi - lo < ROOT_TOL:
            break
        mid = 0.5 * (lo + hi)
        fm = float(fun(mid))
        if fm == 0.0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def zeros_in(f: CouplingFunction, interval) -> ZeroSet:
    """All real roots of f in a bounded interval.

    Sign-change roots are isolated by bracketing on a family-sized grid and
    refined by bisection; tangential roots (no sign change) are recovered as
    extrema of f, i.e. sign-change roots of f', at which |f| < ROOT_TOL.
    """
    a, b = float(interval[0]), float(interval[1])
    if not (np.isfinite(a) and np.isfinite(b)) or not b > a:
        raise ValidationError(f"need a bounded interval, got {interval!r}")
    n_grid = f.scan_resolution(a, b)
    xs = np.linspace(a, b, n_grid + 1)
    fs = np.asarray(f(xs))

    found: list[float] = []
    tiny = ROOT_TOL

    # roots sitting (numerically) on grid points
    for i in np.nonzero(np.abs(fs) <= tiny)[0]:
        found.append(float(xs[i]))

    # strict sign changes
    for i in np.nonzero((fs[:-1] * fs[1:] < 0))[0]:
        found.append(_bisect(f, float(xs[i]), float(xs[i + 1]), float(fs[i])))

    # tangential roots: zeros of f' where f itself vanishes
    dfs = np.asarray(f.deriv(xs))
    for i in np.nonzero(dfs[:-1] * dfs[1:] < 0)[0]:
        xstar = _bisect(f.deriv, float(xs[i]), float(xs[i + 1]), float(dfs[i]))
        if abs(float(f(xstar))) <= tiny:
            found.append(xstar)

    # dedup, then decide the sign-change flag from nearby samples
    found.sort()
    sep = max(10 * ROOT_TOL, (b - a) * 1e-12)
    merged: list[float] = []
    for r in found:
        if merged and abs(r - merged[-1]) <= sep:
            continue
        merged.append(r)

    delta = max((b - a) / (4 * n_grid), 1e-7)
    roots = []
    for r in merged:
        left = float(f(max(r - delta, a - delta)))
        right = float(f(min(r + delta, b + delta)))
        roots.append(Root(value=r, sign_change=(left * right < 0)))
    return ZeroSet(interval=(a, b), roots=tuple(roots))


@dataclass(frozen=True)
class CouplingFlags:
    periodic: float | None
    antiperiod: float | None
    finite_fibers: bool
    increasing: bool
    sign_on_positives: str


def _poly_real_roots(full_coeffs: np.ndarray) -> np.ndarray:
    """Real roots of a dense-coefficient polynomial (lowest degree first)."""
    coeffs = np.trim_zeros(full_coeffs, "b")
    if coeffs.size <= 1:
        return np.array([])
    roots = np.polynomial.polynomial.polyroots(coeffs)
    real = roots[np.abs(roots.imag) <= 1e-9 * (1.0 + np.abs(roots))].real
    return np.sort(real)


def _poly_increasing(f: OddPolynomial) -> bool:
    # increasing iff f' >= 0 everywhere with isolated zeros: sample f'
    # strictly between consecutive real roots of f' and beyond the extremes
    d = np.zeros(2 * len(f.coeffs) - 1)
    d[0::2] = [(2 * k + 1) * c for k, c in enumerate(f.coeffs)]
    roots = _poly_real_roots(d)
    lo = roots.min() - 1.0 if roots.size else -1.0
    hi = roots.max() + 1.0 if roots.size else 1.0
    probes = [lo, hi] + [0.5 * (roots[i] + roots[i + 1]) for i in range(len(roots) - 1)]
    vals = [float(f.deriv(x)) for x in probes]
    return min(vals) > -1e-13 and max(vals) > 0.0


def _periodic_increasing(f: CouplingFunction) -> bool:
    # certified grid minimisation of f' over one period; the exact amplitude
    # bound on |f''| controls the variation between grid points. A nonconstant
    # periodic f has mean-zero f', so its minimum is strictly negative and the
    # refinement loop terminates on the negative branch.
    period = f.periodic
    assert period is not None
    bound2 = f.deriv2_amplitude_bound()
    xs = np.linspace(0.0, period, 4097)
    h = xs[1] - xs[0]
    for _ in range(12):
        m = float(np.min(np.asarray(f.deriv(xs))))
        if m < -1e-13:
            return False
        if m - bound2 * h * h / 8.0 > 0.0:
            return True
        h *= 0.5
        xs = np.linspace(0.0, period, 2 * (xs.size - 1) + 1)
    return False


def _sign_from_probes(f, probes) -> str:
    signs = {np.sign(v) for v in (float(f(x)) for x in probes) if abs(v) > 1e-13}
    if signs <= {1.0}:
        return SIGN_NONNEG
    if signs <= {-1.0}:
        return SIGN_NONPOS
    return SIGN_MIXED


def classify(f: CouplingFunction) -> CouplingFlags:
    """Derive the property flags the equilibrium theory conditions on."""
    cached = getattr(f, "_flags", None)
    if cached is not None:
        return cached

    if isinstance(f, OddPolynomial):
        increasing = _poly_increasing(f)
        pos_roots = [r for r in _poly_real_roots(f.full_coefficients()) if r > 1e-12]
        hi = (max(pos_roots) if pos_roots else 0.0) + 1.0 + f.cauchy_root_bound()
        grid = sorted(set(pos_roots) | {hi})
        probes = [0.5 * min(grid)] if grid else []
        probes += [0.5 * (grid[i] + grid[i + 1]) for i in range(len(grid) - 1)]
        probes.append(hi)
        sign = _sign_from_probes(f, probes)
    else:
        increasing = _periodic_increasing(f)
        period = f.periodic
        zero_set = zeros_in(f, (1e-9, period - 1e-9))
        pts = [0.0] + zero_set.values() + [period]
        probes = [0.5 * (pts[i] + pts[i + 1]) for i in range(len(pts) - 1)]
        sign = _sign_from_probes(f, probes)

    flags = CouplingFlags(
        periodic=f.periodic,
        antiperiod=f.antiperiod,
        finite_fibers=f.finite_fibers,
        increasing=increasing,
        sign_on_positives=sign,
    )
    f._flags = flags
    return flags
