import math

import numpy as np
import pytest

from oddcoupling import (
    build_graph,
    canonical_form,
    component_indicators,
    edge_space_distance,
    energy,
    equilibrium_point,
    make_polynomial,
    make_sine_combination,
    membership_tests,
    multistart_atlas,
    newton_solve,
    predict_equilibria_class,
    vector_field,
    zero_pattern_equilibria,
)
from oddcoupling.corpus import complete_graph, cycle_graph, path_graph, star_graph
from oddcoupling.equilibria import EquilibriaClass, points_equivalent, winding_shift
from oddcoupling.errors import NoConvergenceError, NotARootError, ValidationError

from helpers import random_connected_graph, random_graph

SIN = make_sine_combination({1: 1.0})
CUBIC = make_polynomial([-1.0, 1.0])  # x^3 - x


def test_vector_field_zero_state():
    G = complete_graph(4)
    assert np.allclose(vector_field(G, SIN, np.zeros(4)), 0.0)


def test_vector_field_two_body():
    G = build_graph([(0, 1)])
    out = vector_field(G, SIN, np.array([0.0, math.pi / 2]))
    assert np.allclose(out, [1.0, -1.0])


def test_component_sums_conserved():
    rng = np.random.default_rng(21)
    for _ in range(100):
        G = random_graph(rng)
        f = [SIN, CUBIC, make_sine_combination({1: 0.5, 3: 0.2})][int(rng.integers(3))]
        x = rng.uniform(-3, 3, G.n)
        F = vector_field(G, f, x)
        D = component_indicators(G)
        assert np.max(np.abs(D @ F)) < 1e-12 * max(1.0, np.max(np.abs(F)))


def test_energy_zero_state():
    G = complete_graph(5)
    assert energy(G, SIN, np.zeros(5)) == 0.0


def test_energy_complete_graph_identity():
    # with f = sin(-x), energy differences reduce to the squared modulus of
    # the phase sum
    f = make_sine_combination({1: -1.0})
    rng = np.random.default_rng(30)
    for n in (4, 5, 6):
        G = complete_graph(n)
        for _ in range(5):
            x = rng.uniform(-math.pi, math.pi, n)
            lhs = energy(G, f, x) - energy(G, f, np.zeros(n))
            rhs = 0.5 * abs(np.exp(1j * x).sum()) ** 2 - n * n / 2.0
            assert lhs == pytest.approx(rhs, abs=1e-10)


def test_gradient_identity_random():
    rng = np.random.default_rng(33)
    fams = [SIN, CUBIC, make_sine_combination({1: 1.0, 2: -0.5})]
    for _ in range(100):
        G = random_graph(rng)
        f = fams[int(rng.integers(3))]
        x = rng.uniform(-2, 2, G.n)
        F = vector_field(G, f, x)
        h = 1e-5 * (1.0 + np.max(np.abs(x)))
        grad = np.zeros(G.n)
        for i in range(G.n):
            e = np.zeros(G.n)
            e[i] = h
            grad[i] = (energy(G, f, x + e) - energy(G, f, x - e)) / (2 * h)
        assert np.linalg.norm(F + grad) / (1.0 + np.linalg.norm(F)) < 1e-6


def test_translation_equivariance():
    rng = np.random.default_rng(35)
    for _ in range(20):
        G = random_graph(rng)
        x = rng.uniform(-2, 2, G.n)
        F = vector_field(G, SIN, x)
        for d in component_indicators(G):
            assert np.allclose(vector_field(G, SIN, x + 1.7 * d), F, atol=1e-12)


def test_newton_from_zero():
    G = complete_graph(4)
    p = newton_solve(G, SIN, np.zeros(4))
    assert p.residual == 0.0
    assert np.allclose(p.x, 0.0)


def test_newton_two_body_cubic():
    G = build_graph([(0, 1)])
    p = newton_solve(G, CUBIC, np.array([0.0, 0.9]))
    assert p.residual < 1e-10
    assert np.allclose(p.canonical, [-0.5, 0.5], atol=1e-9)


def test_newton_onto_circle_family():
    G = complete_graph(4)
    x0 = np.array([0.0, math.pi / 2, math.pi, 3 * math.pi / 2]) + 0.05
    p = newton_solve(G, SIN, x0)
    assert p.residual < 1e-10
    rep = membership_tests(G, SIN, p)
    assert rep.passed
    assert abs(float(p.y @ np.asarray(SIN(p.y)))) < 1e-9


def test_newton_rejects_bad_input():
    G = complete_graph(3)
    with pytest.raises(ValidationError):
        newton_solve(G, SIN, np.array([np.nan, 0.0, 0.0]))
    with pytest.raises(ValidationError):
        newton_solve(G, SIN, np.zeros(5))


def test_newton_no_convergence():
    G = build_graph([(0, 1)])
    with pytest.raises(NoConvergenceError):
        newton_solve(G, CUBIC, np.array([0.0, 0.9]), max_iter=1)


def test_multistart_tree_lands_on_zero_patterns():
    G = star_graph(4)
    atlas = multistart_atlas(G, SIN, n_starts=200, seed=11, box_radius=math.pi)
    assert atlas.points
    for p in atlas.points:
        ratio = p.y / math.pi
        assert np.max(np.abs(ratio - np.round(ratio))) < 1e-6


def test_multistart_deterministic_and_thread_independent():
    G = cycle_graph(3)
    a1 = multistart_atlas(G, CUBIC, n_starts=60, seed=5, box_radius=2.0)
    a2 = multistart_atlas(G, CUBIC, n_starts=60, seed=5, box_radius=2.0)
    a3 = multistart_atlas(G, CUBIC, n_starts=60, seed=5, box_radius=2.0, threads=4)
    for other in (a2, a3):
        assert len(other.points) == len(a1.points)
        for p, q in zip(a1.points, other.points):
            assert np.array_equal(p.x, q.x)


def test_zero_pattern_counts_and_residuals():
    pts = zero_pattern_equilibria(path_graph(3), SIN, math.pi)
    assert len(pts) == 4
    assert all(p.residual <= 1e-12 for p in pts)
    k3 = complete_graph(3)
    pts = zero_pattern_equilibria(k3, CUBIC, 1.0)
    assert len(pts) == 4
    assert all(p.residual <= 1e-12 for p in pts)


def test_zero_pattern_pairwise_distinct():
    for G, f, z in [(path_graph(3), SIN, math.pi), (cycle_graph(5), SIN, math.pi)]:
        pts = zero_pattern_equilibria(G, f, z)
        assert len(pts) == 2 ** (G.n - 1)
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                assert not points_equivalent(G, f, pts[i], pts[j])


def test_zero_pattern_not_a_root():
    increasing = make_polynomial([1.0, 1.0])  # x + x^3
    with pytest.raises(NotARootError):
        zero_pattern_equilibria(path_graph(3), increasing, 1.0)
    with pytest.raises(NotARootError):
        zero_pattern_equilibria(path_graph(3), SIN, 0.0)
    with pytest.raises(ValidationError):
        zero_pattern_equilibria(build_graph([(0, 1), (2, 3)]), SIN, math.pi)


def test_membership_zero_point():
    G = complete_graph(4)
    rep = membership_tests(G, SIN, equilibrium_point(G, SIN, np.zeros(4)))
    assert rep.skew_norm == 0.0
    assert rep.dist_f_from_cycle_space == 0.0
    assert rep.dist_y_from_cocycle_space == 0.0
    assert rep.passed


def test_membership_constructed_cycle_point():
    G = cycle_graph(3)
    p = equilibrium_point(G, CUBIC, np.array([0.0, 1.0, 0.0]))
    rep = membership_tests(G, CUBIC, p)
    assert rep.passed


def test_membership_random_non_equilibrium():
    rng = np.random.default_rng(41)
    G = complete_graph(4)
    for _ in range(20):
        x = rng.uniform(-2, 2, 4)
        p = equilibrium_point(G, SIN, x)
        if p.residual > 1e-3:  # genuinely away from the equilibrium set
            rep = membership_tests(G, SIN, p)
            assert not rep.passed


def test_predict_classes():
    G = complete_graph(3)
    cubic_pure = make_polynomial([0.0, 1.0])
    assert predict_equilibria_class(G, cubic_pure).kind == EquilibriaClass.ONLY_ZERO
    assert predict_equilibria_class(G, CUBIC).kind == EquilibriaClass.NO_CONCLUSION
    inc = make_polynomial([1.0, 1.0])
    rep = predict_equilibria_class(G, inc)
    assert rep.kind == EquilibriaClass.ONLY_ZERO
    assert rep.global_convergence
    assert predict_equilibria_class(G, SIN).kind == EquilibriaClass.NO_CONCLUSION
    with pytest.raises(ValidationError):
        predict_equilibria_class(build_graph([], n=2), SIN)


def test_winding_identification():
    G = complete_graph(4)
    T = 2 * math.pi
    x = np.array([0.0, 1.0, math.pi, math.pi + 1.0])
    x_wound = x + T * np.array([0.0, 1.0, 0.0, 1.0])
    p = equilibrium_point(G, SIN, x)
    q = equilibrium_point(G, SIN, x_wound)
    assert edge_space_distance(G, p.y, q.y, period=T) < 1e-9
    assert points_equivalent(G, SIN, p, q)
    # a half-period shift is not in the lattice
    r = equilibrium_point(G, SIN, x + math.pi * np.array([0.0, 1.0, 0.0, 1.0]))
    assert edge_space_distance(G, p.y, r.y, period=T) > 1.0
    k = winding_shift(G, q.y - p.y, T)
    assert k is not None
    assert np.allclose(k - k[0], [0, 1, 0, 1])


def test_canonical_form_zero_mean():
    rng = np.random.default_rng(55)
    for _ in range(10):
        G = random_graph(rng)
        x = rng.uniform(-3, 3, G.n)
        canon = canonical_form(G, x)
        D = component_indicators(G)
        assert np.max(np.abs(D @ canon)) < 1e-12


def test_accepted_points_pass_membership():
    rng = np.random.default_rng(60)
    for _ in range(10):
        G = random_connected_graph(rng, n_max=6)
        try:
            p = newton_solve(G, SIN, rng.uniform(-2, 2, G.n))
        except NoConvergenceError:
            continue
        assert membership_tests(G, SIN, p).passed
