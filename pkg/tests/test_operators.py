import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nodalmag import (
    DimensionMismatch,
    GammaZeroOrInfinite,
    RequestedEdgeNotSurplus,
    build_cut,
    build_gammahat,
    build_graph,
    build_magnetic,
    build_plain,
    cut_one,
    cycle_structure,
    decorated_operator,
    flux,
    perturbation_matrix,
    reduce_gauge,
)
from nodalmag.operators import phase_derivatives, wrap_phase

from conftest import graphs, graphs_with_cycles, seeded_graphs

phase = st.floats(-math.pi, math.pi)
gamma_value = st.one_of(st.floats(0.05, 20.0), st.floats(-20.0, -0.05))


def assert_exactly_hermitian(h):
    assert np.array_equal(h, h.conj().T)
    assert np.all(np.imag(np.diag(h)) == 0)


def triangle_circulant(alpha):
    return np.sort([-2.0 * math.cos((alpha + 2.0 * math.pi * k) / 3.0) for k in range(3)])


def test_plain_p2():
    g = build_graph(2, [(0, 1)], [0.0, 0.0])
    np.testing.assert_array_equal(build_plain(g), [[0.0, -1.0], [-1.0, 0.0]])


def test_plain_single_vertex():
    np.testing.assert_array_equal(build_plain(build_graph(1, [], [5.0])), [[5.0]])


def test_plain_triangle(triangle):
    expected = np.array([[0.1, -1.0, -1.0], [-1.0, 0.2, -1.0], [-1.0, -1.0, 0.3]])
    h = build_plain(triangle)
    assert h.dtype == np.float64
    np.testing.assert_array_equal(h, expected)


def test_magnetic_triangle_matrix(triangle):
    cs = cycle_structure(triangle, tree_edges=[(0, 1), (1, 2)])
    a = 0.7
    w = np.exp(1j * a)
    expected = np.array([
        [0.1, -1.0, -w],
        [-1.0, 0.2, -1.0],
        [-np.conj(w), -1.0, 0.3],
    ])
    np.testing.assert_allclose(build_magnetic(triangle, cs, [a]), expected, rtol=0, atol=1e-15)


def test_magnetic_zero_is_plain(triangle):
    cs = cycle_structure(triangle)
    h = build_magnetic(triangle, cs, [0.0])
    assert h.dtype == np.float64
    np.testing.assert_array_equal(h, build_plain(triangle))


def test_magnetic_pi_is_real_sign_flip(triangle):
    cs = cycle_structure(triangle)
    h = build_magnetic(triangle, cs, [math.pi])
    assert h.dtype == np.float64
    u, v = cs.surplus_edges[0]
    assert h[u, v] == h[v, u] == 1.0
    np.testing.assert_array_equal(h, build_gammahat(triangle, cs))


def test_magnetic_dimension_mismatch(triangle):
    cs = cycle_structure(triangle)
    with pytest.raises(DimensionMismatch):
        build_magnetic(triangle, cs, [0.1, 0.2])


@pytest.mark.parametrize("alpha", np.linspace(-math.pi, math.pi, 13))
def test_triangle_flux_spectrum(triangle0, alpha):
    cs = cycle_structure(triangle0)
    ev = np.linalg.eigvalsh(build_magnetic(triangle0, cs, [alpha]))
    np.testing.assert_allclose(ev, triangle_circulant(alpha), atol=1e-12)


def test_wrap_phase_range():
    x = np.array([-math.pi, math.pi, 3 * math.pi, -3 * math.pi, 0.0, 7.0])
    w = wrap_phase(x)
    assert np.all(w > -math.pi) and np.all(w <= math.pi)
    np.testing.assert_allclose(np.exp(1j * w), np.exp(1j * x), atol=1e-12)
    assert w[0] == math.pi


@given(graphs_with_cycles(), st.data())
def test_magnetic_hermitian_and_surplus_entries(g, data):
    cs = cycle_structure(g)
    alpha = np.array(data.draw(st.lists(phase, min_size=cs.betti, max_size=cs.betti)))
    h = build_magnetic(g, cs, alpha)
    assert_exactly_hermitian(h)
    for (u, v), a in zip(cs.surplus_edges, wrap_phase(alpha)):
        assert np.isclose(h[u, v], -np.exp(1j * a), atol=1e-15)
    for u, v in cs.tree_edges:
        assert h[u, v] == -1.0


@given(graphs_with_cycles(), st.data())
def test_magnetic_zero_pi_is_real(g, data):
    cs = cycle_structure(g)
    alpha = np.array(data.draw(st.lists(st.sampled_from([0.0, math.pi]), min_size=cs.betti, max_size=cs.betti)))
    h = build_magnetic(g, cs, alpha)
    assert h.dtype == np.float64
    assert np.array_equal(h, h.T)


def test_cut_triangle_by_hand(triangle):
    cs = cycle_structure(triangle, tree_edges=[(0, 1), (1, 2)])
    g0 = 1.7
    expected = np.array([
        [0.1 - g0, -1.0, 0.0],
        [-1.0, 0.2, -1.0],
        [0.0, -1.0, 0.3 - 1.0 / g0],
    ])
    np.testing.assert_allclose(build_cut(triangle, cs, [g0]), expected, atol=1e-15)


def test_cut_on_tree_is_plain():
    g = build_graph(4, [(0, 1), (1, 2), (1, 3)], [0.1, 0.2, 0.3, 0.4])
    cs = cycle_structure(g)
    np.testing.assert_array_equal(build_cut(g, cs, []), build_plain(g))


def test_cut_accumulates_on_shared_vertex():
    edges = [(u, v) for u in range(4) for v in range(u + 1, 4)]
    g = build_graph(4, edges)
    cs = cycle_structure(g)
    gam = np.array([2.0, -3.0, 0.5])
    h = build_cut(g, cs, gam)
    diag = np.zeros(4)
    for (u, v), c in zip(cs.surplus_edges, gam):
        diag[u] -= c
        diag[v] -= 1.0 / c
    np.testing.assert_allclose(np.diag(h), diag, atol=1e-15)


@pytest.mark.parametrize("bad", [0.0, math.inf, -math.inf, math.nan])
def test_cut_rejects_bad_gamma(triangle, bad):
    cs = cycle_structure(triangle)
    with pytest.raises(GammaZeroOrInfinite):
        build_cut(triangle, cs, [bad])
    with pytest.raises(GammaZeroOrInfinite):
        perturbation_matrix(triangle, cs, 0, bad)


def test_cut_at_gamma_tilde_keeps_eigenvector(triangle):
    cs = cycle_structure(triangle)
    w, v = np.linalg.eigh(build_plain(triangle))
    for n in range(3):
        f = v[:, n]
        gam = [f[b] / f[a] for a, b in cs.surplus_edges]
        h = build_cut(triangle, cs, gam)
        np.testing.assert_allclose(h @ f, w[n] * f, atol=1e-12)


def test_perturbation_unit():
    g3 = build_graph(3, [(0, 1), (1, 2), (0, 2)])
    cs3 = cycle_structure(g3)
    b = perturbation_matrix(g3, cs3, 0, 1.0, 0.0)
    u, v = cs3.surplus_edges[0]
    np.testing.assert_array_equal(b[np.ix_([u, v], [u, v])], [[1.0, -1.0], [-1.0, 1.0]])
    np.testing.assert_allclose(np.linalg.eigvalsh(b), [0.0, 0.0, 2.0], atol=1e-15)


def test_perturbation_negative_gamma(triangle0):
    cs = cycle_structure(triangle0)
    b = perturbation_matrix(triangle0, cs, 0, -2.0, 0.0)
    ev = np.linalg.eigvalsh(b)
    np.testing.assert_allclose(ev, [-2.5, 0.0, 0.0], atol=1e-15)


def test_perturbation_tree_edge_rejected(triangle0):
    cs = cycle_structure(triangle0)
    with pytest.raises(RequestedEdgeNotSurplus):
        perturbation_matrix(triangle0, cs, (0, 1), 1.0)


@given(graphs_with_cycles(), st.data())
def test_cut_plus_perturbations_is_magnetic(g, data):
    cs = cycle_structure(g)
    k = cs.betti
    alpha = np.array(data.draw(st.lists(phase, min_size=k, max_size=k)))
    gam = np.array(data.draw(st.lists(gamma_value, min_size=k, max_size=k)))
    mag = build_magnetic(g, cs, alpha).astype(complex)
    total = build_cut(g, cs, gam).astype(complex)
    for j in range(k):
        total = total + perturbation_matrix(g, cs, j, gam[j], alpha[j])
    np.testing.assert_allclose(total, mag, atol=1e-12, rtol=0)


@given(graphs_with_cycles(), st.data())
def test_cut_one_is_magnetic_minus_b(g, data):
    cs = cycle_structure(g)
    k = cs.betti
    alpha = np.array(data.draw(st.lists(phase, min_size=k, max_size=k)))
    j = data.draw(st.integers(0, k - 1))
    c = data.draw(gamma_value)
    lhs = cut_one(g, cs, j, c, alpha)
    rhs = build_magnetic(g, cs, alpha) - perturbation_matrix(g, cs, j, c, alpha[j])
    np.testing.assert_allclose(lhs, rhs, atol=1e-12, rtol=0)
    assert_exactly_hermitian(lhs)


@given(gamma_value, phase)
def test_perturbation_rank_one(c, a):
    g = build_graph(3, [(0, 1), (1, 2), (0, 2)])
    cs = cycle_structure(g)
    b = perturbation_matrix(g, cs, 0, c, a)
    assert_exactly_hermitian(b)
    s = np.linalg.svd(b, compute_uv=False)
    assert s[1] < 1e-12 * s[0]
    ev = np.linalg.eigvalsh(b)
    np.testing.assert_allclose(ev[np.argmax(np.abs(ev))], c + 1.0 / c, rtol=1e-12)


@given(graphs_with_cycles(), st.data())
def test_orientation_swap_inverts_gamma(g, data):
    # relabelling so that u and v swap roles maps gamma to 1/gamma
    cs = cycle_structure(g)
    c = data.draw(gamma_value)
    j = data.draw(st.integers(0, cs.betti - 1))
    u, v = cs.surplus_edges[j]
    h = cut_one(g, cs, j, c)
    swap = np.arange(g.n_vertices)
    swap[u], swap[v] = v, u
    edges = [(swap[a], swap[b]) for a, b in g.edges]
    g2 = build_graph(g.n_vertices, edges, g.potential[swap])
    cs2 = cycle_structure(g2, tree_edges=[(swap[a], swap[b]) for a, b in cs.tree_edges])
    h2 = cut_one(g2, cs2, (u, v), 1.0 / c)
    np.testing.assert_allclose(np.linalg.eigvalsh(h), np.linalg.eigvalsh(h2), atol=1e-10)


def test_flux_zero(triangle0):
    cs = cycle_structure(triangle0)
    assert flux(cs, {e: 0.0 for e in triangle0.edges}, 0) == 0.0


def test_flux_single_edge_sign(triangle0):
    cs = cycle_structure(triangle0, tree_edges=[(0, 1), (1, 2)])
    # basis cycle 2 -> 0 -> 1 -> 2 traverses (0, 1) forwards
    assert cs.cycle_basis[0] == ((2, 0), (0, 1), (1, 2))
    a = 0.4
    assert math.isclose(flux(cs, {(0, 1): a, (1, 2): 0.0, (0, 2): 0.0}, 0), a)


def test_flux_wraps(triangle0):
    cs = cycle_structure(triangle0, tree_edges=[(0, 1), (1, 2)])
    f = flux(cs, {(0, 1): math.pi, (1, 2): math.pi, (0, 2): 0.0}, 0)
    assert abs(f) < 1e-12


def test_reduce_gauge_pure_gradient_is_trivial():
    g = build_graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)], [0.3, -0.2, 0.5, 0.1])
    cs = cycle_structure(g)
    theta = np.array([0.4, -1.3, 2.2, 0.9])
    phases = {(u, v): theta[v] - theta[u] for u, v in g.edges}
    np.testing.assert_allclose(reduce_gauge(g, cs, phases), 0.0, atol=1e-12)
    np.testing.assert_allclose(
        np.linalg.eigvalsh(decorated_operator(g, phases)),
        np.linalg.eigvalsh(build_plain(g)),
        atol=1e-12,
    )


def test_reduce_gauge_tree_phases_carry_flux():
    # tree-edge phases are not removable on their own: they sum along the cycle
    g = build_graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)], [0.3, -0.2, 0.5, 0.1])
    cs = cycle_structure(g)
    rng = np.random.default_rng(0)
    phases = {e: float(rng.uniform(-1, 1)) for e in cs.tree_edges}
    expected = sum(
        phases[(min(a, b), max(a, b))] * (1 if a < b else -1)
        for a, b in cs.cycle_basis[0]
        if (min(a, b), max(a, b)) in phases
    )
    alpha = reduce_gauge(g, cs, phases)
    assert math.isclose(alpha[0], wrap_phase(expected), abs_tol=1e-12)
    np.testing.assert_allclose(
        np.linalg.eigvalsh(decorated_operator(g, phases)),
        np.linalg.eigvalsh(build_magnetic(g, cs, alpha)),
        atol=1e-12,
    )


def test_reduce_gauge_single_surplus(triangle0):
    cs = cycle_structure(triangle0)
    (u, v), = cs.surplus_edges
    alpha = reduce_gauge(triangle0, cs, {(u, v): 0.9})
    assert math.isclose(abs(alpha[0]), 0.9)


def test_gauge_invariance_seeded():
    rng = np.random.default_rng(3)
    for g in seeded_graphs(21, 40):
        cs = cycle_structure(g)
        phases = {e: float(rng.uniform(-math.pi, math.pi)) for e in g.edges}
        full = np.linalg.eigvalsh(decorated_operator(g, phases))
        reduced = np.linalg.eigvalsh(build_magnetic(g, cs, reduce_gauge(g, cs, phases)))
        np.testing.assert_allclose(full, reduced, atol=1e-9)


def test_gauge_diagonal_unitary_equivalence():
    # a pure gradient A[u, v] = theta_v - theta_u is removed by diag(e^{i theta})
    g = build_graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)], [0.1, 0.4, -0.3, 0.2, 0.0])
    theta = np.array([0.0, 0.3, -1.1, 2.0, 0.7])
    phases = {(u, v): theta[v] - theta[u] for u, v in g.edges}
    h = decorated_operator(g, phases)
    d = np.diag(np.exp(1j * theta))
    np.testing.assert_allclose(d.conj().T @ h @ d, build_plain(g), atol=1e-12)


def test_phase_derivatives_match_fd(triangle):
    cs = cycle_structure(triangle)
    d1, d2 = phase_derivatives(triangle, cs)
    t = 1e-6
    fd1 = (build_magnetic(triangle, cs, [t]) - build_magnetic(triangle, cs, [-t])) / (2 * t)
    np.testing.assert_allclose(d1[0], fd1, atol=1e-8)
    s = 1e-4
    fd2 = (build_magnetic(triangle, cs, [s]) - 2 * build_plain(triangle) + build_magnetic(triangle, cs, [-s])) / s**2
    np.testing.assert_allclose(d2[0], np.real(fd2), atol=1e-6)


@given(graphs())
def test_plain_symmetric_real(g):
    h = build_plain(g)
    assert h.dtype == np.float64
    assert np.array_equal(h, h.T)
    np.testing.assert_array_equal(np.diag(h), g.potential)
    assert np.count_nonzero(np.triu(h, 1)) == g.n_edges
