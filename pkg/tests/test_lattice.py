import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qudit_hdrg.lattice import (NORTH, SOUTH, CodeGeometry, InvalidDistanceError, build_geometry,
                                compute_syndrome, is_stabilizer, logical_class, transport_correction)


def naive_syndrome(e, g, d):
    """Per-plaquette loop straight from the orientation rule (bottom/left +, top/right -)."""
    L = g.L
    s = np.zeros((L, L - 1), dtype=np.int64)
    for x in range(1, L + 1):
        for y in range(1, L):
            total = e[g.v(x, y)] - e[g.v(x, y + 1)]
            if x > 1:
                total += e[g.h(x - 1, y)]
            if x < L:
                total -= e[g.h(x, y)]
            s[x - 1, y - 1] = total % d
    return s


def random_layer(g, d, rng):
    return rng.integers(0, d, size=g.n_edges)


@pytest.mark.parametrize("L,edges,plaquettes", [(2, 5, 2), (3, 13, 6), (5, 41, 20)])
def test_counts(L, edges, plaquettes):
    g = build_geometry(L)
    assert g.n_edges == edges == len(g.edges)
    assert g.n_plaquettes == plaquettes == len(g.plaquettes())


@pytest.mark.parametrize("L", [1, 0, -3])
def test_rejects_small_distance(L):
    with pytest.raises(InvalidDistanceError):
        CodeGeometry(L)


@pytest.mark.parametrize("L", [2, 3, 6])
def test_plaquette_edge_counts(L):
    g = CodeGeometry(L)
    for x, y in g.plaquettes():
        n = len(g.plaquette_edges(x, y))
        assert n == (3 if x in (1, L) else 4)


@pytest.mark.parametrize("L,d", [(2, 2), (3, 5), (4, 3), (7, 7919)])
def test_syndrome_matches_loop_and_incidence(L, d):
    g = CodeGeometry(L)
    rng = np.random.default_rng(L * d)
    for _ in range(20):
        e = random_layer(g, d, rng)
        s = compute_syndrome(e, g, d)
        assert np.array_equal(s, naive_syndrome(e, g, d))
        assert np.array_equal(s.ravel(), (g.incidence @ e) % d)


def test_syndrome_batched_over_layers():
    g = CodeGeometry(4)
    rng = np.random.default_rng(1)
    stack = rng.integers(0, 5, size=(3, 2, g.n_edges))
    out = compute_syndrome(stack, g, 5)
    assert out.shape == (3, 2, 4, 3)
    assert np.array_equal(out[2, 1], compute_syndrome(stack[2, 1], g, 5))


def test_syndrome_rejects_wrong_length():
    with pytest.raises(ValueError):
        compute_syndrome(np.zeros(7), CodeGeometry(3), 2)


@settings(max_examples=60, deadline=None)
@given(L=st.integers(2, 6), d=st.integers(2, 50), seed=st.integers(0, 2**32 - 1))
def test_syndrome_linearity(L, d, seed):
    g = CodeGeometry(L)
    rng = np.random.default_rng(seed)
    e1, e2 = random_layer(g, d, rng), random_layer(g, d, rng)
    lhs = compute_syndrome((e1 + e2) % d, g, d)
    rhs = (compute_syndrome(e1, g, d) + compute_syndrome(e2, g, d)) % d
    assert np.array_equal(lhs, rhs)


@pytest.mark.parametrize("L,d", [(3, 2), (4, 5), (5, 7919)])
def test_single_edge_defect_rule(L, d):
    g = CodeGeometry(L)
    for edge, (kind, x, y) in enumerate(g.edges):
        for k in (1, d - 1):
            e = np.zeros(g.n_edges, dtype=np.int64)
            e[edge] = k
            s = compute_syndrome(e, g, d)
            hot = sorted(s[s != 0].tolist())
            if kind == "v" and y in (1, L):
                # smooth boundary: one defect, +k from the south row, -k from the north row
                assert hot == [k if y == 1 else (-k) % d]
            else:
                assert hot == sorted([k, (-k) % d])
            # X^k then X^(d-k) cancels
            inverse = np.zeros_like(e)
            inverse[edge] = d - k
            assert not np.mod(s + compute_syndrome(inverse, g, d), d).any()


def test_bulk_edge_pair_signs():
    g, d, k = CodeGeometry(5), 7, 3
    e = np.zeros(g.n_edges, dtype=np.int64)
    e[g.v(2, 3)] = k
    s = compute_syndrome(e, g, d)
    assert s[1, 2] == k and s[1, 1] == d - k  # P(2,3) gets +k, P(2,2) gets -k
    assert np.count_nonzero(s) == 2


def _vertex_stack(g):
    return np.array([g.vertex_operator(x, y) for x, y in g.vertices()])


@pytest.mark.parametrize("d", [2, 3, 5])
def test_vertex_products_exhaustive_L2(d):
    g = CodeGeometry(2)
    ops = _vertex_stack(g)
    for coeffs in itertools.product(range(d), repeat=len(ops)):
        e = np.mod(np.array(coeffs) @ ops, d)
        assert not compute_syndrome(e, g, d).any()
        assert logical_class(e, g, d) == 0
        assert is_stabilizer(e, g, d)


@pytest.mark.parametrize("L,d", [(3, 5), (4, 3), (4, 7919), (3, 2)])
def test_vertex_products_random(L, d):
    g = CodeGeometry(L)
    ops = _vertex_stack(g)
    rng = np.random.default_rng(L + d)
    for _ in range(200):
        e = np.mod(rng.integers(0, d, size=len(ops)) @ ops, d)
        assert not compute_syndrome(e, g, d).any()
        for row in range(1, L + 1):
            assert logical_class(e, g, d, cut_row=row) == 0


def test_each_vertex_generator_is_trivial_L3():
    g = CodeGeometry(3)
    for x, y in g.vertices():
        op = np.mod(g.vertex_operator(x, y), 5)
        assert is_stabilizer(op, g, 5)


@pytest.mark.parametrize("k", [1, 2, 4])
def test_logical_string(k):
    g, d = CodeGeometry(4), 5
    for col in range(1, 5):
        op = g.logical_x(k, col)
        assert not compute_syndrome(op, g, d).any()
        assert logical_class(op, g, d) == k
        assert not is_stabilizer(op, g, d)


def test_logical_class_cut_row_invariant():
    g, d = CodeGeometry(5), 7
    ops = _vertex_stack(g)
    rng = np.random.default_rng(3)
    for _ in range(50):
        k = int(rng.integers(0, d))
        e = np.mod(rng.integers(0, d, size=len(ops)) @ ops + g.logical_x(k, int(rng.integers(1, 6))), d)
        assert {logical_class(e, g, d, r) for r in range(1, 6)} == {k}


def test_zero_layer():
    g = CodeGeometry(3)
    z = np.zeros(g.n_edges, dtype=np.int64)
    assert logical_class(z, g, 3) == 0 and is_stabilizer(z, g, 3)


def _delta(g, d, op):
    return compute_syndrome(op, g, d)


def test_transport_zero_charge():
    g = CodeGeometry(4)
    assert not transport_correction((1, 1), (3, 2), 0, g, 5).any()


def test_transport_one_step_north():
    g, d, a = CodeGeometry(5), 5, 2
    op = transport_correction((2, 2), (2, 3), a, g, d)
    assert np.flatnonzero(op).tolist() == [g.v(2, 3)]
    s = _delta(g, d, op)
    assert s[1, 1] == (-a) % d and s[1, 2] == a and np.count_nonzero(s) == 2


@pytest.mark.parametrize("boundary,y", [(SOUTH, 1), (NORTH, 4), (SOUTH, 3), (NORTH, 2)])
def test_transport_to_boundary(boundary, y):
    g, d, a = CodeGeometry(5), 7, 3
    op = transport_correction((3, y), boundary, a, g, d)
    s = _delta(g, d, op)
    assert s[2, y - 1] == (-a) % d and np.count_nonzero(s) == 1
    steps = y if boundary == SOUTH else g.L - y
    assert np.count_nonzero(op) == steps


def test_transport_removes_defect():
    g, d = CodeGeometry(4), 5
    e = np.zeros(g.n_edges, dtype=np.int64)
    e[g.v(2, 1)] = 3  # single defect at P(2,1)
    s = compute_syndrome(e, g, d)
    a = int(s[1, 0])
    fixed = np.mod(e + transport_correction((2, 1), SOUTH, a, g, d), d)
    assert is_stabilizer(fixed, g, d)


@settings(max_examples=80, deadline=None)
@given(L=st.integers(2, 7), d=st.integers(2, 30), data=st.data())
def test_transport_effect_and_composition(L, d, data):
    g = CodeGeometry(L)
    site = st.tuples(st.integers(1, L), st.integers(1, L - 1))
    A, B, C = data.draw(site), data.draw(site), data.draw(site)
    a = data.draw(st.integers(0, d - 1))
    ab = transport_correction(A, B, a, g, d)
    if A != B:
        expect = np.zeros((L, L - 1), dtype=np.int64)
        expect[A[0] - 1, A[1] - 1] -= a
        expect[B[0] - 1, B[1] - 1] += a
        assert np.array_equal(_delta(g, d, ab), expect % d)
        assert np.count_nonzero(ab) == (abs(A[0] - B[0]) + abs(A[1] - B[1]) if a else 0)
    two = np.mod(ab + transport_correction(B, C, a, g, d), d)
    direct = transport_correction(A, C, a, g, d)
    assert np.array_equal(_delta(g, d, two), _delta(g, d, direct))
    # same endpoints: the two routes differ by a stabilizer
    assert is_stabilizer(np.mod(two - direct, d), g, d)
