import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qudit_hdrg.history import ChangesHistory, Defect, project_correction, syndrome_changes
from qudit_hdrg.lattice import CodeGeometry, compute_syndrome


def test_trivial_syndromes():
    assert len(syndrome_changes(np.zeros((4, 4, 3), dtype=int), 5)) == 0


def test_static_error_only_in_first_layer():
    g, d = CodeGeometry(5), 5
    e = np.zeros(g.n_edges, dtype=np.int64)
    e[g.h(2, 2)] = 4
    s = np.repeat(compute_syndrome(e, g, d)[None], 5, axis=0)
    changes = syndrome_changes(s, d)
    assert {t for t, _, _ in changes.charges} == {1}
    assert len(changes) == 2


@pytest.mark.parametrize("t", [1, 3, 5])
def test_single_measurement_error(t):
    T, L, d, k = 5, 4, 7, 2
    s = np.zeros((T, L, L - 1), dtype=np.int64)
    s[t - 1, 1, 2] = k
    changes = syndrome_changes(s, d)
    expect = {(t, 2, 3): k}
    if t < T:
        expect[(t + 1, 2, 3)] = d - k
    assert changes.charges == expect


@pytest.mark.parametrize("shape", [(3, 4), (2, 4, 4), (1, 2, 3, 4)])
def test_dimension_errors(shape):
    with pytest.raises(ValueError):
        syndrome_changes(np.zeros(shape, dtype=int), 3)


@settings(max_examples=50, deadline=None)
@given(T=st.integers(1, 6), L=st.integers(2, 6), d=st.integers(2, 40), seed=st.integers(0, 10**6))
def test_round_trip(T, L, d, seed):
    s = np.random.default_rng(seed).integers(0, d, size=(T, L, L - 1))
    changes = syndrome_changes(s, d)
    assert np.array_equal(np.mod(np.cumsum(changes.to_array(), axis=0), d), s)
    assert all(1 <= c < d for c in changes.charges.values())
    assert ChangesHistory.from_json(changes.to_json()) == changes


def test_defect_order_and_json():
    changes = ChangesHistory(3, 3, 5, {(2, 1, 1): 4, (1, 3, 2): 1, (1, 1, 2): 2})
    assert changes.defects() == [Defect(1, 1, 2, 2), Defect(1, 3, 2, 1), Defect(2, 1, 1, 4)]
    assert changes.total_charge() == 2
    assert '"defects": [[1, 1, 2, 2], [1, 3, 2, 1], [2, 1, 1, 4]]' in changes.to_json()


def test_projection_examples():
    d, k = 5, 3
    assert not project_correction(np.zeros((4, 13), dtype=int), d).any()
    F = np.zeros((2, 13), dtype=np.int64)
    F[0, 6], F[1, 6] = k, d - k
    assert not project_correction(F, d).any()


@settings(max_examples=40, deadline=None)
@given(d=st.integers(2, 30), seed=st.integers(0, 10**6))
def test_projection_is_a_homomorphism(d, seed):
    rng = np.random.default_rng(seed)
    F1, F2 = rng.integers(0, d, size=(3, 13)), rng.integers(0, d, size=(2, 13))
    joint = project_correction(np.concatenate([F1, F2]), d)
    assert np.array_equal(joint, (project_correction(F1, d) + project_correction(F2, d)) % d)
