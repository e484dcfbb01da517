import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import linalg as sla

from conftest import random_hermitian
from qle.errors import DimensionTooSmallError, NotHermitianError, NotSquareError
from qle.network import (
    TOL_GAUGE,
    TOL_UNIT,
    decompose_reservoir,
    gauge_residual,
    solve_gauge,
    validate_coupling,
)


# -- validate_coupling

def test_identity_is_valid_and_unchanged():
    g = validate_coupling(np.eye(2))
    np.testing.assert_array_equal(g.entries, np.eye(2))
    assert g.dim == 2 and g.resonator_index == 0


def test_pauli_y_is_hermitian():
    g = validate_coupling([[0, 1j], [-1j, 0]])
    np.testing.assert_array_equal(g.entries, [[0, 1j], [-1j, 0]])


def test_symmetric_imaginary_is_rejected():
    with pytest.raises(NotHermitianError) as info:
        validate_coupling([[0, 1j], [1j, 0]])
    assert info.value.max_asymmetry == pytest.approx(2.0)


def test_not_square():
    with pytest.raises(NotSquareError):
        validate_coupling(np.zeros((2, 3)))
    with pytest.raises(NotSquareError):
        validate_coupling(np.zeros((0, 0)))


def test_tiny_asymmetry_is_symmetrized():
    raw = np.array([[1.0, 2.0 + 1e-13], [2.0, 3.0]])
    g = validate_coupling(raw)
    np.testing.assert_array_equal(g.entries, g.entries.conj().T)
    assert g.entries[0, 1] == pytest.approx(2.0 + 5e-14, abs=1e-15)


def test_entries_are_read_only():
    g = validate_coupling(np.eye(2))
    with pytest.raises(ValueError):
        g.entries[0, 0] = 5


# -- decompose_reservoir

def test_two_mode_decomposition():
    g = validate_coupling([[1.5, 0.3], [0.3, -0.7]])
    dec = decompose_reservoir(g)
    assert dec.detuning == 1.5
    np.testing.assert_allclose(dec.reservoir_frequencies, [-0.7])
    np.testing.assert_allclose(np.abs(dec.transform), [[1.0]])
    np.testing.assert_allclose(np.abs(dec.eta), [0.3])
    # the eigenvector phase is arbitrary; eta carries the matching phase
    np.testing.assert_allclose(dec.eta * dec.transform[0, 0], [0.3])


def test_exchange_reservoir_frequencies():
    g = validate_coupling([[0, 1, 0], [1, 0, 1], [0, 1, 0]])
    dec = decompose_reservoir(g)
    np.testing.assert_allclose(dec.reservoir_frequencies, [-1.0, 1.0], atol=1e-14)


def test_dimension_too_small():
    with pytest.raises(DimensionTooSmallError):
        decompose_reservoir(validate_coupling([[1.0]]))


def _check_decomposition(g, dec):
    v = dec.transform
    n = g.dim - 1
    np.testing.assert_allclose(v @ v.conj().T, np.eye(n), atol=TOL_UNIT)
    diag = v @ g.reservoir_block @ v.conj().T
    np.testing.assert_allclose(diag, np.diag(dec.reservoir_frequencies), atol=TOL_UNIT)
    np.testing.assert_allclose(dec.eta, g.coupling_row @ v.conj().T, atol=TOL_UNIT)
    assert np.all(np.diff(dec.reservoir_frequencies) >= 0)


def test_random_hermitian_6x6_against_shuffled_general_solver(rng):
    h = random_hermitian(rng, 6)
    g = validate_coupling(h)
    dec = decompose_reservoir(g)
    _check_decomposition(g, dec)
    assert np.sum(np.abs(dec.eta) ** 2) == pytest.approx(np.sum(np.abs(h[0, 1:]) ** 2), abs=1e-10)

    # oracle: shuffle the reservoir labels and use the general (non-Hermitian) solver
    perm = 1 + rng.permutation(5)
    block = h[np.ix_(perm, perm)]
    w, vecs = sla.eig(block)
    order = np.argsort(w.real)
    w, vecs = w.real[order], vecs[:, order]
    vecs /= np.linalg.norm(vecs, axis=0)
    eta_sq_oracle = np.abs(h[0, perm] @ vecs) ** 2
    np.testing.assert_allclose(dec.reservoir_frequencies, w, atol=1e-10)
    np.testing.assert_allclose(np.abs(dec.eta) ** 2, eta_sq_oracle, atol=1e-10)


hermitian_matrices = st.integers(2, 7).flatmap(
    lambda n: st.lists(
        st.floats(-5, 5, allow_nan=False), min_size=2 * n * n, max_size=2 * n * n
    ).map(lambda xs, n=n: _hermitian_from(xs, n))
)


def _hermitian_from(xs, n):
    a = np.array(xs[: n * n]).reshape(n, n) + 1j * np.array(xs[n * n :]).reshape(n, n)
    return a + a.conj().T


@given(hermitian_matrices)
def test_decomposition_invariants(h):
    g = validate_coupling(h)
    dec = decompose_reservoir(g)
    scale = max(1.0, float(np.max(np.abs(h))))
    np.testing.assert_allclose(dec.reconstruct_reservoir(), g.reservoir_block, atol=TOL_UNIT * scale)
    assert np.sum(dec.reservoir_frequencies) == pytest.approx(
        np.trace(g.reservoir_block).real, abs=TOL_UNIT * scale
    )
    assert np.sum(np.abs(dec.eta) ** 2) == pytest.approx(
        np.sum(np.abs(g.coupling_row) ** 2), abs=TOL_UNIT * scale**2
    )
    # the transformed coupling matrix has the same spectrum as G
    np.testing.assert_allclose(
        np.linalg.eigvalsh(dec.hamiltonian_matrix()), np.linalg.eigvalsh(g.entries), atol=TOL_UNIT * scale
    )


def test_degenerate_reservoir_accepted():
    g = validate_coupling([[0, 1, 1j, 0], [1, 2, 0, 0], [-1j, 0, 2, 0], [0, 0, 0, 2]])
    dec = decompose_reservoir(g)
    _check_decomposition(g, dec)
    np.testing.assert_allclose(dec.reservoir_frequencies, [2, 2, 2])


# -- solve_gauge

def test_real_symmetric_gauge_is_trivial(rng):
    g = validate_coupling(random_hermitian(rng, 5, real=True))
    sol = solve_gauge(g)
    assert sol.exists
    np.testing.assert_allclose(sol.phases, 0.0, atol=1e-15)


def test_cyclic_imaginary_ring_breaks_symmetry():
    ring = np.array([[0, 1j, -1j], [-1j, 0, 1j], [1j, -1j, 0]])
    sol = solve_gauge(validate_coupling(ring))
    assert not sol.exists
    assert sol.phases is None
    assert sol.worst_cycle_defect == pytest.approx(np.pi, abs=1e-12)


def test_single_edge_gauge():
    z = np.exp(1j * np.pi / 3)
    g = validate_coupling([[0, z], [np.conj(z), 0]])
    sol = solve_gauge(g)
    assert sol.exists
    np.testing.assert_allclose(sol.phases, [0.0, 4 * np.pi / 3], atol=1e-12)
    assert gauge_residual(g, sol.phases) < 1e-12


def test_all_diagonal():
    sol = solve_gauge(validate_coupling(np.diag([1.0, 2.0, 3.0])))
    assert sol.exists and sol.worst_cycle_defect == 0.0
    np.testing.assert_array_equal(sol.phases, 0.0)


def test_disconnected_components_each_rooted_at_zero():
    ring = np.array([[0, 1j, -1j], [-1j, 0, 1j], [1j, -1j, 0]])
    g = np.zeros((5, 5), dtype=complex)
    g[3, 4] = np.exp(0.4j)
    g[4, 3] = np.exp(-0.4j)
    g[:3, :3] = ring
    assert not solve_gauge(validate_coupling(g)).exists
    g[:3, :3] = np.abs(ring)
    sol = solve_gauge(validate_coupling(g))
    assert sol.exists
    assert sol.phases[3] == 0.0 and sol.phases[0] == 0.0
    assert sol.phases[4] == pytest.approx(2 * np.pi - 0.8)


def cycle_product_oracle(h, tol=1e-8):
    """Gauge exists iff the product of couplings around every cycle is real."""
    n = h.shape[0]
    graph = nx.Graph()
    graph.add_nodes_from(range(n))
    cut = 1e-12 * np.max(np.abs(h))
    graph.add_edges_from((j, k) for j in range(n) for k in range(j + 1, n) if abs(h[j, k]) > cut)
    for cycle in nx.cycle_basis(graph):
        prod = 1.0 + 0j
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            prod *= h[a, b] / abs(h[a, b])
        if abs(prod.imag) > tol:
            return False
    return True


@st.composite
def sparse_couplings(draw):
    n = draw(st.integers(1, 6))
    seed = draw(st.integers(0, 2**32 - 1))
    kind = draw(st.sampled_from(["real_gauged", "complex", "tree"]))
    r = np.random.default_rng(seed)
    mask = np.triu(r.random((n, n)) < 0.6, 1)
    if kind == "tree":
        mask = np.zeros((n, n), bool)
        for k in range(1, n):
            mask[r.integers(0, k), k] = True
    vals = r.normal(size=(n, n))
    if kind == "complex":
        vals = vals * np.exp(1j * r.uniform(0, 2 * np.pi, size=(n, n)))
    upper = np.where(mask, vals, 0)
    h = upper + upper.conj().T + np.diag(r.normal(size=n))
    if kind == "real_gauged":
        w = np.exp(1j * r.uniform(0, 2 * np.pi, n) / 2)
        h = np.diag(w) @ h @ np.diag(w.conj())
    return h, kind


@settings(max_examples=300)
@given(sparse_couplings())
def test_gauge_verdict_matches_cycle_products(case):
    h, kind = case
    g = validate_coupling(h)
    sol = solve_gauge(g)
    assert sol.exists == cycle_product_oracle(g.entries)
    if kind in ("real_gauged", "tree"):
        assert sol.exists
    if sol.exists:
        assert gauge_residual(g, sol.phases) <= TOL_GAUGE
        assert np.all((sol.phases >= 0) & (sol.phases < 2 * np.pi))
    else:
        assert sol.worst_cycle_defect > TOL_GAUGE


@settings(max_examples=200)
@given(sparse_couplings(), st.integers(0, 2**32 - 1))
def test_gauge_verdict_invariant_under_phase_gauge_and_relabeling(case, seed):
    h, _ = case
    n = h.shape[0]
    r = np.random.default_rng(seed)
    base = solve_gauge(validate_coupling(h)).exists
    w = np.diag(np.exp(1j * r.uniform(0, 2 * np.pi, n)))
    assert solve_gauge(validate_coupling(w @ h @ w.conj().T)).exists == base
    perm = np.concatenate([[0], 1 + r.permutation(n - 1)])
    assert solve_gauge(validate_coupling(h[np.ix_(perm, perm)])).exists == base


@given(hermitian_matrices)
def test_real_matrices_always_admit_a_gauge(h):
    sol = solve_gauge(validate_coupling(h.real))
    assert sol.exists
