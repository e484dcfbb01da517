import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_passive
from qle.errors import NotPassiveError, SingularClosureError
from qle.scattering import (
    TOL_S,
    ScatteringMatrix,
    circulator,
    classify,
    close_port,
    dilate_to_unitary,
    dilation_rank,
    isolator,
    psd_sqrt,
    transmission_asymmetry,
    two_port_closure_check,
    unitarity_error,
)

CIRCULATOR = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]])


def test_circulator_helper_matches_permutation():
    np.testing.assert_array_equal(circulator().entries, CIRCULATOR)


def test_classify_circulator():
    c = classify(CIRCULATOR)
    assert (c.unitary, c.reciprocal, c.passive) == (True, False, True)
    assert c.csv_line() == "true,false,true"


def test_classify_identity():
    c = classify(np.eye(4))
    assert c.unitary and c.reciprocal and c.passive


def test_classify_isolator():
    s = isolator()
    c = classify(s)
    assert (c.unitary, c.reciprocal, c.passive) == (False, False, True)
    np.testing.assert_allclose(s.singular_values(), [1, 0])


def test_classify_amplifier_is_not_passive():
    assert not classify([[1.01]]).passive


def test_flags_derived_from_entries():
    s = ScatteringMatrix(CIRCULATOR)
    assert s.unitary and not s.reciprocal and s.passive
    with pytest.raises(ValueError):
        s.entries[0, 0] = 1


def test_psd_sqrt():
    h = np.array([[2.0, 1j], [-1j, 2.0]])
    r = psd_sqrt(h)
    np.testing.assert_allclose(r @ r, h, atol=1e-14)
    np.testing.assert_allclose(psd_sqrt(np.diag([1.0, -1e-12])), np.diag([1.0, 0.0]))
    with pytest.raises(NotPassiveError):
        psd_sqrt(np.diag([1.0, -1e-3]))


def test_dilate_isolator():
    big = dilate_to_unitary(isolator())
    assert big.dim == 3
    np.testing.assert_array_equal(big.entries[:2, :2], [[0, 0], [1, 0]])
    assert unitarity_error(big) <= 1e-12
    # the completion is a circulator up to port phases
    np.testing.assert_allclose(np.abs(big.entries), CIRCULATOR, atol=1e-12)


def test_dilate_unitary_returns_input():
    u = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    big = dilate_to_unitary(u)
    np.testing.assert_array_equal(big.entries, u)


def test_dilate_attenuator():
    big = dilate_to_unitary([[0.5]])
    assert big.dim == 2
    np.testing.assert_allclose(np.abs(big.entries), [[0.5, np.sqrt(3) / 2], [np.sqrt(3) / 2, 0.5]], atol=1e-14)
    assert unitarity_error(big) < 1e-14


def test_dilate_rejects_gain():
    with pytest.raises(NotPassiveError):
        dilate_to_unitary([[0, 0], [1.2, 0]])


@st.composite
def passive_matrices(draw):
    n = draw(st.integers(1, 6))
    n_lossless = draw(st.integers(0, n))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_passive(np.random.default_rng(seed), n, n_lossless)


@settings(max_examples=300, deadline=None)
@given(passive_matrices())
def test_dilation_properties(case):
    s, sv = case
    big = dilate_to_unitary(s)
    n = s.shape[0]
    assert classify(big).unitary
    np.testing.assert_allclose(big.entries[:n, :n], s, rtol=0, atol=10 * TOL_S)
    # minimal: one extra port per lossy singular direction
    assert big.dim - n == dilation_rank(s) == int(np.sum(sv < 1 - 1e-7))


def test_closure_circulator_port_three():
    red = two_port_closure_check(CIRCULATOR, closed_port=2, mirror_phase=0.0)
    np.testing.assert_allclose(np.abs(red.entries), [[0, 1], [1, 0]], atol=1e-15)


def test_closure_reciprocal_beamsplitter_stays_reciprocal():
    n = 3
    dft = np.exp(-2j * np.pi * np.outer(np.arange(n), np.arange(n)) / n) / np.sqrt(n)
    assert classify(dft).reciprocal and classify(dft).unitary
    for port in range(3):
        for phase in (0.0, 0.3, 2.0):
            red = close_port(dft, port, phase)
            assert classify(red).reciprocal
            assert classify(red).unitary


@pytest.mark.parametrize("phase", np.linspace(0, 2 * np.pi, 64, endpoint=False))
def test_closure_phase_sweep(phase):
    red = two_port_closure_check(CIRCULATOR, 2, phase)
    assert transmission_asymmetry(red) <= TOL_S


@settings(max_examples=200)
@given(st.integers(0, 2**32 - 1), st.integers(0, 2), st.floats(0, 2 * np.pi))
def test_closure_of_random_unitary_equalizes_magnitudes(seed, port, phase):
    r = np.random.default_rng(seed)
    u, _ = np.linalg.qr(r.normal(size=(3, 3)) + 1j * r.normal(size=(3, 3)))
    try:
        red = close_port(u, port, phase)
    except SingularClosureError:
        return
    if abs(1 - u[port, port] * np.exp(1j * phase)) < 1e-6:
        return  # near-resonant closure amplifies rounding
    assert transmission_asymmetry(red) <= TOL_S
    assert unitarity_error(red) <= 1e-8


def test_singular_closure():
    s = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=complex)
    with pytest.raises(SingularClosureError):
        close_port(s, 2, 0.0)
    # any other mirror phase is fine
    close_port(s, 2, 0.5)
