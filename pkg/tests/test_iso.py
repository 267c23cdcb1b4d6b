import numpy as np
import pytest

from cpforge.errors import ParamOutOfRange, UnsupportedK
from cpforge.iso import (
    GELLMANN,
    GELLMANN_SCALED,
    GellMannString,
    PauliString,
    ebit_merge_unitary,
    ebit_product_state,
    gellmann_form,
    is_permutation_matrix,
    max_entangled_projector,
    max_entangled_vector,
    pauli_form,
    swap,
)
from cpforge.matrix_core import PAULI, eigvalsh

I2, X, Y, Z = PAULI


def direct_projector(d):
    """``sum_ij |ii><jj|`` assembled entry by entry."""
    out = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            out[i * d + i, j * d + j] = 1
    return out


def test_single_qubit_pauli_form():
    expected = 0.5 * (np.kron(I2, I2) + np.kron(X, X) - np.kron(Y, Y) + np.kron(Z, Z))
    assert np.allclose(pauli_form(1), expected, atol=1e-15)
    assert np.allclose(pauli_form(1), direct_projector(2), atol=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_pauli_form_identity(n):
    d = 2 ** n
    pf = pauli_form(n)
    assert np.abs(pf - direct_projector(d)).max() <= 1e-12
    assert np.trace(pf).real == pytest.approx(d)
    w = eigvalsh(pf)
    assert np.allclose(w, [d] + [0] * (d * d - 1), atol=1e-10)
    v = max_entangled_vector(d)
    assert np.abs(pf @ v - d * v).max() <= 1e-12


def test_pauli_form_range():
    with pytest.raises(ParamOutOfRange):
        pauli_form(4)


@pytest.mark.parametrize("factors, weight", [((0,), 1), ((2,), -1), ((2, 2), 1), ((1, 2, 3), -1)])
def test_pauli_string_weight(factors, weight):
    s = PauliString(factors)
    assert s.weight == weight
    assert np.allclose(s.matrix().conj(), weight * s.matrix())


def test_gellmann_basis():
    for a, ga in enumerate(GELLMANN_SCALED):
        for b, gb in enumerate(GELLMANN_SCALED):
            assert np.trace(ga.conj().T @ gb) == pytest.approx(1.0 if a == b else 0.0, abs=1e-14)
    assert np.allclose(sum(g @ g for g in GELLMANN_SCALED), 3 * np.eye(3), atol=1e-14)
    assert all(np.allclose(g, g.conj().T) for g in GELLMANN)


@pytest.mark.parametrize("index", range(9))
def test_gellmann_weight_matches_conjugation(index):
    s = GellMannString((index,))
    assert np.allclose(s.matrix().conj(), s.weight * s.matrix())


@pytest.mark.parametrize("n", [1, 2])
def test_gellmann_form_identity(n):
    d = 3 ** n
    gf = gellmann_form(n)
    assert np.abs(gf - direct_projector(d)).max() <= 1e-12
    assert np.trace(gf).real == pytest.approx(d)


def test_gellmann_form_spectrum():
    assert np.allclose(eigvalsh(gellmann_form(1)), [3] + [0] * 8, atol=1e-10)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_ebit_merge(k):
    u = ebit_merge_unitary(k)
    d = 2 ** k
    target = np.zeros(d * d)
    for i in range(d):
        target[i * d + i] = 1
    assert np.abs(u @ ebit_product_state(k) - target).max() <= 1e-12
    assert is_permutation_matrix(u)
    assert np.allclose(u @ u.conj().T, np.eye(4 ** k))


def test_ebit_merge_two_pairs_is_middle_swap():
    assert np.array_equal(ebit_merge_unitary(2), swap(4, 2, 3))


@pytest.mark.parametrize("k", [1, 5])
def test_ebit_merge_range(k):
    with pytest.raises(UnsupportedK):
        ebit_merge_unitary(k)


def test_projector_helpers_agree():
    assert np.array_equal(max_entangled_projector(3), direct_projector(3))
    assert not is_permutation_matrix(np.ones((2, 2)))
