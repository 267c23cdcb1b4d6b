import numpy as np
import pytest

from cpforge.errors import NonHermitianInput
from cpforge.matrix_core import (
    PAULI,
    eigh,
    eigvalsh,
    is_psd,
    kron,
    min_eigenvalue,
    unvec,
    vec,
)

X, Y, Z = PAULI[1:]
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def random_hermitian(rng, n):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (g + g.conj().T)


# -- vec / unvec ---------------------------------------------------------------

def test_vec_is_row_major():
    m = np.array([[1, 2], [3, 4]])
    assert np.array_equal(vec(m).ravel(), [1, 2, 3, 4])


@pytest.mark.parametrize(
    "m, expected",
    [(np.eye(2), [1, 0, 0, 1]), (X, [0, 1, 1, 0])],
)
def test_vec_examples(m, expected):
    assert np.array_equal(vec(m).ravel(), expected)


@pytest.mark.parametrize("shape", [(1, 1), (2, 2), (2, 3), (4, 1), (3, 5)])
def test_vec_unvec_round_trip_is_exact(shape):
    rng = np.random.default_rng(0)
    m = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    assert np.array_equal(unvec(vec(m), *shape), m)


# -- kron ------------------------------------------------------------------------

def test_kron_examples():
    assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))
    assert np.array_equal(kron(Z, Z), np.diag([1, -1, -1, 1]))
    assert np.array_equal(kron(X, X), np.fliplr(np.eye(4)))


def test_kron_mixed_product():
    rng = np.random.default_rng(1)
    a, c = (rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3)) for _ in range(2))
    c = c.T
    b, d = rng.normal(size=(3, 2)), rng.normal(size=(2, 4))
    assert np.allclose(kron(a, b) @ kron(c, d), kron(a @ c, b @ d), atol=1e-12)


# -- eigensolver -------------------------------------------------------------------

@pytest.mark.parametrize(
    "m, expected",
    [(Z, [1, -1]), (SWAP, [1, 1, 1, -1]), (np.eye(4), [1, 1, 1, 1]), (np.diag([1.0, -1.0]), [1, -1])],
)
def test_eigvalsh_examples(m, expected):
    assert np.allclose(eigvalsh(m), expected, atol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 7, 16, 33, 64])
def test_eigh_matches_lapack_and_reconstructs(n):
    rng = np.random.default_rng(n)
    m = random_hermitian(rng, n)
    w, v = eigh(m)
    assert np.all(np.diff(w) <= 0)
    assert np.allclose(w, np.linalg.eigvalsh(m)[::-1], atol=1e-10 * max(1, np.abs(m).max()))
    fro = np.linalg.norm(m)
    assert np.linalg.norm(m - v @ np.diag(w) @ v.conj().T) <= 1e-10 * fro
    assert np.allclose(v.conj().T @ v, np.eye(n), atol=1e-10)
    assert abs(np.trace(m).real - w.sum()) <= 1e-10 * max(1.0, fro)


def test_eigh_256():
    rng = np.random.default_rng(256)
    m = random_hermitian(rng, 256)
    w, v = eigh(m)
    fro = np.linalg.norm(m)
    assert np.linalg.norm(m - (v * w) @ v.conj().T) <= 1e-10 * fro
    assert np.allclose(w, np.linalg.eigvalsh(m)[::-1], atol=1e-9)


def test_eigh_degenerate_spectrum():
    rng = np.random.default_rng(5)
    q, _ = np.linalg.qr(rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
    m = q @ np.diag([2, 2, 2, -1, -1, 0]) @ q.conj().T
    w, v = eigh(m)
    assert np.allclose(w, [2, 2, 2, 0, -1, -1], atol=1e-12)
    assert np.allclose(v.conj().T @ v, np.eye(6), atol=1e-10)


def test_eigvalsh_stack():
    rng = np.random.default_rng(3)
    stack = np.stack([random_hermitian(rng, 5) for _ in range(10)])
    got = eigvalsh(stack)
    assert got.shape == (10, 5)
    for m, w in zip(stack, got):
        assert np.allclose(w, np.linalg.eigvalsh(m)[::-1], atol=1e-10)


def test_non_hermitian_rejected():
    with pytest.raises(NonHermitianInput):
        eigh(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_small_asymmetry_is_symmetrized():
    m = np.array([[1.0, 1e-12], [0.0, -1.0]])
    assert np.allclose(eigvalsh(m), [1, -1], atol=1e-12)


def test_min_eigenvalue_and_psd():
    assert min_eigenvalue(np.eye(4)) == pytest.approx(1.0)
    assert min_eigenvalue(np.diag([1.0, -1.0])) == pytest.approx(-1.0)
    assert is_psd(np.diag([1.0, 0.0, -5e-11]))
    assert not is_psd(np.diag([1.0, -2e-10]))
