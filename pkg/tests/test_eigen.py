import numpy as np
import pytest

from rdbloch.eigen import eigh
from rdbloch.errors import HermiticityError


def random_hermitian(rng, n, complex_=True):
    a = rng.normal(size=(n, n)) + (1j * rng.normal(size=(n, n)) if complex_ else 0)
    return 0.5 * (a + a.conj().T)


def test_two_by_two():
    np.testing.assert_allclose(eigh(np.array([[2, 1j], [-1j, 2]])), [1.0, 3.0], atol=1e-14)
    np.testing.assert_allclose(eigh(np.array([[2, 1j], [-1j, 2]]), method="embed"), [1.0, 3.0], atol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 5, 33, 129])
@pytest.mark.parametrize("complex_", [False, True])
def test_against_lapack(rng, n, complex_):
    h = random_hermitian(rng, n, complex_)
    np.testing.assert_allclose(eigh(h), np.linalg.eigvalsh(h), atol=1e-11)


@pytest.mark.parametrize("method", ["householder", "embed"])
def test_eigenvectors(rng, method):
    h = random_hermitian(rng, 40)
    w, v = eigh(h, vectors=True, method=method)
    np.testing.assert_allclose(h @ v, v * w, atol=1e-10)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(40), atol=1e-10)


def test_degenerate_embed_vectors():
    h = np.diag([1.0, 1.0, 2.0]).astype(complex)
    h[0, 2] = h[2, 0] = 1e-3j
    h[2, 0] = -1e-3j
    w, v = eigh(h, vectors=True, method="embed")
    np.testing.assert_allclose(h @ v, v * w, atol=1e-12)


def test_graded_accuracy_small_eigenvalue():
    # huge diagonal with one tiny eigenvalue: relative accuracy matters
    d = np.array([0.0] + [float(k) ** 2 * 1e4 for k in range(1, 60)])
    h = np.diag(d)
    h[0, 1] = h[1, 0] = 1e-3
    lam = eigh(h)[0]
    assert lam == pytest.approx(-1e-6 / 1e4, rel=1e-8)


def test_rejects_non_hermitian():
    with pytest.raises(HermiticityError):
        eigh(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        eigh(np.ones((2, 3)))
    with pytest.raises(ValueError):
        eigh(np.array([[1, 1j], [-1j, 1]]), method="qr")
