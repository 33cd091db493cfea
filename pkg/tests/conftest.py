import numpy as np
import pytest

from simplexforge import blochalg, knasteropt, whsic


@pytest.fixture(scope="session")
def basis3():
    return blochalg.build_basis(3)


@pytest.fixture(scope="session")
def tensor3(basis3):
    return blochalg.structure_tensor(basis3)


@pytest.fixture(scope="session")
def basis4():
    return blochalg.build_basis(4)


@pytest.fixture(scope="session")
def tensor4(basis4):
    return blochalg.structure_tensor(basis4)


@pytest.fixture(scope="session")
def seed2():
    return whsic.seed_sic(2)


@pytest.fixture(scope="session")
def seed3():
    return whsic.seed_sic(3)


@pytest.fixture(scope="session")
def ref3():
    return knasteropt.bloch_reference_simplex(3)


@pytest.fixture(scope="session")
def sic_start3(ref3, seed3):
    return knasteropt.align_to_vertices(ref3, seed3.bloch_vertices)


@pytest.fixture
def rng():
    return np.random.default_rng(20240404)


def random_hermitian(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (a + a.conj().T)


def random_unitary(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_special_orthogonal(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_pure_state(rng, n):
    psi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return psi / np.linalg.norm(psi)
