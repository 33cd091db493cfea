import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simplexforge import blochalg

from conftest import random_hermitian, random_unitary

PAULI = np.array(
    [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex
)


def test_build_basis_rejects_small_dimension():
    with pytest.raises(ValueError, match="n >= 2"):
        blochalg.build_basis(1)


def test_qubit_basis_is_pauli():
    basis = blochalg.build_basis(2)
    assert np.array_equal(basis.matrices, PAULI)


@pytest.mark.parametrize("n", range(2, 7))
def test_orthogonality_and_tracelessness(n):
    basis = blochalg.build_basis(n)
    assert basis.matrices.shape == (n * n - 1, n, n)
    gram = np.einsum("aij,bji->ab", basis.matrices, basis.matrices)
    assert np.max(np.abs(gram - 2.0 * np.eye(basis.size))) < 1e-12
    traces = np.einsum("aii->a", basis.matrices)
    assert np.max(np.abs(traces)) < 1e-14
    for m in basis.matrices:
        assert blochalg.hermiticity_defect(m) < 1e-14


@pytest.mark.parametrize("n", range(2, 7))
def test_completeness_reconstruction(n, rng):
    basis = blochalg.build_basis(n)
    h = random_hermitian(rng, n)
    h -= np.trace(h) / n * np.eye(n)
    coeffs = 0.5 * np.einsum("ij,aji->a", h, basis.matrices)
    rebuilt = np.einsum("a,aij->ij", coeffs, basis.matrices)
    assert np.max(np.abs(rebuilt - h)) < 1e-12


def test_to_bloch_maximally_mixed_is_origin(basis3):
    v = blochalg.to_bloch(np.eye(3) / 3.0, basis3)
    assert np.max(np.abs(v)) < 1e-15


def test_to_bloch_qubit_projector():
    basis = blochalg.build_basis(2)
    v = blochalg.to_bloch(np.diag([1.0, 0.0]).astype(complex), basis)
    assert np.allclose(v, [0.0, 0.0, 0.5], atol=1e-15)


def test_from_bloch_origin_and_south_pole():
    basis = blochalg.build_basis(2)
    assert np.allclose(
        blochalg.from_bloch(np.zeros(3), basis), np.eye(2) / 2.0, atol=1e-15
    )
    south = blochalg.from_bloch(np.array([0.0, 0.0, -0.5]), basis)
    assert np.allclose(south, np.diag([0.0, 1.0]), atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(2, 5), seed=st.integers(0, 10**6))
def test_bloch_round_trip_on_unit_trace(n, seed):
    rng = np.random.default_rng(seed)
    basis = blochalg.build_basis(n)
    h = random_hermitian(rng, n)
    h += (1.0 - np.trace(h).real) / n * np.eye(n)
    again = blochalg.from_bloch(blochalg.to_bloch(h, basis), basis)
    assert np.max(np.abs(again - h)) < 1e-12


def test_dimension_mismatch_errors(basis3):
    with pytest.raises(ValueError, match="does not match"):
        blochalg.to_bloch(np.eye(2), basis3)
    with pytest.raises(ValueError, match="does not match"):
        blochalg.from_bloch(np.zeros(3), basis3)


def test_structure_tensor_vanishes_for_qubits():
    tensor = blochalg.structure_tensor(blochalg.build_basis(2))
    assert tensor.entries == {}


def test_structure_tensor_qutrit_entry(tensor3):
    # coefficient of r_1^2 r_8 in the cubic form is 3 * d_118 = 2 sqrt(3)
    assert tensor3.entries[(0, 0, 7)] == pytest.approx(2.0 / np.sqrt(3.0), abs=1e-14)


def test_structure_tensor_keys_are_sorted(tensor3):
    for i, j, k in tensor3.entries:
        assert i <= j <= k


@pytest.mark.parametrize("n", [3, 4])
def test_cubic_form_equals_matrix_trace(n, rng):
    basis = blochalg.build_basis(n)
    tensor = blochalg.structure_tensor(basis)
    from simplexforge.tracepoly import f_cubic

    for _ in range(100):
        v = rng.uniform(-1.0, 1.0, basis.size)
        m = np.einsum("a,aij->ij", v, basis.matrices)
        direct = np.trace(m @ m @ m).real
        assert abs(f_cubic(v, tensor) - direct) < 1e-12


def test_adjoint_of_identity_is_identity(basis3):
    m = blochalg.adjoint_rotation(np.eye(3, dtype=complex), basis3)
    assert np.max(np.abs(m - np.eye(8))) < 1e-14


def test_adjoint_qubit_z_rotation():
    basis = blochalg.build_basis(2)
    theta = 0.7312
    u = np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])
    m = blochalg.adjoint_rotation(u, basis)
    expected = np.eye(3)
    expected[:2, :2] = [
        [np.cos(theta), -np.sin(theta)],
        [np.sin(theta), np.cos(theta)],
    ]
    assert np.max(np.abs(m - expected)) < 1e-14


def test_adjoint_is_orthogonal_and_intertwines(basis3, rng):
    u = random_unitary(rng, 3)
    m = blochalg.adjoint_rotation(u, basis3)
    assert np.max(np.abs(m.T @ m - np.eye(8))) < 1e-12
    for _ in range(100):
        h = random_hermitian(rng, 3)
        lhs = blochalg.to_bloch(u @ h @ u.conj().T, basis3)
        rhs = m @ blochalg.to_bloch(h, basis3)
        assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_adjoint_homomorphism(basis3, rng):
    for _ in range(10):
        u = random_unitary(rng, 3)
        w = random_unitary(rng, 3)
        lhs = blochalg.adjoint_rotation(u @ w, basis3)
        rhs = blochalg.adjoint_rotation(u, basis3) @ blochalg.adjoint_rotation(w, basis3)
        assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_adjoint_rejects_non_unitary(basis3):
    with pytest.raises(ValueError, match="not unitary"):
        blochalg.adjoint_rotation(np.diag([1.0, 2.0, 1.0]).astype(complex), basis3)
