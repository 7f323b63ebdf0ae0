import itertools

import numpy as np
import pytest

from floquet_circuits.operators import (
    PauliDecomposition,
    QubitRegister,
    all_pauli_labels,
    pauli_decompose,
    pauli_matrix,
    pauli_string,
    two_body,
)

R1, R2 = QubitRegister(1), QubitRegister(2)


def ket(bits: str) -> np.ndarray:
    reg = QubitRegister(len(bits))
    v = np.zeros(reg.dim, dtype=complex)
    v[reg.index_of([int(c) for c in bits])] = 1.0
    return v


def test_register_dim_and_labels():
    assert R2.dim == 4
    assert [R2.basis_label(i) for i in range(4)] == ["11", "10", "01", "00"]
    with pytest.raises(ValueError):
        QubitRegister(0)


def test_sigma_z_ordering():
    assert np.allclose(pauli_matrix("Z", 0, R1), np.diag([1, -1]))


def test_x_flips_first_qubit():
    assert np.allclose(pauli_matrix("X", 0, R2) @ ket("11"), ket("01"))


def test_double_raising():
    op = pauli_matrix("+", 0, R2) @ pauli_matrix("+", 1, R2)
    assert np.allclose(op @ ket("00"), ket("11"))
    for b in ("11", "10", "01"):
        assert np.allclose(op @ ket(b), 0)


def test_invalid_label_and_index():
    with pytest.raises(ValueError):
        pauli_matrix("Q", 0, R2)
    with pytest.raises((ValueError, IndexError)):
        pauli_matrix("X", 2, R2)


def test_decompose_examples():
    dec = pauli_decompose(two_body("Z", 0, "X", 1, R2), R2).significant()
    assert dec == {"ZX": pytest.approx(1.0)}
    assert pauli_decompose(3.5 * np.eye(4), R2).significant() == {"II": pytest.approx(3.5)}
    sq = pauli_matrix("+", 0, R2) @ pauli_matrix("+", 1, R2)
    dec = pauli_decompose(sq + sq.conj().T, R2).real().significant()
    assert dec == {"XX": pytest.approx(0.5), "YY": pytest.approx(-0.5)}


def test_decompose_dimension_mismatch():
    with pytest.raises(ValueError):
        pauli_decompose(np.eye(3), R2)


def test_pauli_orthonormality_three_qubits():
    labels = all_pauli_labels(3)
    mats = np.array([pauli_string(l) for l in labels])
    gram = np.einsum("aij,bij->ab", mats.conj(), mats) / 8
    assert np.allclose(gram, np.eye(len(labels)), atol=1e-12)


def test_distinct_qubits_commute():
    for a, b in itertools.product("XYZ+-", repeat=2):
        A, B = pauli_matrix(a, 0, R2), pauli_matrix(b, 1, R2)
        assert np.max(np.abs(A @ B - B @ A)) < 1e-12


def test_reconstruct_round_trip_random_hermitian():
    rng = np.random.default_rng(7)
    for _ in range(100):
        M = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        H = M + M.conj().T
        dec = pauli_decompose(H, QubitRegister(3))
        assert max(abs(np.imag(v)) for v in dec.values()) < 1e-10
        assert np.max(np.abs(dec.reconstruct() - H)) < 1e-10


def test_empty_decomposition_cannot_reconstruct():
    with pytest.raises(ValueError):
        PauliDecomposition().reconstruct()
