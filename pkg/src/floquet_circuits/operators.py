"""Pauli and ladder operators on small multi-qubit registers.

Basis convention used everywhere in the package: qubit 0 is the leftmost
tensor factor and, within a qubit, the excited state |1> comes before the
ground state |0>.  For two qubits the rows are |11>, |10>, |01>, |00>.
With this ordering sigma_z = diag(+1, -1) and sigma_+ = [[0, 1], [0, 0]].
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce

import numpy as np

PAULI_LABELS = "IXYZ"

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "+": np.array([[0, 1], [0, 0]], dtype=complex),
    "-": np.array([[0, 0], [1, 0]], dtype=complex),
    "n": np.array([[1, 0], [0, 0]], dtype=complex),
}
# accept the unicode minus as an alias for the lowering operator
_ALIASES = {"−": "-", "N": "n"}


@dataclass(frozen=True)
class QubitRegister:
    """A register of two-level systems.

    Arguments:
        n_qubits: number of qubits, at least one.
    """

    n_qubits: int

    def __post_init__(self):
        if int(self.n_qubits) != self.n_qubits or self.n_qubits < 1:
            raise ValueError(f"n_qubits must be a positive integer, got {self.n_qubits!r}")

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def basis_label(self, index: int) -> str:
        """Bit string of a basis state, qubit 0 first ('1' = excited)."""
        bits = format(index, f"0{self.n_qubits}b")
        return "".join("0" if b == "1" else "1" for b in bits)

    def excitations(self, index: int) -> np.ndarray:
        """Occupation numbers n_j of basis state `index`."""
        return np.array([int(c) for c in self.basis_label(index)], dtype=int)

    def index_of(self, occupations) -> int:
        """Inverse of `excitations`."""
        occ = list(occupations)
        if len(occ) != self.n_qubits or any(o not in (0, 1) for o in occ):
            raise ValueError(f"invalid occupation vector {occ!r}")
        idx = 0
        for o in occ:
            idx = 2 * idx + (1 - o)
        return idx


def single_qubit(label: str) -> np.ndarray:
    """2x2 matrix for one of I, X, Y, Z, +, -, n."""
    label = _ALIASES.get(label, label)
    if label not in _SINGLE:
        raise ValueError(f"unknown operator label {label!r}")
    return _SINGLE[label].copy()


def embed(op: np.ndarray, qubit: int, register: QubitRegister) -> np.ndarray:
    """Embed a 2x2 operator acting on `qubit` into the full register."""
    if not 0 <= qubit < register.n_qubits:
        raise IndexError(f"qubit {qubit} out of range for {register.n_qubits} qubits")
    factors = [np.eye(2, dtype=complex)] * register.n_qubits
    factors[qubit] = np.asarray(op, dtype=complex)
    return reduce(np.kron, factors)


def pauli_matrix(label: str, qubit: int, register: QubitRegister) -> np.ndarray:
    """sigma_qubit^label embedded in the register (qubits are 0-based)."""
    return embed(single_qubit(label), qubit, register)


def number_operator(qubit: int, register: QubitRegister) -> np.ndarray:
    """sigma_+ sigma_- on `qubit`."""
    return embed(_SINGLE["n"], qubit, register)


def pauli_string(labels: str) -> np.ndarray:
    """Tensor product for a Pauli string such as 'ZX' (one letter per qubit)."""
    if not labels:
        raise ValueError("empty Pauli string")
    return reduce(np.kron, [single_qubit(c) for c in labels])


def two_body(label_a: str, qubit_a: int, label_b: str, qubit_b: int, register: QubitRegister) -> np.ndarray:
    """sigma_a^label_a sigma_b^label_b on two distinct qubits."""
    if qubit_a == qubit_b:
        raise ValueError("two_body needs distinct qubits")
    return pauli_matrix(label_a, qubit_a, register) @ pauli_matrix(label_b, qubit_b, register)


def all_pauli_labels(n_qubits: int) -> list[str]:
    return ["".join(p) for p in itertools.product(PAULI_LABELS, repeat=n_qubits)]


def _pauli_tensor(n_qubits: int) -> np.ndarray:
    # stack of all 4^n Pauli strings, shape (4^n, 2^n, 2^n)
    mats = np.stack([_SINGLE[c] for c in PAULI_LABELS])
    out = mats
    for _ in range(n_qubits - 1):
        out = np.einsum("aij,bkl->abikjl", out, mats).reshape(
            out.shape[0] * 4, out.shape[1] * 2, out.shape[2] * 2
        )
    return out


class PauliDecomposition(dict):
    """Mapping from Pauli string to coefficient, A = sum_P c_P P."""

    def __init__(self, coefficients=None, n_qubits: int | None = None):
        super().__init__(coefficients or {})
        if n_qubits is None and self:
            n_qubits = len(next(iter(self)))
        self.n_qubits = n_qubits

    def reconstruct(self) -> np.ndarray:
        if self.n_qubits is None:
            raise ValueError("cannot reconstruct an empty decomposition of unknown size")
        dim = 2**self.n_qubits
        out = np.zeros((dim, dim), dtype=complex)
        for label, c in self.items():
            out += c * pauli_string(label)
        return out

    def real(self, tol: float = 1e-10) -> "PauliDecomposition":
        """Real parts; raises if an imaginary part exceeds `tol`."""
        bad = {k: v for k, v in self.items() if abs(np.imag(v)) > tol}
        if bad:
            raise ValueError(f"coefficients are not real: {bad}")
        return PauliDecomposition({k: float(np.real(v)) for k, v in self.items()}, self.n_qubits)

    def significant(self, tol: float = 1e-12) -> "PauliDecomposition":
        return PauliDecomposition({k: v for k, v in self.items() if abs(v) > tol}, self.n_qubits)

    def get(self, key, default=0.0):
        return super().get(key, default)


def pauli_decompose(A: np.ndarray, register: QubitRegister | None = None, tol: float = 0.0) -> PauliDecomposition:
    """Coefficients c_P = Tr(P^dagger A) / 2^n for every Pauli string P.

    Arguments:
        A: square matrix of size 2^n.
        register: optional register; inferred from the size of A otherwise.
        tol: drop coefficients with magnitude <= tol (0 keeps everything).
    """
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    dim = A.shape[0]
    n = int(round(np.log2(dim))) if dim > 0 else 0
    if 2**n != dim or n < 1:
        raise ValueError(f"dimension {dim} is not a power of two")
    if register is not None and register.dim != dim:
        raise ValueError(f"matrix dimension {dim} does not match register dimension {register.dim}")
    paulis = _pauli_tensor(n)
    # Pauli matrices are Hermitian, so Tr(P^dag A) = sum_ij conj(P_ji) A_ji = sum P_ij A_ji
    coeffs = np.einsum("pij,ji->p", paulis, A) / dim
    labels = all_pauli_labels(n)
    return PauliDecomposition(
        {lab: complex(c) for lab, c in zip(labels, coeffs) if abs(c) > tol}, n_qubits=n
    )


def is_hermitian(A: np.ndarray, tol: float = 1e-12) -> bool:
    A = np.asarray(A)
    return bool(np.max(np.abs(A - A.conj().T), initial=0.0) < tol)
