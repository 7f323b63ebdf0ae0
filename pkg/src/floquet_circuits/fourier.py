"""Fourier-component container for (quasi-)periodic Hamiltonians.

H(t) = sum_n H^(n) exp(i n.omega t), with n an integer multi-index and one
entry per drive mode.
"""

from __future__ import annotations

import numpy as np


class FourierHamiltonian(dict):
    """Map from an integer multi-index to a dense qubit-space matrix.

    Arguments:
        n_modes: arity of every key.
        dim: qubit Hilbert-space dimension.
        unperturbed: optional diagonal of the interaction-free Hamiltonian
            (sum_j omega_j n_j); used to split the Floquet matrix into H_F0 + V.
            Defaults to the diagonal of the zero component.
    """

    def __init__(self, n_modes: int, dim: int, unperturbed=None):
        super().__init__()
        if n_modes < 0 or dim < 1:
            raise ValueError("n_modes must be >= 0 and dim >= 1")
        self.n_modes = int(n_modes)
        self.dim = int(dim)
        self.unperturbed = None if unperturbed is None else np.asarray(unperturbed, dtype=float)

    @property
    def zero_key(self) -> tuple:
        return (0,) * self.n_modes

    def _check_key(self, key) -> tuple:
        key = tuple(int(k) for k in key)
        if len(key) != self.n_modes:
            raise ValueError(f"key {key} has arity {len(key)}, expected {self.n_modes}")
        return key

    def add(self, key, block: np.ndarray, hermitian_partner: bool = True) -> None:
        """Accumulate `block` at `key` and, unless key is zero, its adjoint at -key."""
        key = self._check_key(key)
        block = np.asarray(block, dtype=complex)
        if block.shape != (self.dim, self.dim):
            raise ValueError(f"block shape {block.shape} does not match dim {self.dim}")
        self[key] = self.get(key, np.zeros_like(block)) + block
        if hermitian_partner and any(key):
            neg = tuple(-k for k in key)
            self[neg] = self.get(neg, np.zeros_like(block)) + block.conj().T

    def static(self) -> np.ndarray:
        return self.get(self.zero_key, np.zeros((self.dim, self.dim), dtype=complex))

    def h0_diagonal(self) -> np.ndarray:
        if self.unperturbed is not None:
            return self.unperturbed
        return np.real(np.diag(self.static())).copy()

    def max_order(self) -> np.ndarray:
        """Largest |n_i| per mode over all keys."""
        if not self:
            return np.zeros(self.n_modes, dtype=int)
        return np.max(np.abs(np.array(list(self.keys()), dtype=int)), axis=0)

    def is_conjugate_symmetric(self, tol: float = 1e-12) -> bool:
        for key, block in self.items():
            neg = tuple(-k for k in key)
            partner = self.get(neg)
            if partner is None:
                if np.max(np.abs(block)) > tol:
                    return False
                continue
            if np.max(np.abs(partner - block.conj().T)) > tol:
                return False
        return True

    def evaluate(self, t: float, mode_frequencies) -> np.ndarray:
        """H(t) for given mode frequencies."""
        omega = np.asarray(mode_frequencies, dtype=float)
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for key, block in self.items():
            out += block * np.exp(1j * float(np.dot(key, omega)) * t)
        return out

    def scaled(self, lam: float) -> "FourierHamiltonian":
        """Copy with every perturbation (non-H0 part) multiplied by lam."""
        out = FourierHamiltonian(self.n_modes, self.dim, self.h0_diagonal())
        h0 = np.diag(self.h0_diagonal()).astype(complex)
        for key, block in self.items():
            if key == self.zero_key:
                out[key] = h0 + lam * (block - h0)
            else:
                out[key] = lam * block
        return out

    def pruned(self, tol: float = 0.0) -> "FourierHamiltonian":
        """Copy without keys whose block is entrywise <= tol (zero key kept)."""
        out = FourierHamiltonian(self.n_modes, self.dim, self.unperturbed)
        for key, block in self.items():
            if key == self.zero_key or np.max(np.abs(block)) > tol:
                out[key] = block
        return out
