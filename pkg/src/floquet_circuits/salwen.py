"""Generalized Salwen adiabatic elimination on the Floquet composite space.

The slow manifold holds one composite state |alpha, m_alpha>> per qubit basis
state alpha, chosen so that its quasienergy vanishes in the qubit rotating
frame.  All resolvents use the bare (lab) quasienergies; the rotating frame
only enters through the subtraction of each slow state's bare quasienergy at
the end.  Couplings between slow states whose bare quasienergies differ are
rotating terms and are dropped (secular projection), which reproduces the
interaction-picture Hamiltonian with respect to H0.

Two routes to the effective matrix are provided:

* a perturbative series (Bloch wave operator with des Cloizeaux
  Hermitization), exact order by order in the couplings and drive amplitudes;
* the self-consistent solution of h(eps) v = eps v by fixed-point iteration,
  which is exact within the Fourier truncation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu
from scipy.special import binom

from .floquet import FloquetMatrix
from .operators import PauliDecomposition, QubitRegister, is_hermitian, pauli_decompose

DEGENERACY_TOL = 1e-6
SECULAR_TOL = 1e-9
RESONANCE_TOL = 1e-9


class DegeneracyError(RuntimeError):
    """The working point does not produce the required slow manifold."""


class ResonanceError(RuntimeError):
    """A fast state is resonant with the slow manifold and coupled to it."""


# ---------------------------------------------------------------- slow manifold


@dataclass(frozen=True)
class SlowManifold:
    """Degenerate slow manifold of the Floquet matrix.

    Attributes:
        states: (alpha, m) for alpha = 0 .. 2^n - 1, in qubit-basis order.
        indices: flat composite indices of the states.
        frame: rotating-frame frequencies used for the identification.
        reference: unperturbed quasienergies in the frame (all ~0).
        lab: bare quasienergies of the states.
        gap: smallest |quasienergy| of an excluded state in the frame.
        gap_state: (alpha, m) of that state.
    """

    states: tuple
    indices: np.ndarray
    frame: tuple
    reference: np.ndarray
    lab: np.ndarray
    gap: float
    gap_state: tuple

    @property
    def size(self) -> int:
        return len(self.states)

    def secular_mask(self) -> np.ndarray:
        """True where two slow states share the same bare quasienergy."""
        return np.abs(self.lab[:, None] - self.lab[None, :]) < SECULAR_TOL

    def blocks(self) -> list[np.ndarray]:
        """Groups of slow positions with equal bare quasienergy."""
        out, seen = [], np.zeros(self.size, dtype=bool)
        mask = self.secular_mask()
        for a in range(self.size):
            if not seen[a]:
                grp = np.flatnonzero(mask[a])
                seen[grp] = True
                out.append(grp)
        return out


def identify_slow_manifold(F: FloquetMatrix, tolerance: float = DEGENERACY_TOL, gap_min: float = 0.05) -> SlowManifold:
    """Find the zero-quasienergy composite state of every qubit basis state.

    Arguments:
        F: Floquet matrix with a rotating frame attached (none means the lab frame).
        tolerance: degeneracy tolerance in GHz.
        gap_min: smallest acceptable gap to the excluded states.

    Returns:
        SlowManifold with the minimal-|m| representative for each alpha.
    """
    d = F.qubit_dim
    fe = F.frame_energies().reshape(-1, d)
    grid = F.photon_grid
    norms = np.abs(grid).sum(axis=1)
    states, indices = [], []
    for alpha in range(d):
        hits = np.flatnonzero(np.abs(fe[:, alpha]) < tolerance)
        if hits.size == 0:
            raise DegeneracyError(f"qubit state {alpha} has no zero-quasienergy partner in the frame")
        best = hits[norms[hits] == norms[hits].min()]
        if best.size > 1:
            raise DegeneracyError(f"qubit state {alpha} has several minimal zero-quasienergy partners")
        m = tuple(int(v) for v in grid[best[0]])
        states.append((alpha, m))
        indices.append(F.index(alpha, m))
    indices = np.array(indices, dtype=int)
    flat_fe = fe.reshape(-1)
    excluded = np.ones(F.dim, dtype=bool)
    excluded[indices] = False
    if excluded.any():
        cand = np.flatnonzero(excluded)
        k = cand[np.argmin(np.abs(flat_fe[cand]))]
        gap, gap_state = float(abs(flat_fe[k])), F.composite(int(k))
    else:
        gap, gap_state = float("inf"), ()
    if gap < gap_min:
        raise DegeneracyError(f"gap {gap:.4g} GHz to state {gap_state} is below gap_min {gap_min}")
    frame = tuple(F.frame) if F.frame is not None else (0.0,) * F.register.n_qubits
    return SlowManifold(
        tuple(states), indices, frame, flat_fe[indices].copy(), F.unperturbed[indices].copy(), gap, gap_state
    )


def manifold_from_states(F: FloquetMatrix, states) -> SlowManifold:
    """SlowManifold from explicit (alpha, m) pairs, one per qubit basis state."""
    states = tuple((int(a), tuple(int(v) for v in np.atleast_1d(m))) for a, m in states)
    if sorted(a for a, _ in states) != list(range(F.qubit_dim)):
        raise DegeneracyError("explicit slow states must cover each qubit basis state once")
    states = tuple(sorted(states))
    indices = np.array([F.index(a, m) for a, m in states], dtype=int)
    fe = F.frame_energies()
    excluded = np.setdiff1d(np.arange(F.dim), indices)
    k = excluded[np.argmin(np.abs(fe[excluded]))] if excluded.size else None
    gap = float(abs(fe[k])) if k is not None else float("inf")
    frame = tuple(F.frame) if F.frame is not None else (0.0,) * F.register.n_qubits
    return SlowManifold(
        states, indices, frame, fe[indices].copy(), F.unperturbed[indices].copy(), gap,
        F.composite(int(k)) if k is not None else (),
    )


# ---------------------------------------------------------------- scattering series


def _fast_mask(F: FloquetMatrix, manifold: SlowManifold) -> np.ndarray:
    mask = np.ones(F.dim, dtype=bool)
    mask[manifold.indices] = False
    return mask


def _resolvent(F: FloquetMatrix, manifold: SlowManifold, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-column fast resolvent 1/(E_alpha + eps - E_s), zero on slow rows; and the singular mask."""
    den = manifold.lab[None, :] + eps - F.unperturbed[:, None]
    singular = np.abs(den) < RESONANCE_TOL
    fast = _fast_mask(F, manifold)
    G = np.where(singular, 0.0, 1.0 / np.where(singular, 1.0, den))
    G[~fast, :] = 0.0
    singular[~fast, :] = False
    return G, singular


def scattering_terms(F: FloquetMatrix, manifold: SlowManifold, eps: float, order: int, V: sp.spmatrix | None = None) -> list[np.ndarray]:
    """Slow-block terms P (V G_P)^k V P for k = 0 .. order - 1.

    Arguments:
        F: Floquet matrix.
        manifold: slow manifold.
        eps: trial quasienergy measured from each slow state's bare quasienergy.
        order: number of terms.

    Returns:
        List of (n_slow, n_slow) matrices; term k scales as lambda^(k+1) under V -> lambda V.
    """
    if order < 1:
        return []
    V = F.perturbation() if V is None else V
    G, singular = _resolvent(F, manifold, eps)
    X = V[:, manifold.indices].toarray()
    terms = [X[manifold.indices, :].copy()]
    for _ in range(order - 1):
        if np.any(np.abs(X[singular]) > 1e-12):
            raise ResonanceError(f"trial eps={eps} collides with a coupled fast state")
        X = V @ (G * X)
        terms.append(X[manifold.indices, :].copy())
    return terms


def scattering_apply(F: FloquetMatrix, manifold: SlowManifold, eps: float, k: int, V: sp.spmatrix | None = None) -> np.ndarray:
    """The single term P (V G_P)^k V P at trial quasienergy eps."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return scattering_terms(F, manifold, eps, k + 1, V)[k]


def salwen_matrix(F: FloquetMatrix, manifold: SlowManifold, eps: float, order: int, secular: bool = True) -> np.ndarray:
    """h(eps) = sum_{k < order} P (V G_P)^k V P in the rotating frame."""
    h = sum(scattering_terms(F, manifold, eps, order))
    return np.where(manifold.secular_mask(), h, 0.0) if secular else h


def _bloch_series(F: FloquetMatrix, slow: np.ndarray, order: int, V: sp.csr_matrix) -> list[np.ndarray]:
    """Des Cloizeaux effective Hamiltonian on the degenerate states `slow`, orders 0..order."""
    fast = np.flatnonzero(~np.isin(np.arange(F.dim), slow))
    E = F.unperturbed
    Es, Ef = E[slow], E[fast]
    den = Es[None, :] - Ef[:, None]
    singular = np.abs(den) < RESONANCE_TOL
    G = np.where(singular, 0.0, 1.0 / np.where(singular, 1.0, den))
    Vs, Vf = V[slow], V[fast]
    VPP = Vs[:, slow].toarray()
    VPQ = Vs[:, fast].tocsr()
    VQP = Vf[:, slow].toarray()
    VQQ = Vf[:, fast].tocsr()
    ns = slow.size
    om = [np.zeros((fast.size, ns), dtype=complex)]
    B = [np.diag(Es).astype(complex)]
    for n in range(1, order + 1):
        B.append((VPP if n == 1 else 0.0) + VPQ @ om[n - 1])
        if n == order:
            break
        R = (VQP if n == 1 else 0.0) + VQQ @ om[n - 1]
        for j in range(1, n):
            R = R - om[j] @ B[n - j]
        if np.any(np.abs(R[singular]) > 1e-10):
            raise ResonanceError(f"coupled fast state resonant with the slow manifold at order {n}")
        om.append(G * R)

    zero = [np.zeros((ns, ns), dtype=complex) for _ in range(order + 1)]

    def mul(A, C):
        out = [z.copy() for z in zero]
        for i in range(order + 1):
            for j in range(order + 1 - i):
                out[i + j] += A[i] @ C[j]
        return out

    X = [z.copy() for z in zero]
    for i in range(1, order):
        for j in range(1, order - i + 1):
            X[i + j] += om[i].conj().T @ om[j]

    def power(ex):
        res = [z.copy() for z in zero]
        res[0] = np.eye(ns, dtype=complex)
        Xk = [z.copy() for z in zero]
        Xk[0] = np.eye(ns, dtype=complex)
        for k in range(1, order // 2 + 1):
            Xk = mul(Xk, X)
            c = binom(ex, k)
            for i in range(order + 1):
                res[i] += c * Xk[i]
        return res

    return mul(mul(power(0.5), B), power(-0.5))


def effective_series(F: FloquetMatrix, manifold: SlowManifold, order: int, V: sp.spmatrix | None = None) -> list[np.ndarray]:
    """Order-by-order Hermitian effective Hamiltonian on the slow manifold (lab quasienergies).

    Each secular block (slow states sharing one bare quasienergy) is treated
    as its own degenerate space; the other slow states belong to its
    complement.  Per block, the Bloch wave operator omega_n follows
        omega_n = G o (QVP d_n1 + QVQ omega_{n-1} - sum_j omega_j B_{n-j}),
        B_n = PVP d_n1 + PVQ omega_{n-1},
    and H = S^{1/2} B S^{-1/2} with S = 1 + omega^dag omega.  Couplings between
    blocks rotate at the difference of their bare quasienergies and are folded
    into the blocks rather than dropped, so the eigenvalues converge to the
    Floquet quasienergies.

    Returns:
        [H_0, ..., H_order], block diagonal in the slow basis; H_p scales as lambda^p.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    V = (F.perturbation() if V is None else V).tocsr()
    ns = manifold.size
    out = [np.zeros((ns, ns), dtype=complex) for _ in range(order + 1)]
    for grp in manifold.blocks():
        terms = _bloch_series(F, manifold.indices[grp], order, V)
        for p in range(order + 1):
            out[p][np.ix_(grp, grp)] = terms[p]
    return out


def frame_matrix(H_lab: np.ndarray, manifold: SlowManifold) -> np.ndarray:
    """Secular part of H_lab - diag(lab quasienergies): the rotating-frame effective matrix."""
    W = H_lab - np.diag(manifold.lab)
    return np.where(manifold.secular_mask(), W, 0.0)


# ---------------------------------------------------------------- self-consistent solution


def _greedy_match(vectors: np.ndarray) -> np.ndarray:
    """Permutation p so that column p[a] of `vectors` belongs to basis state a."""
    w = np.abs(vectors) ** 2
    n = w.shape[0]
    order = np.dstack(np.unravel_index(np.argsort(-w, axis=None), w.shape))[0]
    perm = -np.ones(n, dtype=int)
    used = np.zeros(n, dtype=bool)
    for r, c in order:
        if perm[r] < 0 and not used[c]:
            perm[r] = c
            used[c] = True
    return perm


def _branch_energies(W: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    e, v = np.linalg.eigh(W)
    perm = _greedy_match(v)
    return e[perm], v[:, perm]


@dataclass
class SelfConsistentSolution:
    """Result of the Salwen procedure on one slow manifold.

    Attributes:
        order: perturbative order p_c.
        manifold: slow manifold.
        series: effective matrices in the frame, one per order 0..p_c (cumulative).
        series_quasienergies: eigenvalues per order, shape (p_c + 1, n_slow), matched to basis states.
        kappa: per-order increments kappa[alpha, p] for p = 1..p_c (column 0 is order 1).
        quasienergies: eigenvalues of the final effective matrix, matched to basis states.
        eigenvectors: matching eigenvectors (columns).
        exact_matrix: rotating-frame matrix from the self-consistent solution, if computed.
        floquet_quasienergies: self-consistent roots of h(z) v = z v measured from each
            slow state's bare quasienergy (exact Floquet quasienergies within the truncation).
        h_records: h(z_alpha) matrices used in the final fixed-point step.
        iterations: fixed-point iterations per state.
    """

    order: int
    manifold: SlowManifold
    series: list
    series_quasienergies: np.ndarray
    kappa: np.ndarray
    quasienergies: np.ndarray
    eigenvectors: np.ndarray
    exact_matrix: np.ndarray | None = None
    floquet_quasienergies: np.ndarray | None = None
    h_records: list = field(default_factory=list)
    iterations: list = field(default_factory=list)

    def matrix(self, order: int | None = None) -> np.ndarray:
        return self.series[self.order if order is None else order]


class _Feshbach:
    """h(z) = P H P + P H Q (z - Q H Q)^{-1} Q H P for the slow positions `slow`, exact within the truncation."""

    def __init__(self, F: FloquetMatrix, slow: np.ndarray):
        H = F.matrix.tocsr()
        self.P = np.asarray(slow, dtype=int)
        self.Q = np.flatnonzero(~np.isin(np.arange(F.dim), self.P))
        HQ = H[self.Q]
        self.HQQ = HQ[:, self.Q].tocsc()
        self.HQP = HQ[:, self.P].toarray()
        self.HPP = H[self.P][:, self.P].toarray()
        self.eye = sp.identity(self.Q.size, format="csc", dtype=complex)

    def __call__(self, z: float) -> tuple[np.ndarray, np.ndarray]:
        lu = splu((z * self.eye - self.HQQ).tocsc())
        X = lu.solve(self.HQP)
        return self.HPP + self.HQP.conj().T @ X, X


def solve_self_consistent(
    F: FloquetMatrix,
    manifold: SlowManifold,
    order: int,
    exact: bool | str = "auto",
    max_iter: int = 50,
    tol: float = 1e-13,
) -> SelfConsistentSolution:
    """Salwen effective dynamics on the slow manifold.

    Arguments:
        F: Floquet matrix.
        manifold: slow manifold.
        order: perturbative order p_c (>= 1; >= 2 for a non-trivial result).
        exact: also solve h(z) v = z v self-consistently ("auto": when dim <= 20000).
        max_iter: fixed-point iteration limit per state.
        tol: fixed-point convergence threshold (GHz).

    Returns:
        SelfConsistentSolution with per-order matrices, kappa increments and,
        when requested, the self-consistent solution.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    V = F.perturbation()
    H = effective_series(F, manifold, order, V)
    acc = H[0].copy()
    series = [frame_matrix(acc, manifold)]
    for p in range(1, order + 1):
        acc = acc + H[p]
        series.append(frame_matrix(acc, manifold))
    energies = np.zeros((order + 1, manifold.size))
    vecs = None
    for p in range(order + 1):
        energies[p], vecs = _branch_energies(series[p])
    kappa = np.diff(energies, axis=0).T
    sol = SelfConsistentSolution(order, manifold, series, energies, kappa, energies[-1].copy(), vecs)
    if exact == "auto":
        exact = F.dim <= 20000
    if exact:
        _solve_exact(F, manifold, sol, max_iter, tol)
    return sol


def _solve_exact(F: FloquetMatrix, manifold: SlowManifold, sol: SelfConsistentSolution, max_iter: int, tol: float) -> None:
    n = manifold.size
    H_lab = np.zeros((n, n), dtype=complex)
    energies = np.zeros(n)
    records, iterations = [None] * n, [0] * n
    for grp in manifold.blocks():
        fes = _Feshbach(F, manifold.indices[grp])
        amps = np.zeros((grp.size, grp.size), dtype=complex)
        for k, a in enumerate(grp):
            z = float(manifold.lab[a] + sol.quasienergies[a])
            for it in range(1, max_iter + 1):
                h, X = fes(z)
                e = np.linalg.eigvalsh(0.5 * (h + h.conj().T))
                j = int(np.argmin(np.abs(e - z)))
                delta = abs(e[j] - z)
                z = float(e[j])
                if delta < tol:
                    break
            else:
                raise RuntimeError(f"self-consistency did not converge for slow state {a}")
            h, X = fes(z)
            e, v = np.linalg.eigh(0.5 * (h + h.conj().T))
            u = v[:, int(np.argmin(np.abs(e - z)))]
            # block part of the normalized Floquet eigenvector
            amps[:, k] = u / np.sqrt(1.0 + np.linalg.norm(X @ u) ** 2)
            energies[a] = z
            records[a], iterations[a] = h, it
        U, _, Vh = np.linalg.svd(amps)
        Qm = U @ Vh
        H_lab[np.ix_(grp, grp)] = Qm @ np.diag(energies[grp]) @ Qm.conj().T
    sol.floquet_quasienergies = energies - manifold.lab
    sol.exact_matrix = frame_matrix(H_lab, manifold)
    sol.quasienergies, sol.eigenvectors = _branch_energies(sol.exact_matrix)
    sol.h_records = records
    sol.iterations = iterations


# ---------------------------------------------------------------- effective spin Hamiltonian


@dataclass
class EffectiveSpinHamiltonian:
    """Effective Hamiltonian on the slow manifold in the qubit rotating frame.

    Attributes:
        matrix: Hermitian matrix in the qubit basis.
        couplings: real Pauli coefficients (identity excluded).
        delta_omega: coefficient of sigma_j^z for each qubit.
        offset: identity coefficient.
        frame: rotating-frame frequencies.
        order: perturbative order, or None for the self-consistent result.
        method: "series" or "exact".
    """

    matrix: np.ndarray
    couplings: PauliDecomposition
    delta_omega: tuple
    offset: float
    frame: tuple
    order: int | None
    method: str

    @property
    def n_qubits(self) -> int:
        return self.couplings.n_qubits

    def coefficient(self, label: str) -> float:
        return float(self.couplings.get(label, 0.0))

    def two_body(self, a: str, i: int, b: str, j: int) -> float:
        """Coefficient of sigma_i^a sigma_j^b."""
        lab = ["I"] * self.n_qubits
        lab[i], lab[j] = a, b
        return self.coefficient("".join(lab))

    def pair_raising(self, i: int = 0, j: int = 1) -> complex:
        """J with J sigma_i^+ sigma_j^+ + h.c. (squeezing strength): XX - YY - i(XY + YX)."""
        return complex(
            self.two_body("X", i, "X", j) - self.two_body("Y", i, "Y", j)
            - 1j * (self.two_body("X", i, "Y", j) + self.two_body("Y", i, "X", j))
        )

    def pair_hopping(self, i: int = 0, j: int = 1) -> complex:
        """J with J sigma_i^+ sigma_j^- + h.c. (hopping strength): XX + YY + i(XY - YX)."""
        return complex(
            self.two_body("X", i, "X", j) + self.two_body("Y", i, "Y", j)
            + 1j * (self.two_body("X", i, "Y", j) - self.two_body("Y", i, "X", j))
        )

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def to_dict(self, tol: float = 1e-12) -> dict:
        return {
            "frame_GHz_over_2pi": [float(f) for f in self.frame],
            "order": self.order,
            "method": self.method,
            "delta_omega_GHz_over_2pi": [float(v) for v in self.delta_omega],
            "offset_GHz_over_2pi": float(self.offset),
            "couplings_GHz_over_2pi": {k: float(v) for k, v in sorted(self.couplings.items()) if abs(v) > tol},
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, **kwargs)


def spin_hamiltonian_from_matrix(W: np.ndarray, frame, order, method: str) -> EffectiveSpinHamiltonian:
    """Pauli-decompose a rotating-frame effective matrix."""
    if not is_hermitian(W, 1e-9):
        raise ValueError(f"effective matrix is not Hermitian (max deviation {np.max(np.abs(W - W.conj().T)):.3g})")
    W = 0.5 * (W + W.conj().T)
    n = int(round(np.log2(W.shape[0])))
    dec = pauli_decompose(W, QubitRegister(n)).real()
    ident = "I" * n
    offset = dec.pop(ident, 0.0)
    shifts = []
    for j in range(n):
        lab = ["I"] * n
        lab[j] = "Z"
        shifts.append(float(dec.get("".join(lab), 0.0)))
    couplings = PauliDecomposition({k: v for k, v in dec.items() if abs(v) > 0.0}, n)
    return EffectiveSpinHamiltonian(W, couplings, tuple(shifts), float(offset), tuple(frame), order, method)


def effective_hamiltonian(
    F: FloquetMatrix,
    manifold: SlowManifold,
    order: int,
    method: str = "series",
    solution: SelfConsistentSolution | None = None,
) -> EffectiveSpinHamiltonian:
    """Effective spin Hamiltonian in the qubit rotating frame.

    Arguments:
        F: Floquet matrix.
        manifold: slow manifold.
        order: perturbative order p_c.
        method: "series" for the order-p_c matrix, "exact" for the self-consistent one.
        solution: reuse a previous solve_self_consistent result.
    """
    if method not in ("series", "exact"):
        raise ValueError(f"unknown method {method!r}")
    if solution is None or solution.order < order or (method == "exact" and solution.exact_matrix is None):
        solution = solve_self_consistent(F, manifold, order, exact=(method == "exact"))
    if method == "series":
        return spin_hamiltonian_from_matrix(solution.series[order], manifold.frame, order, "series")
    return spin_hamiltonian_from_matrix(solution.exact_matrix, manifold.frame, None, "exact")


def self_consistency_residual(F: FloquetMatrix, manifold: SlowManifold, solution: SelfConsistentSolution) -> float:
    """max over slow states of min |eig(h(z)) - z| at the self-consistent Floquet quasienergies z."""
    if solution.floquet_quasienergies is None:
        raise ValueError("solution has no self-consistent part")
    worst = 0.0
    for grp in manifold.blocks():
        fes = _Feshbach(F, manifold.indices[grp])
        for a in grp:
            z = float(manifold.lab[a] + solution.floquet_quasienergies[a])
            h, _ = fes(z)
            worst = max(worst, float(np.min(np.abs(np.linalg.eigvalsh(0.5 * (h + h.conj().T)) - z))))
    return worst


def dense_effective_matrix(F: FloquetMatrix, manifold: SlowManifold) -> np.ndarray:
    """Rotating-frame effective matrix from dense diagonalization of the whole Floquet matrix.

    For each secular block, picks the eigenvectors with the largest weight on
    the block, orthonormalizes their block parts and subtracts the bare
    quasienergies.
    """
    from .floquet import quasienergy_spectrum

    spec = quasienergy_spectrum(F, "dense")
    n = manifold.size
    H_lab = np.zeros((n, n), dtype=complex)
    for grp in manifold.blocks():
        P = spec.vectors[manifold.indices[grp], :]
        weight = np.sum(np.abs(P) ** 2, axis=0)
        sel = np.argsort(-weight)[: grp.size]
        U, _, Vh = np.linalg.svd(P[:, sel])
        Qm = U @ Vh
        H_lab[np.ix_(grp, grp)] = Qm @ np.diag(spec.energies[sel]) @ Qm.conj().T
    return frame_matrix(H_lab, manifold)
