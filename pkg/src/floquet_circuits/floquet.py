"""Truncated Floquet matrices, quasienergy spectra, propagators and a time-domain oracle.

Composite basis |alpha, m_1, ..., m_M>> with m_i in [-N_i, N_i].  The flat row
index runs over photon indices in lexicographic order (m_1 outermost) and over
the qubit index alpha innermost.

Times are in units of 1/GHz with frequencies taken as the quoted omega/(2 pi)
values, so a physical time t_ns corresponds to t = 2 pi t_ns.
"""

from __future__ import annotations

import itertools
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .circuits import CapacitiveCoupling, CircuitSpec, SquidCoupler, build_static_hamiltonian
from .fourier import FourierHamiltonian
from .operators import QubitRegister, pauli_matrix

DENSE_LIMIT = 5000


class TruncationWarning(UserWarning):
    """Probability leaks out of the truncated composite space."""


class SpectrumError(RuntimeError):
    """Eigensolver failure."""


@dataclass(frozen=True)
class ModeSpec:
    """One drive mode: frequency in GHz and Fourier truncation N (indices -N..N)."""

    frequency: float
    truncation: int = 8

    def __post_init__(self):
        if not self.frequency > 0:
            raise ValueError(f"mode frequency must be positive, got {self.frequency}")
        if int(self.truncation) != self.truncation or self.truncation < 0:
            raise ValueError(f"truncation must be a non-negative integer, got {self.truncation}")

    @property
    def size(self) -> int:
        return 2 * self.truncation + 1


def photon_grid(modes: Sequence[ModeSpec]) -> np.ndarray:
    """All photon vectors in flat block order, shape (n_blocks, M)."""
    ranges = [range(-m.truncation, m.truncation + 1) for m in modes]
    return np.array(list(itertools.product(*ranges)), dtype=int).reshape(-1, len(modes))


@dataclass(frozen=True)
class FloquetMatrix:
    """Truncated Floquet matrix H_F = sum_n H^(n) (x) F_n + diag(m.omega).

    Attributes:
        matrix: sparse Hermitian matrix (CSR).
        modes: drive modes.
        register: qubit register.
        fh: Fourier components used to build it.
        unperturbed: diagonal of H_F0 (bare energies plus photon shifts).
        frame: per-qubit rotating-frame frequencies or None.
    """

    matrix: sp.csr_matrix
    modes: tuple
    register: QubitRegister
    fh: FourierHamiltonian
    unperturbed: np.ndarray
    frame: tuple | None = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def qubit_dim(self) -> int:
        return self.register.dim

    @property
    def omegas(self) -> np.ndarray:
        return np.array([m.frequency for m in self.modes], dtype=float)

    @property
    def truncations(self) -> np.ndarray:
        return np.array([m.truncation for m in self.modes], dtype=int)

    @property
    def photon_grid(self) -> np.ndarray:
        """All photon vectors in flat block order, shape (n_blocks, M)."""
        return photon_grid(self.modes)

    def index(self, alpha: int, m) -> int:
        """Flat row of |alpha, m>>."""
        m = np.atleast_1d(np.asarray(m, dtype=int))
        if m.size != len(self.modes):
            raise ValueError(f"photon vector {m.tolist()} has wrong arity")
        if np.any(np.abs(m) > self.truncations):
            raise IndexError(f"photon vector {m.tolist()} outside truncation")
        if not 0 <= alpha < self.qubit_dim:
            raise IndexError(f"qubit state {alpha} out of range")
        flat = 0
        for mi, mode in zip(m, self.modes):
            flat = flat * mode.size + int(mi) + mode.truncation
        return flat * self.qubit_dim + int(alpha)

    def composite(self, flat: int) -> tuple[int, tuple]:
        """Inverse of `index`: (alpha, m)."""
        if not 0 <= flat < self.dim:
            raise IndexError(f"flat index {flat} out of range")
        block, alpha = divmod(int(flat), self.qubit_dim)
        return alpha, tuple(int(v) for v in self.photon_grid[block])

    def excitations(self) -> np.ndarray:
        """Occupation numbers of each qubit basis state, shape (dim_q, n_qubits)."""
        return np.array([self.register.excitations(a) for a in range(self.qubit_dim)], dtype=int)

    def perturbation(self) -> sp.csr_matrix:
        """V = H_F - H_F0."""
        V = (self.matrix - sp.diags(self.unperturbed)).tocsr()
        V.eliminate_zeros()
        return V

    def frame_energies(self) -> np.ndarray:
        """Unperturbed quasienergies seen in the recorded rotating frame."""
        if self.frame is None:
            return self.unperturbed.copy()
        shift = self.excitations() @ np.asarray(self.frame, dtype=float)
        return self.unperturbed - np.tile(shift, self.dim // self.qubit_dim)

    def block(self, offset) -> np.ndarray:
        """Dense qubit-space block coupling photon m to m + offset (zero block if absent)."""
        offset = tuple(int(v) for v in np.atleast_1d(offset))
        return self.fh.get(offset, np.zeros((self.qubit_dim, self.qubit_dim), dtype=complex))

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def assemble_floquet_matrix(fh: FourierHamiltonian, modes: Sequence[ModeSpec]) -> FloquetMatrix:
    """Build the truncated composite-space Floquet matrix.

    Arguments:
        fh: Fourier components, arity equal to len(modes).
        modes: drive modes with truncations.

    Returns:
        FloquetMatrix whose (beta n, alpha m) entry is H^(n-m)_{beta alpha} + delta n.omega.
    """
    modes = tuple(modes)
    if fh.n_modes != len(modes):
        raise ValueError(f"Fourier components have {fh.n_modes} modes but {len(modes)} ModeSpecs were given")
    need = fh.max_order()
    for i, mode in enumerate(modes):
        if need.size and need[i] > mode.truncation:
            raise ValueError(f"mode {i} truncation {mode.truncation} is below the largest harmonic {need[i]}")
    d = fh.dim
    L = [m.size for m in modes]
    n_blocks = int(np.prod(L)) if L else 1
    H = sp.csr_matrix((n_blocks * d, n_blocks * d), dtype=complex)
    for key, block in fh.items():
        S = sp.identity(1, format="csr", dtype=complex)
        for n, size in zip(key, L):
            S = sp.kron(S, sp.eye(size, k=-n, format="csr", dtype=complex), format="csr")
        H = H + sp.kron(S, sp.csr_matrix(block), format="csr")
    grid = photon_grid(modes)
    omegas = np.array([m.frequency for m in modes], dtype=float)
    shifts = np.repeat(grid @ omegas if modes else np.zeros(1), d)
    H = (H + sp.diags(shifts)).tocsr()
    H.eliminate_zeros()
    unperturbed = np.tile(fh.h0_diagonal(), n_blocks) + shifts
    return FloquetMatrix(H, modes, QubitRegister(int(round(np.log2(d)))), fh, unperturbed)


def apply_rotating_frame(F: FloquetMatrix, frame: Sequence[float]) -> FloquetMatrix:
    """Attach a qubit rotating frame to a Floquet matrix.

    The frame shifts the unperturbed quasienergies by -sum_j f_j n_j, which is
    what slow-manifold identification and reporting use.  The matrix itself is
    left untouched, because subtracting f_j n_j from it would change the
    dynamics whenever the drive does not commute with n_j; the equivalent
    interaction-picture bookkeeping is done in the Salwen engine.

    Arguments:
        F: Floquet matrix.
        frame: one frequency per qubit (GHz).
    """
    frame = tuple(float(f) for f in frame)
    if len(frame) != F.register.n_qubits:
        raise ValueError(f"frame has {len(frame)} entries for {F.register.n_qubits} qubits")
    return replace(F, frame=frame)


# ---------------------------------------------------------------- spectra


@dataclass
class QuasienergySpectrum:
    """Eigenpairs of a Floquet matrix with a dressed-to-bare assignment.

    Attributes:
        energies: sorted quasienergies (GHz).
        vectors: eigenvectors as columns.
        assignment: flat composite index -> column of the dressed state.
        unassigned: composite indices without a dressed partner.
        ambiguous: composite indices whose two largest overlaps differ by < 1e-3.
    """

    floquet: FloquetMatrix
    energies: np.ndarray
    vectors: np.ndarray
    assignment: dict = field(default_factory=dict)
    unassigned: list = field(default_factory=list)
    ambiguous: list = field(default_factory=list)

    def dressed(self, alpha: int, m) -> tuple[float, np.ndarray]:
        col = self.assignment[self.floquet.index(alpha, m)]
        return float(self.energies[col]), self.vectors[:, col]

    def gram_deviation(self) -> float:
        G = self.vectors.conj().T @ self.vectors
        return float(np.max(np.abs(G - np.eye(G.shape[0]))))


def fold_quasienergy(eps, omega: float):
    """Fold into the Brillouin zone [-omega/2, omega/2)."""
    return (np.asarray(eps) + omega / 2.0) % omega - omega / 2.0


def _assign(weights: np.ndarray, candidates: int = 4):
    """Greedy max-overlap assignment of rows (bare) to columns (dressed)."""
    n_rows, n_cols = weights.shape
    k = min(candidates, n_rows)
    top_rows = np.argpartition(-weights, k - 1, axis=0)[:k]
    pairs = [(weights[r, c], r, c) for c in range(n_cols) for r in top_rows[:, c]]
    pairs.sort(key=lambda p: (-p[0], p[1], p[2]))
    assignment, used_rows, used_cols = {}, set(), set()
    for w, r, c in pairs:
        if r in used_rows or c in used_cols or w <= 0:
            continue
        assignment[int(r)] = int(c)
        used_rows.add(r)
        used_cols.add(c)
    unassigned = [r for r in range(n_rows) if r not in assignment]
    ambiguous = []
    if n_cols >= 2:
        top2 = -np.partition(-weights, 1, axis=1)[:, :2]
        ambiguous = [int(r) for r in np.flatnonzero((top2[:, 0] - top2[:, 1] < 1e-3) & (top2[:, 0] > 1e-3))]
    return assignment, unassigned, ambiguous


def quasienergy_spectrum(F: FloquetMatrix, method: str = "dense", window: tuple | None = None) -> QuasienergySpectrum:
    """Diagonalize a Floquet matrix.

    Arguments:
        F: Floquet matrix.
        method: "dense" (dim <= 5000) or "iterative" (shift-invert Lanczos).
        window: (center, count) for the iterative method.

    Returns:
        QuasienergySpectrum sorted by quasienergy.
    """
    if method == "dense":
        if F.dim > DENSE_LIMIT:
            raise ValueError(f"dense diagonalization limited to dim <= {DENSE_LIMIT}, got {F.dim}")
        e, v = np.linalg.eigh(F.toarray())
    elif method == "iterative":
        if window is None:
            raise ValueError("iterative method needs window=(center, count)")
        center, count = window
        count = int(min(count, F.dim - 2))
        try:
            e, v = eigsh(F.matrix.tocsc(), k=count, sigma=float(center), which="LM")
        except ArpackNoConvergence as exc:
            raise SpectrumError(f"eigensolver did not converge: {exc}") from exc
        order = np.argsort(e)
        e, v = e[order], v[:, order]
    else:
        raise ValueError(f"unknown method {method!r}")
    assignment, unassigned, ambiguous = _assign(np.abs(v) ** 2)
    if method == "iterative":
        # only states with appreciable weight in the window are meaningful
        weights = np.abs(v) ** 2
        assignment = {r: c for r, c in assignment.items() if weights[r, c] > 0.5}
        unassigned = [r for r in range(F.dim) if r not in assignment]
    return QuasienergySpectrum(F, e, v, assignment, unassigned, ambiguous)


# ---------------------------------------------------------------- propagators


def _spectrum_of(source) -> QuasienergySpectrum:
    if isinstance(source, QuasienergySpectrum):
        return source
    if isinstance(source, FloquetMatrix):
        return quasienergy_spectrum(source, "dense")
    raise TypeError(f"expected FloquetMatrix or QuasienergySpectrum, got {type(source).__name__}")


def floquet_propagator(source, t: float) -> np.ndarray:
    """U_F(t) = exp(-i H_F t) from the spectral decomposition."""
    spec = _spectrum_of(source)
    return (spec.vectors * np.exp(-1j * spec.energies * t)) @ spec.vectors.conj().T


def _zero_photon(F: FloquetMatrix) -> np.ndarray:
    return np.zeros(len(F.modes), dtype=int)


def transition_probability_time_avg(source, alpha: int, beta: int | None = None):
    """Time-averaged transition probability.

    P_bar = sum_{n, gamma m} |<<beta n|gamma m>>|^2 |<<gamma m|alpha 0>>|^2

    The truncated basis is complete, so the sum over final states is one by
    construction.  The leak check therefore counts only photon blocks strictly
    inside the truncation; weight on the outermost layer is treated as lost.

    Arguments:
        source: FloquetMatrix or QuasienergySpectrum (dense).
        alpha: initial qubit basis state.
        beta: final state; None returns the vector over all final states.
    """
    spec = _spectrum_of(source)
    F = spec.floquet
    d = F.qubit_dim
    start = np.abs(spec.vectors[F.index(alpha, _zero_photon(F)), :]) ** 2
    weights = (np.abs(spec.vectors) ** 2 @ start).reshape(-1, d)
    probs = weights.sum(axis=0)
    interior = np.all(np.abs(F.photon_grid) < F.truncations, axis=1)
    total = float(weights[interior].sum())
    if total < 0.999:
        warnings.warn(f"truncation leak: interior sum of probabilities {total:.6f}", TruncationWarning, stacklevel=2)
    return probs if beta is None else float(probs[beta])


def transition_probability_time_dep(source, alpha: int, beta: int, times: Iterable[float], coherent: bool = False) -> np.ndarray:
    """Transition probability alpha -> beta as a function of t - t0.

    Arguments:
        source: FloquetMatrix or QuasienergySpectrum (dense).
        alpha, beta: qubit basis states.
        times: elapsed times t - t0 (1/GHz).
        coherent: if False, the photon-resolved sum
            sum_n |<<beta n|U_F(t)|alpha 0>>|^2, which is the probability
            averaged over the initial time t0 and whose long-time mean is the
            time-averaged probability.  If True, the probability for t0 = 0,
            |sum_n exp(i n.omega t) <<beta n|U_F(t)|alpha 0>>|^2.
    """
    spec = _spectrum_of(source)
    F = spec.floquet
    times = np.atleast_1d(np.asarray(times, dtype=float))
    grid = F.photon_grid
    rows = np.arange(grid.shape[0]) * F.qubit_dim + beta
    coef = spec.vectors[F.index(alpha, _zero_photon(F)), :].conj()
    phases = np.exp(-1j * np.outer(spec.energies, times)) * coef[:, None]
    amps = spec.vectors[rows, :] @ phases
    if coherent:
        photon = np.exp(1j * np.outer(grid @ F.omegas, times))
        out = np.abs(np.sum(photon * amps, axis=0)) ** 2
    else:
        out = np.sum(np.abs(amps) ** 2, axis=0)
    return out


def evolve_state_floquet(source, psi0: np.ndarray, times: Iterable[float]) -> np.ndarray:
    """Physical state at each time from the Floquet propagator, shape (len(times), dim_q)."""
    spec = _spectrum_of(source)
    F = spec.floquet
    times = np.atleast_1d(np.asarray(times, dtype=float))
    d = F.qubit_dim
    grid = F.photon_grid
    start = np.zeros(F.dim, dtype=complex)
    z = F.index(0, _zero_photon(F))
    start[z : z + d] = np.asarray(psi0, dtype=complex)
    coef = spec.vectors.conj().T @ start
    out = np.zeros((times.size, d), dtype=complex)
    photon = np.exp(1j * np.outer(times, grid @ F.omegas))
    for k, t in enumerate(times):
        comp = spec.vectors @ (np.exp(-1j * spec.energies * t) * coef)
        out[k] = photon[k] @ comp.reshape(-1, d)
    return out


# ---------------------------------------------------------------- time-domain oracle


def time_dependent_hamiltonian(spec: CircuitSpec) -> Callable[[float], np.ndarray]:
    """H(t) evaluated directly from the circuit tones (no Fourier bookkeeping)."""
    reg = spec.register
    static = build_static_hamiltonian(spec)
    terms = []
    for d in spec.drives:
        sigma = pauli_matrix(d.axis.upper(), d.qubit, reg)
        for tone in d.tones:
            terms.append((tone.amplitude * sigma, tone.frequency, tone.phase))
    for pair, c in spec.couplings:
        if isinstance(c, SquidCoupler):
            h1 = c.h1_prime(pair, reg)
            for tone in c.tones:
                terms.append((2.0 * tone.amplitude * np.sin(c.phi_dc / 2.0) * h1, tone.frequency, tone.phase))
        elif not isinstance(c, CapacitiveCoupling):
            raise TypeError(f"unsupported coupling {c!r}")

    def H(t: float) -> np.ndarray:
        out = static.copy()
        for op, w, th in terms:
            out = out + np.cos(w * t + th) * op
        return out

    return H


def _hamiltonian_callable(system, mode_frequencies):
    if isinstance(system, CircuitSpec):
        return time_dependent_hamiltonian(system)
    if isinstance(system, FourierHamiltonian):
        if mode_frequencies is None:
            raise ValueError("mode_frequencies required for a FourierHamiltonian")
        return lambda t: system.evaluate(t, mode_frequencies)
    if callable(system):
        return system
    raise TypeError(f"cannot build H(t) from {type(system).__name__}")


def propagate_time_domain(
    system,
    psi0: np.ndarray,
    times: Iterable[float],
    rtol: float = 1e-10,
    atol: float = 1e-12,
    mode_frequencies: Sequence[float] | None = None,
) -> np.ndarray:
    """Integrate i d/dt psi = H(t) psi with an adaptive 8th-order Runge-Kutta scheme.

    Arguments:
        system: CircuitSpec, FourierHamiltonian (with mode_frequencies) or callable H(t).
        psi0: initial state.
        times: increasing output times starting at or after 0.
        rtol, atol: local error control.

    Returns:
        States at the requested times, shape (len(times), dim). The norm is not
        renormalized; drift above 1e-8 emits a warning.
    """
    H = _hamiltonian_callable(system, mode_frequencies)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    psi0 = np.asarray(psi0, dtype=complex)
    t0 = min(0.0, float(times[0]))
    sol = solve_ivp(
        lambda t, y: -1j * (H(t) @ y),
        (t0, float(times[-1])),
        psi0,
        method="DOP853",
        t_eval=times,
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise RuntimeError(f"time-domain integration failed: {sol.message}")
    states = sol.y.T
    drift = np.max(np.abs(np.linalg.norm(states, axis=1) - np.linalg.norm(psi0)))
    if drift > 1e-8:
        warnings.warn(f"norm drift {drift:.2e} exceeds 1e-8", RuntimeWarning, stacklevel=2)
    return states


# ---------------------------------------------------------------- sweeps


def parallel_map(func: Callable, items: Sequence, threads: int | None = None) -> list:
    """Map over items with a thread pool; results keep input order."""
    items = list(items)
    if threads is None or threads <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))
