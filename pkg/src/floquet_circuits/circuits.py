"""Circuit parameters to spin Hamiltonians and Fourier components.

All frequencies are in GHz using the quoted omega/(2 pi) values with hbar = 1.
Every formula is homogeneous of degree one in frequency, so no 2 pi factors
appear anywhere.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .fourier import FourierHamiltonian
from .operators import QubitRegister, number_operator, pauli_matrix, two_body


class RegimeWarning(UserWarning):
    """Parameters outside the regime where the two-level model is accurate."""


class CommensurabilityError(ValueError):
    """Drive modes are commensurate or a tone cannot be expressed in them."""


# ---------------------------------------------------------------- transmon


@dataclass(frozen=True)
class TransmonParams:
    """Transmon energies and derived two-level quantities.

    Arguments:
        E_J: Josephson energy (GHz).
        E_C: charging energy (GHz).
    """

    E_J: float
    E_C: float

    @property
    def phi_bar(self) -> float:
        return (self.E_C / (2.0 * self.E_J)) ** 0.25

    @property
    def U(self) -> float:
        return -self.E_J * self.phi_bar**4 / 4.0

    @property
    def omega(self) -> float:
        return float(np.sqrt(2.0 * self.E_J * self.E_C) + 2.0 * self.U)


def quantize_transmon(E_J: float, E_C: float) -> TransmonParams:
    """Two-level reduction of a transmon.

    Arguments:
        E_J: Josephson energy in GHz, positive.
        E_C: charging energy in GHz, positive.

    Returns:
        TransmonParams with omega = sqrt(2 E_J E_C) + 2U and U = -E_J phi_bar^4 / 4.
    """
    if not (E_J > 0 and E_C > 0):
        raise ValueError(f"E_J and E_C must be positive, got {E_J}, {E_C}")
    if E_J / E_C < 20:
        warnings.warn(f"E_J/E_C = {E_J / E_C:.3g} is below the transmon regime (20)", RegimeWarning, stacklevel=2)
    return TransmonParams(float(E_J), float(E_C))


def capacitive_g(E_cc: float, phi_bar_1: float, phi_bar_2: float) -> float:
    """g_c = -E_cc / (4 phi_bar_1 phi_bar_2)."""
    return -E_cc / (4.0 * phi_bar_1 * phi_bar_2)


@dataclass(frozen=True)
class Qubit:
    """A qubit given directly by its transition frequency."""

    omega: float
    U: float | None = None


# ---------------------------------------------------------------- couplings and drives


@dataclass(frozen=True)
class Tone:
    """One drive tone: amplitude * cos(frequency t + phase).

    For qubit drives the amplitude is b in GHz; for SQUID couplers it is phi_ac in radians.
    """

    amplitude: float
    frequency: float
    phase: float = 0.0


@dataclass(frozen=True)
class CapacitiveCoupling:
    """Static g_c sigma^y sigma^y coupling."""

    g_c: float

    def __post_init__(self):
        if not np.isfinite(self.g_c):
            raise ValueError("g_c must be finite")


@dataclass(frozen=True)
class SquidCoupler:
    """Flux-driven dc-SQUID coupler.

    The coupler energy is cos(phi_ext/2) H1' with
    H1' = g_1 n_1 + g_2 n_2 + g_x XX + g_z ZZ, linearized around phi_dc so that
    each tone contributes phi_ac exp(i theta) sin(phi_dc/2) H1' at its frequency.

    Arguments:
        g_x, g_z, g_1, g_2: coupler constants (GHz).
        phi_dc: static flux bias (radians).
        tones: flux tones, amplitude = phi_ac (radians).
        include_capacitive_yy: keep a residual g_c sigma^y sigma^y term.
        g_c: residual capacitive coupling used when the flag is set.
    """

    g_x: float
    g_z: float = 0.0
    g_1: float = 0.0
    g_2: float = 0.0
    phi_dc: float = np.pi
    tones: tuple = ()
    include_capacitive_yy: bool = False
    g_c: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "tones", tuple(self.tones))
        for tone in self.tones:
            if abs(tone.amplitude) > 0.3:
                warnings.warn(
                    f"phi_ac = {tone.amplitude} is not small; flux linearization is inaccurate",
                    RegimeWarning,
                    stacklevel=3,
                )

    def h1_prime(self, pair: tuple, register: QubitRegister) -> np.ndarray:
        i, j = pair
        return (
            self.g_1 * number_operator(i, register)
            + self.g_2 * number_operator(j, register)
            + self.g_x * two_body("X", i, "X", j, register)
            + self.g_z * two_body("Z", i, "Z", j, register)
        )


@dataclass(frozen=True)
class DriveSpec:
    """Qubit drive F(t) sigma^axis with F(t) = sum_k b_k cos(omega_k t + theta_k)."""

    qubit: int
    axis: str
    tones: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "tones", tuple(self.tones))
        if self.axis not in ("x", "y", "z"):
            raise ValueError(f"drive axis must be x, y or z, got {self.axis!r}")
        for tone in self.tones:
            if not np.isreal(tone.amplitude):
                raise ValueError("drive amplitudes must be real")
            if not tone.frequency > 0:
                raise ValueError(f"tone frequency must be positive, got {tone.frequency}")


Coupling = Union[CapacitiveCoupling, SquidCoupler]


@dataclass(frozen=True)
class CircuitSpec:
    """A driven multi-qubit circuit.

    Arguments:
        qubits: TransmonParams, Qubit or bare frequencies in GHz.
        couplings: sequence of ((i, j), coupling) with 0-based qubit indices.
        drives: qubit drives.
    """

    qubits: tuple
    couplings: tuple = ()
    drives: tuple = ()

    def __post_init__(self):
        qubits = tuple(Qubit(float(q)) if isinstance(q, (int, float)) else q for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "couplings", tuple((tuple(p), c) for p, c in self.couplings))
        object.__setattr__(self, "drives", tuple(self.drives))
        if not qubits:
            raise ValueError("a circuit needs at least one qubit")
        seen = set()
        for (i, j), coupling in self.couplings:
            if i == j or not (0 <= i < len(qubits) and 0 <= j < len(qubits)):
                raise ValueError(f"invalid coupling pair ({i}, {j})")
            key = frozenset((i, j))
            if key in seen:
                raise ValueError(f"more than one coupler on pair ({i}, {j})")
            seen.add(key)
            if not isinstance(coupling, (CapacitiveCoupling, SquidCoupler)):
                raise TypeError(f"unsupported coupling {coupling!r}")
        for d in self.drives:
            if not 0 <= d.qubit < len(qubits):
                raise ValueError(f"drive targets missing qubit {d.qubit}")

    @property
    def register(self) -> QubitRegister:
        return QubitRegister(len(self.qubits))

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([q.omega for q in self.qubits], dtype=float)

    def tone_frequencies(self) -> list[float]:
        freqs = [t.frequency for d in self.drives for t in d.tones]
        for _, c in self.couplings:
            if isinstance(c, SquidCoupler):
                freqs += [t.frequency for t in c.tones]
        return freqs

    def without_drives(self) -> "CircuitSpec":
        couplings = []
        for pair, c in self.couplings:
            if isinstance(c, SquidCoupler):
                c = SquidCoupler(c.g_x, c.g_z, c.g_1, c.g_2, c.phi_dc, (), c.include_capacitive_yy, c.g_c)
            couplings.append((pair, c))
        return CircuitSpec(self.qubits, tuple(couplings), ())


# ---------------------------------------------------------------- Hamiltonians


def bare_hamiltonian(spec: CircuitSpec) -> np.ndarray:
    """H0 = sum_j omega_j n_j."""
    reg = spec.register
    return sum(q.omega * number_operator(j, reg) for j, q in enumerate(spec.qubits))


def build_static_hamiltonian(spec: CircuitSpec) -> np.ndarray:
    """Time-independent part of H(t).

    Arguments:
        spec: circuit description.

    Returns:
        sum_j omega_j n_j + sum g_c YY + sum cos(phi_dc/2) H1' over SQUID couplers.
    """
    reg = spec.register
    H = bare_hamiltonian(spec).astype(complex)
    for pair, c in spec.couplings:
        i, j = pair
        if isinstance(c, CapacitiveCoupling):
            H += c.g_c * two_body("Y", i, "Y", j, reg)
        else:
            H += np.cos(c.phi_dc / 2.0) * c.h1_prime(pair, reg)
            if c.include_capacitive_yy:
                H += c.g_c * two_body("Y", i, "Y", j, reg)
    return H


def _combinations(n_modes: int, max_coefficient: int):
    rng = range(-max_coefficient, max_coefficient + 1)
    return np.array(list(itertools.product(rng, repeat=n_modes)), dtype=int)


def check_incommensurate(mode_frequencies: Sequence[float], max_coefficient: int = 4, rtol: float = 1e-9) -> None:
    """Raise CommensurabilityError if sum c_i omega_i = 0 for a nonzero c with |c_i| <= max_coefficient."""
    omega = np.asarray(mode_frequencies, dtype=float)
    if omega.size == 0:
        return
    if np.any(omega <= 0):
        raise CommensurabilityError("mode frequencies must be positive")
    combos = _combinations(omega.size, max_coefficient)
    combos = combos[np.any(combos != 0, axis=1)]
    vals = combos @ omega
    hit = np.abs(vals) <= rtol * np.max(omega)
    if np.any(hit):
        c = combos[np.argmax(hit)]
        raise CommensurabilityError(f"modes {omega.tolist()} are commensurate: coefficients {c.tolist()}")


def resolve_tone_key(frequency: float, mode_frequencies: Sequence[float], max_coefficient: int = 4, rtol: float = 1e-9) -> tuple:
    """Integer multi-index n with n.omega == frequency.

    Raises CommensurabilityError if no combination (or more than one) matches.
    """
    omega = np.asarray(mode_frequencies, dtype=float)
    combos = _combinations(omega.size, max_coefficient)
    vals = combos @ omega
    hit = np.flatnonzero(np.abs(vals - frequency) <= rtol * max(abs(frequency), np.max(omega)))
    if hit.size == 0:
        raise CommensurabilityError(f"tone at {frequency} GHz is not an integer combination of modes {omega.tolist()}")
    if hit.size > 1:
        raise CommensurabilityError(f"tone at {frequency} GHz matches several mode combinations")
    return tuple(int(v) for v in combos[hit[0]])


def build_fourier_components(
    spec: CircuitSpec, mode_frequencies: Sequence[float], max_coefficient: int = 4, rtol: float = 1e-9
) -> FourierHamiltonian:
    """Fourier components H^(n) of H(t) on the declared drive modes.

    Arguments:
        spec: circuit description.
        mode_frequencies: incommensurate base frequencies; each tone must be an
            integer combination of them with coefficients bounded by max_coefficient.

    Returns:
        FourierHamiltonian with H^(0) = static part, (b/2) e^{i theta} sigma^a per
        qubit tone, phi_ac e^{i theta} sin(phi_dc/2) H1' per coupler tone, and the
        adjoint at every negated key.
    """
    modes = [float(w) for w in mode_frequencies]
    check_incommensurate(modes, max_coefficient, rtol)
    reg = spec.register
    fh = FourierHamiltonian(len(modes), reg.dim, np.real(np.diag(bare_hamiltonian(spec))))
    fh[fh.zero_key] = build_static_hamiltonian(spec)
    for d in spec.drives:
        sigma = pauli_matrix(d.axis.upper(), d.qubit, reg)
        for tone in d.tones:
            if tone.amplitude == 0:
                continue
            key = resolve_tone_key(tone.frequency, modes, max_coefficient, rtol)
            fh.add(key, 0.5 * tone.amplitude * np.exp(1j * tone.phase) * sigma)
    for pair, c in spec.couplings:
        if not isinstance(c, SquidCoupler):
            continue
        h1 = c.h1_prime(pair, reg)
        for tone in c.tones:
            if tone.amplitude == 0:
                continue
            key = resolve_tone_key(tone.frequency, modes, max_coefficient, rtol)
            fh.add(key, tone.amplitude * np.exp(1j * tone.phase) * np.sin(c.phi_dc / 2.0) * h1)
    return fh


def parity_operator(register: QubitRegister) -> np.ndarray:
    """Pi = prod_j sigma_j^z."""
    out = np.eye(register.dim, dtype=complex)
    for j in range(register.n_qubits):
        out = out @ pauli_matrix("Z", j, register)
    return out
