"""Ready-made two-qubit working points.

Amplitudes here follow the tables' convention: a drive of strength b enters
every Fourier component with its full value b, i.e. the physical tone is
F(t) = 2 b cos(omega_d t + theta).  The builders therefore pass 2 b as the
tone amplitude of the underlying DriveSpec.  The same holds for the
capacitive coupling, which enters as g_c sigma^y sigma^y.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuits import CapacitiveCoupling, CircuitSpec, DriveSpec, SquidCoupler, Tone, build_fourier_components
from .floquet import FloquetMatrix, ModeSpec, apply_rotating_frame, assemble_floquet_matrix
from .salwen import SlowManifold, identify_slow_manifold


@dataclass(frozen=True)
class Scheme:
    """A circuit at a working point together with its Floquet bookkeeping.

    Attributes:
        name: scheme identifier.
        circuit: the driven circuit.
        modes: drive-mode frequencies (GHz).
        frame: per-qubit rotating-frame frequencies.
        truncation: default Fourier truncation per mode.
    """

    name: str
    circuit: CircuitSpec
    modes: tuple
    frame: tuple
    truncation: int = 8

    def floquet(self, truncation: int | None = None) -> FloquetMatrix:
        N = self.truncation if truncation is None else truncation
        fh = build_fourier_components(self.circuit, self.modes)
        F = assemble_floquet_matrix(fh, [ModeSpec(w, N) for w in self.modes])
        return apply_rotating_frame(F, self.frame)

    def manifold(self, F: FloquetMatrix | None = None, gap_min: float = 0.05) -> SlowManifold:
        return identify_slow_manifold(self.floquet() if F is None else F, gap_min=gap_min)


def single_mode(
    name: str, w1: float, w2: float, g_c: float, b: float, axis: str, omega_d: float, frame, theta: float = 0.0, truncation: int = 8
) -> Scheme:
    """Two capacitively coupled qubits, qubit 0 driven by one tone."""
    circuit = CircuitSpec(
        (w1, w2),
        (((0, 1), CapacitiveCoupling(g_c)),),
        (DriveSpec(0, axis, (Tone(2.0 * b, omega_d, theta),)),),
    )
    return Scheme(name, circuit, (omega_d,), tuple(float(f) for f in frame), truncation)


def zx_scheme(w1: float, w2: float, b: float, eta: float, theta: float = 0.0, truncation: int = 8) -> Scheme:
    """Transverse drive at omega_d = omega_2: J_zx sigma_1^z sigma_2^x (sigma^y for theta = pi/2)."""
    return single_mode("zx", w1, w2, eta * b, b, "x", w2, (w1, 0.0), theta, truncation)


def squeezing_scheme(w1: float, w2: float, b: float, g_c: float, theta: float = 0.0, truncation: int = 8) -> Scheme:
    """Longitudinal drive at omega_1 + omega_2: J_s sigma^+ sigma^+ + h.c."""
    return single_mode("squeezing", w1, w2, g_c, b, "z", w1 + w2, (-w2, w2), theta, truncation)


def hopping_scheme(w1: float, w2: float, b: float, g_c: float, theta: float = 0.0, truncation: int = 8) -> Scheme:
    """Longitudinal drive at omega_1 - omega_2: J_h sigma^+ sigma^- + h.c."""
    return single_mode("hopping", w1, w2, g_c, b, "z", w1 - w2, (w2, w2), theta, truncation)


def multiphoton_scheme(k: int, kind: str, w1: float, w2: float, b: float, g_c: float, axis: str = "x", truncation: int = 12) -> Scheme:
    """k-photon working points: kind "squeezing" at (omega_1 + omega_2)/k, "zx" at omega_2/k."""
    if k < 1:
        raise ValueError("k must be positive")
    if kind == "squeezing":
        return single_mode(f"squeezing_k{k}", w1, w2, g_c, b, axis, (w1 + w2) / k, (-w2, w2), 0.0, truncation)
    if kind == "zx":
        return single_mode(f"zx_k{k}", w1, w2, g_c, b, axis, w2 / k, (w1, 0.0), 0.0, truncation)
    raise ValueError(f"unknown multiphoton scheme {kind!r}")


def bimodal_scheme(
    w1: float,
    w2: float,
    b: float,
    eta: dict,
    axis: str,
    g_c: float | None = None,
    theta: dict | None = None,
    truncation: int = 5,
) -> Scheme:
    """Both qubits driven at omega_1 + omega_2 and omega_1 - omega_2.

    Arguments:
        eta: amplitude ratios keyed (qubit, tone) with qubit in {1, 2} and
            tone 1 for the sum and 2 for the difference frequency, so that
            b_ij = eta[(i, j)] * b.
        axis: "z" for the longitudinal (XX/YY) scheme, "x" for the transverse (ZZ) scheme.
        g_c: capacitive coupling; defaults to b.
        theta: optional phases keyed like eta.

    The modes are the qubit frequencies themselves; the tones sit at the keys (1, 1) and (1, -1).
    """
    if w1 <= w2:
        raise ValueError("bimodal scheme expects omega_1 > omega_2")
    g_c = b if g_c is None else g_c
    theta = theta or {}
    drives = []
    for q in (1, 2):
        tones = []
        for j, freq in ((1, w1 + w2), (2, w1 - w2)):
            amp = eta.get((q, j), 0.0) * b
            if amp != 0.0:
                tones.append(Tone(2.0 * amp, freq, theta.get((q, j), 0.0)))
        if tones:
            drives.append(DriveSpec(q - 1, axis, tuple(tones)))
    circuit = CircuitSpec((w1, w2), (((0, 1), CapacitiveCoupling(g_c)),), tuple(drives))
    return Scheme("bimodal_" + axis, circuit, (w1, w2), (0.0, 0.0), truncation)


def coupler_scheme(
    w1: float,
    w2: float,
    g_x: float,
    g_1: float,
    g_2: float,
    g_z: float,
    phi_ac: float,
    theta: float = 0.0,
    phi_ac_2: float | None = None,
    truncation: int = 4,
) -> Scheme:
    """Two qubits coupled by a SQUID biased at pi and flux-driven at omega_1 -+ omega_2."""
    phi_ac_2 = phi_ac if phi_ac_2 is None else phi_ac_2
    lo, hi = sorted((w1, w2))
    coupler = SquidCoupler(
        g_x, g_z, g_1, g_2, np.pi, (Tone(phi_ac, hi - lo, theta), Tone(phi_ac_2, w1 + w2, 0.0))
    )
    circuit = CircuitSpec((w1, w2), (((0, 1), coupler),))
    return Scheme("coupler", circuit, (w1, w2), (0.0, 0.0), truncation)


def table1_scheme(truncation: int = 8) -> Scheme:
    """omega_1 = 12, omega_2 = omega_d = 9 GHz, b = 0.25 GHz, eta = 1.2."""
    return zx_scheme(12.0, 9.0, 0.25, 1.2, truncation=truncation)


def table2_scheme(truncation: int = 5) -> Scheme:
    """omega_1 = 12, omega_2 = 8.5 GHz, b = g_c = 0.3 GHz, eta_11 = eta_21 = 0.75, eta_12 = 0.256, eta_22 = 0."""
    eta = {(1, 1): 0.75, (2, 1): 0.75, (1, 2): 0.256, (2, 2): 0.0}
    return bimodal_scheme(12.0, 8.5, 0.3, eta, "z", truncation=truncation)


def table3_scheme(truncation: int = 10) -> Scheme:
    """Two-photon squeezing: omega_1 = 11, omega_2 = 9 GHz, b = 0.12 GHz, eta = 1.5, omega_d = 10 GHz."""
    return multiphoton_scheme(2, "squeezing", 11.0, 9.0, 0.12, 0.18, "x", truncation)
