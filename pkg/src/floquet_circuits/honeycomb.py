"""Drive schedules for the Kitaev honeycomb model and four-qubit module checks.

Lattice conventions: every xx or yy edge is stored as (left, right).  In the
driven-qubit scheme the left qubit carries the sum-frequency tone and the
right qubit the difference-frequency tone of that edge, so each qubit needs at
most two tones.  In the driven-coupler scheme the edge's SQUID carries both
tones.  zz edges are static SQUIDs in both schemes.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace

import numpy as np

from .circuits import CapacitiveCoupling, CircuitSpec, DriveSpec, SquidCoupler, Tone
from .floquet import FloquetMatrix
from .operators import PauliDecomposition
from .salwen import EffectiveSpinHamiltonian, SlowManifold, effective_hamiltonian
from .schemes import Scheme

LINK_TYPES = ("xx", "yy", "zz")
SCHEME_TYPES = ("driven_qubit", "driven_coupler")


class LatticeError(ValueError):
    """Invalid lattice, orientation conflict or infeasible frequency pattern."""


class ScheduleError(ValueError):
    """A drive schedule violates an amplitude bound or cannot be built."""


# ---------------------------------------------------------------- lattice


@dataclass(frozen=True)
class Edge:
    """Lattice link; for xx/yy the first vertex is the left one."""

    left: int
    right: int
    link: str

    @property
    def pair(self) -> tuple:
        return (self.left, self.right)


@dataclass(frozen=True)
class HoneycombLattice:
    """Spin lattice with typed links.

    Attributes:
        vertices: qubit ids.
        classes: vertex id -> frequency-class tag.
        edges: typed links.
    """

    vertices: tuple
    classes: dict
    edges: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(int(v) for v in self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise LatticeError("duplicate vertex ids")
        if set(self.classes) != vs:
            raise LatticeError("every vertex needs exactly one frequency class")
        seen_pairs = set()
        used = {v: set() for v in self.vertices}
        role = {v: set() for v in self.vertices}
        for e in self.edges:
            if e.link not in LINK_TYPES:
                raise LatticeError(f"unknown link type {e.link!r}")
            if e.left not in vs or e.right not in vs or e.left == e.right:
                raise LatticeError(f"invalid edge {e.pair}")
            key = frozenset(e.pair)
            if key in seen_pairs:
                raise LatticeError(f"duplicate edge {e.pair}")
            seen_pairs.add(key)
            for v in e.pair:
                if e.link in used[v]:
                    raise LatticeError(f"vertex {v} has two {e.link} links")
                used[v].add(e.link)
            if e.link == "zz" and self.classes[e.left] == self.classes[e.right]:
                raise LatticeError(f"zz edge {e.pair} joins vertices of the same frequency class")
            if e.link != "zz":
                for v, r in ((e.left, "left"), (e.right, "right")):
                    if r in role[v]:
                        raise LatticeError(f"orientation conflict: vertex {v} is the {r} end of two xx/yy edges")
                    role[v].add(r)

    def degree(self, v: int) -> int:
        return sum(v in e.pair for e in self.edges)

    def neighbors(self, v: int) -> list[int]:
        return [e.right if e.left == v else e.left for e in self.edges if v in e.pair]

    def edges_of(self, v: int) -> list[Edge]:
        return [e for e in self.edges if v in e.pair]

    def next_nearest_pairs(self) -> set:
        """Vertex pairs sharing a common neighbor."""
        out = set()
        for v in self.vertices:
            for a, b in itertools.combinations(sorted(self.neighbors(v)), 2):
                out.add((a, b))
        return out

    def flipped(self) -> "HoneycombLattice":
        """Same lattice with the left/right convention reversed on every xx/yy edge."""
        edges = tuple(e if e.link == "zz" else Edge(e.right, e.left, e.link) for e in self.edges)
        return HoneycombLattice(self.vertices, dict(self.classes), edges)

    def star(self, center: int) -> "HoneycombLattice":
        """Module made of `center`, its neighbors and the edges touching `center`."""
        vs = (center, *self.neighbors(center))
        return HoneycombLattice(vs, {v: self.classes[v] for v in vs}, tuple(self.edges_of(center)))

    def to_dict(self) -> dict:
        return {
            "vertices": [{"id": v, "class": self.classes[v]} for v in self.vertices],
            "edges": [{"left": e.left, "right": e.right, "link": e.link} for e in self.edges],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "HoneycombLattice":
        vertices = [int(v["id"]) for v in doc["vertices"]]
        classes = {int(v["id"]): str(v["class"]) for v in doc["vertices"]}
        edges = tuple(Edge(int(e["left"]), int(e["right"]), str(e["link"])) for e in doc["edges"])
        return cls(tuple(vertices), classes, edges)


def brick_wall(rows: int, cols: int) -> HoneycombLattice:
    """Honeycomb lattice in brick-wall layout.

    Rows are zigzag chains with alternating xx and yy links; zz rungs join
    site (r, c) to (r + 1, c) whenever r + c is even.  Vertex id is r * cols + c
    and the frequency class alternates like a checkerboard.
    """
    if rows < 1 or cols < 1:
        raise LatticeError("rows and cols must be positive")
    vid = lambda r, c: r * cols + c
    vertices = tuple(vid(r, c) for r in range(rows) for c in range(cols))
    classes = {vid(r, c): "A" if (r + c) % 2 == 0 else "B" for r in range(rows) for c in range(cols)}
    edges = []
    for r in range(rows):
        for c in range(cols - 1):
            edges.append(Edge(vid(r, c), vid(r, c + 1), "xx" if c % 2 == 0 else "yy"))
    for r in range(rows - 1):
        for c in range(cols):
            if (r + c) % 2 == 0:
                edges.append(Edge(vid(r, c), vid(r + 1, c), "zz"))
    return HoneycombLattice(vertices, classes, tuple(edges))


def plaquette() -> HoneycombLattice:
    """Single hexagon: six vertices, two links of each type."""
    return brick_wall(2, 3)


def four_qubit_module() -> HoneycombLattice:
    """Central qubit 0 with an xx neighbor 1, a yy neighbor 2 and a zz neighbor 3.

    Qubit 0 is the left end of the xx link and the right end of the yy link.
    """
    edges = (Edge(0, 1, "xx"), Edge(2, 0, "yy"), Edge(0, 3, "zz"))
    return HoneycombLattice((0, 1, 2, 3), {0: "A", 1: "B", 2: "B", 3: "B"}, edges)


def kitaev_target_hamiltonian(lattice: HoneycombLattice, J: dict) -> PauliDecomposition:
    """Target Hamiltonian sum over links of J_link sigma^a sigma^a.

    Arguments:
        lattice: spin lattice; qubit positions follow lattice.vertices.
        J: coupling per link type, or per edge pair (left, right) to override.

    Returns:
        PauliDecomposition keyed by Pauli strings over the lattice qubits.
    """
    n = len(lattice.vertices)
    pos = {v: k for k, v in enumerate(lattice.vertices)}
    out = PauliDecomposition(n_qubits=n)
    for e in lattice.edges:
        value = J.get(e.pair, J.get(e.link, 0.0))
        if value == 0:
            continue
        lab = ["I"] * n
        lab[pos[e.left]] = lab[pos[e.right]] = e.link[0].upper()
        key = "".join(lab)
        out[key] = out.get(key, 0.0) + float(value)
    return out


# ---------------------------------------------------------------- frequencies


@dataclass(frozen=True)
class FrequencyAssignment:
    """Qubit transition frequencies (GHz) with the detuning rules they satisfy."""

    frequencies: dict
    delta_nn: float
    delta_nnn: float

    def __getitem__(self, v: int) -> float:
        return self.frequencies[v]

    def as_tuple(self, order) -> tuple:
        return tuple(self.frequencies[v] for v in order)


def assign_frequencies(
    lattice: HoneycombLattice, pattern: dict, delta_nn: float, delta_nnn: float, order=None
) -> FrequencyAssignment:
    """Deterministic banded frequency assignment.

    Arguments:
        lattice: spin lattice.
        pattern: frequency class -> candidate frequencies, tried in the given order.
        delta_nn: minimum detuning between linked qubits.
        delta_nnn: minimum detuning between qubits sharing a common neighbor.
        order: vertex visiting order; defaults to lattice.vertices.

    Returns:
        FrequencyAssignment taking, per vertex, the first admissible candidate.
    """
    order = tuple(lattice.vertices if order is None else order)
    nn = {frozenset(e.pair) for e in lattice.edges}
    nnn = {frozenset(p) for p in lattice.next_nearest_pairs()}
    freqs: dict = {}
    for v in order:
        cands = pattern.get(lattice.classes[v])
        if cands is None:
            raise LatticeError(f"no candidate frequencies for class {lattice.classes[v]!r}")
        for f in cands:
            ok = True
            for u, fu in freqs.items():
                pair = frozenset((u, v))
                if pair in nn and abs(f - fu) < delta_nn - 1e-12:
                    ok = False
                elif pair in nnn and abs(f - fu) < delta_nnn - 1e-12:
                    ok = False
                if not ok:
                    break
            if ok:
                freqs[v] = float(f)
                break
        else:
            raise LatticeError(f"no admissible frequency for vertex {v} within its band")
    return FrequencyAssignment(freqs, float(delta_nn), float(delta_nnn))


def check_frequencies(lattice: HoneycombLattice, frequencies: dict, delta_nn: float, delta_nnn: float) -> FrequencyAssignment:
    """Validate explicitly chosen frequencies against the detuning rules.

    Raises:
        LatticeError naming the first violating pair.
    """
    missing = set(lattice.vertices) - set(frequencies)
    if missing:
        raise LatticeError(f"no frequency for vertices {sorted(missing)}")
    for e in lattice.edges:
        if abs(frequencies[e.left] - frequencies[e.right]) < delta_nn - 1e-12:
            raise LatticeError(f"linked qubits {e.pair} detuned by less than {delta_nn} GHz")
    for a, b in sorted(lattice.next_nearest_pairs()):
        if abs(frequencies[a] - frequencies[b]) < delta_nnn - 1e-12:
            raise LatticeError(f"qubits {a}, {b} share a neighbor and are detuned by less than {delta_nnn} GHz")
    return FrequencyAssignment({v: float(frequencies[v]) for v in lattice.vertices}, float(delta_nn), float(delta_nnn))


# ---------------------------------------------------------------- schedules


@dataclass(frozen=True)
class ScheduledTone:
    """One drive tone of a schedule.

    Attributes:
        carrier: qubit id (driven-qubit scheme) or edge pair (driven-coupler scheme).
        edge: the lattice edge the tone serves.
        role: "sum" or "difference".
        frequency: GHz.
        amplitude: drive amplitude b in GHz, or flux amplitude phi_ac in radians.
        phase: radians.
    """

    carrier: object
    edge: tuple
    role: str
    frequency: float
    amplitude: float
    phase: float = 0.0


@dataclass(frozen=True)
class DriveSchedule:
    """Compiled drives and static couplers for a lattice.

    Attributes:
        scheme: "driven_qubit" or "driven_coupler".
        assignment: qubit frequencies.
        tones: scheduled tones.
        zz_g_z: static SQUID g_z per zz edge.
        params: circuit constants (g_c, coupler g's, zz-link g_x).
    """

    scheme: str
    assignment: FrequencyAssignment
    tones: tuple
    zz_g_z: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    def tones_on(self, carrier) -> list[ScheduledTone]:
        return [t for t in self.tones if t.carrier == carrier]

    def tones_for(self, edge: tuple) -> list[ScheduledTone]:
        return [t for t in self.tones if t.edge == tuple(edge)]

    def max_tones_per_qubit(self) -> int:
        if self.scheme != "driven_qubit" or not self.tones:
            return 0
        counts: dict = {}
        for t in self.tones:
            counts[t.carrier] = counts.get(t.carrier, 0) + 1
        return max(counts.values())

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "frequencies_GHz_over_2pi": {str(k): v for k, v in sorted(self.assignment.frequencies.items())},
            "tones": [
                {
                    "carrier": t.carrier if isinstance(t.carrier, int) else list(t.carrier),
                    "edge": list(t.edge),
                    "role": t.role,
                    "frequency_GHz_over_2pi": t.frequency,
                    "amplitude": t.amplitude,
                    "amplitude_unit": "GHz_over_2pi" if self.scheme == "driven_qubit" else "rad",
                    "phase_rad": t.phase,
                }
                for t in self.tones
            ],
            "zz_g_z_GHz_over_2pi": {f"{a}-{b}": g for (a, b), g in sorted(self.zz_g_z.items())},
            "params": dict(self.params),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def table(self) -> str:
        """Human-readable tone table."""
        unit = "GHz" if self.scheme == "driven_qubit" else "rad"
        lines = [f"{'carrier':>10} {'edge':>8} {'role':>10} {'f (GHz)':>10} {'amp (' + unit + ')':>12} {'phase':>7}"]
        for t in self.tones:
            carrier = str(t.carrier) if isinstance(t.carrier, int) else "-".join(map(str, t.carrier))
            lines.append(
                f"{carrier:>10} {'-'.join(map(str, t.edge)):>8} {t.role:>10} {t.frequency:>10.4f} {t.amplitude:>12.6f} {t.phase:>7.4f}"
            )
        for (a, b), g in sorted(self.zz_g_z.items()):
            lines.append(f"{'zz':>10} {f'{a}-{b}':>8} {'static':>10} {'':>10} {g:>12.6f} {'':>7}")
        return "\n".join(lines)


DEFAULT_PARAMS = {
    "driven_qubit": {"g_c": 0.2, "zz_g_x": 0.2, "max_amplitude": 0.5},
    "driven_coupler": {"g_x": 0.3, "g_j": 0.15, "g_z": 0.01, "zz_g_x": 0.2, "max_amplitude": 0.3},
}


def _leading_schedule(lattice, assignment, targets, scheme, params) -> DriveSchedule:
    tones, zz = [], {}
    w = assignment.frequencies
    for e in lattice.edges:
        J = float(targets.get(e.pair, targets.get(e.link, 0.0)))
        if J == 0.0:
            continue
        if e.link == "zz":
            zz[e.pair] = J
            continue
        wi, wj = w[e.left], w[e.right]
        if scheme == "driven_qubit":
            r = J / (2.0 * params["g_c"])
            sign = 1.0 if e.link == "xx" else -1.0
            tones.append(ScheduledTone(e.left, e.pair, "sum", wi + wj, r * (wi + wj)))
            tones.append(ScheduledTone(e.right, e.pair, "difference", abs(wi - wj), sign * r * (wi - wj)))
        else:
            phi = J / params["g_x"]
            theta = 0.0 if e.link == "xx" else np.pi
            tones.append(ScheduledTone(e.pair, e.pair, "difference", abs(wi - wj), phi, theta))
            tones.append(ScheduledTone(e.pair, e.pair, "sum", wi + wj, phi, 0.0))
    return DriveSchedule(scheme, assignment, tuple(tones), zz, dict(params))


def _check_bounds(schedule: DriveSchedule) -> None:
    bound = schedule.params["max_amplitude"]
    for t in schedule.tones:
        if abs(t.amplitude) > bound:
            raise ScheduleError(f"tone {t.role} on {t.carrier} needs amplitude {t.amplitude:.4g} above bound {bound}")


def compile_drive_schedule(
    lattice: HoneycombLattice,
    assignment: FrequencyAssignment,
    targets: dict,
    scheme: str = "driven_qubit",
    params: dict | None = None,
    refine: bool = True,
    order: int = 4,
    truncation: int = 4,
) -> DriveSchedule:
    """Drive schedule realizing target couplings.

    Arguments:
        lattice: spin lattice.
        assignment: qubit frequencies.
        targets: J per link type ("xx", "yy", "zz") or per edge pair, GHz.
        scheme: "driven_qubit" or "driven_coupler".
        params: circuit constants overriding DEFAULT_PARAMS[scheme].
        refine: apply one corrective rescaling from the Salwen-engine result.
        order, truncation: Salwen order and Fourier truncation for refinement.

    Returns:
        DriveSchedule.  Driven-qubit amplitudes satisfy
        b_sum/(w_l + w_r) = +-b_diff/(w_l - w_r) (+ for xx, - for yy) exactly.
    """
    if scheme not in SCHEME_TYPES:
        raise ScheduleError(f"unknown scheme {scheme!r}")
    p = dict(DEFAULT_PARAMS[scheme])
    p.update(params or {})
    schedule = _leading_schedule(lattice, assignment, targets, scheme, p)
    if refine and (schedule.tones or schedule.zz_g_z):
        schedule = _refine(lattice, schedule, targets, order, truncation)
    _check_bounds(schedule)
    return schedule


def _refine(lattice, schedule, targets, order, truncation) -> DriveSchedule:
    """One secant step through the origin per edge: amplitude *= J_target / J_computed."""
    factors: dict = {}
    done: set = set()
    for e in lattice.edges:
        if e.pair in done:
            continue
        center = max(e.pair, key=lambda v: (lattice.degree(v), v == e.left))
        scheme = module_scheme(lattice, schedule, center, truncation)
        heff = module_effective_hamiltonian(scheme, order)
        for me in lattice.edges_of(center):
            if me.pair in done:
                continue
            target = float(targets.get(me.pair, targets.get(me.link, 0.0)))
            if target == 0.0:
                done.add(me.pair)
                continue
            got = edge_coupling(heff, _module_qubits(lattice, center), me)
            if abs(got) < 1e-12:
                raise ScheduleError(f"edge {me.pair} produced no {me.link} coupling; cannot refine")
            factors[me.pair] = abs(target / got)
            done.add(me.pair)
    tones = tuple(replace(t, amplitude=t.amplitude * factors.get(t.edge, 1.0)) for t in schedule.tones)
    zz = {k: g * factors.get(k, 1.0) for k, g in schedule.zz_g_z.items()}
    return replace(schedule, tones=tones, zz_g_z=zz)


# ---------------------------------------------------------------- modules


def _module_qubits(lattice: HoneycombLattice, center: int) -> tuple:
    if lattice.degree(center) == 0:
        raise LatticeError(f"vertex {center} has no links")
    return (center, *lattice.neighbors(center))


def build_module_hamiltonian(lattice: HoneycombLattice, schedule: DriveSchedule, center: int) -> CircuitSpec:
    """Circuit of `center` and its neighbors with only the module's own links and tones.

    Qubit k of the returned circuit is the k-th entry of (center, *neighbors).
    Tones serving edges outside the module are dropped, as are couplings to
    qubits outside it.
    """
    qubits = _module_qubits(lattice, center)
    pos = {v: k for k, v in enumerate(qubits)}
    w = schedule.assignment.frequencies
    p = schedule.params
    module_edges = lattice.edges_of(center)
    couplings, drives = [], {}
    for e in module_edges:
        pair = (pos[e.left], pos[e.right])
        if e.link == "zz":
            g_z = schedule.zz_g_z.get(e.pair, 0.0)
            couplings.append((pair, SquidCoupler(p["zz_g_x"], g_z, 0.0, 0.0, 0.0)))
            continue
        edge_tones = schedule.tones_for(e.pair)
        if schedule.scheme == "driven_qubit":
            couplings.append((pair, CapacitiveCoupling(p["g_c"])))
            for t in edge_tones:
                drives.setdefault(pos[t.carrier], []).append(Tone(2.0 * t.amplitude, t.frequency, t.phase))
        else:
            tones = tuple(Tone(t.amplitude, t.frequency, t.phase) for t in edge_tones)
            couplings.append((pair, SquidCoupler(p["g_x"], p["g_z"], p["g_j"], p["g_j"], np.pi, tones)))
    drive_specs = tuple(DriveSpec(q, "z", tuple(ts)) for q, ts in sorted(drives.items()))
    return CircuitSpec(tuple(w[v] for v in qubits), tuple(couplings), drive_specs)


def module_scheme(lattice: HoneycombLattice, schedule: DriveSchedule, center: int, truncation: int = 4) -> Scheme:
    """Module circuit with its Floquet bookkeeping.

    The drive modes are the frequencies of the qubits on the module's xx/yy
    links, which puts those qubits in their rotating frame through the photon
    index; the remaining qubits get an explicit frame at their own frequency.
    """
    circuit = build_module_hamiltonian(lattice, schedule, center)
    qubits = _module_qubits(lattice, center)
    driven = sorted({v for e in lattice.edges_of(center) if e.link != "zz" for v in e.pair}, key=qubits.index)
    modes = tuple(schedule.assignment[v] for v in driven)
    frame = tuple(0.0 if v in driven else schedule.assignment[v] for v in qubits)
    return Scheme(f"module_{center}", circuit, modes, frame, truncation)


def module_effective_hamiltonian(scheme: Scheme, order: int = 4, gap_min: float = 0.02) -> EffectiveSpinHamiltonian:
    """Salwen series effective Hamiltonian of a module at the given order."""
    F = scheme.floquet()
    M = scheme.manifold(F, gap_min=gap_min)
    return effective_hamiltonian(F, M, order, "series")


def edge_coupling(heff: EffectiveSpinHamiltonian, qubits: tuple, edge: Edge) -> float:
    """Effective coefficient of the edge's sigma^a sigma^a term.

    Arguments:
        heff: module effective Hamiltonian.
        qubits: lattice ids of the module qubits in circuit order.
        edge: lattice edge inside the module.
    """
    a = edge.link[0].upper()
    return heff.two_body(a, qubits.index(edge.left), a, qubits.index(edge.right))


# ---------------------------------------------------------------- diagnostics


@dataclass
class ModuleDiagnostics:
    """Adiabaticity data of a module.

    Attributes:
        table: rows (epsilon, t_max) of the lowest coupled fast states.
        t_max: largest slow-fast matrix element among the tabulated states.
        t_max_all: largest slow-fast matrix element over all coupled fast states.
        gap: smallest |epsilon| of a fast state coupled to the slow manifold.
        ratio: largest t_max(s)/|epsilon_s|.
        threshold: pass level for ratio.
        effective: effective Hamiltonian when computed.
        couplings: per-edge effective couplings.
    """

    table: np.ndarray
    t_max: float
    gap: float
    ratio: float
    t_max_all: float = 0.0
    threshold: float = 0.1
    effective: EffectiveSpinHamiltonian | None = None
    couplings: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.ratio <= self.threshold

    def csv_rows(self) -> list[tuple]:
        return [(float(e), float(t)) for e, t in self.table]


def validate_adiabaticity(F: FloquetMatrix, manifold: SlowManifold, n_fast: int = 50, threshold: float = 0.1) -> ModuleDiagnostics:
    """First-order slow-fast coupling diagnostics.

    Arguments:
        F: Floquet matrix.
        manifold: slow manifold.
        n_fast: number of lowest coupled fast states listed in the table.
        threshold: pass level for max t_max/|epsilon|.

    Returns:
        ModuleDiagnostics where t_max(s) = max over slow a of |<s|V|a>| and
        epsilon_s is the unperturbed quasienergy of s in the rotating frame.
    """
    V = F.perturbation().tocsc()
    X = np.abs(V[:, manifold.indices].toarray())
    X[manifold.indices, :] = 0.0
    t = X.max(axis=1)
    coupled = np.flatnonzero(t > 1e-14)
    eps = F.frame_energies()
    if coupled.size == 0:
        return ModuleDiagnostics(np.zeros((0, 2)), 0.0, float("inf"), 0.0, 0.0, threshold)
    e = eps[coupled]
    if np.any(np.abs(e) < 1e-12):
        raise ValueError("a fast state degenerate with the slow manifold is directly coupled to it")
    ratio = float(np.max(t[coupled] / np.abs(e)))
    order = np.argsort(np.abs(e), kind="stable")[:n_fast]
    table = np.column_stack([e[order], t[coupled][order]])
    return ModuleDiagnostics(
        table, float(table[:, 1].max()), float(np.abs(e).min()), ratio, float(t[coupled].max()), threshold
    )


def validate_module(
    lattice: HoneycombLattice,
    schedule: DriveSchedule,
    center: int,
    order: int = 4,
    truncation: int = 4,
    n_fast: int = 50,
    gap_min: float = 0.02,
) -> ModuleDiagnostics:
    """Effective Hamiltonian and adiabaticity diagnostics of the module around `center`."""
    scheme = module_scheme(lattice, schedule, center, truncation)
    F = scheme.floquet()
    M = scheme.manifold(F, gap_min=gap_min)
    diag = validate_adiabaticity(F, M, n_fast)
    heff = effective_hamiltonian(F, M, order, "series")
    diag.effective = heff
    qubits = _module_qubits(lattice, center)
    diag.couplings = {(e.left, e.right, e.link): edge_coupling(heff, qubits, e) for e in lattice.edges_of(center)}
    return diag
