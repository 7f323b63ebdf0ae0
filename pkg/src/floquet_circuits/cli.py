"""Command-line workflows.

Every verb reads a JSON run configuration (see docs/io.md), writes CSV/JSON
artifacts to --out-dir and exits with 0 on success, 1 on a usage or
configuration error and 2 when a physics validation fails.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

import click
import numpy as np

from . import __version__
from . import catalog as cat
from .circuits import CircuitSpec, CommensurabilityError, DriveSpec, SquidCoupler, Tone, build_fourier_components
from .config import ConfigError, RunConfig, grid_values, parse_config
from .floquet import (
    ModeSpec,
    SpectrumError,
    apply_rotating_frame,
    assemble_floquet_matrix,
    parallel_map,
    quasienergy_spectrum,
    transition_probability_time_avg,
    transition_probability_time_dep,
)
from .operators import PauliDecomposition
from .honeycomb import (
    FrequencyAssignment,
    HoneycombLattice,
    LatticeError,
    ScheduleError,
    assign_frequencies,
    brick_wall,
    check_frequencies,
    compile_drive_schedule,
    four_qubit_module,
    plaquette,
    validate_module,
)
from .salwen import DegeneracyError, ResonanceError, identify_slow_manifold, solve_self_consistent, spin_hamiltonian_from_matrix

log = logging.getLogger("floquet_circuits")

EXIT_OK, EXIT_USAGE, EXIT_PHYSICS = 0, 1, 2

CATALOG_FUNCTIONS = {
    "zx_params": cat.zx_params,
    "squeezing_params": cat.squeezing_params,
    "hopping_params": cat.hopping_params,
    "bimodal_xx_yy_params": cat.bimodal_xx_yy_params,
    "bimodal_zz_params": cat.bimodal_zz_params,
    "coupler_params": cat.coupler_params,
    "rwa_coupler": cat.rwa_coupler,
    "jyy_suppression": cat.jyy_suppression,
    "multiphoton_params": cat.multiphoton_params,
}

PHYSICS_ERRORS = (DegeneracyError, ResonanceError, SpectrumError, CommensurabilityError, LatticeError, ScheduleError, cat.CatalogError)


class PhysicsFailure(RuntimeError):
    """A computation finished but failed its physics validation."""


# ---------------------------------------------------------------- output


def provenance(config: RunConfig) -> dict:
    return {
        "package": f"floquet_circuits {__version__}",
        "config_sha256": config.digest,
        "task": config.task,
        "truncation": list(config.truncation),
        "order": config.params.get("order"),
        "units": "GHz_over_2pi",
    }


def _stamp() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def write_csv(path: Path, config: RunConfig, header: list[str], rows) -> Path:
    """CSV with a commented provenance header; the last header line is the timestamp."""
    buf = io.StringIO()
    for k, v in provenance(config).items():
        buf.write(f"# {k}: {json.dumps(v)}\n")
    buf.write(f"# generated: {_stamp()}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{x:.12g}" if isinstance(x, float) else x for x in row])
    path.write_text(buf.getvalue())
    return path


def write_json(path: Path, config: RunConfig, result) -> Path:
    """JSON document {provenance, result}; the timestamp sits on its own line."""
    doc = {"provenance": {**provenance(config), "generated": _stamp()}, "result": result}
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, default=_jsonable) + "\n")
    return path


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    raise TypeError(f"cannot serialize {type(x).__name__}")


# ---------------------------------------------------------------- tasks


def _floquet(config: RunConfig, circuit: CircuitSpec | None = None, modes: tuple | None = None):
    circuit = config.circuit if circuit is None else circuit
    modes = config.modes if modes is None else modes
    fh = build_fourier_components(circuit, modes)
    F = assemble_floquet_matrix(fh, [ModeSpec(w, N) for w, N in zip(modes, config.truncation)])
    return apply_rotating_frame(F, config.frame)


def _state_label(F, flat: int) -> tuple[str, str]:
    alpha, m = F.composite(flat)
    return F.register.basis_label(alpha), ";".join(str(v) for v in m)


def task_spectrum(config: RunConfig, out: Path, threads: int) -> list[Path]:
    F = _floquet(config)
    p = config.params
    method = p.get("method", "dense")
    window = None
    if method == "iterative":
        center, count = p.get("window", [0.0, 20])
        window = (center, int(count))
    spec = quasienergy_spectrum(F, method, window)
    owner = {c: r for r, c in spec.assignment.items()}
    frame_e = F.frame_energies()
    rows = []
    for col, e in enumerate(spec.energies):
        r = owner.get(col)
        state, photons = _state_label(F, r) if r is not None else ("", "")
        fe = float(frame_e[r]) if r is not None else float("nan")
        rows.append((col, float(e), state, photons, fe, float(e - (F.unperturbed[r] - frame_e[r])) if r is not None else float("nan")))
    header = ["index", "quasienergy_GHz_over_2pi", "bare_state", "photons", "bare_frame_energy_GHz_over_2pi", "frame_quasienergy_GHz_over_2pi"]
    return [write_csv(out / "spectrum.csv", config, header, rows)]


def task_effective(config: RunConfig, out: Path, threads: int) -> list[Path]:
    p = config.params
    order = int(p.get("order", 4))
    method = p.get("method", "series")
    F = _floquet(config)
    M = identify_slow_manifold(F, gap_min=float(p.get("gap_min", 0.05)))
    exact = method in ("exact", "both")
    sol = solve_self_consistent(F, M, order, exact=exact)
    result = {
        "slow_states": [{"state": s, "photons": m} for s, m in (_state_label(F, i) for i in M.indices)],
        "gap_GHz_over_2pi": float(M.gap),
    }
    if method in ("series", "both"):
        result["series"] = {str(q): spin_hamiltonian_from_matrix(sol.series[q], M.frame, q, "series").to_dict() for q in range(2, order + 1)}
    if exact:
        result["exact"] = spin_hamiltonian_from_matrix(sol.exact_matrix, M.frame, None, "exact").to_dict()
    return [write_json(out / "effective.json", config, result)]


def _retune(config: RunConfig, k: int, value: float) -> tuple[CircuitSpec, tuple]:
    """Circuit and modes with mode k moved to `value`; tones sitting at the old mode frequency follow it."""
    old = config.modes[k]
    move = lambda t: Tone(t.amplitude, value, t.phase) if abs(t.frequency - old) < 1e-12 else t
    drives = tuple(DriveSpec(d.qubit, d.axis, tuple(move(t) for t in d.tones)) for d in config.circuit.drives)
    couplings = tuple(
        (pair, replace(c, tones=tuple(move(t) for t in c.tones)) if isinstance(c, SquidCoupler) else c)
        for pair, c in config.circuit.couplings
    )
    modes = tuple(value if i == k else w for i, w in enumerate(config.modes))
    return CircuitSpec(config.circuit.qubits, couplings, drives), modes


def task_sweep(config: RunConfig, out: Path, threads: int) -> list[Path]:
    p = config.params
    k = int(p.get("mode", 0))
    values = grid_values(p["values"])
    photons = tuple(p.get("photons", [0] * len(config.modes)))
    n = config.circuit.register.dim
    labels = [config.circuit.register.basis_label(a) for a in range(n)]

    def point(value):
        circuit, modes = _retune(config, k, float(value))
        F = _floquet(config, circuit, modes)
        spec = quasienergy_spectrum(F, "dense")
        row = [float(value)]
        for a in range(n):
            col = spec.assignment.get(F.index(a, photons))
            row.append(float(spec.energies[col]) if col is not None else float("nan"))
        return row

    rows = parallel_map(point, values, threads)
    m = ";".join(str(v) for v in photons)
    header = [f"mode{k}_GHz_over_2pi"] + [f"eps_{s}_m{m}_GHz_over_2pi" for s in labels]
    return [write_csv(out / "sweep.csv", config, header, rows)]


def task_probability(config: RunConfig, out: Path, threads: int) -> list[Path]:
    p = config.params
    reg = config.circuit.register
    idx = lambda bits: reg.index_of([int(c) for c in bits])
    alpha = idx(p["initial"])
    finals = p.get("final") or [reg.basis_label(b) for b in range(reg.dim)]
    spec = quasienergy_spectrum(_floquet(config), "dense")
    paths = []
    if "times" in p:
        times = grid_values(p["times"])
        cols = [transition_probability_time_dep(spec, alpha, idx(f), times, p.get("coherent", False)) for f in finals]
        rows = [[float(t), *(float(c[i]) for c in cols)] for i, t in enumerate(times)]
        paths.append(write_csv(out / "probability.csv", config, ["time_ns", *[f"P_{f}" for f in finals]], rows))
    if p.get("time_average", "times" not in p):
        avg = transition_probability_time_avg(spec, alpha)
        result = {"initial": p["initial"], "time_averaged": {f: float(avg[idx(f)]) for f in finals}}
        paths.append(write_json(out / "probability_avg.json", config, result))
    return paths


def task_catalog(config: RunConfig, out: Path, threads: int) -> list[Path]:
    p = config.params
    name = p["function"]
    if name not in CATALOG_FUNCTIONS:
        raise ConfigError([f"/params/function: unknown catalog entry {name!r}; choose from {sorted(CATALOG_FUNCTIONS)}"])
    try:
        res = CATALOG_FUNCTIONS[name](**p.get("arguments", {}))
    except TypeError as exc:
        raise ConfigError([f"/params/arguments: {exc}"]) from None
    if isinstance(res, cat.CatalogResult):
        result = res.as_dict()
    elif isinstance(res, PauliDecomposition):
        result = {"couplings_GHz_over_2pi": {k: float(np.real(v)) for k, v in sorted(res.items())}}
    else:
        result = {k: float(v) for k, v in res.items()}
    return [write_json(out / "catalog.json", config, {"function": name, **result})]


def honeycomb_inputs(hc: dict) -> tuple[HoneycombLattice, FrequencyAssignment]:
    """Lattice and frequency assignment from the honeycomb parameter block."""
    spec = hc["lattice"]
    if spec == "module":
        lattice = four_qubit_module()
    elif spec == "plaquette":
        lattice = plaquette()
    elif "brick_wall" in spec:
        lattice = brick_wall(*spec["brick_wall"])
    else:
        lattice = HoneycombLattice.from_dict(spec)
    d_nn, d_nnn = float(hc.get("delta_nn", 1.0)), float(hc.get("delta_nnn", 0.3))
    if "frequencies" in hc:
        assignment = check_frequencies(lattice, {int(k): float(v) for k, v in hc["frequencies"].items()}, d_nn, d_nnn)
    elif "pattern" in hc:
        assignment = assign_frequencies(lattice, hc["pattern"], d_nn, d_nnn)
    else:
        raise ConfigError(["/params/honeycomb: give either frequencies or pattern"])
    return lattice, assignment


def _compile(hc: dict, config: RunConfig):
    lattice, assignment = honeycomb_inputs(hc)
    schedule = compile_drive_schedule(
        lattice,
        assignment,
        hc["targets"],
        hc.get("scheme", "driven_qubit"),
        hc.get("constants"),
        hc.get("refine", True),
        int(config.params.get("order", 4)),
        config.truncation[0] if config.truncation else 4,
    )
    return lattice, schedule


def task_honeycomb_compile(config: RunConfig, out: Path, threads: int) -> list[Path]:
    _, schedule = _compile(config.params["honeycomb"], config)
    txt = out / "schedule.txt"
    txt.write_text(f"# config_sha256: {config.digest}\n" + schedule.table() + "\n")
    return [write_json(out / "schedule.json", config, schedule.to_dict()), txt]


def task_honeycomb_validate(config: RunConfig, out: Path, threads: int) -> list[Path]:
    hc = config.params["honeycomb"]
    lattice, schedule = _compile(hc, config)
    center = int(hc.get("center", lattice.vertices[0]))
    diag = validate_module(
        lattice,
        schedule,
        center,
        int(config.params.get("order", 4)),
        config.truncation[0] if config.truncation else 4,
        int(hc.get("n_fast", 50)),
        float(hc.get("gap_min", 0.02)),
    )
    csv_path = write_csv(out / "diagnostics.csv", config, ["epsilon_GHz_over_2pi", "t_max_GHz_over_2pi"], diag.csv_rows())
    result = {
        "center": center,
        "couplings_GHz_over_2pi": {f"{a}-{b}:{link}": v for (a, b, link), v in diag.couplings.items()},
        "delta_omega_GHz_over_2pi": list(diag.effective.delta_omega),
        "effective": diag.effective.to_dict(tol=1e-7),
        "gap_GHz_over_2pi": diag.gap,
        "t_max_GHz_over_2pi": diag.t_max,
        "max_ratio": diag.ratio,
        "passed": diag.passed,
        "schedule": schedule.to_dict(),
    }
    paths = [csv_path, write_json(out / "module.json", config, result)]
    if not diag.passed:
        raise PhysicsFailure(f"adiabaticity check failed: max t_max/epsilon = {diag.ratio:.3f} > {diag.threshold}")
    return paths


TASK_RUNNERS = {
    "spectrum": task_spectrum,
    "effective": task_effective,
    "sweep": task_sweep,
    "probability": task_probability,
    "catalog": task_catalog,
    "honeycomb-compile": task_honeycomb_compile,
    "honeycomb-validate": task_honeycomb_validate,
}


def run_task(config: RunConfig, out_dir, threads: int = 1) -> tuple[int, list[Path]]:
    """Run a validated configuration.

    Returns:
        (exit status, written paths); status 0 on success, 1 on usage errors,
        2 on physics-validation failures.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        return EXIT_OK, TASK_RUNNERS[config.task](config, out, threads)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_USAGE, []
    except PhysicsFailure as exc:
        log.error("%s", exc)
        return EXIT_PHYSICS, sorted(out.glob("*"))
    except PHYSICS_ERRORS as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_PHYSICS, []


# ---------------------------------------------------------------- click


def _run_verb(ctx: click.Context, task: str) -> None:
    o = ctx.obj
    if o["config"] is None:
        click.echo("error: --config is required", err=True)
        ctx.exit(EXIT_USAGE)
    try:
        config = parse_config(o["config"]).with_overrides(o["truncation_override"], o["order"])
    except ConfigError as exc:
        for e in exc.errors:
            click.echo(f"config error: {e}", err=True)
        ctx.exit(EXIT_USAGE)
    if config.task != task:
        click.echo(f"error: config declares task {config.task!r} but verb is {task!r}", err=True)
        ctx.exit(EXIT_USAGE)
    status, paths = run_task(config, o["out_dir"], o["threads"])
    for p in paths:
        click.echo(str(p))
    ctx.exit(status)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="JSON run configuration.")
@click.option("--out-dir", type=click.Path(file_okay=False), default=".", show_default=True, help="Directory for output files.")
@click.option("--threads", type=click.IntRange(min=1), default=1, show_default=True, help="Worker pool cap.")
@click.option("--truncation-override", type=click.IntRange(min=0), default=None, help="Fourier truncation N for every mode.")
@click.option("--order", type=click.IntRange(min=1), default=None, help="Perturbative order override.")
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
@click.version_option(__version__)
@click.pass_context
def main(ctx, config_path, out_dir, threads, truncation_override, order, verbose):
    """Floquet engineering of driven coupled-qubit circuits."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(message)s")
    ctx.obj = {"config": config_path, "out_dir": out_dir, "threads": threads, "truncation_override": truncation_override, "order": order}


@main.command()
@click.pass_context
def spectrum(ctx):
    """Quasienergy spectrum with dressed-to-bare assignment."""
    _run_verb(ctx, "spectrum")


@main.command()
@click.pass_context
def effective(ctx):
    """Effective spin Hamiltonian from Salwen elimination."""
    _run_verb(ctx, "effective")


@main.command()
@click.pass_context
def sweep(ctx):
    """Quasienergies over a grid of one drive-mode frequency."""
    _run_verb(ctx, "sweep")


@main.command()
@click.pass_context
def probability(ctx):
    """Transition probabilities from the Floquet propagator."""
    _run_verb(ctx, "probability")


@main.command(name="catalog")
@click.pass_context
def catalog_cmd(ctx):
    """Closed-form interaction parameters."""
    _run_verb(ctx, "catalog")


@main.group()
def honeycomb():
    """Kitaev honeycomb drive schedules and module checks."""


@honeycomb.command(name="compile")
@click.pass_context
def honeycomb_compile(ctx):
    """Compile a drive schedule for a lattice."""
    _run_verb(ctx, "honeycomb-compile")


@honeycomb.command(name="validate")
@click.pass_context
def honeycomb_validate(ctx):
    """Validate a four-qubit module (effective couplings and adiabaticity)."""
    _run_verb(ctx, "honeycomb-validate")


if __name__ == "__main__":
    sys.exit(main())
