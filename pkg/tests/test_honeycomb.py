import json

import numpy as np
import pytest

from floquet_circuits.honeycomb import (
    DriveSchedule,
    Edge,
    HoneycombLattice,
    LatticeError,
    ScheduleError,
    assign_frequencies,
    brick_wall,
    check_frequencies,
    compile_drive_schedule,
    four_qubit_module,
    kitaev_target_hamiltonian,
    module_scheme,
    plaquette,
    validate_adiabaticity,
    validate_module,
)

REFERENCE_PATTERN = {"A": [6.1], "B": [9.6, 9.1, 9.9]}
TARGETS = {"xx": 0.00521, "yy": 0.0052, "zz": 0.0098}


def _reference_assignment(lat=None):
    return assign_frequencies(lat or four_qubit_module(), REFERENCE_PATTERN, 1.0, 0.3)


def test_module_structure():
    lat = four_qubit_module()
    assert lat.degree(0) == 3
    assert sorted(lat.neighbors(0)) == [1, 2, 3]
    assert lat.next_nearest_pairs() == {(1, 2), (1, 3), (2, 3)}


@pytest.mark.parametrize(
    "edges, classes",
    [
        ((Edge(0, 1, "xx"), Edge(0, 2, "xx")), {0: "A", 1: "B", 2: "B"}),
        ((Edge(0, 1, "zz"),), {0: "A", 1: "A"}),
        ((Edge(0, 1, "xx"), Edge(0, 2, "yy")), {0: "A", 1: "B", 2: "B"}),
        ((Edge(0, 1, "ww"),), {0: "A", 1: "B"}),
        ((Edge(0, 0, "xx"),), {0: "A"}),
    ],
    ids=["two_xx", "zz_same_class", "orientation", "bad_type", "self_loop"],
)
def test_lattice_validation(edges, classes):
    vs = tuple(sorted(classes))
    with pytest.raises(LatticeError):
        HoneycombLattice(vs, classes, edges)


def test_lattice_needs_classes():
    with pytest.raises(LatticeError):
        HoneycombLattice((0, 1), {0: "A"}, ())


def test_brick_wall_degrees_and_roundtrip():
    lat = brick_wall(4, 6)
    assert all(lat.degree(v) <= 3 for v in lat.vertices)
    assert HoneycombLattice.from_dict(json.loads(json.dumps(lat.to_dict()))) == lat
    star = lat.star(7)
    assert star.vertices[0] == 7 and len(star.edges) == lat.degree(7)


def test_plaquette_target():
    lat = plaquette()
    h = kitaev_target_hamiltonian(lat, {"xx": 1.0, "yy": 2.0, "zz": 3.0})
    assert len(h) == 6
    for a in "XYZ":
        assert sum(1 for k in h if k.count(a) == 2) == 2


def test_star_target_and_empty():
    h = kitaev_target_hamiltonian(four_qubit_module(), {"xx": 1.0, "yy": 2.0, "zz": 3.0})
    assert dict(h) == {"XXII": 1.0, "YIYI": 2.0, "ZIIZ": 3.0}
    empty = HoneycombLattice((), {}, ())
    assert len(kitaev_target_hamiltonian(empty, {"xx": 1.0})) == 0


def test_assign_reference_frequencies():
    a = _reference_assignment()
    assert a.as_tuple((0, 1, 2, 3)) == (6.1, 9.6, 9.1, 9.9)


def test_assign_small_detuning():
    a = assign_frequencies(four_qubit_module(), {"A": [6.1], "B": [6.45, 6.55, 9.9]}, 0.3, 0.1)
    assert a.as_tuple((0, 1, 2, 3)) == (6.1, 6.45, 6.55, 9.9)


def test_single_zz_edge_assignment():
    lat = HoneycombLattice((0, 1), {0: "A", 1: "B"}, (Edge(0, 1, "zz"),))
    a = assign_frequencies(lat, {"A": [6.0], "B": [6.5, 7.2]}, 1.0, 0.3)
    assert abs(a[0] - a[1]) >= 1.0


def test_infeasible_assignment_raises():
    with pytest.raises(LatticeError):
        assign_frequencies(four_qubit_module(), {"A": [6.1], "B": [9.3, 9.45, 9.9]}, 1.0, 0.3)
    with pytest.raises(LatticeError):
        check_frequencies(four_qubit_module(), {0: 6.1, 1: 6.5, 2: 9.1, 3: 9.9}, 1.0, 0.3)


def test_leading_order_schedule_matches_reference_amplitudes():
    s = compile_drive_schedule(four_qubit_module(), _reference_assignment(), TARGETS, refine=False)
    amps = {(t.carrier, t.role): t.amplitude * 1e3 for t in s.tones}
    r = 0.00521 / (2 * 0.2)
    assert amps[(0, "sum")] == pytest.approx(1e3 * r * 15.7)
    assert amps[(1, "difference")] == pytest.approx(-1e3 * r * 3.5)


def test_refined_schedule_near_reference_amplitudes():
    s = compile_drive_schedule(four_qubit_module(), _reference_assignment(), TARGETS)
    amps = {(t.carrier, t.edge, t.role): t.amplitude * 1e3 for t in s.tones}
    assert amps[(0, (0, 1), "sum")] == pytest.approx(213.3, abs=1.0)
    assert amps[(1, (0, 1), "difference")] == pytest.approx(-48.0, abs=1.0)
    assert amps[(2, (2, 0), "sum")] == pytest.approx(204.1, abs=2.0)
    assert amps[(0, (2, 0), "difference")] == pytest.approx(-41.7, abs=2.0)


def test_amplitude_ratio_condition():
    lat = brick_wall(2, 6)
    freqs = {0: 6.1, 1: 9.6, 2: 6.437, 3: 9.1, 4: 6.783, 5: 9.9, 6: 9.3, 7: 6.27, 8: 9.75, 9: 6.61, 10: 9.45, 11: 6.95}
    a = check_frequencies(lat, freqs, 1.0, 0.1)
    s = compile_drive_schedule(lat, a, TARGETS, refine=False)
    w = a.frequencies
    for e in lat.edges:
        if e.link == "zz":
            continue
        tones = {t.role: t for t in s.tones_for(e.pair)}
        sign = 1.0 if e.link == "xx" else -1.0
        lhs = tones["sum"].amplitude / (w[e.left] + w[e.right])
        rhs = sign * tones["difference"].amplitude / (w[e.left] - w[e.right])
        assert lhs == pytest.approx(rhs, abs=1e-9)
        assert tones["sum"].carrier == e.left and tones["difference"].carrier == e.right
    assert s.max_tones_per_qubit() <= 2


def test_zero_targets_give_empty_schedule():
    s = compile_drive_schedule(four_qubit_module(), _reference_assignment(), {})
    assert s.tones == () and s.zz_g_z == {}


def test_amplitude_bound():
    with pytest.raises(ScheduleError):
        compile_drive_schedule(four_qubit_module(), _reference_assignment(), {"xx": 0.02}, refine=False)


def test_unknown_scheme():
    with pytest.raises(ScheduleError):
        compile_drive_schedule(four_qubit_module(), _reference_assignment(), TARGETS, "laser")


def test_refined_module_hits_targets():
    lat = four_qubit_module()
    s = compile_drive_schedule(lat, _reference_assignment(), TARGETS)
    d = validate_module(lat, s, 0)
    assert abs(d.couplings[(0, 1, "xx")]) == pytest.approx(0.00521, abs=1e-5)
    assert abs(d.couplings[(2, 0, "yy")]) == pytest.approx(0.0052, abs=1e-5)
    assert abs(d.couplings[(0, 3, "zz")]) == pytest.approx(0.0098, abs=1e-5)
    assert d.passed and d.gap == pytest.approx(3.0)


def test_orientation_flip_invariance():
    lat = four_qubit_module()
    flip = lat.flipped()
    a = _reference_assignment()
    J = []
    for L in (lat, flip):
        s = compile_drive_schedule(L, a, TARGETS)
        d = validate_module(L, s, 0)
        J.append({frozenset(k[:2]): abs(v) for k, v in d.couplings.items()})
    for k in J[0]:
        assert J[1][k] == pytest.approx(J[0][k], rel=0.02)
    s0 = compile_drive_schedule(lat, a, TARGETS, refine=False)
    s1 = compile_drive_schedule(flip, a, TARGETS, refine=False)
    assert {t.carrier for t in s0.tones_for((0, 1)) if t.role == "sum"} == {0}
    assert {t.carrier for t in s1.tones_for((1, 0)) if t.role == "sum"} == {1}


def test_coupler_schedule_tones():
    s = compile_drive_schedule(
        four_qubit_module(), _reference_assignment(), {"xx": 0.03, "yy": 0.03, "zz": 0.01}, "driven_coupler", refine=False
    )
    yy = {t.role: t for t in s.tones_for((2, 0))}
    assert yy["difference"].phase == pytest.approx(np.pi) and yy["sum"].phase == 0.0
    assert yy["sum"].amplitude == pytest.approx(0.1)
    assert s.max_tones_per_qubit() == 0


def test_zero_drive_diagnostics():
    lat = four_qubit_module()
    s = DriveSchedule("driven_qubit", _reference_assignment(), (), {}, {"g_c": 0.0, "zz_g_x": 0.0, "max_amplitude": 0.5})
    lat_no_zz = HoneycombLattice((0, 1, 2), {0: "A", 1: "B", 2: "B"}, lat.edges[:2])
    scheme = module_scheme(lat_no_zz, s, 0, truncation=1)
    F = scheme.floquet()
    d = validate_adiabaticity(F, scheme.manifold(F, gap_min=0.02))
    assert d.t_max == 0.0 and d.ratio == 0.0 and d.table.shape == (0, 2)


def test_schedule_serialization():
    s = compile_drive_schedule(four_qubit_module(), _reference_assignment(), TARGETS, refine=False)
    doc = json.loads(s.to_json())
    assert len(doc["tones"]) == 4
    assert "sum" in s.table()
