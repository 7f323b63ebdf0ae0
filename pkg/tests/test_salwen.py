import numpy as np
import pytest

from floquet_circuits.circuits import build_fourier_components
from floquet_circuits.floquet import ModeSpec, apply_rotating_frame, assemble_floquet_matrix, quasienergy_spectrum
from floquet_circuits.salwen import (
    DegeneracyError,
    effective_hamiltonian,
    identify_slow_manifold,
    salwen_matrix,
    scattering_apply,
    self_consistency_residual,
    solve_self_consistent,
)
from floquet_circuits.schemes import (
    bimodal_scheme,
    hopping_scheme,
    multiphoton_scheme,
    squeezing_scheme,
    table1_scheme,
    zx_scheme,
)

MHZ = 1e3


def _scaled_floquet(scheme, lam, truncation):
    fh = build_fourier_components(scheme.circuit, scheme.modes).scaled(lam)
    F = assemble_floquet_matrix(fh, [ModeSpec(w, truncation) for w in scheme.modes])
    return apply_rotating_frame(F, scheme.frame)


def test_manifold_zx_point():
    M = table1_scheme(4).manifold()
    assert M.states == ((0, (-1,)), (1, (0,)), (2, (-1,)), (3, (0,)))
    assert M.gap == pytest.approx(9.0)


def test_manifold_squeezing_point():
    M = squeezing_scheme(12.0, 9.0, 0.2, 0.5, truncation=4).manifold()
    assert M.states == ((0, (-1,)), (1, (-1,)), (2, (0,)), (3, (0,)))


def test_manifold_bimodal_point():
    eta = {(1, 1): 0.75, (2, 1): 0.75, (1, 2): 0.256}
    M = bimodal_scheme(12.0, 8.5, 0.3, eta, "z", truncation=3).manifold()
    assert M.states == ((0, (-1, -1)), (1, (-1, 0)), (2, (0, -1)), (3, (0, 0)))
    # 3 omega_2 - 2 omega_1 = 1.5 GHz is the nearest state once three photons are allowed
    assert M.gap == pytest.approx(1.5)
    assert bimodal_scheme(12.0, 8.5, 0.3, eta, "z", truncation=1).manifold().gap == pytest.approx(3.5)


def test_manifold_off_working_point_raises():
    s = zx_scheme(12.0, 9.0, 0.1, 0.25)
    F = apply_rotating_frame(s.floquet(3), (11.9, 0.0))
    with pytest.raises(DegeneracyError):
        identify_slow_manifold(F)


def test_scattering_homogeneity():
    s = table1_scheme(4)
    F = s.floquet()
    M = s.manifold(F)
    V = F.perturbation()
    for k in range(4):
        base = scattering_apply(F, M, 0.0, k, V)
        scaled = scattering_apply(F, M, 0.0, k, 0.5 * V)
        assert np.max(np.abs(scaled - 0.5 ** (k + 1) * base)) < 1e-12 * max(1.0, np.max(np.abs(base)))


def test_first_order_block_vanishes_at_squeezing_point():
    s = squeezing_scheme(12.0, 9.0, 0.2, 0.5, truncation=4)
    F = s.floquet()
    h0 = scattering_apply(F, s.manifold(F), 0.0, 0)
    assert np.max(np.abs(h0)) < 1e-15
    sol = solve_self_consistent(F, s.manifold(F), 4, exact=False)
    assert np.max(np.abs(sol.kappa[:, 0])) < 1e-15


def test_second_order_zx_element():
    s = table1_scheme(6)
    F = s.floquet()
    h1 = scattering_apply(F, s.manifold(F), 0.0, 1)
    assert abs(h1[0, 1]) * MHZ == pytest.approx(21.428, abs=1e-3)


def test_block_structure_zx():
    s = table1_scheme(6)
    F = s.floquet()
    h = salwen_matrix(F, s.manifold(F), 0.0, 6, secular=False)
    for i, j in ((0, 2), (0, 3), (1, 2), (1, 3)):
        assert abs(h[i, j]) < 1e-12 and abs(h[j, i]) < 1e-12


@pytest.mark.parametrize(
    "scheme",
    [
        squeezing_scheme(12.0, 9.0, 0.2, 0.5, truncation=6),
        hopping_scheme(12.0, 9.0, 0.1, 0.25, truncation=6),
        bimodal_scheme(12.0, 8.5, 0.3, {(1, 1): 0.75, (2, 1): 0.75, (1, 2): 0.256}, "z", truncation=3),
    ],
    ids=["squeezing", "hopping", "bimodal_z"],
)
def test_block_structure_longitudinal(scheme):
    F = scheme.floquet()
    M = scheme.manifold(F)
    h = salwen_matrix(F, M, 0.0, 4, secular=False)
    W = solve_self_consistent(F, M, 4, exact=False).matrix()
    for i, j in ((0, 1), (0, 2), (3, 1), (3, 2)):
        assert abs(h[i, j]) < 1e-12
        assert abs(W[i, j]) < 1e-12


def test_zx_subspace_antisymmetry():
    s = table1_scheme(8)
    F = s.floquet()
    sol = solve_self_consistent(F, s.manifold(F), 6)
    for e in (sol.quasienergies, sol.floquet_quasienergies):
        assert e[2] == pytest.approx(-e[1], abs=1e-9)
        assert e[3] == pytest.approx(-e[0], abs=1e-9)


def test_zero_perturbation_gives_zero():
    s = zx_scheme(12.0, 9.0, 0.0, 0.0, truncation=2)
    F = s.floquet()
    sol = solve_self_consistent(F, s.manifold(F), 4)
    assert np.max(np.abs(sol.kappa)) == 0.0
    assert np.max(np.abs(sol.quasienergies)) < 1e-13
    heff = effective_hamiltonian(F, s.manifold(F), 4, solution=sol)
    assert all(abs(v) < 1e-13 for v in heff.couplings.values())


def test_self_consistency_and_reconstruction():
    s = table1_scheme(8)
    F = s.floquet()
    M = s.manifold(F)
    sol = solve_self_consistent(F, M, 6)
    assert self_consistency_residual(F, M, sol) <= 1e-9 * max(np.max(np.abs(sol.floquet_quasienergies)), 1e-3)
    heff = effective_hamiltonian(F, M, 6, "exact", solution=sol)
    assert np.allclose(np.sort(heff.eigenvalues()), np.sort(sol.floquet_quasienergies), atol=1e-9)
    series = effective_hamiltonian(F, M, 6, solution=sol)
    assert np.allclose(np.sort(series.eigenvalues()), np.sort(sol.series_quasienergies[6]), atol=1e-9)


@pytest.mark.parametrize(
    "scheme",
    [
        table1_scheme(8),
        squeezing_scheme(12.0, 9.0, 0.2, 0.5),
        hopping_scheme(12.0, 9.0, 0.1, 0.25),
    ],
    ids=["zx", "squeezing", "hopping"],
)
def test_sixth_order_matches_dense_spectrum(scheme):
    F = scheme.floquet()
    M = scheme.manifold(F)
    sol = solve_self_consistent(F, M, 6, exact=False)
    spec = quasienergy_spectrum(F)
    fe = F.frame_energies()
    dense = []
    for idx in M.indices:
        col = spec.assignment[int(idx)]
        dense.append(spec.energies[col] - (F.unperturbed[idx] - fe[idx]))
    got = np.sort(sol.quasienergies)
    assert np.max(np.abs(got - np.sort(dense))) * MHZ < 0.01


def test_order_consistency_slope():
    s = table1_scheme(8)
    diffs = []
    lams = (0.5, 0.25, 0.125)
    for lam in lams:
        F = _scaled_floquet(s, lam, 8)
        M = identify_slow_manifold(F)
        a = solve_self_consistent(F, M, 4, exact=False).quasienergies
        b = solve_self_consistent(F, M, 6, exact=False).quasienergies
        diffs.append(np.max(np.abs(a - b)))
    slope = np.polyfit(np.log(lams), np.log(diffs), 1)[0]
    assert slope > 4.5


def test_series_terms_scale_homogeneously():
    s = table1_scheme(6)
    F1 = _scaled_floquet(s, 1.0, 6)
    Fl = _scaled_floquet(s, 0.5, 6)
    a = solve_self_consistent(F1, identify_slow_manifold(F1), 4, exact=False).kappa
    b = solve_self_consistent(Fl, identify_slow_manifold(Fl), 4, exact=False).kappa
    for p in range(4):
        assert np.allclose(b[:, p], 0.5 ** (p + 1) * a[:, p], atol=1e-12)


def test_transverse_bimodal_offdiagonal_zero():
    eta = {(1, 1): 0.6, (2, 1): 0.6}
    s = bimodal_scheme(9.0, 5.0, 0.4, eta, "x", truncation=4)
    F = s.floquet()
    sol = solve_self_consistent(F, s.manifold(F), 4, exact=False)
    for W in sol.series:
        assert np.max(np.abs(W - np.diag(np.diag(W)))) < 1e-12


def test_even_parity_multiphoton_is_diagonal():
    s = multiphoton_scheme(2, "zx", 11.0, 9.0, 0.3, 0.3, truncation=8)
    F = s.floquet()
    W = solve_self_consistent(F, s.manifold(F), 4, exact=False).matrix()
    assert np.max(np.abs(W - np.diag(np.diag(W)))) < 1e-12
