import warnings

import numpy as np
import pytest
from scipy.linalg import expm

from floquet_circuits.circuits import CapacitiveCoupling, CircuitSpec, DriveSpec, Tone, build_fourier_components
from floquet_circuits.floquet import (
    ModeSpec,
    TruncationWarning,
    assemble_floquet_matrix,
    evolve_state_floquet,
    floquet_propagator,
    fold_quasienergy,
    propagate_time_domain,
    quasienergy_spectrum,
    transition_probability_time_avg,
    transition_probability_time_dep,
)
from floquet_circuits.schemes import hopping_scheme, squeezing_scheme, table1_scheme, zx_scheme


def _blocks(F):
    d = F.qubit_dim
    A = F.toarray()
    n = F.dim // d
    return [[A[i * d : (i + 1) * d, j * d : (j + 1) * d] for j in range(n)] for i in range(n)]


def test_no_drive_is_block_diagonal():
    spec = CircuitSpec((12.0, 9.0), (((0, 1), CapacitiveCoupling(0.2)),))
    F = assemble_floquet_matrix(build_fourier_components(spec, [9.0]), [ModeSpec(9.0, 3)])
    B = _blocks(F)
    for i in range(len(B)):
        for j in range(len(B)):
            if i != j:
                assert np.max(np.abs(B[i][j])) == 0.0


def test_hermitian_and_toeplitz():
    F = table1_scheme(3).floquet()
    A = F.toarray()
    assert np.max(np.abs(A - A.conj().T)) < 1e-14
    grid = F.photon_grid
    B = _blocks(F)
    for i, n in enumerate(grid):
        for j, m in enumerate(grid):
            expect = F.block(tuple(n - m))
            if i == j:
                expect = expect + float(n @ F.omegas) * np.eye(F.qubit_dim)
            assert np.allclose(B[i][j], expect, atol=1e-14)


def test_index_roundtrip():
    F = table1_scheme(2).floquet()
    for flat in range(F.dim):
        alpha, m = F.composite(flat)
        assert F.index(alpha, m) == flat
    with pytest.raises(IndexError):
        F.index(0, (3,))


def test_truncation_below_harmonic_raises():
    fh = build_fourier_components(table1_scheme().circuit, table1_scheme().modes)
    with pytest.raises(ValueError):
        assemble_floquet_matrix(fh, [ModeSpec(w, 0) for w in table1_scheme().modes])


def test_frame_degeneracy_of_slow_states():
    s = zx_scheme(12.0, 9.0, 0.1, 0.25)
    eps = s.floquet(3).frame_energies()
    F = s.floquet(3)
    # |10, 0> and |01, -1> both sit at 9 in the frame (0, 9)
    idx = [F.index(1, (0,)), F.index(3, (0,))]
    assert eps[F.index(1, (0,))] == pytest.approx(0.0)
    assert eps[F.index(0, (0,))] == pytest.approx(eps[F.index(2, (0,))])
    assert len(idx) == 2


def test_quasienergy_periodicity():
    s = zx_scheme(12.0, 9.0, 0.1, 0.25)
    spec = quasienergy_spectrum(s.floquet(8))
    for alpha in range(4):
        e0, _ = spec.dressed(alpha, (0,))
        e1, _ = spec.dressed(alpha, (1,))
        assert e1 - e0 == pytest.approx(9.0, abs=1e-8)


def test_quasienergies_converge_with_truncation():
    s = zx_scheme(12.0, 9.0, 0.1, 0.25)
    a = quasienergy_spectrum(s.floquet(6))
    b = quasienergy_spectrum(s.floquet(8))
    for alpha in range(4):
        assert a.dressed(alpha, (0,))[0] == pytest.approx(b.dressed(alpha, (0,))[0], abs=1e-9)


def test_iterative_matches_dense_in_window():
    F = table1_scheme(4).floquet()
    dense = quasienergy_spectrum(F)
    it = quasienergy_spectrum(F, "iterative", window=(0.0, 12))
    for flat, col in it.assignment.items():
        assert it.energies[col] == pytest.approx(dense.energies[dense.assignment[flat]], abs=1e-9)


def test_fold():
    assert fold_quasienergy(9.5, 9.0) == pytest.approx(0.5)
    assert fold_quasienergy(-4.6, 9.0) == pytest.approx(4.4)


def test_propagator_unitary_and_orthonormal():
    spec = quasienergy_spectrum(squeezing_scheme(12.0, 9.0, 0.2, 0.5).floquet(6))
    assert spec.gram_deviation() < 1e-10
    U = floquet_propagator(spec, 3.7)
    assert np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))) < 1e-10


def test_probabilities_sum_rule_and_initial_value():
    spec = quasienergy_spectrum(hopping_scheme(12.0, 9.0, 0.1, 0.25).floquet(8))
    probs = transition_probability_time_avg(spec, 1)
    assert probs.sum() == pytest.approx(1.0, abs=1e-6)
    t = np.linspace(0.0, 20.0, 41)
    for coherent in (False, True):
        P = np.array([transition_probability_time_dep(spec, 1, b, t, coherent) for b in range(4)])
        assert np.allclose(P.sum(axis=0), 1.0, atol=1e-6)
    assert P[1, 0] == pytest.approx(1.0, abs=1e-10)
    assert P[2, 0] == pytest.approx(0.0, abs=1e-10)


def test_time_average_matches_long_window():
    spec = quasienergy_spectrum(hopping_scheme(12.0, 9.0, 0.1, 0.25).floquet(8))
    avg = transition_probability_time_avg(spec, 1, 2)
    t = np.linspace(0.0, 20000.0, 200001)
    window = transition_probability_time_dep(spec, 1, 2, t).mean()
    assert window == pytest.approx(avg, abs=1e-3)


def test_leak_warning_with_tiny_truncation():
    s = zx_scheme(12.0, 9.0, 1.5, 0.25)
    with pytest.warns(TruncationWarning):
        transition_probability_time_avg(s.floquet(1), 1)


def test_time_domain_static_matches_expm():
    spec = CircuitSpec((12.0, 9.0), (((0, 1), CapacitiveCoupling(0.3)),))
    from floquet_circuits.circuits import build_static_hamiltonian

    H = build_static_hamiltonian(spec)
    psi0 = np.array([0, 1, 0, 0], dtype=complex)
    times = np.linspace(0, 10, 6)
    states = propagate_time_domain(spec, psi0, times)
    for t, psi in zip(times, states):
        assert np.max(np.abs(psi - expm(-1j * H * t) @ psi0)) < 1e-8


def test_floquet_evolution_matches_time_domain():
    s = zx_scheme(12.0, 9.0, 0.1, 0.25)
    psi0 = np.array([0, 0, 1, 0], dtype=complex)
    times = np.linspace(0, 20, 21)
    ref = propagate_time_domain(s.circuit, psi0, times)
    fl = evolve_state_floquet(quasienergy_spectrum(s.floquet(8)), psi0, times)
    assert np.max(np.abs(np.abs(ref) ** 2 - np.abs(fl) ** 2)) < 1e-6


def test_fourier_evaluate_matches_circuit_callable():
    s = squeezing_scheme(12.0, 9.0, 0.2, 0.5)
    fh = build_fourier_components(s.circuit, s.modes)
    psi0 = np.array([0, 0, 0, 1], dtype=complex)
    times = np.linspace(0, 5, 6)
    a = propagate_time_domain(s.circuit, psi0, times)
    b = propagate_time_domain(fh, psi0, times, mode_frequencies=s.modes)
    assert np.max(np.abs(a - b)) < 1e-8
