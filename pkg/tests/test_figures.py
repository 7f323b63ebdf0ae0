import numpy as np
import pytest

from floquet_circuits.catalog import zx_params
from floquet_circuits.floquet import quasienergy_spectrum, transition_probability_time_avg
from floquet_circuits.operators import QubitRegister
from floquet_circuits.schemes import single_mode

W1, W2, B = 12.0, 9.0, 0.15
STEP = 0.0005
REG = QubitRegister(2)
SOURCE = REG.index_of([0, 0])
TARGET = REG.index_of([0, 1])


def _ridge(g_c):
    grid = W2 + np.arange(-120, 121) * STEP
    probs = []
    for wd in grid:
        s = single_mode("fig3", W1, W2, g_c, B, "x", wd, (W1, 0.0), truncation=4)
        spec = quasienergy_spectrum(s.floquet(), method="dense")
        probs.append(transition_probability_time_avg(spec, SOURCE, TARGET))
    return grid, np.array(probs)


@pytest.mark.parametrize("g_c", [0.1, 0.2, 0.3])
def test_fig3_ridge_follows_shifted_qubit_frequency(g_c):
    grid, probs = _ridge(g_c)
    peak = grid[np.argmax(probs)]
    # delta_omega_2 multiplies sigma^z, so the qubit splitting moves by twice its value
    predicted = W2 + 2.0 * zx_params(W1, W2, B, g_c / B).value("delta_omega_2")
    assert probs.max() > 0.4
    assert abs(peak - predicted) <= STEP
