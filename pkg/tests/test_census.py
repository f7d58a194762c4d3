import time

import pytest

from zkspeed.circuit import gen_mock_circuit
from zkspeed.mle import SparsityProfile
from zkspeed.perf.census import (ROWS, TABLE1_MU20, CensusParams, analytical_census,
                                 build_eq_modmuls, compare_census, frac_modmuls)


@pytest.mark.parametrize("mu", range(4, 11))
@pytest.mark.parametrize("seed", [0, 1])
def test_analytical_tracks_instrumented(mu, seed):
    cmp = compare_census(gen_mock_circuit(mu, seed=seed))
    assert set(cmp) == set(ROWS)
    worst = max(abs(e) for _, _, e in cmp.values())
    assert worst < 0.01, {k: v for k, v in cmp.items() if abs(v[2]) >= 0.01}


def test_closed_form_rows_exact():
    cmp = compare_census(gen_mock_circuit(7, seed=3))
    for k in ("ZeroCheck Rounds", "PermCheck Rounds", "OpenCheck Rounds", "FracMLE", "ProdMLE",
              "Construct N&D", "All MLE Updates", "Batch Evaluations", "Build eq", "Linear Combine"):
        assert cmp[k][0] == cmp[k][1], k


def test_dense_workload_tracks():
    c = gen_mock_circuit(8, SparsityProfile(0.0, 0.0, 1.0), seed=5)
    cmp = compare_census(c)
    assert max(abs(e) for _, _, e in cmp.values()) < 0.01


def test_analytical_is_fast():
    t0 = time.perf_counter()
    cen = analytical_census(20)
    assert time.perf_counter() - t0 < 1.0
    assert cen.modmuls("Build eq") == 7 * build_eq_modmuls(20)


@pytest.mark.parametrize("row", ["ZeroCheck Rounds", "PermCheck Rounds", "OpenCheck Rounds",
                                 "All MLE Updates", "Construct N&D", "ProdMLE", "Batch Evaluations"])
def test_non_msm_rows_near_reference(row):
    got = analytical_census(20).modmuls(row) / 1e6
    assert got == pytest.approx(TABLE1_MU20[row], rel=0.05)


def test_sparsity_moves_msm_rows_only():
    a = analytical_census(16)
    b = analytical_census(16, CensusParams(sparsity=SparsityProfile(0.1, 0.1, 0.8)))
    assert b.modmuls("Witness MSMs") > 3 * a.modmuls("Witness MSMs")
    assert b.modmuls("ZeroCheck Rounds") == a.modmuls("ZeroCheck Rounds")


def test_frac_modmuls_partial_batch():
    assert frac_modmuls(100, 64) == 100 + 3 * 63 + 3 * 35
