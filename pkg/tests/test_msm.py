import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from zkspeed.ec import preset_curve, scalar_mul
from zkspeed.fp import count_modmuls
from zkspeed.msm import (PADD, PDBL, MsmError, MsmInstance, OpLog, SparsityTally, aggregate_buckets,
                         aggregation_critical_path, aggregation_padds, expected_pippenger_ops,
                         msm_naive, msm_sparse, msm_sparse_with_stats, pippenger)
from zkspeed.perf.census import expected_msm_ops

CURVE = preset_curve("desk24")
BASE = [scalar_mul(7 * i + 3, CURVE.G).normalize() for i in range(64)]


def instance(scalars, window=None):
    return MsmInstance(scalars, BASE[:len(scalars)], window)


scalar = st.integers(0, CURVE.order - 1)
sparse_scalar = st.one_of(st.just(0), st.just(1), scalar)


@given(st.lists(scalar, min_size=1, max_size=40), st.integers(1, 12),
       st.sampled_from([None, 1, 2, 4, 16]))
def test_pippenger_matches_naive(ss, W, g):
    inst = instance(ss, W)
    assert pippenger(inst, g) == msm_naive(inst)


@given(st.lists(sparse_scalar, min_size=1, max_size=40), st.sampled_from([None, 4, 16]))
def test_sparse_matches_naive(ss, g):
    inst = instance(ss)
    assert msm_sparse(inst, SparsityTally.of(ss), g) == msm_naive(inst)


@given(st.lists(scalar, min_size=1, max_size=40), st.integers(2, 10), st.sampled_from([None, 2, 16]))
def test_op_counts_match_closed_form(ss, W, g):
    inst = instance(ss, W)
    log = OpLog()
    with count_modmuls() as c:
        pippenger(inst, g, log)
    a, d = expected_pippenger_ops(inst, g)
    assert (log.count(PADD), log.count(PDBL)) == (a, d)
    assert c.count == 14 * (a + d)


@given(st.integers(1, 70), st.sampled_from([None, 1, 2, 3, 4, 8, 16]), st.integers(0, 1000))
def test_aggregation_weighted_sum(nb, g, seed):
    rng = random.Random(seed)
    ks = [rng.randrange(CURVE.order) for _ in range(nb)]
    buckets = [scalar_mul(k, CURVE.G) for k in ks]
    want = scalar_mul(sum((i + 1) * k for i, k in enumerate(ks)), CURVE.G)
    log = OpLog()
    assert aggregate_buckets(buckets, g, log) == want
    assert (log.count(PADD), log.count(PDBL)) == aggregation_padds(nb, g)


def test_grouped_aggregation_shortens_critical_path():
    serial = aggregation_critical_path(9, None)
    grouped = aggregation_critical_path(9, 16)
    assert serial == 511 + 1  # T trails S by one add
    assert grouped < serial / 10


def test_sparse_stats():
    ss = [0] * 10 + [1] * 20 + [12345, 999, 77]
    inst = instance(ss)
    res, stats = msm_sparse_with_stats(inst, log=OpLog())
    assert res == msm_naive(inst)
    assert stats.ones_padds == 19
    assert stats.ones_depth == 5  # ceil(log2 20)


def test_tally_mismatch_rejected():
    with pytest.raises(MsmError):
        msm_sparse(instance([0, 1, 5]), SparsityTally(1, 1, 0))


def test_instance_validation():
    with pytest.raises(MsmError):
        MsmInstance([1, 2], BASE[:1])
    with pytest.raises(MsmError):
        MsmInstance([], [])
    with pytest.raises(MsmError):
        MsmInstance([1], BASE[:1], window_size=0)
    with pytest.raises(MsmError):
        MsmInstance([-1], BASE[:1])


def test_expected_ops_tracks_uniform_scalars():
    # the analytical bucket model against the exact count on random scalars
    rng = random.Random(4)
    n, W = 2000, 6
    pts = [CURVE.G] * n
    ss = [rng.randrange(CURVE.order) for _ in range(n)]
    exact = sum(expected_pippenger_ops(MsmInstance(ss, pts, W), 16))
    model = sum(expected_msm_ops(n, 24, W, 16))
    assert abs(model - exact) / exact < 0.01
