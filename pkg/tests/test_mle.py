import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from zkspeed.fp import count_modmuls
from zkspeed.mle import (MleError, MleTable, SparsityProfile, build_eq, eq_eval, evaluate,
                         evaluate_via_eq, fix_variable, product_tree, stream_dfs)


def lagrange_eval(vals, r, F):
    """Direct sum over the hypercube; bit j of the index is x_{j+1}."""
    acc = F.zero
    for i, v in enumerate(vals):
        w = F.one
        for j, rj in enumerate(r):
            w = w * (rj if (i >> j) & 1 else F.one - rj)
        acc = acc + v * w
    return acc


def rand_table(F, mu, seed):
    rng = random.Random(seed)
    return MleTable(mu, [F.random(rng) for _ in range(1 << mu)])


def rand_point(F, mu, seed):
    rng = random.Random(seed + 10_000)
    return [F.random(rng) for _ in range(mu)]


@given(st.integers(1, 7), st.integers(0, 10 ** 6))
def test_evaluate_matches_lagrange(F, mu, seed):
    t, r = rand_table(F, mu, seed), rand_point(F, mu, seed)
    want = lagrange_eval(t.entries, r, F)
    assert evaluate(t, r) == want
    assert evaluate_via_eq(t, r) == want


@given(st.integers(1, 7), st.integers(0, 10 ** 6))
def test_build_eq_matches_definition(F, mu, seed):
    r = rand_point(F, mu, seed)
    eq = build_eq(r)
    for i, v in enumerate(eq.entries):
        x = [F((i >> j) & 1) for j in range(mu)]
        assert v == eq_eval(x, r)
    assert sum(eq.entries[1:], eq.entries[0]) == F.one
    assert build_eq(r, share_complement=True).entries == eq.entries


@pytest.mark.parametrize("mu", [1, 2, 5, 9])
def test_build_eq_modmul_count(F, mu):
    r = rand_point(F, mu, mu)
    with count_modmuls() as c:
        build_eq(r)
    assert c.count == 2 ** (mu + 1) - 4
    with count_modmuls() as c:
        build_eq(r, share_complement=True)
    assert c.count == 2 ** mu - 2


@given(st.integers(1, 6), st.integers(0, 10 ** 6))
def test_fix_variable_binds_lowest_bit(F, mu, seed):
    t, r = rand_table(F, mu, seed), rand_point(F, mu, seed)
    t1 = fix_variable(t, r[0])
    assert t1.num_vars == mu - 1
    if mu > 1:
        assert evaluate(t1, r[1:]) == evaluate(t, r)
    else:
        assert t1.entries[0] == evaluate(t, r)


def test_fix_variable_costs_one_modmul_per_output(F):
    t = rand_table(F, 6, 1)
    with count_modmuls() as c:
        fix_variable(t, F(7))
    assert c.count == 32


@given(st.integers(1, 8), st.integers(0, 10 ** 6))
def test_product_tree_root(F, mu, seed):
    t = rand_table(F, mu, seed)
    layers = product_tree(t.entries)
    root = F.one
    for v in t.entries:
        root = root * v
    assert len(layers) == mu and layers[-1] == [root]


@given(st.integers(1, 8), st.sampled_from([2, 4, 8]), st.integers(0, 1000))
def test_dfs_forward_emits_eq(F, mu, p, seed):
    r = rand_point(F, mu, seed)
    res = stream_dfs("forward", r, parallelism=p)
    assert res.outputs == build_eq(r).entries
    assert res.max_working_set <= mu + p


@given(st.integers(1, 8), st.sampled_from([2, 4]), st.integers(0, 1000))
def test_dfs_reduce_and_product(F, mu, p, seed):
    t = rand_table(F, mu, seed)
    r = rand_point(F, mu, seed)
    red = stream_dfs("reduce", t.entries, parallelism=p)
    assert red.outputs == [product_tree(t.entries)[-1][0]]
    ev = stream_dfs("reduce", iter(t.entries), length=len(t), parallelism=p, combine="eval", point=r)
    assert ev.outputs == [evaluate(t, r)]
    prod = stream_dfs("product", t.entries, parallelism=p)
    assert prod.layers() == product_tree(t.entries)
    # depth-first: working set grows with depth, not with table size
    assert red.max_working_set <= p + mu


def test_mle_errors(F):
    with pytest.raises(MleError):
        MleTable.from_ints(F, [1, 2, 3])
    with pytest.raises(MleError):
        MleTable(2, [F.one])
    with pytest.raises(MleError):
        build_eq([])
    with pytest.raises(MleError):
        stream_dfs("sideways", [F.one, F.one])
    with pytest.raises(MleError):
        SparsityProfile(0.5, 0.5, 0.5)
    with pytest.raises(MleError):
        SparsityProfile(-0.1, 0.6, 0.5)


def test_sparsity_measure_roundtrip():
    sp = SparsityProfile.measure([0, 0, 1, 5])
    assert (sp.frac_zero, sp.frac_one, sp.frac_dense) == (0.5, 0.25, 0.25)
    assert SparsityProfile.from_dict(sp.to_dict()) == sp
