import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from zkspeed.fp import count_modmuls
from zkspeed.mle import MleTable, build_eq, evaluate
from zkspeed.perf.census import SUMCHECK_TABLES, _sumcheck_counts, sumcheck_modmuls
from zkspeed.sumcheck import (OPENCHECK, PERMCHECK, ZEROCHECK, SumCheckError, barycentric_eval,
                              barycentric_extend, brute_force_sum, dump_proof, load_proof,
                              opencheck_composition, permcheck_composition, prove, verify,
                              zerocheck_composition)
from zkspeed.transcript import Transcript


def composition(kind, F):
    if kind == ZEROCHECK:
        return zerocheck_composition()
    if kind == PERMCHECK:
        return permcheck_composition(F(123457))
    return opencheck_composition()


def random_tables(comp, F, mu, seed):
    rng = random.Random(seed)
    return {s: MleTable(mu, [F.random(rng) for _ in range(1 << mu)]) for s in comp.slots}


def oracle_for(tables):
    return lambda r: {s: evaluate(t, r) for s, t in tables.items()}


kinds = st.sampled_from([ZEROCHECK, PERMCHECK, OPENCHECK])


@given(kinds, st.integers(1, 5), st.integers(0, 10 ** 6), st.booleans())
def test_honest_proof_verifies(F, kind, mu, seed, shared):
    comp = composition(kind, F)
    tabs = random_tables(comp, F, mu, seed)
    pf = prove(comp, tabs, Transcript(F, b"t"), shared=shared)
    assert pf.claimed_sum == brute_force_sum(comp, tabs)
    assert pf.num_rounds == mu
    assert all(m.degree == comp.max_degree for m in pf.rounds)
    assert verify(pf, comp, Transcript(F, b"t"), oracle_for(tabs))


@given(kinds, st.integers(1, 5), st.integers(0, 10 ** 6), st.data())
def test_tampered_round_rejected(F, kind, mu, seed, data):
    comp = composition(kind, F)
    tabs = random_tables(comp, F, mu, seed)
    pf = prove(comp, tabs, Transcript(F, b"t"))
    j = data.draw(st.integers(0, mu - 1))
    k = data.draw(st.integers(0, comp.max_degree))
    pf.rounds[j].evals[k] = pf.rounds[j].evals[k] + 1
    res = verify(pf, comp, Transcript(F, b"t"), oracle_for(tabs))
    assert not res.ok
    assert res.round is not None and res.round <= mu + 1


def test_wrong_claimed_sum_rejected(F):
    comp = zerocheck_composition()
    tabs = random_tables(comp, F, 3, 1)
    pf = prove(comp, tabs, Transcript(F, b"t"))
    pf.claimed_sum = pf.claimed_sum + 1
    res = verify(pf, comp, Transcript(F, b"t"), oracle_for(tabs))
    assert not res.ok and res.reason == "round-sum" and res.round == 1


def test_wrong_final_eval_rejected(F):
    comp = opencheck_composition()
    tabs = random_tables(comp, F, 3, 2)
    pf = prove(comp, tabs, Transcript(F, b"t"))
    pf.final_evals["y1"] = pf.final_evals["y1"] + 1
    res = verify(pf, comp, Transcript(F, b"t"), oracle_for(tabs))
    assert not res.ok and res.round == 4


@given(st.integers(1, 6), st.integers(0, 10 ** 6))
def test_barycentric_matches_polynomial(F, d, seed):
    rng = random.Random(seed)
    coeffs = [F.random(rng) for _ in range(d + 1)]

    def f(x):
        acc = F.zero
        for c in reversed(coeffs):
            acc = acc * x + c
        return acc

    evals = [f(F(i)) for i in range(d + 1)]
    x = F.random(rng)
    assert barycentric_eval(evals, x) == f(x)
    assert barycentric_extend(evals, d + 4) == [f(F(i)) for i in range(d + 4)]


@pytest.mark.parametrize("kind", [ZEROCHECK, PERMCHECK, OPENCHECK])
@pytest.mark.parametrize("mu", [2, 4, 6])
def test_per_term_census_closed_form(F, kind, mu):
    comp = composition(kind, F)
    tabs = random_tables(comp, F, mu, mu)
    rs = [F(3 + i) for i in range(mu)]
    ev, up = _sumcheck_counts(comp, tabs, rs)
    assert ev == sumcheck_modmuls(mu, kind)
    assert up == len(comp.slots) * ((1 << mu) - 1)
    assert len(comp.slots) == SUMCHECK_TABLES[kind]


def test_shared_datapath_is_cheaper(F):
    comp = zerocheck_composition()
    tabs = random_tables(comp, F, 5, 9)
    with count_modmuls() as shared:
        prove(comp, tabs, Transcript(F, b"t"), shared=True)
    with count_modmuls() as unshared:
        prove(comp, tabs, Transcript(F, b"t"), shared=False)
    assert shared.count < unshared.count


def test_zerocheck_on_satisfied_gates_sums_to_zero(F):
    from zkspeed.circuit import gen_mock_circuit
    c = gen_mock_circuit(4, seed=3)
    tabs = dict(c.tables)
    tabs["fz"] = build_eq([F(5 + i) for i in range(4)])
    assert brute_force_sum(zerocheck_composition(), tabs).is_zero()


@given(kinds, st.integers(1, 4), st.integers(0, 1000))
def test_proof_serialization_roundtrip(F, kind, mu, seed):
    comp = composition(kind, F)
    pf = prove(comp, random_tables(comp, F, mu, seed), Transcript(F, b"t"))
    buf = dump_proof(pf, comp)
    back, off = load_proof(buf, comp, F)
    assert off == len(buf)
    assert back == pf


def test_unbound_slot_rejected(F):
    comp = zerocheck_composition()
    tabs = random_tables(comp, F, 2, 0)
    del tabs["qc"]
    with pytest.raises(SumCheckError):
        prove(comp, tabs, Transcript(F, b"t"))
