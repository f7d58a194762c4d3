"""Acceptance criteria 1-7.

Each test prints one ``CRITERION n PASS|FAIL`` line (visible under
``pytest -v``) and then asserts.  ``python3 tests/test_acceptance.py`` prints
the same lines without pytest.
"""

from __future__ import annotations

import itertools
import random
import time

import numpy as np
import pytest

from zkspeed.circuit import corrupt_gate, corrupt_wiring, gen_mock_circuit
from zkspeed.ec import preset_curve, scalar_mul
from zkspeed.fp import batch_inverse, beea_inverse_int, count_modmuls, mod_inv_beea, preset_field
from zkspeed.mle import MleTable, build_eq, fix_variable, product_tree, stream_dfs
from zkspeed.msm import MsmInstance, aggregate_buckets, msm_naive, msm_sparse, pippenger
from zkspeed.perf import (DEFAULT_COSTS, KNOB_DOMAINS, KNOBS, REFERENCE_DESIGN, area_power_rollup,
                          design_space_size, dse, fracmle_batch_optimizer, fracmle_batch_sweep,
                          sweep_bandwidth)
from zkspeed.perf.census import TABLE1_MU20, analytical_census, build_eq_modmuls, compare_census
from zkspeed.perf.costs import COMPUTE_ROWS
from zkspeed.perf.msm_sim import aggregation_cycles, aggregation_reduction
from zkspeed.prover import _naive_commit, commitment_key, prove_all, self_verify
from zkspeed.sumcheck import (brute_force_sum, opencheck_composition, permcheck_composition, prove,
                              zerocheck_composition)
from zkspeed.transcript import Transcript

RESULTS: dict[int, tuple[bool, str]] = {}


def report(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = (ok, detail)
    print(f"\nCRITERION {n} {'PASS' if ok else 'FAIL'}: {detail}", flush=True)


def _emit(capsys, n, ok, detail):
    with capsys.disabled():
        report(n, ok, detail)


# --------------------------------------------------------------------------
# 1. functional soundness and completeness

def _tamper_phi(c, b, rng):
    """Commit to a phi table with one entry changed and splice it in."""
    ws = b.aux["wiring"]
    F = c.field
    e = list(ws.phi.entries)
    i = rng.randrange(len(e))
    e[i] = e[i] + F(rng.randrange(1, F.modulus))
    key = commitment_key(preset_curve("desk24"), c.n)
    b.phi_commitment = _naive_commit(MleTable(c.mu, e), key, 8)
    return b


def _tamper_round(c, b, rng):
    pf = rng.choice([b.zerocheck, b.permcheck, b.opencheck])
    msg = rng.choice(pf.rounds)
    k = rng.randrange(len(msg.evals))
    msg.evals[k] = msg.evals[k] + c.field(rng.randrange(1, c.field.modulus))
    return b


def criterion_1(trials: int = 100, circuits: int = 50):
    t0 = time.perf_counter()
    honest_fail = []
    for s in range(circuits):
        mu = 2 + s % 9
        c = gen_mock_circuit(mu, seed=1000 + s)
        rep = self_verify(prove_all(c), c)
        if not rep.all_pass:
            honest_fail.append((mu, s, rep.failed()))
    detected = {}
    for cls in ("gate", "wiring", "phi_commitment", "round"):
        hits = 0
        for t in range(trials):
            rng = random.Random(f"{cls}/{t}")
            mu = rng.randint(2, 6)
            c = gen_mock_circuit(mu, seed=rng.randrange(1 << 30))
            if cls == "gate":
                bad = corrupt_gate(c, rng=rng)
                hits += not self_verify(prove_all(bad), bad).all_pass
                continue
            if cls == "wiring":
                bad = corrupt_wiring(c, rng)
                hits += not self_verify(prove_all(bad), bad).all_pass
                continue
            b = prove_all(c)
            b = _tamper_phi(c, b, rng) if cls == "phi_commitment" else _tamper_round(c, b, rng)
            hits += not self_verify(b, c).all_pass
        detected[cls] = hits / trials
    dt = time.perf_counter() - t0
    ok = not honest_fail and all(r >= 0.99 for r in detected.values()) and dt < 120
    rates = ", ".join(f"{k} {v:.0%}" for k, v in detected.items())
    return ok, (f"{circuits - len(honest_fail)}/{circuits} honest circuits verify; "
                f"detection {rates}; {dt:.1f}s")


def test_criterion_1(capsys):
    ok, detail = criterion_1()
    _emit(capsys, 1, ok, detail)
    assert ok, detail


# --------------------------------------------------------------------------
# 2. oracle equivalence

def _msm_oracles() -> list[str]:
    bad = []
    toy = preset_curve("toy17")
    pts = [scalar_mul(k, toy.G).normalize() for k in range(1, 18)]
    # exhaustive: every pair of scalars over every pair of points, several windows
    for P, Q in itertools.product(pts[:6], repeat=2):
        for s1, s2 in itertools.product(range(18), repeat=2):
            for W in (1, 3, 5):
                inst = MsmInstance([s1, s2], [P, Q], W)
                want = msm_naive(inst)
                if pippenger(inst, None) != want or pippenger(inst, 2) != want or msm_sparse(inst) != want:
                    bad.append(f"exhaustive {s1},{s2} W={W}")
    rng = random.Random(2)
    for k in range(1, 13):
        n = 1 << k
        ps = [rng.choice(pts) for _ in range(n)]
        ss = [rng.choice([0, 1, rng.randrange(18)]) for _ in range(n)]
        inst = MsmInstance(ss, ps, rng.randint(1, 5))
        want = msm_naive(inst)
        for g in (None, 16):
            if pippenger(inst, g) != want or msm_sparse(inst, group_size=g) != want:
                bad.append(f"random n={n} g={g}")
    return bad


def _sumcheck_oracles(F) -> list[str]:
    bad = []
    rng = random.Random(3)
    comps = [zerocheck_composition(), permcheck_composition(F(rng.randrange(F.modulus))),
             opencheck_composition()]
    for comp in comps:
        for mu in range(1, 5):
            tabs = {s: MleTable(mu, [F.random(rng) for _ in range(1 << mu)]) for s in comp.slots}
            if prove(comp, tabs, Transcript(F, b"acc")).claimed_sum != brute_force_sum(comp, tabs):
                bad.append(f"{comp.kind} mu={mu}")
    return bad


def _inverse_oracles(F) -> list[str]:
    rng = random.Random(4)
    bad = []
    for n in (1, 2, 3, 17, 64, 200):
        xs = [F.random_nonzero(rng) for _ in range(n)]
        if batch_inverse(xs) != [mod_inv_beea(x) for x in xs]:
            bad.append(f"batch n={n}")
    return bad


def _dfs_oracles(F) -> list[str]:
    rng = random.Random(5)
    bad = []
    for mu in range(1, 9):
        r = [F.random(rng) for _ in range(mu)]
        leaves = [F.random(rng) for _ in range(1 << mu)]
        bfs_eval = MleTable(mu, leaves)
        for x in r:
            bfs_eval = fix_variable(bfs_eval, x)
        for p in (2, 4, 8):
            if stream_dfs("forward", r, parallelism=p).outputs != build_eq(r).entries:
                bad.append(f"forward mu={mu} p={p}")
            if stream_dfs("reduce", leaves, parallelism=p).outputs != [product_tree(leaves)[-1][0]]:
                bad.append(f"reduce mu={mu} p={p}")
            ev = stream_dfs("reduce", leaves, parallelism=p, combine="eval", point=r).outputs
            if ev != bfs_eval.entries:
                bad.append(f"eval mu={mu} p={p}")
            if stream_dfs("product", leaves, parallelism=p).layers() != product_tree(leaves):
                bad.append(f"product mu={mu} p={p}")
    return bad


def criterion_2():
    F = preset_curve("desk24").scalar_field
    parts = {"msm": _msm_oracles(), "sumcheck": _sumcheck_oracles(F),
             "batch_inverse": _inverse_oracles(F), "stream_dfs": _dfs_oracles(F)}
    bad = {k: v for k, v in parts.items() if v}
    detail = "msm, sumcheck H, batch inverse and DFS trees match their oracles exactly"
    return not bad, detail if not bad else f"mismatches: {bad}"


def test_criterion_2(capsys):
    ok, detail = criterion_2()
    _emit(capsys, 2, ok, detail)
    assert ok, detail


# --------------------------------------------------------------------------
# 3. constants

TABLE5 = {
    "MSM": (105.64, 76.19), "SumCheck": (24.96, 5.38), "Construct N&D": (1.35, 0.19),
    "FracMLE": (1.92, 0.25), "MLE Combine": (9.56, 0.34), "MLE Update": (5.84, 1.13),
    "Multifunction Tree": (12.28, 4.16), "Other": (1.98, 0.04), "Total Compute": (163.53, 87.68),
    "SRAM": (143.73, 19.60), "PHY": (59.20, 63.60), "Total Memory": (202.93, 83.20),
    "Total": (366.46, 170.88),
}


def criterion_3():
    F = preset_curve("desk24").scalar_field
    rng = random.Random(6)
    fails = []
    for mu in range(1, 13):
        r = [F.random(rng) for _ in range(mu)]
        with count_modmuls() as c:
            build_eq(r)
        if c.count != build_eq_modmuls(mu) or c.count != 2 ** (mu + 1) - 4:
            fails.append(f"build_eq mu={mu}")
    fr = preset_field("bls12_381_fr")
    its = beea_inverse_int(12345, fr.modulus, fr.bit_width)[2]
    if its != 509:
        fails.append(f"BEEA iterations {its}")
    rows = {k: (round(a, 2), round(p, 2)) for k, a, p in area_power_rollup(REFERENCE_DESIGN).table()}
    if rows != TABLE5:
        fails.append("rollup rows")
    best = fracmle_batch_optimizer()
    n2 = fracmle_batch_sweep()[0]
    if (best.n, best.units, n2.n, n2.units) != (64, 12, 2, 256):
        fails.append(f"batch optimizer {best.n}/{best.units}, n=2 -> {n2.units}")
    if design_space_size() != 577_500:
        fails.append("design space size")
    return not fails, ("build_eq 2^(mu+1)-4, BEEA 509, rollup 366.46 mm2 / 170.88 W, "
                       "batch 64 x 12 units, 577,500 points" if not fails else "; ".join(fails))


def test_criterion_3(capsys):
    ok, detail = criterion_3()
    _emit(capsys, 3, ok, detail)
    assert ok, detail


# --------------------------------------------------------------------------
# 4. modmul census

CENSUS_ROWS = ("Witness MSMs", "Wire Identity MSMs", "Poly Open MSMs", "ZeroCheck Rounds",
               "PermCheck Rounds", "OpenCheck Rounds", "All MLE Updates")


def criterion_4(mus=range(4, 13)):
    t0 = time.perf_counter()
    cen = analytical_census(20)
    dt = time.perf_counter() - t0
    dev = {k: cen.modmuls(k) / 1e6 / TABLE1_MU20[k] - 1 for k in CENSUS_ROWS}
    off = {k: v for k, v in dev.items() if abs(v) > 0.25}
    worst = 0.0
    for mu in mus:
        cmp = compare_census(gen_mock_circuit(mu, seed=mu))
        worst = max(worst, max(abs(e) for _, _, e in cmp.values()))
    ok = not off and worst < 0.01 and dt < 1.0
    parts = [f"{k} {v:+.0%}" for k, v in off.items()]
    detail = (f"mu=20 rows outside +-25%: {', '.join(parts) or 'none'}; "
              f"analytical vs instrumented worst {worst:.2%} over mu {mus.start}..{mus.stop - 1}; "
              f"analytical {dt * 1e3:.1f} ms")
    return ok, detail


def test_criterion_4(capsys):
    ok, detail = criterion_4()
    _emit(capsys, 4, ok, detail)
    assert ok, detail


# --------------------------------------------------------------------------
# 5. aggregation

def criterion_5():
    mean, per = aggregation_reduction()
    faster = all(aggregation_cycles(W, 16, DEFAULT_COSTS.padd_depth)
                 < aggregation_cycles(W, None, DEFAULT_COSTS.padd_depth) for W in (7, 8, 9, 10))
    curve = preset_curve("desk24")
    rng = random.Random(7)
    bad = []
    for nb in list(range(1, 32)) + [127]:
        ks = [rng.randrange(curve.order) for _ in range(nb)]
        buckets = [scalar_mul(k, curve.G) for k in ks]
        want = scalar_mul(sum((i + 1) * k for i, k in enumerate(ks)), curve.G)
        for g in [None] + list(range(1, nb + 2)):
            if aggregate_buckets(buckets, g) != want:
                bad.append((nb, g))
    ok = 0.85 <= mean <= 0.95 and faster and not bad
    per_s = ", ".join(f"W={w} {r:.1%}" for w, r in per.items())
    return ok, f"mean reduction {mean:.1%} ({per_s}); value-equivalent for all g: {not bad}"


def test_criterion_5(capsys):
    ok, detail = criterion_5()
    _emit(capsys, 5, ok, detail)
    assert ok, detail


# --------------------------------------------------------------------------
# 6. DSE

@pytest.fixture(scope="module")
def full_dse():
    t0 = time.perf_counter()
    res = dse(20)
    return res, time.perf_counter() - t0


def criterion_6(res, seconds):
    rt = res.runtime_ms
    best512 = rt[res.frontier(512)].min()
    f2048 = [i for i in res.frontier(2048) if res.area_mm2[i] > 300]
    best2048 = rt[f2048].min()
    ratio = best512 / best2048
    a_ok = ratio >= 2.0

    shape = tuple(len(KNOB_DOMAINS[k]) for k in KNOBS)
    grid = res.runtime_cycles.reshape(shape)
    nonmono = [k for ax, k in enumerate(KNOBS)
               if k != "msm_window" and not (np.diff(grid, axis=ax) <= 0).all()]
    b_ok = not nonmono

    rows = sweep_bandwidth(20, bandwidths=(512, 2048))
    msm = {(r.bandwidth_gbps, r.pes): r.speedup for r in rows if r.unit == "msm"}
    sc = {(r.bandwidth_gbps, r.pes): r.speedup for r in rows if r.unit == "sumcheck"}
    linear = all(msm[(bw, 16)] / msm[(bw, 1)] >= 0.75 * 16 for bw in (512, 2048))
    saturates = sc[(512, 16)] / sc[(512, 1)] < 2.0 and sc[(2048, 16)] > sc[(512, 16)]
    c_ok = linear and saturates
    ok = a_ok and b_ok and c_ok and seconds < 600
    detail = (f"(a) {'ok' if a_ok else 'FAIL'}: best 2048 GB/s frontier >300 mm2 {best2048:.2f} ms vs "
              f"best 512 GB/s {best512:.2f} ms = {ratio:.2f}x (need 2x); "
              f"(b) {'ok' if b_ok else 'FAIL'}: monotone{' except ' + ','.join(nonmono) if nonmono else ''}; "
              f"(c) {'ok' if c_ok else 'FAIL'}: MSM 16-PE speedup {msm[(512, 16)]:.1f}x, "
              f"SumCheck 16-PE {sc[(512, 16)]:.2f}x at 512 vs {sc[(2048, 16)]:.2f}x at 2048; "
              f"{len(res)} designs in {seconds:.1f}s")
    return ok, detail


def test_criterion_6(capsys, full_dse):
    ok, detail = criterion_6(*full_dse)
    _emit(capsys, 6, ok, detail)
    assert ok, detail


# --------------------------------------------------------------------------
# 7. qualitative orderings in place of the CPU and utilization numbers

def sumcheck_share_by_bandwidth(res) -> dict[int, float]:
    """Mean SumCheck share of compute area among global-frontier designs,
    grouped by their bandwidth."""
    idx = res.frontier()
    out: dict[int, list[float]] = {}
    for i in idx:
        ro = area_power_rollup(res.design(i))
        out.setdefault(int(res.bandwidth[i]), []).append(ro.rows_area["SumCheck"] / ro.compute_area)
    return {bw: float(np.mean(v)) for bw, v in sorted(out.items())}


def msm_top_fraction(res) -> float:
    idx = res.frontier()
    top = 0
    for i in idx:
        ro = area_power_rollup(res.design(i))
        top += max(COMPUTE_ROWS, key=lambda k: ro.rows_area[k]) == "MSM"
    return top / len(idx)


def criterion_7(res):
    ref = area_power_rollup(REFERENCE_DESIGN)
    ref_top = max(COMPUTE_ROWS, key=lambda k: ref.rows_area[k]) == "MSM"
    frac = msm_top_fraction(res)
    msm_ok = ref_top and frac > 0.5
    share = sumcheck_share_by_bandwidth(res)
    vals = list(share.values())
    grows = all(b >= a for a, b in zip(vals, vals[1:]))
    ok = msm_ok and grows
    shares = ", ".join(f"{bw}:{v:.2f}" for bw, v in share.items())
    detail = (f"MSM largest compute row at reference and on {frac:.0%} of frontier designs; "
              f"SumCheck area share by bandwidth along frontier [{shares}] "
              f"{'non-decreasing' if grows else 'not monotone'}; CPU speedup, CPU baselines, "
              f"utilization percentages and cross-accelerator comparisons are out of scope")
    return ok, detail


def test_criterion_7(capsys, full_dse):
    ok, detail = criterion_7(full_dse[0])
    _emit(capsys, 7, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    report(1, *criterion_1())
    report(2, *criterion_2())
    report(3, *criterion_3())
    report(4, *criterion_4())
    report(5, *criterion_5())
    t0 = time.perf_counter()
    res = dse(20)
    dt = time.perf_counter() - t0
    report(6, *criterion_6(res, dt))
    report(7, *criterion_7(res))
