"""Analytical step model of the full prover.

Every latency is in cycles at ``costs.clock_ghz``; with a 1 GHz clock one
GB/s of bandwidth moves one byte per cycle.  Step composition:

    witness -> ZeroCheck -> wiring -> PermCheck -> max(batch eval, poly open)

Each step is split into components that depend on few knobs, so the design
space explorer can tabulate them once and broadcast.  :func:`compose` works
on plain numbers and on numpy arrays alike.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..sumcheck import OPENCHECK, PERMCHECK, ZEROCHECK
from .costs import DEFAULT_COSTS, CostTables, DesignPoint, Rollup, area_power_rollup
from .fracmle import fracmle_fill_latency
from .msm_sim import msm_cycle_sim

# operand tables streamed per SumCheck kind (fz / eq tables included)
SUMCHECK_TABLES = {ZEROCHECK: 9, PERMCHECK: 11, OPENCHECK: 12}
# the witness commitments use the pessimistic profile: 45% zeros, 45% ones
WITNESS_ZERO = 0.45
WITNESS_ONE = 0.45
STEPS = ("witness", "zerocheck", "wiring", "permcheck", "batch_eval", "poly_open")


def _tail(kind: str, costs: CostTables) -> int:
    return {ZEROCHECK: costs.zerocheck_tail, PERMCHECK: costs.permcheck_tail,
            OPENCHECK: costs.opencheck_tail}[kind]


def _cycles(nbytes: float, bandwidth_gbps: float, costs: CostTables) -> int:
    return math.ceil(nbytes / (bandwidth_gbps / costs.clock_ghz))


# tables already in on-chip SRAM when round 1 starts (the circuit's own
# selectors and witnesses); everything else streams from HBM
ONCHIP_ROUND1 = {ZEROCHECK: 8, PERMCHECK: 0, OPENCHECK: 0}
# fz is an eq table the tree unit emits during round 1
TREE_FED = {ZEROCHECK: 1, PERMCHECK: 1, OPENCHECK: 0}


def eq_build_cycles(mu: int, costs: CostTables = DEFAULT_COSTS) -> int:
    """One eq table on the tree unit, limited by its multiplier count."""
    return math.ceil(((1 << (mu + 1)) - 4) / costs.tree_modmuls)


@dataclass(frozen=True)
class SumcheckTiming:
    cycles: int
    compute: int  # evaluation datapath busy cycles
    update: int  # MLE update busy cycles
    memory: int  # cycles the transfers alone would take
    bytes: int
    rounds: tuple[int, ...]

    @property
    def memory_bound(self) -> bool:
        return self.memory >= max(self.compute, self.update)


@lru_cache(maxsize=None)
def _sumcheck(mu: int, kind: str, pes: int, update_mults: int, bandwidth: int,
              costs: CostTables) -> SumcheckTiming:
    T = SUMCHECK_TABLES[kind]
    tail = _tail(kind, costs)
    sb = costs.scalar_bytes
    rounds = []
    comp = upd = mem = total_b = 0
    for j in range(1, mu + 1):
        inst = 1 << (mu - j)
        off = T - (ONCHIP_ROUND1[kind] + TREE_FED[kind] if j == 1 else 0)
        # evaluation pass: both halves of every streamed table
        ev = math.ceil(inst / pes) + tail
        eb = 2 * inst * off * sb
        e_lat = max(ev, _cycles(eb, bandwidth, costs))
        if j == 1 and TREE_FED[kind]:
            e_lat = max(e_lat, eq_build_cycles(mu, costs))
        # update pass, once the round challenge exists: read, fold, write back
        up = math.ceil(T * inst / update_mults)
        ub = (2 * inst * off + inst * T) * sb
        u_lat = max(up, _cycles(ub, bandwidth, costs))
        if j == 1 and TREE_FED[kind]:
            # fz is regenerated rather than stored
            u_lat = max(u_lat, eq_build_cycles(mu, costs))
        rounds.append(e_lat + u_lat)
        comp += ev
        upd += up
        mem += _cycles(eb + ub, bandwidth, costs)
        total_b += eb + ub
    return SumcheckTiming(sum(rounds), comp, upd, mem, total_b, tuple(rounds))


def sumcheck_latency(mu: int, kind: str, design: DesignPoint,
                     costs: CostTables = DEFAULT_COSTS) -> SumcheckTiming:
    """Streaming SumCheck.  Each round is an evaluation pass followed by an
    update pass, each taking ``max(compute, bytes/BW)``."""
    return _sumcheck(mu, kind, design.sumcheck_pes,
                     design.mle_update_pes * design.modmuls_per_update_pe,
                     design.bandwidth_gbps, costs)


@lru_cache(maxsize=None)
def _msm(n: int, frac_one: float, frac_zero: float, pes: int, window: int, points: int,
         bandwidth: int, costs: CostTables) -> int:
    # a scheduler may leave PEs idle, so more PEs never hurt
    best = None
    p = 1
    while p <= pes:
        d = DesignPoint(p, window, points, 1, 1, 1, 1, bandwidth)
        c = msm_cycle_sim(n, frac_one, frac_zero, d, costs).cycles
        best = c if best is None else min(best, c)
        p *= 2
    return best


def msm_latency(n: int, design: DesignPoint, costs: CostTables = DEFAULT_COSTS,
                frac_one: float = 0.0, frac_zero: float = 0.0) -> int:
    return _msm(n, frac_one, frac_zero, design.msm_pes, design.msm_window,
                design.msm_points_per_pe, design.bandwidth_gbps, costs)


def msm_components(mu: int, pes: int, window: int, points: int, bandwidth: int,
                   costs: CostTables = DEFAULT_COSTS) -> dict[str, int]:
    n = 1 << mu
    args = (pes, window, points, bandwidth, costs)
    return {
        "witness_msm": 3 * _msm(n, WITNESS_ONE, WITNESS_ZERO, *args),
        "phi_msm": _msm(n, 0.0, 0.0, *args),
        "pi_msm": _msm(n, 0.0, 0.0, *args),
        "ladder_msm": sum(_msm(1 << k, 0.0, 0.0, *args) for k in range(mu)),
    }


def sumcheck_components(mu: int, pes: int, update_mults: int, bandwidth: int,
                        costs: CostTables = DEFAULT_COSTS) -> dict[str, int]:
    return {k: _sumcheck(mu, k, pes, update_mults, bandwidth, costs).cycles
            for k in (ZEROCHECK, PERMCHECK, OPENCHECK)}


def frac_component(mu: int, fracmle_pes: int, costs: CostTables = DEFAULT_COSTS) -> int:
    """N&D plus batched inversion: one element per cycle per FracMLE PE."""
    return math.ceil((1 << mu) / fracmle_pes) + fracmle_fill_latency(costs)


def fixed_components(mu: int, bandwidth: int, costs: CostTables = DEFAULT_COSTS) -> dict[str, int]:
    """Steps whose datapaths have no knob: tree, combine, wiring traffic."""
    n = 1 << mu
    sb = costs.scalar_bytes
    bw = lambda b: _cycles(b, bandwidth, costs)
    tree = costs.tree_modmuls
    comb = costs.combine_modmuls
    # w1..3 and sigma1..3 in, phi and the merged v out
    wiring_mem = bw((6 * n + 3 * n) * sb)
    prod_tree = math.ceil(n / costs.tree_outputs_per_cycle)
    # 22 eq-weighted sums over 13 tables, plus 6 eq tables
    batch = max(math.ceil((22 * n + 6 * (2 * n - 4)) / tree), bw(13 * n * sb))
    # y_k = sum of eta^i f_i per point: 13 tables in, 6 out
    combine = max(math.ceil(22 * n / comb), bw(19 * n * sb))
    # OpenCheck's 6 eq tables come from the tree unit, beside the combine
    eqs = 6 * eq_build_cycles(mu, costs)
    gprime = max(math.ceil(6 * n / comb), bw(7 * n * sb))
    return {"wiring_mem": wiring_mem, "prod_tree": prod_tree, "batch_eval": batch,
            "combine": combine, "open_eqs": eqs, "gprime": gprime}


def compose(c: dict):
    """Step latencies from components (scalars or broadcastable arrays)."""
    mx = np.maximum
    wiring = mx(mx(c["frac"], c["wiring_mem"]), mx(c["phi_msm"], c["prod_tree"])) + c["pi_msm"]
    poly_open = mx(c["combine"], c["open_eqs"]) + c[OPENCHECK] + c["gprime"] + c["ladder_msm"]
    steps = {
        "witness": c["witness_msm"],
        "zerocheck": c[ZEROCHECK],
        "wiring": wiring,
        "permcheck": c[PERMCHECK],
        "batch_eval": c["batch_eval"],
        "poly_open": poly_open,
    }
    total = (steps["witness"] + steps["zerocheck"] + steps["wiring"] + steps["permcheck"]
             + mx(steps["batch_eval"], steps["poly_open"]))
    return steps, total


def components(mu: int, d: DesignPoint, costs: CostTables = DEFAULT_COSTS) -> dict:
    c = {}
    c.update(msm_components(mu, d.msm_pes, d.msm_window, d.msm_points_per_pe, d.bandwidth_gbps, costs))
    c.update(sumcheck_components(mu, d.sumcheck_pes, d.mle_update_pes * d.modmuls_per_update_pe,
                                 d.bandwidth_gbps, costs))
    c["frac"] = frac_component(mu, d.fracmle_pes, costs)
    c.update(fixed_components(mu, d.bandwidth_gbps, costs))
    return c


@dataclass
class PerfReport:
    mu: int
    design: DesignPoint
    steps: dict[str, int]
    step_bytes: dict[str, int]
    components: dict[str, int]
    utilization: dict[str, float]
    runtime_cycles: int
    rollup: Rollup
    costs: CostTables = field(default=DEFAULT_COSTS, repr=False)

    @property
    def runtime_ms(self) -> float:
        return self.runtime_cycles / (self.costs.clock_ghz * 1e6)

    @property
    def area_mm2(self) -> float:
        return self.rollup.total_area

    @property
    def power_w(self) -> float:
        return self.rollup.total_power

    def breakdown(self) -> list[tuple[str, int, float]]:
        return [(k, int(v), v / self.runtime_cycles) for k, v in self.steps.items()]


def _step_bytes(mu: int, d: DesignPoint, costs: CostTables) -> dict[str, int]:
    n = 1 << mu
    sb, pb = costs.scalar_bytes, costs.point_bytes
    sc = lambda k: _sumcheck(mu, k, 1, 1, d.bandwidth_gbps, costs).bytes
    dense = n * (pb + sb)
    return {
        "witness": 3 * round(n * (1 - WITNESS_ZERO - WITNESS_ONE)) * (pb + sb)
        + 3 * round(n * WITNESS_ONE) * pb,
        "zerocheck": sc(ZEROCHECK),
        "wiring": 9 * n * sb + 2 * dense,
        "permcheck": sc(PERMCHECK),
        "batch_eval": 13 * n * sb,
        "poly_open": 26 * n * sb + sc(OPENCHECK) + sum((1 << k) * (pb + sb) for k in range(mu)),
    }


def evaluate(d: DesignPoint, mu: int = 20, costs: CostTables = DEFAULT_COSTS,
             strict: bool = True) -> PerfReport:
    if strict:
        d.validate()
    c = components(mu, d, costs)
    steps, total = compose(c)
    steps = {k: int(v) for k, v in steps.items()}
    total = int(total)
    nbytes = _step_bytes(mu, d, costs)
    msm_busy = c["witness_msm"] + c["phi_msm"] + c["pi_msm"] + c["ladder_msm"]
    sc_busy = sum(_sumcheck(mu, k, d.sumcheck_pes, 1, d.bandwidth_gbps, costs).compute
                  for k in SUMCHECK_TABLES)
    util = {
        "msm": msm_busy / total,
        "sumcheck": sc_busy / total,
        "fracmle": c["frac"] / total,
        "tree": (c["prod_tree"] + c["open_eqs"]) / total,
        "memory": sum(nbytes.values()) / (d.bandwidth_gbps / costs.clock_ghz) / total,
    }
    return PerfReport(mu, d, steps, nbytes, {k: int(v) for k, v in c.items()}, util, total,
                      area_power_rollup(d, costs, mu, strict), costs)
