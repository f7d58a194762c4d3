"""Cycle model of the MSM unit.

Each PE owns one pipelined PADD (issue 1/cycle, ``D`` cycles latency).

* bucket accumulation: one point per cycle per window, plus a pipeline
  drain per batch of points held in local SRAM; a bucket still in flight
  cannot be reissued, which :func:`simulate_bucket_phase` models with a
  small reorder queue.
* aggregation: the op DAG recorded by :mod:`zkspeed.msm` is list-scheduled
  on the PADD pipeline (:func:`schedule_dag`).
* window combine: Horner over windows, a dependent chain of W doublings
  and one addition per window.

Two partitions are modeled, points across PEs or windows across PEs; an
MSM runs with whichever is faster.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass
from functools import lru_cache

from ..msm import OpLog, _aggregate, _Tracer, _Val
from .costs import DEFAULT_COSTS, CostTables, DesignPoint, msm_windows


def schedule_dag(deps: list[tuple[int, ...]], depth: int, copies: int = 1) -> int:
    """Makespan of ``copies`` independent instances of a DAG on one pipeline.

    ``deps[i]`` lists the predecessors of op i (all < i).  Greedy list
    scheduling: each cycle issues the ready op with the earliest ready time.
    """
    n = len(deps)
    if n == 0 or copies == 0:
        return 0
    succ: list[list[int]] = [[] for _ in range(n)]
    indeg = [len(d) for d in deps]
    for i, ds in enumerate(deps):
        for j in ds:
            succ[j].append(i)
    pending = [indeg[:] for _ in range(copies)]
    ready_at = [[0] * n for _ in range(copies)]
    heap = [(0, c, i) for c in range(copies) for i in range(n) if indeg[i] == 0]
    heapq.heapify(heap)
    cycle = 0
    finish = 0
    while heap:
        r, c, i = heapq.heappop(heap)
        t = max(cycle, r)
        cycle = t + 1
        done = t + depth
        finish = max(finish, done)
        for s in succ[i]:
            ready_at[c][s] = max(ready_at[c][s], done)
            pending[c][s] -= 1
            if pending[c][s] == 0:
                heapq.heappush(heap, (ready_at[c][s], c, s))
    return finish


@lru_cache(maxsize=None)
def aggregation_dag(window: int, group_size: int | None) -> tuple[tuple[int, ...], ...]:
    from ..ec import preset_curve
    ident = preset_curve("toy17").identity
    log = OpLog()
    n = (1 << window) - 1
    tr = _Tracer(log, "aggregate")
    _aggregate(tr, [_Val(ident)] * n, n if group_size is None else group_size, ident, "agg")
    return tuple(r.deps for r in log.records)


@lru_cache(maxsize=None)
def aggregation_cycles(window: int, group_size: int | None, depth: int, copies: int = 1) -> int:
    return schedule_dag(list(aggregation_dag(window, group_size)), depth, copies)


def aggregation_reduction(windows=(7, 8, 9, 10), group_size: int = 16,
                          depth: int = DEFAULT_COSTS.padd_depth) -> tuple[float, dict[int, float]]:
    """Mean and per-window latency reduction of grouped vs naive aggregation."""
    per = {}
    for w in windows:
        naive = aggregation_cycles(w, None, depth)
        grouped = aggregation_cycles(w, group_size, depth)
        per[w] = 1 - grouped / naive
    return sum(per.values()) / len(per), per


def simulate_bucket_phase(digits: list[int], depth: int, queue: int = 32) -> int:
    """Cycles to accumulate one window's digits with a hazard window.

    Each cycle the fetch stage appends one digit to a reorder queue of
    ``queue`` entries (if there is room) and the issue stage sends the
    oldest queued digit whose bucket is not in flight.
    """
    busy_until: dict[int, int] = {}
    parked: list[int] = []
    stream = iter(d for d in digits if d)
    cycle = 0
    last = 0
    exhausted = False
    while True:
        if not exhausted and len(parked) < queue:
            d = next(stream, None)
            if d is None:
                exhausted = True
            else:
                parked.append(d)
        for k, d in enumerate(parked):
            if busy_until.get(d, -1) <= cycle:
                del parked[k]
                busy_until[d] = cycle + depth
                last = cycle + depth
                break
        if exhausted and not parked:
            return max(last, cycle)
        cycle += 1


@dataclass
class MsmTiming:
    cycles: int
    phases: dict[str, int]
    bytes: int
    partition: str

    @property
    def dominant(self) -> str:
        return max(self.phases, key=self.phases.get)

    @property
    def aggregation_dominates(self) -> bool:
        return self.dominant == "aggregate"


def msm_cycle_sim(n_points: int, frac_one: float = 0.0, frac_zero: float = 0.0,
                  design: DesignPoint = DesignPoint(), costs: CostTables = DEFAULT_COSTS,
                  group_size: int | None = 16, sparse: bool | None = None) -> MsmTiming:
    """Cycles for one MSM.  With ``sparse`` the 1-scalars are tree-reduced
    and zeros skipped; otherwise every point goes through Pippenger."""
    if sparse is None:
        sparse = frac_one > 0 or frac_zero > 0
    P = design.msm_pes
    W = design.msm_window
    S = design.msm_points_per_pe
    D = costs.padd_depth
    nw = msm_windows(W, costs)
    if sparse:
        n_one = round(n_points * frac_one)
        n_dense = n_points - n_one - round(n_points * frac_zero)
    else:
        n_one, n_dense = 0, n_points
    ones = 0
    if n_one > 1:
        per = math.ceil(n_one / P)
        ones = per + D * max(1, math.ceil(math.log2(per))) + D * math.ceil(math.log2(P))
    nbytes = n_dense * (costs.point_bytes + costs.scalar_bytes) + n_one * costs.point_bytes
    mem = math.ceil(nbytes / design.bandwidth_gbps)
    best = None
    if n_dense:
        horner = (nw - 1) * (W + 1) * D
        # points across PEs
        per = math.ceil(n_dense / P)
        acc = nw * (per + math.ceil(per / S) * D)
        agg = aggregation_cycles(W, group_size, D, nw)
        cross = D * math.ceil(math.log2(P)) + nw if P > 1 else 0
        pp = {"accumulate": acc, "aggregate": agg, "combine": cross + horner}
        # windows across PEs
        wpp = math.ceil(nw / P)
        acc_w = wpp * (n_dense + math.ceil(n_dense / S) * D)
        agg_w = aggregation_cycles(W, group_size, D, wpp)
        wp = {"accumulate": acc_w, "aggregate": agg_w, "combine": horner}
        for name, ph in (("points", pp), ("windows", wp)):
            total = max(ones + ph["accumulate"], mem) + ph["aggregate"] + ph["combine"]
            if best is None or total < best[0]:
                best = (total, name, ph)
        total, name, ph = best
        phases = {"ones": ones, **ph}
        return MsmTiming(total, phases, nbytes, name)
    return MsmTiming(max(ones, mem), {"ones": ones, "accumulate": 0, "aggregate": 0, "combine": 0},
                     nbytes, "points")


def bucket_phase_estimate(n_digits: int, depth: int) -> int:
    return n_digits + depth


def random_window_digits(n: int, window: int, rng: random.Random) -> list[int]:
    return [rng.randrange(1 << window) for _ in range(n)]
