"""Design-space exploration over the knob cross product.

Each step latency depends on a few knobs only, so components are tabulated
per knob subset and broadcast over the full 8-dimensional grid.  The scalar
path (:func:`zkspeed.perf.model.evaluate`) uses the same component
functions, which the tests compare point by point.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..sumcheck import OPENCHECK, PERMCHECK, ZEROCHECK
from .costs import (COMPUTE_ROWS, DEFAULT_COSTS, KNOB_DOMAINS, KNOBS, CostTables, DesignPoint,
                    msm_pe_area_power, phy_area)
from .fracmle import fracmle_batch_sweep
from .model import (STEPS, compose, fixed_components, frac_component, msm_components,
                    sumcheck_components)

CSV_SCHEMA = "zkspeed-dse/1"


def _grid(domains, keys, fn) -> np.ndarray:
    """Array over the full grid shape (singleton on other axes) holding
    ``fn(*values)`` for every combination of ``keys``."""
    idx = [KNOBS.index(k) for k in keys]
    shape = [1] * len(KNOBS)
    for i in idx:
        shape[i] = len(domains[KNOBS[i]])
    out = np.empty(shape, dtype=np.float64)
    for pos in np.ndindex(*shape):
        vals = [domains[KNOBS[i]][pos[i]] for i in idx]
        out[pos] = fn(*vals)
    return out


def component_grids(mu: int, domains: dict, costs: CostTables = DEFAULT_COSTS) -> dict[str, np.ndarray]:
    g: dict[str, np.ndarray] = {}
    msm_keys = ("msm_pes", "msm_window", "msm_points_per_pe", "bandwidth_gbps")
    cache = {}

    def msm(name):
        def f(P, W, S, BW):
            key = (P, W, S, BW)
            if key not in cache:
                cache[key] = msm_components(mu, P, W, S, BW, costs)
            return cache[key][name]
        return f

    for name in ("witness_msm", "phi_msm", "pi_msm", "ladder_msm"):
        g[name] = _grid(domains, msm_keys, msm(name))
    sc_keys = ("sumcheck_pes", "mle_update_pes", "modmuls_per_update_pe", "bandwidth_gbps")
    for kind in (ZEROCHECK, PERMCHECK, OPENCHECK):
        g[kind] = _grid(domains, sc_keys,
                        lambda p, u, m, bw, kind=kind: sumcheck_components(mu, p, u * m, bw, costs)[kind])
    g["frac"] = _grid(domains, ("fracmle_pes",), lambda f: frac_component(mu, f, costs))
    fixed = {bw: fixed_components(mu, bw, costs) for bw in domains["bandwidth_gbps"]}
    for name in next(iter(fixed.values())):
        g[name] = _grid(domains, ("bandwidth_gbps",), lambda bw, name=name: fixed[bw][name])
    return g


def area_power_grids(mu: int, domains: dict, costs: CostTables = DEFAULT_COSTS
                     ) -> tuple[np.ndarray, np.ndarray]:
    """Total area and power, mirroring :func:`area_power_rollup` row by row."""
    msm_a = _grid(domains, ("msm_pes", "msm_window", "msm_points_per_pe"),
                  lambda P, W, S: P * msm_pe_area_power(W, S, costs)[0])
    msm_p = _grid(domains, ("msm_pes", "msm_window", "msm_points_per_pe"),
                  lambda P, W, S: P * msm_pe_area_power(W, S, costs)[1])
    sc = _grid(domains, ("sumcheck_pes",), lambda p: p)
    fr = _grid(domains, ("fracmle_pes",), lambda f: f)
    um = _grid(domains, ("mle_update_pes", "modmuls_per_update_pe"), lambda u, m: u * m)
    phy = _grid(domains, ("bandwidth_gbps",), lambda bw: phy_area(bw, costs))
    bwp = _grid(domains, ("bandwidth_gbps",), lambda bw: costs.mem_w_per_tbps * bw / 1024)
    scale = 2.0 ** (mu - costs.sram_ref_mu)
    # summed in the roll-up's row order so floating point matches
    area = (msm_a + sc * costs.sumcheck_pe_mm2 + costs.nd_mm2 + fr * costs.fracmle_pe_mm2
            + costs.combine_mm2 + um * costs.update_modmul_mm2 + costs.tree_mm2 + costs.other_mm2)
    area = area + (costs.sram_mm2 * scale + phy)
    power = (msm_p + sc * costs.sumcheck_pe_w + costs.nd_w + fr * costs.fracmle_pe_w
             + costs.combine_w + um * costs.update_modmul_w + costs.tree_w + costs.other_w)
    power = power + (costs.sram_w * scale + bwp)
    assert len(COMPUTE_ROWS) == 8
    return area, power


def pareto_mask(area: np.ndarray, runtime: np.ndarray, *tiebreak: np.ndarray) -> np.ndarray:
    """Non-dominated points of (area, runtime), both minimized.

    Among exact duplicates only the first in ``(area, runtime, *tiebreak)``
    order is kept.
    """
    keys = tuple(reversed(tiebreak)) + (runtime, area)
    order = np.lexsort(keys)
    r = runtime[order]
    best = np.minimum.accumulate(r)
    prev = np.concatenate(([np.inf], best[:-1]))
    keep = r < prev
    mask = np.zeros(len(area), dtype=bool)
    mask[order[keep]] = True
    return mask


@dataclass
class DseResult:
    mu: int
    knobs: np.ndarray  # (N, 8) in KNOBS order
    runtime_cycles: np.ndarray
    area_mm2: np.ndarray
    power_w: np.ndarray
    steps: dict[str, np.ndarray]
    pareto: np.ndarray  # global frontier
    pareto_bw: np.ndarray  # frontier within each bandwidth
    clock_ghz: float = 1.0

    def __len__(self) -> int:
        return len(self.runtime_cycles)

    @property
    def runtime_ms(self) -> np.ndarray:
        return self.runtime_cycles / (self.clock_ghz * 1e6)

    @property
    def bandwidth(self) -> np.ndarray:
        return self.knobs[:, KNOBS.index("bandwidth_gbps")]

    def design(self, i: int) -> DesignPoint:
        return DesignPoint.from_tuple(self.knobs[i])

    def index_of(self, d: DesignPoint) -> int:
        hit = np.nonzero((self.knobs == np.array(d.as_tuple())).all(axis=1))[0]
        if len(hit) == 0:
            raise KeyError(d)
        return int(hit[0])

    def frontier(self, bandwidth: int | None = None) -> np.ndarray:
        """Indices on the frontier, sorted by area."""
        if bandwidth is None:
            idx = np.nonzero(self.pareto)[0]
        else:
            idx = np.nonzero(self.pareto_bw & (self.bandwidth == bandwidth))[0]
        return idx[np.argsort(self.area_mm2[idx], kind="stable")]


def dse(mu: int = 20, domains: dict | None = None, costs: CostTables = DEFAULT_COSTS) -> DseResult:
    """Evaluate every knob combination and mark the Pareto sets."""
    domains = domains or KNOB_DOMAINS
    for k in KNOBS:
        if not domains.get(k):
            raise ValueError(f"empty domain for {k}")
    shape = tuple(len(domains[k]) for k in KNOBS)
    comps = component_grids(mu, domains, costs)
    steps, total = compose(comps)
    area, power = area_power_grids(mu, domains, costs)
    full = lambda a: np.broadcast_to(a, shape).reshape(-1)
    mesh = np.meshgrid(*(np.array(domains[k], dtype=np.int64) for k in KNOBS), indexing="ij")
    knobs = np.stack([m.reshape(-1) for m in mesh], axis=1)
    runtime = full(total)
    area_f, power_f = full(area), full(power)
    bw = knobs[:, KNOBS.index("bandwidth_gbps")]
    # ties: lower area, then lower bandwidth, then the knob tuple
    tb = [bw] + [knobs[:, i] for i in range(len(KNOBS) - 1)]
    pareto = pareto_mask(area_f, runtime, *tb)
    pareto_bw = np.zeros(len(runtime), dtype=bool)
    for b in domains["bandwidth_gbps"]:
        sel = np.nonzero(bw == b)[0]
        m = pareto_mask(area_f[sel], runtime[sel], *(t[sel] for t in tb))
        pareto_bw[sel[m]] = True
    return DseResult(mu, knobs, runtime.astype(np.int64), area_f.copy(), power_f.copy(),
                     {k: full(v).astype(np.int64) for k, v in steps.items()},
                     pareto, pareto_bw, costs.clock_ghz)


def csv_header() -> list[str]:
    return (list(KNOBS) + ["runtime_ms", "area_mm2", "power_w", "pareto_flag", "pareto_bw_flag"]
            + [f"{s}_ms" for s in STEPS])


def write_dse_csv(res: DseResult, out, pareto_only: bool = False) -> int:
    """Write rows (all, or frontier members only); returns the row count.

    The first line is ``# schema=<version>`` so readers can check the
    layout before parsing.
    """
    own = isinstance(out, (str, Path))
    fh = open(out, "w", newline="") if own else out
    try:
        fh.write(f"# schema={CSV_SCHEMA}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(csv_header())
        idx = np.nonzero(res.pareto | res.pareto_bw)[0] if pareto_only else range(len(res))
        scale = res.clock_ghz * 1e6
        rt = res.runtime_ms
        n = 0
        for i in idx:
            row = [int(x) for x in res.knobs[i]]
            row += [f"{rt[i]:.6f}", f"{res.area_mm2[i]:.4f}", f"{res.power_w[i]:.4f}",
                    int(res.pareto[i]), int(res.pareto_bw[i])]
            row += [f"{res.steps[s][i] / scale:.6f}" for s in STEPS]
            w.writerow(row)
            n += 1
        return n
    finally:
        if own:
            fh.close()


def read_csv(path_or_text) -> tuple[str, list[dict[str, str]]]:
    """(schema, rows) of a CSV written by this module."""
    text = Path(path_or_text).read_text() if isinstance(path_or_text, Path) or (
        isinstance(path_or_text, str) and "\n" not in path_or_text) else path_or_text
    first, rest = text.split("\n", 1)
    if not first.startswith("# schema="):
        raise ValueError("missing schema line")
    return first.split("=", 1)[1], list(csv.DictReader(io.StringIO(rest)))


# --------------------------------------------------------------------------
# sweeps

@dataclass(frozen=True)
class SweepRow:
    unit: str
    pes: int
    bandwidth_gbps: int
    cycles: int
    speedup: float


def sweep_bandwidth(mu: int = 20, pes=(1, 2, 4, 8, 16), bandwidths=(256, 512, 1024, 2048, 4096),
                    base: DesignPoint = DesignPoint(), costs: CostTables = DEFAULT_COSTS,
                    baseline_bw: int = 512) -> list[SweepRow]:
    """MSM and SumCheck time against PE count and bandwidth, normalized to
    one PE at ``baseline_bw``."""
    def msm_t(p, bw):
        c = msm_components(mu, p, base.msm_window, base.msm_points_per_pe, bw, costs)
        return sum(c.values())

    def sc_t(p, bw):
        um = base.mle_update_pes * base.modmuls_per_update_pe
        return sum(sumcheck_components(mu, p, um, bw, costs).values())

    rows = []
    for unit, fn in (("msm", msm_t), ("sumcheck", sc_t)):
        ref = fn(1, baseline_bw)
        for bw in bandwidths:
            for p in pes:
                c = fn(p, bw)
                rows.append(SweepRow(unit, p, bw, int(c), ref / c))
    return rows


def write_rows_csv(rows, out, schema: str) -> None:
    own = isinstance(out, (str, Path))
    fh = open(out, "w", newline="") if own else out
    try:
        fh.write(f"# schema={schema}\n")
        w = csv.writer(fh, lineterminator="\n")
        fields = list(rows[0].__dataclass_fields__)
        w.writerow(fields)
        for r in rows:
            w.writerow([f"{v:.6f}" if isinstance(v, float) else v for v in (getattr(r, f) for f in fields)])
    finally:
        if own:
            fh.close()


def sweep_batch(costs: CostTables = DEFAULT_COSTS, max_log2: int = 10):
    return fracmle_batch_sweep(costs, max_log2)
