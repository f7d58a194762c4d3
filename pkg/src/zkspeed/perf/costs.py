"""Design knobs, cost anchors and the area/power roll-up."""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

try:  # Python 3.11+
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib


class DesignError(ValueError):
    pass


# Table 2 knob domains
KNOB_DOMAINS: dict[str, tuple[int, ...]] = {
    "msm_pes": (1, 2, 4, 8, 16),
    "msm_window": (7, 8, 9, 10),
    "msm_points_per_pe": (1024, 2048, 4096, 8192, 16384),
    "fracmle_pes": (1, 2, 4),
    "sumcheck_pes": (1, 2, 4, 8, 16),
    "mle_update_pes": tuple(range(1, 12)),
    "modmuls_per_update_pe": (1, 2, 4, 8, 16),
    "bandwidth_gbps": (64, 128, 256, 512, 1024, 2048, 4096),
}
KNOBS = tuple(KNOB_DOMAINS)


@dataclass(frozen=True)
class DesignPoint:
    msm_pes: int = 16
    msm_window: int = 9
    msm_points_per_pe: int = 2048
    fracmle_pes: int = 1
    sumcheck_pes: int = 2
    mle_update_pes: int = 11
    modmuls_per_update_pe: int = 4
    bandwidth_gbps: int = 2048

    def validate(self, domains: dict[str, tuple[int, ...]] | None = None) -> "DesignPoint":
        domains = domains or KNOB_DOMAINS
        for k in KNOBS:
            v = getattr(self, k)
            if v not in domains[k]:
                raise DesignError(f"{k}={v} outside {domains[k]}")
        return self

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(getattr(self, k) for k in KNOBS)

    @classmethod
    def from_tuple(cls, t) -> "DesignPoint":
        return cls(*(int(x) for x in t))

    @classmethod
    def parse(cls, s: str) -> "DesignPoint":
        """``"16,9,2048,1,2,11,4,2048"`` in :data:`KNOBS` order, or ``k=v`` pairs."""
        parts = [p.strip() for p in s.split(",") if p.strip()]
        if parts and all("=" in p for p in parts):
            kv = dict(p.split("=", 1) for p in parts)
            unknown = set(kv) - set(KNOBS)
            if unknown:
                raise DesignError(f"unknown knobs {sorted(unknown)}")
            return replace(cls(), **{k: int(v) for k, v in kv.items()})
        if len(parts) != len(KNOBS):
            raise DesignError(f"design tuple needs {len(KNOBS)} values: {','.join(KNOBS)}")
        return cls.from_tuple(parts)

    def with_(self, **kw) -> "DesignPoint":
        return replace(self, **kw)


REFERENCE_DESIGN = DesignPoint()


def design_space(domains: dict[str, tuple[int, ...]] | None = None):
    domains = domains or KNOB_DOMAINS
    return itertools.product(*(domains[k] for k in KNOBS))


def design_space_size(domains: dict[str, tuple[int, ...]] | None = None) -> int:
    domains = domains or KNOB_DOMAINS
    return math.prod(len(domains[k]) for k in KNOBS)


@dataclass(frozen=True)
class CostTables:
    clock_ghz: float = 1.0
    # modmul areas, mm^2
    modmul_255_mm2: float = 0.133
    modmul_381_mm2: float = 0.314
    padd_modmuls: int = 14
    padd_depth: int = 40
    # per-unit anchors (reference design rows)
    msm_pe_mm2: float = 105.64 / 16
    msm_pe_w: float = 76.19 / 16
    msm_ref_window: int = 9
    msm_ref_points: int = 2048
    sumcheck_pe_mm2: float = 24.96 / 2
    sumcheck_pe_w: float = 5.38 / 2
    sumcheck_pe_modmuls: int = 94
    fracmle_pe_mm2: float = 1.92
    fracmle_pe_w: float = 0.25
    update_modmul_mm2: float = 5.84 / 44
    update_modmul_w: float = 1.13 / 44
    nd_mm2: float = 1.35
    nd_w: float = 0.19
    combine_mm2: float = 9.56
    combine_w: float = 0.34
    combine_modmuls: int = 72
    tree_mm2: float = 12.28
    tree_w: float = 4.16
    tree_modmuls: int = 92
    other_mm2: float = 1.98
    other_w: float = 0.04
    sram_mm2: float = 143.73
    sram_w: float = 19.60
    sram_ref_mu: int = 20
    hbm3_phy_mm2: float = 29.6
    hbm3_phy_gbps: int = 1024
    hbm2_phy_mm2: float = 14.9
    hbm2_phy_gbps: int = 512
    mem_w_per_tbps: float = 31.8
    # data widths, bytes
    scalar_bytes: int = 32
    point_bytes: int = 96  # X, Y streamed; Z implied 1
    bucket_bytes: int = 144  # X, Y, Z
    scalar_bits: int = 255
    # FracMLE batching
    inversion_cycles: int = 509
    partial_product_cycles: int = 12
    tree_level_cycles: int = 3
    fracmle_batch: int = 64
    # SumCheck round tails (modmul latency of the interpolation step)
    zerocheck_tail: int = 23
    permcheck_tail: int = 46
    opencheck_tail: int = 0
    tree_outputs_per_cycle: int = 2

    @classmethod
    def from_dict(cls, d: dict) -> "CostTables":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise DesignError(f"unknown cost keys {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT_COSTS = CostTables()


def load_config(path: str | Path) -> tuple[CostTables, dict[str, tuple[int, ...]]]:
    """TOML with optional ``[costs]`` and ``[knobs]`` tables."""
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    costs = CostTables.from_dict(doc.get("costs", {}))
    domains = dict(KNOB_DOMAINS)
    for k, v in doc.get("knobs", {}).items():
        if k not in KNOB_DOMAINS:
            raise DesignError(f"unknown knob {k!r}")
        domains[k] = tuple(int(x) for x in v)
    return costs, domains


# --------------------------------------------------------------------------
# area / power

def msm_windows(window: int, costs: CostTables = DEFAULT_COSTS) -> int:
    return math.ceil(costs.scalar_bits / window)


def _msm_storage_bytes(window: int, points: int, costs: CostTables) -> int:
    # persistent buckets for every window, plus the local point/scalar banks
    return msm_windows(window, costs) * ((1 << window) - 1) * costs.bucket_bytes + points * costs.bucket_bytes


def msm_pe_area_power(window: int, points: int, costs: CostTables = DEFAULT_COSTS) -> tuple[float, float]:
    """Per-PE MSM area/power: a fixed PADD datapath plus storage that scales
    with bucket count and points per PE, calibrated at the reference PE."""
    padd = costs.padd_modmuls * costs.modmul_381_mm2
    ref_store = _msm_storage_bytes(costs.msm_ref_window, costs.msm_ref_points, costs)
    per_byte = (costs.msm_pe_mm2 - padd) / ref_store
    area = padd + per_byte * _msm_storage_bytes(window, points, costs)
    return area, costs.msm_pe_w * area / costs.msm_pe_mm2


def phy_area(bandwidth_gbps: float, costs: CostTables = DEFAULT_COSTS) -> float:
    if bandwidth_gbps <= 0:
        return 0.0
    if bandwidth_gbps <= costs.hbm2_phy_gbps:
        return costs.hbm2_phy_mm2 * bandwidth_gbps / costs.hbm2_phy_gbps
    return costs.hbm3_phy_mm2 * math.ceil(bandwidth_gbps / costs.hbm3_phy_gbps)


@dataclass
class Rollup:
    rows_area: dict[str, float]
    rows_power: dict[str, float]
    compute_area: float
    memory_area: float
    compute_power: float
    memory_power: float

    @property
    def total_area(self) -> float:
        return self.compute_area + self.memory_area

    @property
    def total_power(self) -> float:
        return self.compute_power + self.memory_power

    def table(self) -> list[tuple[str, float, float]]:
        rows = [(k, self.rows_area[k], self.rows_power[k]) for k in self.rows_area]
        rows.insert(len(COMPUTE_ROWS), ("Total Compute", self.compute_area, self.compute_power))
        rows.append(("Total Memory", self.memory_area, self.memory_power))
        rows.append(("Total", self.total_area, self.total_power))
        return rows


COMPUTE_ROWS = ("MSM", "SumCheck", "Construct N&D", "FracMLE", "MLE Combine", "MLE Update",
                "Multifunction Tree", "Other")
MEMORY_ROWS = ("SRAM", "PHY")


def area_power_rollup(d: DesignPoint, costs: CostTables = DEFAULT_COSTS, mu: int = 20,
                      strict: bool = True) -> Rollup:
    if strict:
        d.validate()
    msm_a, msm_p = msm_pe_area_power(d.msm_window, d.msm_points_per_pe, costs)
    nmods = d.mle_update_pes * d.modmuls_per_update_pe
    area = {
        "MSM": d.msm_pes * msm_a,
        "SumCheck": d.sumcheck_pes * costs.sumcheck_pe_mm2,
        "Construct N&D": costs.nd_mm2,
        "FracMLE": d.fracmle_pes * costs.fracmle_pe_mm2,
        "MLE Combine": costs.combine_mm2,
        "MLE Update": nmods * costs.update_modmul_mm2,
        "Multifunction Tree": costs.tree_mm2,
        "Other": costs.other_mm2,
    }
    power = {
        "MSM": d.msm_pes * msm_p,
        "SumCheck": d.sumcheck_pes * costs.sumcheck_pe_w,
        "Construct N&D": costs.nd_w,
        "FracMLE": d.fracmle_pes * costs.fracmle_pe_w,
        "MLE Combine": costs.combine_w,
        "MLE Update": nmods * costs.update_modmul_w,
        "Multifunction Tree": costs.tree_w,
        "Other": costs.other_w,
    }
    scale = 2.0 ** (mu - costs.sram_ref_mu)
    area["SRAM"] = costs.sram_mm2 * scale
    power["SRAM"] = costs.sram_w * scale
    area["PHY"] = phy_area(d.bandwidth_gbps, costs)
    power["PHY"] = costs.mem_w_per_tbps * d.bandwidth_gbps / 1024
    ca = sum(area[k] for k in COMPUTE_ROWS)
    cp = sum(power[k] for k in COMPUTE_ROWS)
    ma = area["SRAM"] + area["PHY"]
    mp = power["SRAM"] + power["PHY"]
    return Rollup(area, power, ca, ma, cp, mp)
