"""Batch-size choice for the FracMLE unit.

One batched inversion of n elements overlaps two paths:

* partial products, a dependent chain of n multiplications
  (``partial_product_cycles`` each), and
* the multiplier-tree product of the batch (``tree_level_cycles`` per
  level, log2 n levels) followed by one constant-time inversion.

Batch latency is the longer path.  Units are added round-robin until one
batch latency is hidden behind the other units' intake at one element per
cycle.  Imbalance between the two paths is compared per batch element,
because each batch delivers n outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .costs import DEFAULT_COSTS, CostTables


@dataclass(frozen=True)
class BatchRow:
    n: int
    partial_product: int
    tree_plus_inverse: int
    latency: int
    imbalance: float
    units: int


def batch_row(n: int, costs: CostTables = DEFAULT_COSTS) -> BatchRow:
    pp = costs.partial_product_cycles * n
    ti = costs.tree_level_cycles * int(math.log2(n)) + costs.inversion_cycles
    lat = max(pp, ti)
    return BatchRow(n, pp, ti, lat, abs(pp - ti) / n, math.ceil(lat / n))


def fracmle_batch_sweep(costs: CostTables = DEFAULT_COSTS, max_log2: int = 10) -> list[BatchRow]:
    return [batch_row(1 << k, costs) for k in range(1, max_log2 + 1)]


def fracmle_batch_optimizer(costs: CostTables = DEFAULT_COSTS, max_log2: int = 10) -> BatchRow:
    """Row with the smallest per-element imbalance (ties go to smaller n)."""
    return min(fracmle_batch_sweep(costs, max_log2), key=lambda r: (r.imbalance, r.n))


def fracmle_fill_latency(costs: CostTables = DEFAULT_COSTS) -> int:
    """Pipeline depth of the unit: batch size times unit count."""
    r = batch_row(costs.fracmle_batch, costs)
    return r.n * r.units
