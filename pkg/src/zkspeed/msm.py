"""Multi-scalar multiplication: naive oracle, Pippenger, sparse MSM.

Every PADD/PDBL issued by :func:`pippenger`, :func:`aggregate_buckets` and
:func:`msm_sparse` can be written to an :class:`OpLog`.  Each record carries
the ids of the records it depends on, so the longest dependent chain (the
schedule-level critical path) falls out of the log directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .ec import CurveConfig, CurvePoint, padd, scalar_mul
from .fp import FieldElement

PADD = "PADD"
PDBL = "PDBL"


class MsmError(ValueError):
    pass


@dataclass
class MsmInstance:
    scalars: list[int]
    points: list[CurvePoint]
    window_size: int | None = None  # default min(8, scalar_bits)
    scalar_bits: int | None = None

    def __post_init__(self) -> None:
        self.scalars = [int(s) for s in self.scalars]
        if len(self.scalars) != len(self.points):
            raise MsmError(f"{len(self.scalars)} scalars for {len(self.points)} points")
        if not self.points:
            raise MsmError("empty instance")
        curve = self.points[0].curve
        for P in self.points:
            if P.curve != curve:
                raise MsmError("points from different curves")
            if P.Z not in (0, 1):
                raise MsmError("points must be affine (Z = 1)")
        if self.scalar_bits is None:
            self.scalar_bits = max(curve.order.bit_length(), max(self.scalars).bit_length(), 1)
        if any(s < 0 or s.bit_length() > self.scalar_bits for s in self.scalars):
            raise MsmError("scalar out of range")
        if self.window_size is None:
            self.window_size = min(8, self.scalar_bits)
        if not 1 <= self.window_size <= self.scalar_bits:
            raise MsmError(f"window size {self.window_size} outside 1..{self.scalar_bits}")

    @property
    def curve(self) -> CurveConfig:
        return self.points[0].curve

    @property
    def num_windows(self) -> int:
        return math.ceil(self.scalar_bits / self.window_size)

    def __len__(self) -> int:
        return len(self.scalars)


@dataclass(frozen=True)
class SparsityTally:
    zero: int
    one: int
    dense: int

    @classmethod
    def of(cls, scalars: Sequence[int | FieldElement]) -> "SparsityTally":
        z = o = 0
        for s in scalars:
            v = int(s)
            z += v == 0
            o += v == 1
        return cls(z, o, len(scalars) - z - o)

    @property
    def total(self) -> int:
        return self.zero + self.one + self.dense


# --------------------------------------------------------------------------
# op log

@dataclass
class OpRecord:
    phase: str
    chain: str
    op: str
    deps: tuple[int, ...]
    depth: int


@dataclass
class OpLog:
    records: list[OpRecord] = field(default_factory=list)

    def add(self, phase: str, chain: str, op: str, deps: Sequence[int]) -> int:
        d = 1 + max((self.records[i].depth for i in deps if i >= 0), default=0)
        self.records.append(OpRecord(phase, chain, op, tuple(i for i in deps if i >= 0), d))
        return len(self.records) - 1

    def count(self, op: str | None = None, phase: str | None = None) -> int:
        return sum(1 for r in self.records
                   if (op is None or r.op == op) and (phase is None or r.phase == phase))

    def critical_path(self, phase: str | None = None) -> int:
        """Longest dependent chain; with ``phase`` only ops of that phase
        count and dependencies on other phases are cut."""
        if phase is None:
            return max((r.depth for r in self.records), default=0)
        depth: dict[int, int] = {}
        best = 0
        for i, r in enumerate(self.records):
            if r.phase != phase:
                continue
            d = 1 + max((depth.get(j, 0) for j in r.deps), default=0)
            depth[i] = d
            best = max(best, d)
        return best

    def phases(self) -> list[str]:
        return list(dict.fromkeys(r.phase for r in self.records))


class _Val:
    """A point plus the id of the log record that produced it (-1: input)."""

    __slots__ = ("P", "node")

    def __init__(self, P: CurvePoint, node: int = -1):
        self.P = P
        self.node = node


class _Tracer:
    def __init__(self, log: OpLog | None, phase: str):
        self.log = log
        self.phase = phase
        self.padds = 0
        self.pdbls = 0

    def add(self, a: _Val, b: _Val, chain: str) -> _Val:
        self.padds += 1
        node = self.log.add(self.phase, chain, PADD, (a.node, b.node)) if self.log is not None else -1
        return _Val(padd(a.P, b.P), node)

    def dbl(self, a: _Val, chain: str) -> _Val:
        self.pdbls += 1
        node = self.log.add(self.phase, chain, PDBL, (a.node,)) if self.log is not None else -1
        return _Val(padd(a.P, a.P), node)

    def tree_sum(self, vals: list[_Val], chain: str) -> _Val | None:
        if not vals:
            return None
        while len(vals) > 1:
            nxt = [self.add(vals[i], vals[i + 1], chain) for i in range(0, len(vals) - 1, 2)]
            if len(vals) % 2:
                nxt.append(vals[-1])
            vals = nxt
        return vals[0]

    def mul_small(self, a: _Val, k: int, chain: str) -> _Val | None:
        """[k]a by MSB-first double-and-add; powers of two are pure doublings."""
        if k <= 0:
            return None
        acc = a
        for bit in bin(k)[3:]:
            acc = self.dbl(acc, chain)
            if bit == "1":
                acc = self.add(acc, a, chain)
        return acc


# --------------------------------------------------------------------------
# oracle

def msm_naive(inst: MsmInstance) -> CurvePoint:
    acc = inst.curve.identity
    for s, P in zip(inst.scalars, inst.points):
        acc = padd(acc, scalar_mul(s, P))
    return acc


# --------------------------------------------------------------------------
# bucket aggregation

def _running_sum(tr: _Tracer, buckets: list[_Val], chain: str, identity: CurvePoint
                 ) -> tuple[_Val, _Val]:
    """(sum_j B_j, sum_j j*B_j) for local indices j = 1..len, high to low."""
    S = _Val(identity)
    T = _Val(identity)
    for B in reversed(buckets):
        S = tr.add(S, B, chain)
        T = tr.add(T, S, chain)
    return S, T


def _aggregate(tr: _Tracer, buckets: list[_Val], g: int, identity: CurvePoint, tag: str) -> _Val:
    n = len(buckets)
    if g < 1:
        raise MsmError("group size must be >= 1")
    if g >= n:
        return _running_sum(tr, buckets, f"{tag}/g0", identity)[1]
    groups = [buckets[k:k + g] for k in range(0, n, g)]
    S, T = [], []
    for k, grp in enumerate(groups):
        s, t = _running_sum(tr, grp, f"{tag}/g{k}", identity)
        S.append(s)
        T.append(t)
    # sum_i i*B_i = sum_k T_k + g * sum_k k*S_k, and sum_k k*S_k = sum_{m>=1} U_m
    # with U_m = sum_{k>=m} S_k (suffix sums by a log-depth scan)
    G = len(groups)
    U = list(S)
    step = 1
    while step < G:
        U = [tr.add(U[m], U[m + step], f"{tag}/scan") if m + step < G else U[m] for m in range(G)]
        step <<= 1
    weighted = tr.tree_sum(U[1:], f"{tag}/offset")
    total = tr.tree_sum(T, f"{tag}/local")
    if weighted is not None:
        weighted = tr.mul_small(weighted, g, f"{tag}/offset")
        total = tr.add(total, weighted, f"{tag}/combine")
    return total


def aggregate_buckets(buckets: Sequence[CurvePoint], group_size: int | None = None,
                      log: OpLog | None = None, phase: str = "aggregate") -> CurvePoint:
    """sum_{i=1}^{n} i*B_i where ``buckets[i-1]`` is B_i.

    ``group_size=None`` (or >= n) is the single running-sum chain.
    """
    if not buckets:
        raise MsmError("no buckets")
    tr = _Tracer(log, phase)
    g = len(buckets) if group_size is None else group_size
    return _aggregate(tr, [_Val(B) for B in buckets], g, buckets[0].curve.identity, phase).P


def aggregation_padds(num_buckets: int, group_size: int | None) -> tuple[int, int]:
    """(PADD, PDBL) counts issued by one aggregation, matching the schedule."""
    n = num_buckets
    g = n if group_size is None else group_size
    if g >= n:
        return 2 * n, 0
    G = math.ceil(n / g)
    padds = 2 * n
    step = 1
    while step < G:
        padds += G - step
        step <<= 1
    padds += max(G - 2, 0) + (G - 1)  # offset tree, local tree
    dbl = g.bit_length() - 1
    padds += bin(g).count("1") - 1 + 1  # double-and-add adds, final combine
    return padds, dbl


def aggregation_critical_path(window: int, group_size: int | None) -> int:
    log = OpLog()
    curve = _dummy_curve()
    n = (1 << window) - 1
    tr = _Tracer(log, "aggregate")
    ident = curve.identity
    _aggregate(tr, [_Val(ident)] * n, n if group_size is None else group_size, ident, "agg")
    return log.critical_path()


def _dummy_curve() -> CurveConfig:
    from .ec import preset_curve
    return preset_curve("toy17")


# --------------------------------------------------------------------------
# Pippenger

def _digits(s: int, W: int, windows: int) -> list[int]:
    mask = (1 << W) - 1
    return [(s >> (W * k)) & mask for k in range(windows)]


def pippenger(inst: MsmInstance, group_size: int | None = 16, log: OpLog | None = None,
              phase: str = "dense") -> CurvePoint:
    """Windowed bucket method, most significant window first.

    The first point landing in an empty bucket is copied in (no PADD);
    later points are added.  Windows are combined by W doublings and one
    PADD each.
    """
    W = inst.window_size
    nw = inst.num_windows
    nb = (1 << W) - 1
    ident = inst.curve.identity
    tr = _Tracer(log, phase)
    acc: _Val | None = None
    for k in reversed(range(nw)):
        buckets: list[_Val | None] = [None] * nb
        shift = W * k
        mask = nb
        for s, P in zip(inst.scalars, inst.points):
            dgt = (s >> shift) & mask
            if dgt == 0:
                continue
            cur = buckets[dgt - 1]
            if cur is None:
                buckets[dgt - 1] = _Val(P)
            else:
                buckets[dgt - 1] = tr.add(cur, _Val(P), f"w{k}/b{dgt}")
        filled = [b if b is not None else _Val(ident) for b in buckets]
        wsum = _aggregate(tr, filled, nb if group_size is None else group_size, ident, f"w{k}")
        if acc is None:
            acc = wsum
        else:
            for _ in range(W):
                acc = tr.dbl(acc, "combine")
            acc = tr.add(acc, wsum, "combine")
    return acc.P


def expected_pippenger_ops(inst: MsmInstance, group_size: int | None = 16) -> tuple[int, int]:
    """Closed-form (PADD, PDBL) counts of :func:`pippenger` on ``inst``."""
    W = inst.window_size
    nw = inst.num_windows
    nb = (1 << W) - 1
    bucket_adds = 0
    for k in range(nw):
        ds = [d for d in (((s >> (W * k)) & nb) for s in inst.scalars) if d]
        bucket_adds += len(ds) - len(set(ds))
    a, d = aggregation_padds(nb, group_size)
    return bucket_adds + nw * a + (nw - 1), nw * d + (nw - 1) * W


# --------------------------------------------------------------------------
# sparse MSM

@dataclass
class SparseMsmStats:
    ones_padds: int
    dense_padds: int
    dense_pdbls: int
    ones_depth: int


def msm_sparse(inst: MsmInstance, tally: SparsityTally | None = None, group_size: int | None = 16,
               log: OpLog | None = None) -> CurvePoint:
    """Skip zeros, tree-reduce the 1-scalars, run Pippenger on the rest."""
    return msm_sparse_with_stats(inst, tally, group_size, log)[0]


def msm_sparse_with_stats(inst: MsmInstance, tally: SparsityTally | None = None,
                          group_size: int | None = 16, log: OpLog | None = None
                          ) -> tuple[CurvePoint, SparseMsmStats]:
    actual = SparsityTally.of(inst.scalars)
    if tally is not None and tally != actual:
        raise MsmError(f"tally {tally} does not match scalars {actual}")
    ones = [_Val(P) for s, P in zip(inst.scalars, inst.points) if s == 1]
    dense = [(s, P) for s, P in zip(inst.scalars, inst.points) if s > 1]
    tr = _Tracer(log, "ones")
    start = len(log.records) if log is not None else 0
    osum = tr.tree_sum(ones, "ones")
    depth = max((r.depth for r in log.records[start:]), default=0) if log is not None else 0
    result = osum.P if osum is not None else inst.curve.identity
    dp = dd = 0
    if dense:
        sub = MsmInstance([s for s, _ in dense], [P for _, P in dense], inst.window_size, inst.scalar_bits)
        dres = pippenger(sub, group_size, log, phase="dense")
        dp, dd = expected_pippenger_ops(sub, group_size)
        if osum is not None:
            tr2 = _Tracer(log, "final")
            result = tr2.add(_Val(result), _Val(dres), "final").P
        else:
            result = dres
    return result, SparseMsmStats(tr.padds, dp, dd, depth)
