"""Multilinear-extension tables and the binary-tree kernels built on them.

Index convention: entry ``i`` of a table over ``mu`` variables holds the
value at the hypercube point ``(x_1, ..., x_mu)`` with ``x_1`` in bit 0,
i.e. ``i = sum_j x_j * 2**(j-1)``.  Fixing a variable therefore folds
adjacent pairs ``(t[2i], t[2i+1])`` and always consumes ``x_1`` first.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .fp import FieldConfig, FieldElement


class MleError(ValueError):
    pass


@dataclass(eq=True)
class MleTable:
    num_vars: int
    entries: list[FieldElement]

    def __post_init__(self) -> None:
        if self.num_vars < 0:
            raise MleError("num_vars must be >= 0")
        if len(self.entries) != 1 << self.num_vars:
            raise MleError(f"{len(self.entries)} entries for {self.num_vars} variables")

    @classmethod
    def from_entries(cls, entries: Sequence[FieldElement]) -> "MleTable":
        n = len(entries)
        if n == 0 or n & (n - 1):
            raise MleError(f"table length {n} is not a power of two")
        return cls(n.bit_length() - 1, list(entries))

    @classmethod
    def from_ints(cls, F: FieldConfig, xs: Iterable[int]) -> "MleTable":
        return cls.from_entries(F.elements(xs))

    @classmethod
    def zeros(cls, F: FieldConfig, num_vars: int) -> "MleTable":
        return cls(num_vars, [F.zero] * (1 << num_vars))

    @property
    def field(self) -> FieldConfig:
        return self.entries[0].cfg

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> FieldElement:
        return self.entries[i]

    def ints(self) -> list[int]:
        return [int(e) for e in self.entries]


@dataclass(eq=True)
class EqTable(MleTable):
    """eq(X; r) for the challenge vector ``point``; entries sum to one."""

    point: tuple[FieldElement, ...] = ()


@dataclass(frozen=True)
class SparsityProfile:
    frac_zero: float
    frac_one: float
    frac_dense: float

    def __post_init__(self) -> None:
        fs = (self.frac_zero, self.frac_one, self.frac_dense)
        if any(not 0.0 <= f <= 1.0 for f in fs):
            raise MleError(f"sparsity fractions must lie in [0, 1], got {fs}")
        if abs(sum(fs) - 1.0) > 1e-9:
            raise MleError(f"sparsity fractions sum to {sum(fs)}, not 1")

    @classmethod
    def from_dict(cls, d: dict) -> "SparsityProfile":
        return cls(float(d["zero"]), float(d["one"]), float(d["dense"]))

    def to_dict(self) -> dict:
        return {"zero": self.frac_zero, "one": self.frac_one, "dense": self.frac_dense}

    @classmethod
    def measure(cls, values: Iterable[FieldElement | int]) -> "SparsityProfile":
        z = o = n = 0
        for v in values:
            v = int(v)
            z += v == 0
            o += v == 1
            n += 1
        return cls(z / n, o / n, (n - z - o) / n)


# 45% zeros, 45% ones, 10% full-width values
DEFAULT_SPARSITY = SparsityProfile(0.45, 0.45, 0.10)


def fix_variable(t: MleTable, r: FieldElement) -> MleTable:
    """Bind x_1 to ``r``: t'[i] = (t[2i+1] - t[2i]) * r + t[2i]."""
    if t.num_vars == 0:
        raise MleError("cannot fix a variable of a constant table")
    e = t.entries
    return MleTable(t.num_vars - 1, [(e[i + 1] - e[i]) * r + e[i] for i in range(0, len(e), 2)])


def build_eq(r: Sequence[FieldElement], share_complement: bool = False) -> EqTable:
    """Layered construction of eq(X; r).

    Layer 1 is ``[1 - r_1, r_1]``; every later layer doubles the table by
    multiplying each node by ``(1 - r_j)`` and ``r_j``, for 2^(mu+1) - 4
    modmuls in total.  With ``share_complement`` the low child is instead
    derived as ``v - v*r_j`` (one modmul per parent, 2^mu - 2 in total),
    which is how a tree PE with a single multiplier computes it.
    """
    if len(r) == 0:
        raise MleError("build_eq needs at least one challenge")
    one = r[0].cfg.one
    table = [one - r[0], r[0]]
    for j in range(1, len(r)):
        rj = r[j]
        notr = one - rj
        if share_complement:
            hi = [v * rj for v in table]
            lo = [v - h for v, h in zip(table, hi)]
        else:
            lo = [v * notr for v in table]
            hi = [v * rj for v in table]
        table = lo + hi  # x_{j+1} becomes bit j
    return EqTable(len(r), table, tuple(r))


def eq_eval(a: Sequence[FieldElement], b: Sequence[FieldElement]) -> FieldElement:
    """eq(a, b) = prod_j (a_j b_j + (1 - a_j)(1 - b_j))."""
    if len(a) != len(b):
        raise MleError("dimension mismatch")
    one = a[0].cfg.one if a else None
    acc = one
    for x, y in zip(a, b):
        xy = x * y
        acc = acc * (xy + xy + one - x - y)
    return acc


def evaluate(t: MleTable, point: Sequence[FieldElement]) -> FieldElement:
    """Multilinear extension of ``t`` at ``point`` by successive folding."""
    if len(point) != t.num_vars:
        raise MleError(f"point has {len(point)} coordinates, table has {t.num_vars} variables")
    for r in point:
        t = fix_variable(t, r)
    return t.entries[0]


def evaluate_via_eq(t: MleTable, point: Sequence[FieldElement]) -> FieldElement:
    if len(point) != t.num_vars:
        raise MleError("dimension mismatch")
    if t.num_vars == 0:
        return t.entries[0]
    eq = build_eq(point)
    acc = t.field.zero
    for a, b in zip(t.entries, eq.entries):
        acc = acc + a * b
    return acc


def product_tree(leaves: Sequence[FieldElement]) -> list[list[FieldElement]]:
    """All internal layers of the binary product tree, leaf-adjacent first."""
    n = len(leaves)
    if n < 2 or n & (n - 1):
        raise MleError(f"product tree needs a power-of-two length >= 2, got {n}")
    layers = []
    cur = list(leaves)
    while len(cur) > 1:
        cur = [cur[i] * cur[i + 1] for i in range(0, len(cur), 2)]
        layers.append(cur)
    return layers


# --------------------------------------------------------------------------
# depth-first streaming traversal

@dataclass
class DfsResult:
    pattern: str
    outputs: list  # forward: leaves; reduce: [root]; product: [(layer, index, value)]
    max_working_set: int
    steps: int
    inputs_per_step: int

    def layers(self) -> list[list[FieldElement]]:
        """Product pattern outputs regrouped by layer, in index order."""
        by_layer: dict[int, dict[int, FieldElement]] = {}
        for layer, idx, v in self.outputs:
            by_layer.setdefault(layer, {})[idx] = v
        return [[row[i] for i in range(len(row))] for _, row in sorted(by_layer.items())]


def _log2_exact(n: int, what: str) -> int:
    if n < 1 or n & (n - 1):
        raise MleError(f"{what} must be a power of two, got {n}")
    return n.bit_length() - 1


def stream_dfs(pattern: str, data: Sequence[FieldElement] | Iterable[FieldElement], *,
               length: int | None = None, parallelism: int = 2,
               combine: str = "mul", point: Sequence[FieldElement] | None = None) -> DfsResult:
    """Depth-first evaluation of the three tree shapes of the multifunction unit.

    pattern ``"forward"``
        ``data`` is the challenge vector r; emits the eq(X; r) entries in
        index order while holding only one root-to-leaf path.
    pattern ``"reduce"``
        ``data`` is a stream of ``length`` leaves, consumed ``parallelism``
        per step.  ``combine="mul"`` multiplies (inversion batch product);
        ``combine="eval"`` folds level k with ``point[k-1]`` (MLE evaluation).
    pattern ``"product"``
        like ``reduce`` with ``mul``, but every internal node is emitted with
        its (layer, index) label.

    ``max_working_set`` counts intermediate values alive at once: the
    ``parallelism`` inputs of the current step plus the partial results
    parked on the accumulator stack.
    """
    p = parallelism
    lp = _log2_exact(p, "parallelism")
    if pattern == "forward":
        return _dfs_forward(list(data), p, lp)
    if pattern not in ("reduce", "product"):
        raise MleError(f"unknown tree pattern {pattern!r}")
    if pattern == "product":
        combine = "mul"
    if combine not in ("mul", "eval"):
        raise MleError(f"unknown combine op {combine!r}")
    it = iter(data)
    if length is None:
        data = list(it)
        length = len(data)
        it = iter(data)
    lg = _log2_exact(length, "stream length")
    if lg < 1:
        raise MleError("need at least two leaves")
    if combine == "eval":
        if point is None or len(point) != lg:
            raise MleError("eval combine needs one point coordinate per level")
    p = min(p, length)
    lp = p.bit_length() - 1
    emit = pattern == "product"

    def join(level: int, a, b):
        # level counts from 1 (parents of leaves)
        if combine == "mul":
            return a * b
        return (b - a) * point[level - 1] + a

    outputs: list = []
    counters = [0] * (lg + 1)  # next index per layer, for labels
    stack: list[tuple[int, FieldElement]] = []  # (level, value)
    max_ws = 0
    steps = 0
    consumed = 0
    while consumed < length:
        block = []
        for _ in range(p):
            try:
                block.append(next(it))
            except StopIteration:
                raise MleError(f"stream ended after {consumed + len(block)} of {length} leaves") from None
        consumed += p
        steps += 1
        max_ws = max(max_ws, len(block) + len(stack))
        # hardware tree: log2(p) levels inside the block
        level = 0
        while len(block) > 1:
            level += 1
            block = [join(level, block[i], block[i + 1]) for i in range(0, len(block), 2)]
            if emit:
                for v in block:
                    outputs.append((level, counters[level], v))
                    counters[level] += 1
        node = (level, block[0])
        # accumulator: merge equal levels like a binary counter
        while stack and stack[-1][0] == node[0]:
            lvl, left = stack.pop()
            v = join(lvl + 1, left, node[1])
            node = (lvl + 1, v)
            if emit:
                outputs.append((lvl + 1, counters[lvl + 1], v))
                counters[lvl + 1] += 1
        stack.append(node)
        max_ws = max(max_ws, len(stack))
    try:
        next(it)
        raise MleError(f"stream longer than declared length {length}")
    except StopIteration:
        pass
    if len(stack) != 1 or stack[0][0] != lg:  # pragma: no cover - guarded by length checks
        raise MleError("inconsistent stream")
    if not emit:
        outputs = [stack[0][1]]
    return DfsResult(pattern, outputs, max_ws, steps, p)


def _dfs_forward(r: list[FieldElement], p: int, lp: int) -> DfsResult:
    mu = len(r)
    if mu == 0:
        raise MleError("build_eq needs at least one challenge")
    one = r[0].cfg.one
    p = min(p, 1 << mu)
    lp = p.bit_length() - 1
    # the subtree below depth (mu - lp) is expanded as one hardware block;
    # above it we walk depth-first, splitting on x_mu first.
    top = mu - lp
    outputs: list[FieldElement] = []
    max_ws = 0
    steps = 0

    def block(v: FieldElement | None) -> list[FieldElement]:
        # expand x_lp .. x_1 breadth-first; the first split becomes the most
        # significant bit of the block, so x_1 ends up at bit 0
        vals = [v]
        for j in range(lp - 1, -1, -1):
            rj = r[j]
            nxt = []
            for u in vals:
                if u is None:
                    nxt.extend((one - rj, rj))
                else:
                    nxt.extend((u * (one - rj), u * rj))
            vals = nxt
        return vals

    # explicit DFS stack of (depth, value); depth d means x_mu..x_{mu-d+1} fixed
    stack: list[tuple[int, FieldElement | None]] = [(0, None)]
    while stack:
        max_ws = max(max_ws, len(stack))
        depth, v = stack.pop()
        if depth == top:
            leaves = block(v)
            steps += 1
            max_ws = max(max_ws, len(stack) + len(leaves))
            outputs.extend(leaves)
            continue
        rj = r[mu - 1 - depth]
        if v is None:
            lo, hi = one - rj, rj
        else:
            lo, hi = v * (one - rj), v * rj
        stack.append((depth + 1, hi))
        stack.append((depth + 1, lo))
    return DfsResult("forward", outputs, max_ws, steps, p)


# --------------------------------------------------------------------------
# serialization

_HEADER = struct.Struct("<QH")


def dump_table(t: MleTable) -> bytes:
    w = t.field.byte_width
    parts = [_HEADER.pack(len(t.entries), w)]
    parts.extend(int(e).to_bytes(w, "little") for e in t.entries)
    return b"".join(parts)


def load_table(data: bytes, F: FieldConfig) -> MleTable:
    n, w = _HEADER.unpack_from(data, 0)
    if w != F.byte_width:
        raise MleError(f"element width {w} does not match field ({F.byte_width})")
    off = _HEADER.size
    if len(data) != off + n * w:
        raise MleError("truncated table")
    vals = [int.from_bytes(data[off + i * w: off + (i + 1) * w], "little") for i in range(n)]
    if any(v >= F.modulus for v in vals):
        raise MleError("entry out of range")
    return MleTable.from_ints(F, vals)


def iter_hypercube(mu: int) -> Iterator[tuple[int, ...]]:
    for i in range(1 << mu):
        yield tuple((i >> j) & 1 for j in range(mu))
