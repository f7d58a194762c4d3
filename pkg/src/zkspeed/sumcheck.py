"""SumCheck prover and verifier for the three HyperPlonk compositions.

Round messages are in evaluation form: g_j(0), ..., g_j(d) at the integer
nodes.  A term of degree d' < d is accumulated at its own d'+1 nodes over
the whole hypercube and lifted to d+1 nodes once per round with
:func:`barycentric_extend`, which keeps per-instance work proportional to
each term's own degree.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping, Sequence

from .fp import FieldConfig, FieldElement, batch_inverse, count_modmuls
from .mle import MleTable, fix_variable
from .transcript import Transcript

ZEROCHECK = "ZeroCheck"
PERMCHECK = "PermCheck"
OPENCHECK = "OpenCheck"
KINDS = (ZEROCHECK, PERMCHECK, OPENCHECK)


class SumCheckError(ValueError):
    pass


@dataclass(frozen=True)
class Term:
    """``coeff * prod(operands)``; an int coefficient of +-1 costs nothing,
    a field coefficient (a challenge such as alpha) costs one modmul per
    node per round."""

    coeff: int | FieldElement
    operands: tuple[str, ...]

    @property
    def degree(self) -> int:
        return len(self.operands)


@dataclass(frozen=True)
class Composition:
    kind: str
    terms: tuple[Term, ...]

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise SumCheckError(f"unknown composition kind {self.kind!r}")
        if not self.terms:
            raise SumCheckError("composition has no terms")

    @property
    def max_degree(self) -> int:
        return max(t.degree for t in self.terms)

    @property
    def slots(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for t in self.terms:
            for s in t.operands:
                seen.setdefault(s, None)
        return tuple(seen)

    def apply(self, values: Mapping[str, FieldElement]) -> FieldElement:
        """Evaluate the composition on one assignment of operand values."""
        acc = None
        for t in self.terms:
            v = _coeff_times(t.coeff, _prod(values[s] for s in t.operands))
            acc = v if acc is None else acc + v
        return acc


def _prod(xs) -> FieldElement:
    it = iter(xs)
    acc = next(it)
    for x in it:
        acc = acc * x
    return acc


def _coeff_times(c, v: FieldElement) -> FieldElement:
    if isinstance(c, FieldElement):
        return c * v
    if c == 1:
        return v
    if c == -1:
        return -v
    return v * c


ZEROCHECK_SLOTS = ("qL", "qR", "qM", "qO", "qc", "w1", "w2", "w3", "fz")
PERMCHECK_SLOTS = ("pi", "p1", "p2", "phi", "D1", "D2", "D3", "N1", "N2", "N3", "fz")


def zerocheck_composition() -> Composition:
    """Gate identity times eq: (qL w1 + qR w2 + qM w1 w2 - qO w3 + qc) fz."""
    return Composition(ZEROCHECK, (
        Term(1, ("qL", "w1", "fz")),
        Term(1, ("qR", "w2", "fz")),
        Term(1, ("qM", "w1", "w2", "fz")),
        Term(-1, ("qO", "w3", "fz")),
        Term(1, ("qc", "fz")),
    ))


def permcheck_composition(alpha: FieldElement) -> Composition:
    """(pi - p1 p2 + alpha (phi D1 D2 D3 - N1 N2 N3)) fz."""
    return Composition(PERMCHECK, (
        Term(1, ("pi", "fz")),
        Term(-1, ("p1", "p2", "fz")),
        Term(alpha, ("phi", "D1", "D2", "D3", "fz")),
        Term(-alpha, ("N1", "N2", "N3", "fz")),
    ))


def opencheck_composition(k: int = 6) -> Composition:
    """sum_i y_i k_i."""
    return Composition(OPENCHECK, tuple(Term(1, (f"y{i}", f"k{i}")) for i in range(1, k + 1)))


# --------------------------------------------------------------------------
# interpolation on integer nodes

@lru_cache(maxsize=None)
def _bary_weights(F: FieldConfig, d: int) -> tuple[FieldElement, ...]:
    # w_i = 1 / prod_{j != i} (i - j) = (-1)^(d-i) / (i! (d-i)!)
    q = F.modulus
    ws = []
    for i in range(d + 1):
        den = 1
        for j in range(d + 1):
            if j != i:
                den = den * (i - j) % q
        ws.append(F(pow(den, -1, q)))
    return tuple(ws)


@lru_cache(maxsize=None)
def _extension_coeffs(F: FieldConfig, d: int, x: int) -> tuple[FieldElement, ...]:
    # f(x) = sum_i f_i * L(x) w_i / (x - i) for integer x outside 0..d
    q = F.modulus
    L = 1
    for j in range(d + 1):
        L = L * (x - j) % q
    ws = _bary_weights(F, d)
    return tuple(F(L * int(w) * pow(x - i, -1, q) % q) for i, w in enumerate(ws))


def barycentric_extend(evals: Sequence[FieldElement], count: int) -> list[FieldElement]:
    """Evaluations at 0..count-1 of the degree-<=len(evals)-1 interpolant."""
    d = len(evals) - 1
    if d < 0:
        raise SumCheckError("need at least one evaluation")
    if count < d + 1:
        raise SumCheckError(f"cannot shrink {d + 1} evaluations to {count}")
    out = list(evals)
    if d == 0:
        return out * count if count else out
    F = evals[0].cfg
    for x in range(d + 1, count):
        cs = _extension_coeffs(F, d, x)
        acc = F.zero
        for f, c in zip(evals, cs):
            acc = acc + f * c
        out.append(acc)
    return out


def barycentric_eval(evals: Sequence[FieldElement], x: FieldElement) -> FieldElement:
    """Evaluate the interpolant through (i, evals[i]) at an arbitrary x."""
    d = len(evals) - 1
    F = evals[0].cfg
    xi = int(x)
    if xi <= d:
        return evals[xi]
    ws = _bary_weights(F, d)
    diffs = [x - F(i) for i in range(d + 1)]
    inv = batch_inverse(diffs)
    L = _prod(diffs)
    acc = F.zero
    for f, w, iv in zip(evals, ws, inv):
        acc = acc + f * w * iv
    return acc * L


# --------------------------------------------------------------------------
# prover

@dataclass
class RoundMessage:
    evals: list[FieldElement]

    @property
    def degree(self) -> int:
        return len(self.evals) - 1

    def at(self, x: FieldElement) -> FieldElement:
        return barycentric_eval(self.evals, x)


@dataclass
class SumCheckProof:
    kind: str
    claimed_sum: FieldElement
    rounds: list[RoundMessage]
    final_evals: dict[str, FieldElement]
    # prover-side metadata, not part of the wire format
    challenges: list[FieldElement] = field(default_factory=list, compare=False)
    census: list[int] = field(default_factory=list, compare=False)

    @property
    def num_rounds(self) -> int:
        return len(self.rounds)


def _check_tables(comp: Composition, tables: Mapping[str, MleTable]) -> int:
    mu = None
    for s in comp.slots:
        if s not in tables:
            raise SumCheckError(f"operand slot {s!r} is not bound")
        n = tables[s].num_vars
        if mu is None:
            mu = n
        elif n != mu:
            raise SumCheckError(f"slot {s!r} has {n} variables, expected {mu}")
    if mu is None or mu < 1:
        raise SumCheckError("tables must have at least one variable")
    return mu


def round_evals(comp: Composition, tables: Mapping[str, MleTable], degree: int | None = None,
                shared: bool = True) -> RoundMessage:
    """One round message g(0..d) for the current (un-fixed) tables.

    With ``shared`` each operand's node values are computed once per
    instance and reused by every term; otherwise each term recomputes its
    own operands, as a set of independent per-term datapaths would.
    """
    _check_tables(comp, tables)
    d = comp.max_degree if degree is None else degree
    if d < comp.max_degree:
        raise SumCheckError(f"degree {d} below composition degree {comp.max_degree}")
    F = next(iter(tables.values())).field
    nodes = [F(e) for e in range(d + 1)]
    terms = comp.terms
    tdeg = [t.degree for t in terms]
    # highest node each operand is needed at
    need: dict[str, int] = {}
    for t in terms:
        for s in t.operands:
            need[s] = max(need.get(s, 0), t.degree)
    acc = [[F.zero] * (k + 1) for k in tdeg]
    ents = {s: tables[s].entries for s in need}
    half = len(next(iter(ents.values()))) // 2

    def line(a: FieldElement, b: FieldElement, top: int) -> list[FieldElement]:
        vals = [a, b]
        if top >= 2:
            delta = b - a
            for e in range(2, top + 1):
                vals.append(delta * nodes[e] + a)
        return vals

    for i in range(half):
        if shared:
            ops = {s: line(ents[s][2 * i], ents[s][2 * i + 1], need[s]) for s in need}
        for ti, t in enumerate(terms):
            k = tdeg[ti]
            if shared:
                cols = [ops[s] for s in t.operands]
            else:
                cols = [line(ents[s][2 * i], ents[s][2 * i + 1], k) for s in t.operands]
            row = acc[ti]
            for e in range(k + 1):
                v = cols[0][e]
                for c in cols[1:]:
                    v = v * c[e]
                row[e] = row[e] + v
    g = [F.zero] * (d + 1)
    for ti, t in enumerate(terms):
        ext = barycentric_extend(acc[ti], d + 1)
        for e in range(d + 1):
            g[e] = g[e] + _coeff_times(t.coeff, ext[e])
    return RoundMessage(g)


def brute_force_sum(comp: Composition, tables: Mapping[str, MleTable]) -> FieldElement:
    """Sum of the composition over every hypercube point (test oracle)."""
    _check_tables(comp, tables)
    n = len(next(iter(tables.values())).entries)
    acc = None
    for i in range(n):
        v = comp.apply({s: tables[s].entries[i] for s in comp.slots})
        acc = v if acc is None else acc + v
    return acc


def _absorb_header(tr: Transcript, comp: Composition, mu: int, H: FieldElement) -> None:
    tr.absorb(b"sumcheck", comp.kind.encode() + struct.pack(">II", mu, comp.max_degree))
    tr.absorb_scalar(b"H", H)


def prove(comp: Composition, tables: Mapping[str, MleTable], transcript: Transcript,
          shared: bool = True) -> SumCheckProof:
    mu = _check_tables(comp, tables)
    d = comp.max_degree
    cur = {s: tables[s] for s in comp.slots}
    rounds: list[RoundMessage] = []
    challenges: list[FieldElement] = []
    census: list[int] = []
    H = None
    for j in range(mu):
        with count_modmuls() as c:
            msg = round_evals(comp, cur, d, shared=shared)
        if H is None:
            H = msg.evals[0] + msg.evals[1]
            _absorb_header(transcript, comp, mu, H)
        transcript.absorb_scalars(b"round", msg.evals)
        r = transcript.challenge(b"r")
        with count_modmuls() as cu:
            cur = {s: fix_variable(t, r) for s, t in cur.items()}
        census.append(c.count + cu.count)
        rounds.append(msg)
        challenges.append(r)
    finals = {s: t.entries[0] for s, t in cur.items()}
    transcript.absorb_scalars(b"final", [finals[s] for s in comp.slots])
    return SumCheckProof(comp.kind, H, rounds, finals, challenges, census)


@dataclass
class VerifyResult:
    ok: bool
    round: int | None = None  # 1-based round that failed, mu + 1 for the final check
    reason: str = ""
    challenges: list[FieldElement] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


FinalOracle = Callable[[Sequence[FieldElement]], Mapping[str, FieldElement]]


def verify(proof: SumCheckProof, comp: Composition, transcript: Transcript,
           final_oracle: FinalOracle | None = None) -> VerifyResult:
    """Replay the rounds; ``final_oracle(r)`` returns each operand's value at r.

    Without an oracle the proof's own final evaluations are trusted, which
    only checks internal consistency.
    """
    mu = proof.num_rounds
    d = comp.max_degree
    if proof.kind != comp.kind:
        return VerifyResult(False, 0, "kind-mismatch")
    if mu < 1:
        return VerifyResult(False, 0, "no-rounds")
    _absorb_header(transcript, comp, mu, proof.claimed_sum)
    expected = proof.claimed_sum
    rs: list[FieldElement] = []
    for j, msg in enumerate(proof.rounds, start=1):
        if len(msg.evals) != d + 1:
            return VerifyResult(False, j, "degree", rs)
        if msg.evals[0] + msg.evals[1] != expected:
            return VerifyResult(False, j, "round-sum", rs)
        transcript.absorb_scalars(b"round", msg.evals)
        r = transcript.challenge(b"r")
        rs.append(r)
        expected = msg.at(r)
    if set(proof.final_evals) != set(comp.slots):
        return VerifyResult(False, mu + 1, "final-slots", rs)
    transcript.absorb_scalars(b"final", [proof.final_evals[s] for s in comp.slots])
    vals = proof.final_evals if final_oracle is None else final_oracle(rs)
    if final_oracle is not None:
        for s in comp.slots:
            if vals[s] != proof.final_evals[s]:
                return VerifyResult(False, mu + 1, f"final-eval:{s}", rs)
    if comp.apply(vals) != expected:
        return VerifyResult(False, mu + 1, "final-composition", rs)
    return VerifyResult(True, None, "", rs)


# --------------------------------------------------------------------------
# serialization: length-prefixed little-endian scalar vectors

def _pack_vec(xs: Sequence[FieldElement]) -> bytes:
    return struct.pack("<I", len(xs)) + b"".join(x.to_bytes() for x in xs)


def _unpack_vec(buf: bytes, off: int, F: FieldConfig) -> tuple[list[FieldElement], int]:
    (n,) = struct.unpack_from("<I", buf, off)
    off += 4
    w = F.byte_width
    out = []
    for _ in range(n):
        v = int.from_bytes(buf[off:off + w], "little")
        if v >= F.modulus or off + w > len(buf):
            raise SumCheckError("bad scalar encoding")
        out.append(F(v))
        off += w
    return out, off


def dump_proof(proof: SumCheckProof, comp: Composition) -> bytes:
    kind = proof.kind.encode()
    parts = [struct.pack("<I", len(kind)), kind, _pack_vec([proof.claimed_sum]),
             struct.pack("<I", len(proof.rounds))]
    parts += [_pack_vec(m.evals) for m in proof.rounds]
    parts.append(_pack_vec([proof.final_evals[s] for s in comp.slots]))
    return b"".join(parts)


def load_proof(buf: bytes, comp: Composition, F: FieldConfig) -> tuple[SumCheckProof, int]:
    (n,) = struct.unpack_from("<I", buf, 0)
    kind = buf[4:4 + n].decode()
    off = 4 + n
    (H,), off = _unpack_vec(buf, off, F)
    (nr,) = struct.unpack_from("<I", buf, off)
    off += 4
    rounds = []
    for _ in range(nr):
        ev, off = _unpack_vec(buf, off, F)
        rounds.append(RoundMessage(ev))
    finals, off = _unpack_vec(buf, off, F)
    if len(finals) != len(comp.slots):
        raise SumCheckError("final evaluation count does not match composition")
    return SumCheckProof(kind, H, rounds, dict(zip(comp.slots, finals))), off
