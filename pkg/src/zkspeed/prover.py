"""End-to-end HyperPlonk prover and a desk-scale self-verifier.

Step order, all through one transcript:

1. commit w1, w2, w3 (sparse MSM)
2. ZeroCheck on the gate identity times eq(X; r_z)
3. N/D, phi, product tables; commit phi and pi; PermCheck with alpha
4. batch evaluation (22 values, 13 tables, 6 points)
5. OpenCheck over the six combined tables, then the opening MSM ladder

Query schedule (rho_z, rho_p are the ZeroCheck / PermCheck round
challenges, rho_p' = rho_p without its last coordinate):

    point  coordinates                 tables
    P1     rho_z                       qL qR qM qO qc w1 w2 w3
    P2     rho_p                       phi pi w1 w2 w3 s1 s2 s3
    P3     (0, rho_p')                 phi pi
    P4     (1, rho_p')                 phi pi
    P5     bits of 2^mu - 2            pi   (product root, must be 1)
    P6     all ones                    pi   (must be 0)

P3/P4 give p1(rho_p) and p2(rho_p) because p1, p2 are the even/odd halves
of v = phi ‖ pi.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .circuit import CONTROL, WITNESS, MockCircuit
from .ec import CurveConfig, CurvePoint, preset_curve, scalar_mul
from .fp import FieldConfig, FieldElement, NotInvertibleError
from .mle import MleTable, build_eq, eq_eval, evaluate, fix_variable
from .msm import MsmInstance, SparsityTally, msm_naive, msm_sparse, pippenger
from .permwire import (DEFAULT_BATCH, WiringInputs, build_product, construct_nd, frac_mle)
from .sumcheck import (SumCheckProof, dump_proof, load_proof, opencheck_composition,
                       permcheck_composition, prove, verify, zerocheck_composition)
from .transcript import Transcript

NUM_EVALS = 22
NUM_POLYS = 13
NUM_POINTS = 6
POLYS = CONTROL + WITNESS + ("s1", "s2", "s3", "phi", "pi")
DOMAIN = b"zkspeed-hyperplonk-v1"
BUNDLE_MAGIC = b"ZKSB"
BUNDLE_VERSION = 1


class ProverError(RuntimeError):
    pass


def query_schedule() -> list[tuple[str, ...]]:
    """Tables queried at P1..P6, in absorb order."""
    return [
        CONTROL + WITNESS,
        ("phi", "pi", "w1", "w2", "w3", "s1", "s2", "s3"),
        ("phi", "pi"),
        ("phi", "pi"),
        ("pi",),
        ("pi",),
    ]


@dataclass(frozen=True)
class ProverKnobs:
    window_size: int = 8
    group_size: int = 16
    inversion_batch: int = DEFAULT_BATCH
    shared_evals: bool = True


@lru_cache(maxsize=8)
def commitment_key(curve: CurveConfig, n: int) -> tuple[CurvePoint, ...]:
    """n deterministic affine points [s_i]G with hash-derived s_i."""
    pts = []
    for i in range(n):
        h = hashlib.sha3_256(b"zkspeed-srs" + i.to_bytes(8, "big")).digest()
        s = int.from_bytes(h, "big") % (curve.order - 1) + 1
        pts.append(scalar_mul(s, curve.G).normalize())
    return tuple(pts)


def circuit_digest(c: MockCircuit) -> bytes:
    h = hashlib.sha3_256()
    h.update(struct.pack(">I", c.mu))
    for k in CONTROL:
        h.update(b"".join(e.to_bytes() for e in c.tables[k].entries))
    for s in c.sigma:
        h.update(b"".join(e.to_bytes() for e in s.entries))
    return h.digest()


@dataclass
class ProofBundle:
    mu: int
    witness_commitments: list[CurvePoint]
    phi_commitment: CurvePoint
    pi_commitment: CurvePoint
    zerocheck: SumCheckProof
    permcheck: SumCheckProof
    opencheck: SumCheckProof
    batch_evals: list[FieldElement]
    opening: list[CurvePoint]
    opening_value: FieldElement
    digest: bytes
    aux: dict = field(default_factory=dict, compare=False, repr=False)


# --------------------------------------------------------------------------
# derived tables shared by prover and verifier

@dataclass
class WiringState:
    beta: FieldElement
    gamma: FieldElement
    nd: object
    phi: MleTable
    prod: object
    resampled: bool


def _wiring(c: MockCircuit, tr: Transcript, batch: int) -> WiringState:
    resampled = False
    for attempt in range(2):
        beta = tr.challenge(b"beta")
        gamma = tr.challenge(b"gamma")
        inp = WiringInputs(tuple(c.tables[w] for w in WITNESS), c.sigma, c.ids, beta, gamma)
        nd = construct_nd(inp)
        try:
            phi = frac_mle(nd.N, nd.D, batch)
        except NotInvertibleError:
            if attempt:
                raise
            tr.absorb(b"resample", b"")
            resampled = True
            continue
        return WiringState(beta, gamma, nd, phi, build_product(phi), resampled)
    raise AssertionError("unreachable")  # pragma: no cover


def _poly_tables(c: MockCircuit, ws: WiringState) -> dict[str, MleTable]:
    t = dict(c.tables)
    t.update(s1=c.sigma[0], s2=c.sigma[1], s3=c.sigma[2], phi=ws.phi, pi=ws.prod.pi)
    return t


def _points(mu: int, F: FieldConfig, rho_z, rho_p) -> list[list[FieldElement]]:
    zero, one = F.zero, F.one
    root = (1 << mu) - 2
    return [
        list(rho_z),
        list(rho_p),
        [zero] + list(rho_p[:-1]),
        [one] + list(rho_p[:-1]),
        [one if (root >> j) & 1 else zero for j in range(mu)],
        [one] * mu,
    ]


def batch_evaluate(tables: dict[str, MleTable], points: Sequence[Sequence[FieldElement]],
                   transcript: Transcript | None = None) -> list[FieldElement]:
    """The 22 evaluations in :func:`query_schedule` order."""
    sched = query_schedule()
    if len(points) != NUM_POINTS:
        raise ProverError(f"expected {NUM_POINTS} points, got {len(points)}")
    out = []
    for pt, names in zip(points, sched):
        for name in names:
            out.append(evaluate(tables[name], pt))
    assert len(out) == NUM_EVALS
    if transcript is not None:
        transcript.absorb_scalars(b"batch-eval", out)
    return out


def _combine_coeffs(eta: FieldElement, sizes: Sequence[int]) -> list[list[FieldElement]]:
    # successive powers of eta, restarting at 1 for each point
    out = []
    for k in sizes:
        row, p = [], eta.cfg.one
        for _ in range(k):
            row.append(p)
            p = p * eta
        out.append(row)
    return out


def _combined_tables(tables, eta) -> list[MleTable]:
    sched = query_schedule()
    coeffs = _combine_coeffs(eta, [len(s) for s in sched])
    ys = []
    for names, cs in zip(sched, coeffs):
        acc = None
        for name, cf in zip(names, cs):
            e = tables[name].entries
            acc = [cf * x for x in e] if acc is None else [a + cf * x for a, x in zip(acc, e)]
        ys.append(MleTable.from_entries(acc))
    return ys


def _combined_claims(evals: Sequence[FieldElement], eta) -> list[FieldElement]:
    sched = query_schedule()
    coeffs = _combine_coeffs(eta, [len(s) for s in sched])
    out, pos = [], 0
    for names, cs in zip(sched, coeffs):
        acc = evals[0].cfg.zero
        for cf in cs:
            acc = acc + cf * evals[pos]
            pos += 1
        out.append(acc)
    return out


def _opening_polynomial(ys: Sequence[MleTable], ks_at_rho: Sequence[FieldElement]) -> MleTable:
    """g' = sum_k k_k(rho) * y_k."""
    acc = None
    for y, w in zip(ys, ks_at_rho):
        acc = [w * x for x in y.entries] if acc is None else [a + w * x for a, x in zip(acc, y.entries)]
    return MleTable.from_entries(acc)


def opening_quotients(g: MleTable, rho: Sequence[FieldElement]) -> tuple[list[MleTable], FieldElement]:
    """Quotients q_1..q_mu with g(X) - g(rho) = sum_i (X_i - rho_i) q_i(X_{i+1..mu}).

    q_i has 2^(mu-i) entries, so committing them is the halving MSM ladder.
    """
    qs = []
    cur = g
    for r in rho:
        e = cur.entries
        qs.append(MleTable(cur.num_vars - 1, [e[2 * j + 1] - e[2 * j] for j in range(len(e) // 2)]))
        cur = fix_variable(cur, r)
    return qs, cur.entries[0]


def _commit(tab: MleTable, key, knobs: ProverKnobs, sparse: bool = False) -> CurvePoint:
    inst = MsmInstance(tab.ints(), list(key[:len(tab)]), knobs.window_size)
    if sparse:
        return msm_sparse(inst, SparsityTally.of(inst.scalars), knobs.group_size)
    return pippenger(inst, knobs.group_size)


def _naive_commit(tab: MleTable, key, window: int) -> CurvePoint:
    return msm_naive(MsmInstance(tab.ints(), list(key[:len(tab)]), window))


# --------------------------------------------------------------------------
# prover

def prove_all(c: MockCircuit, knobs: ProverKnobs = ProverKnobs(),
              curve: CurveConfig | None = None) -> ProofBundle:
    curve = curve or preset_curve("desk24")
    F = c.field
    if curve.scalar_field is None or curve.scalar_field != F:
        raise ProverError("circuit field must be the curve's scalar field")
    mu, n = c.mu, c.n
    key = commitment_key(curve, n)
    tr = Transcript(F, DOMAIN)
    tr.absorb(b"circuit", circuit_digest(c))

    # 1. witness commitments
    wc = [_commit(c.tables[w], key, knobs, sparse=True) for w in WITNESS]
    for w, P in zip(WITNESS, wc):
        tr.absorb(w.encode(), P.to_bytes())

    # 2. gate identity
    r_z = tr.challenges(b"zc", mu)
    zc_tables = dict(c.tables)
    zc_tables["fz"] = build_eq(r_z)
    zc = prove(zerocheck_composition(), zc_tables, tr, shared=knobs.shared_evals)

    # 3. wiring identity
    ws = _wiring(c, tr, knobs.inversion_batch)
    phi_c = _commit(ws.phi, key, knobs)
    pi_c = _commit(ws.prod.pi, key, knobs)
    tr.absorb(b"phi", phi_c.to_bytes())
    tr.absorb(b"pi", pi_c.to_bytes())
    alpha = tr.challenge(b"alpha")
    r_p = tr.challenges(b"pc", mu)
    pc_tables = {"pi": ws.prod.pi, "p1": ws.prod.p1, "p2": ws.prod.p2, "phi": ws.phi,
                 "fz": build_eq(r_p)}
    for j in range(3):
        pc_tables[f"D{j + 1}"] = ws.nd.D_parts[j]
        pc_tables[f"N{j + 1}"] = ws.nd.N_parts[j]
    pc = prove(permcheck_composition(alpha), pc_tables, tr, shared=knobs.shared_evals)

    # 4. batch evaluation
    tables = _poly_tables(c, ws)
    points = _points(mu, F, zc.challenges, pc.challenges)
    evals = batch_evaluate(tables, points, tr)

    # 5. polynomial opening
    eta = tr.challenge(b"eta")
    ys = _combined_tables(tables, eta)
    oc_tables = {}
    for k, (y, pt) in enumerate(zip(ys, points), start=1):
        oc_tables[f"y{k}"] = y
        oc_tables[f"k{k}"] = build_eq(pt)
    oc = prove(opencheck_composition(), oc_tables, tr, shared=knobs.shared_evals)
    rho = oc.challenges
    g = _opening_polynomial(ys, [oc.final_evals[f"k{k}"] for k in range(1, 7)])
    qs, gval = opening_quotients(g, rho)
    ladder = [_commit(q, key, knobs) for q in qs]
    for P in ladder:
        tr.absorb(b"open", P.to_bytes())
    tr.absorb_scalar(b"open-value", gval)

    aux = {"r_z": r_z, "r_p": r_p, "alpha": alpha, "beta": ws.beta, "gamma": ws.gamma,
           "eta": eta, "points": points, "wiring": ws, "tables": tables, "g": g,
           "quotients": qs, "resampled": ws.resampled}
    return ProofBundle(mu, wc, phi_c, pi_c, zc, pc, oc, evals, ladder, gval, tr.digest(), aux)


# --------------------------------------------------------------------------
# self-verification

@dataclass
class CheckResult:
    ok: bool
    detail: str = ""


@dataclass
class VerifyReport:
    checks: dict[str, CheckResult]

    @property
    def all_pass(self) -> bool:
        return all(c.ok for c in self.checks.values())

    def failed(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v.ok]

    def lines(self) -> list[str]:
        return [f"{'PASS' if v.ok else 'FAIL'} {k}" + (f" ({v.detail})" if v.detail else "")
                for k, v in self.checks.items()]


def self_verify(b: ProofBundle, c: MockCircuit, curve: CurveConfig | None = None) -> VerifyReport:
    """Replay the transcript, recompute every table from the circuit, and
    check each proof component against it.  Commitments are recomputed with
    the naive MSM."""
    curve = curve or preset_curve("desk24")
    F = c.field
    mu, n = c.mu, c.n
    key = commitment_key(curve, n)
    W = min(8, curve.order.bit_length())
    res: dict[str, CheckResult] = {}
    tr = Transcript(F, DOMAIN)
    tr.absorb(b"circuit", circuit_digest(c))

    if b.mu != mu:
        return VerifyReport({"shape": CheckResult(False, f"bundle mu {b.mu} != circuit mu {mu}")})
    wc = [_naive_commit(c.tables[w], key, W) for w in WITNESS]
    bad = [w for w, P, Q in zip(WITNESS, wc, b.witness_commitments) if P != Q]
    res["witness_commitments"] = CheckResult(not bad, ",".join(bad))
    for w, P in zip(WITNESS, b.witness_commitments):
        tr.absorb(w.encode(), P.to_bytes())

    r_z = tr.challenges(b"zc", mu)
    zcomp = zerocheck_composition()

    def zc_oracle(rho):
        vals = {k: evaluate(c.tables[k], rho) for k in CONTROL + WITNESS}
        vals["fz"] = eq_eval(r_z, rho)
        return vals

    v = verify(b.zerocheck, zcomp, tr, zc_oracle)
    zero_sum = b.zerocheck.claimed_sum.is_zero()
    res["zerocheck"] = CheckResult(bool(v) and zero_sum,
                                   v.reason and f"round {v.round}: {v.reason}" or ("" if zero_sum else "H != 0"))
    rho_z = v.challenges

    ws = _wiring(c, tr, DEFAULT_BATCH)
    phi_c = _naive_commit(ws.phi, key, W)
    pi_c = _naive_commit(ws.prod.pi, key, W)
    bad = [name for name, P, Q in (("phi", phi_c, b.phi_commitment), ("pi", pi_c, b.pi_commitment)) if P != Q]
    res["wiring_commitments"] = CheckResult(not bad, ",".join(bad))
    tr.absorb(b"phi", b.phi_commitment.to_bytes())
    tr.absorb(b"pi", b.pi_commitment.to_bytes())
    alpha = tr.challenge(b"alpha")
    r_p = tr.challenges(b"pc", mu)
    pcomp = permcheck_composition(alpha)
    pc_tab = {"pi": ws.prod.pi, "p1": ws.prod.p1, "p2": ws.prod.p2, "phi": ws.phi}
    for j in range(3):
        pc_tab[f"D{j + 1}"] = ws.nd.D_parts[j]
        pc_tab[f"N{j + 1}"] = ws.nd.N_parts[j]

    def pc_oracle(rho):
        vals = {k: evaluate(t, rho) for k, t in pc_tab.items()}
        vals["fz"] = eq_eval(r_p, rho)
        return vals

    v = verify(b.permcheck, pcomp, tr, pc_oracle)
    zero_sum = b.permcheck.claimed_sum.is_zero()
    res["permcheck"] = CheckResult(bool(v) and zero_sum,
                                   v.reason and f"round {v.round}: {v.reason}" or ("" if zero_sum else "H != 0"))
    rho_p = v.challenges
    root = ws.prod.root
    res["product_root"] = CheckResult(root == F.one, "" if root == F.one else "product of phi != 1")

    tables = _poly_tables(c, ws)
    points = _points(mu, F, rho_z, rho_p) if len(rho_z) == len(rho_p) == mu else None
    if points is None:
        res["batch_eval"] = CheckResult(False, "missing challenges")
        return VerifyReport(res)
    expect = batch_evaluate(tables, points)
    ok = len(b.batch_evals) == NUM_EVALS and expect == b.batch_evals
    res["batch_eval"] = CheckResult(ok, "" if ok else "evaluation mismatch")
    if len(b.batch_evals) == NUM_EVALS:
        # p1(rho_p), p2(rho_p) and the root agree with the PermCheck finals
        ev = b.batch_evals
        phi3, pi3, phi4, pi4, root_ev = ev[16], ev[17], ev[18], ev[19], ev[20]
        last = rho_p[-1]
        p1 = (F.one - last) * phi3 + last * pi3
        p2 = (F.one - last) * phi4 + last * pi4
        fin = b.permcheck.final_evals
        cons = fin.get("p1") == p1 and fin.get("p2") == p2 and root_ev == F.one and ev[21].is_zero()
        res["batch_eval_consistency"] = CheckResult(cons, "" if cons else "shifted evaluations disagree")
    tr.absorb_scalars(b"batch-eval", b.batch_evals)

    eta = tr.challenge(b"eta")
    ys = _combined_tables(tables, eta)
    claims = _combined_claims(b.batch_evals, eta) if len(b.batch_evals) == NUM_EVALS else []
    ocomp = opencheck_composition()

    def oc_oracle(rho):
        vals = {}
        for k, (y, pt) in enumerate(zip(ys, points), start=1):
            vals[f"y{k}"] = evaluate(y, rho)
            vals[f"k{k}"] = eq_eval(pt, rho)
        return vals

    v = verify(b.opencheck, ocomp, tr, oc_oracle)
    h_ok = bool(claims) and b.opencheck.claimed_sum == sum(claims[1:], claims[0])
    res["opencheck"] = CheckResult(bool(v) and h_ok,
                                   v.reason and f"round {v.round}: {v.reason}" or ("" if h_ok else "H != sum of claims"))

    rho = v.challenges
    if len(rho) == mu:
        g = _opening_polynomial(ys, [eq_eval(pt, rho) for pt in points])
        qs, gval = opening_quotients(g, rho)
        ladder = [_naive_commit(q, key, W) for q in qs]
        ok = len(b.opening) == mu and ladder == b.opening and gval == b.opening_value
        res["opening"] = CheckResult(ok, "" if ok else "opening ladder mismatch")
    else:
        res["opening"] = CheckResult(False, "missing challenges")
    for P in b.opening:
        tr.absorb(b"open", P.to_bytes())
    tr.absorb_scalar(b"open-value", b.opening_value)
    d_ok = tr.digest() == b.digest
    res["transcript_digest"] = CheckResult(d_ok, "" if d_ok else "digest mismatch")
    return VerifyReport(res)


# --------------------------------------------------------------------------
# serialization

def _pt(P: CurvePoint) -> bytes:
    return P.to_bytes()


def dump_bundle(b: ProofBundle) -> bytes:
    F = b.batch_evals[0].cfg
    parts = [BUNDLE_MAGIC, struct.pack("<HI", BUNDLE_VERSION, b.mu)]
    parts += [_pt(P) for P in b.witness_commitments]
    parts += [_pt(b.phi_commitment), _pt(b.pi_commitment)]
    for proof, comp in ((b.zerocheck, zerocheck_composition()),
                        (b.permcheck, permcheck_composition(F.zero)),
                        (b.opencheck, opencheck_composition())):
        blob = dump_proof(proof, comp)
        parts += [struct.pack("<I", len(blob)), blob]
    parts.append(struct.pack("<I", len(b.batch_evals)))
    parts += [e.to_bytes() for e in b.batch_evals]
    parts.append(struct.pack("<I", len(b.opening)))
    parts += [_pt(P) for P in b.opening]
    parts += [b.opening_value.to_bytes(), b.digest]
    return b"".join(parts)


def load_bundle(buf: bytes, curve: CurveConfig | None = None) -> ProofBundle:
    curve = curve or preset_curve("desk24")
    F = curve.scalar_field
    if buf[:4] != BUNDLE_MAGIC:
        raise ProverError("not a proof bundle")
    ver, mu = struct.unpack_from("<HI", buf, 4)
    if ver != BUNDLE_VERSION:
        raise ProverError(f"unsupported bundle version {ver}")
    off = 10
    plen = 1 + 2 * curve.base_field.byte_width
    sw = F.byte_width

    def point():
        nonlocal off
        P = CurvePoint.from_bytes(curve, buf[off:off + plen])
        off += plen
        return P

    def scalar():
        nonlocal off
        v = F(int.from_bytes(buf[off:off + sw], "little"))
        off += sw
        return v

    wc = [point() for _ in range(3)]
    phi_c, pi_c = point(), point()
    proofs = []
    for comp in (zerocheck_composition(), permcheck_composition(F.zero), opencheck_composition()):
        (ln,) = struct.unpack_from("<I", buf, off)
        off += 4
        p, _ = load_proof(buf[off:off + ln], comp, F)
        off += ln
        proofs.append(p)
    (ne,) = struct.unpack_from("<I", buf, off)
    off += 4
    evals = [scalar() for _ in range(ne)]
    (nl,) = struct.unpack_from("<I", buf, off)
    off += 4
    ladder = [point() for _ in range(nl)]
    gval = scalar()
    digest = buf[off:off + 32]
    if len(digest) != 32 or off + 32 != len(buf):
        raise ProverError("truncated bundle")
    return ProofBundle(mu, wc, phi_c, pi_c, *proofs, evals, ladder, gval, digest)
