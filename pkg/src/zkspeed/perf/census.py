"""Modmul census of the prover kernels.

Two modes share one row layout:

* :func:`analytical_census` evaluates closed forms for any mu (255-bit
  scalars, W=9 windows, 14-modmul PADDs by default);
* :func:`instrumented_census` runs the functional kernels on a mock circuit
  under :func:`zkspeed.fp.count_modmuls`.

SumCheck rows count the per-term datapath (every term recomputes its own
operand extensions), the convention of an unshared CPU implementation.
MLE updates are a separate row.  MSM counts are PADD/PDBL counts times
the modmuls per complete addition; random scalars are handled through the
expected number of non-empty buckets.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..ec import PADD_MODMULS_A0, CurveConfig, preset_curve
from ..fp import count_modmuls
from ..mle import DEFAULT_SPARSITY, SparsityProfile, build_eq, fix_variable
from ..msm import MsmInstance, SparsityTally, aggregation_padds, msm_sparse_with_stats, pippenger
from ..permwire import DEFAULT_BATCH, WiringInputs, build_product, construct_nd, frac_mle
from ..sumcheck import (OPENCHECK, PERMCHECK, ZEROCHECK, opencheck_composition,
                        permcheck_composition, round_evals, zerocheck_composition)

ROWS = ("Witness MSMs", "Wire Identity MSMs", "Poly Open MSMs", "Batch Evaluations",
        "ZeroCheck Rounds", "FracMLE", "PermCheck Rounds", "Linear Combine",
        "OpenCheck Rounds", "Construct N&D", "ProdMLE", "All MLE Updates", "Build eq")

# per-instance evaluation cost and per-round interpolation tail
SUMCHECK_COST = {ZEROCHECK: (74, 18), PERMCHECK: (90, 34), OPENCHECK: (30, 0)}
SUMCHECK_TABLES = {ZEROCHECK: 9, PERMCHECK: 11, OPENCHECK: 12}

# reference values at mu = 20, millions of modmuls
TABLE1_MU20 = {
    "Witness MSMs": 1370.0, "Wire Identity MSMs": 2290.0, "Poly Open MSMs": 1160.0,
    "Batch Evaluations": 23.1, "ZeroCheck Rounds": 77.6, "FracMLE": 5.19,
    "PermCheck Rounds": 94.4, "Linear Combine": 18.9, "OpenCheck Rounds": 31.5,
    "Construct N&D": 10.5, "ProdMLE": 1.05, "All MLE Updates": 33.6,
}


@dataclass(frozen=True)
class CensusParams:
    scalar_bits: int = 255
    window: int = 9
    group_size: int = 16
    padd_modmuls: int = PADD_MODMULS_A0
    sparsity: SparsityProfile = DEFAULT_SPARSITY
    batch: int = DEFAULT_BATCH
    scalar_bytes: int = 32
    point_bytes: int = 96


@dataclass
class CensusRow:
    kernel: str
    modmuls: float
    bytes_in: int = 0
    bytes_out: int = 0

    @property
    def intensity(self) -> float:
        b = self.bytes_in + self.bytes_out
        return self.modmuls / b if b else float("inf")


@dataclass
class Census:
    mu: int
    rows: dict[str, CensusRow] = field(default_factory=dict)
    mode: str = "analytical"
    tallies: dict = field(default_factory=dict, repr=False)
    profiles: dict = field(default_factory=dict, repr=False)

    def modmuls(self, kernel: str) -> float:
        return self.rows[kernel].modmuls

    def as_dict(self) -> dict[str, float]:
        return {k: r.modmuls for k, r in self.rows.items()}


# --------------------------------------------------------------------------
# closed forms

def _window_bits(scalar_bits: int, window: int) -> list[int]:
    nw = -(-scalar_bits // window)
    return [window] * (nw - 1) + [scalar_bits - window * (nw - 1)]


def expected_msm_ops(n: int, scalar_bits: int, window: int, group_size: int | None,
                     n_one: int = 0) -> tuple[float, int]:
    """Expected (PADD, PDBL) of Pippenger on ``n`` uniform scalars plus
    ``n_one`` scalars equal to 1.

    Per window a bucket costs one PADD per point after the first, so the
    count is (non-zero digits) - (non-empty buckets).
    """
    nb = (1 << window) - 1
    bits = _window_bits(scalar_bits, window)
    nw = len(bits)
    adds = 0.0
    for k, w in enumerate(bits):
        B = 1 << w
        miss = (1 - 1 / B) ** n
        hit = n * (1 - 1 / B)
        filled = (B - 1) * (1 - miss)
        if k == 0 and n_one:
            hit += n_one
            filled += miss  # bucket 1 is surely filled
        adds += hit - filled
    a, d = aggregation_padds(nb, group_size)
    return adds + nw * a + (nw - 1), nw * d + (nw - 1) * window


def digit_profile(scalars, window: int, scalar_bits: int) -> tuple[int, ...]:
    """Non-zero digit count of each window, least significant first."""
    mask = (1 << window) - 1
    nw = len(_window_bits(scalar_bits, window))
    return tuple(sum(1 for x in scalars if (x >> (window * k)) & mask) for k in range(nw))


def profile_msm_ops(profile: tuple[int, ...], scalar_bits: int, window: int,
                    group_size: int | None, n_one: int = 0) -> tuple[float, int]:
    """Expected (PADD, PDBL) given each window's non-zero digit count.

    The ``n_one`` scalars equal to 1 all land in bucket 1 of window 0; the
    other digits are spread evenly over their window's buckets.
    """
    nb = (1 << window) - 1
    bits = _window_bits(scalar_bits, window)
    nw = len(bits)
    adds = 0.0
    for k, (h, w) in enumerate(zip(profile, bits)):
        B = (1 << w) - 1
        spread = h - n_one if k == 0 else h
        miss = (1 - 1 / B) ** spread
        filled = B * (1 - miss)
        if k == 0 and n_one:
            filled += miss
        adds += h - filled
    a, d = aggregation_padds(nb, group_size)
    return adds + nw * a + (nw - 1), nw * d + (nw - 1) * window


def msm_modmuls(n: int, p: CensusParams, n_one: int = 0,
                profile: tuple[int, ...] | None = None) -> float:
    if profile is not None:
        a, d = profile_msm_ops(profile, p.scalar_bits, p.window, p.group_size, n_one)
        return p.padd_modmuls * (a + d)
    if n + n_one == 0:
        return 0.0
    a, d = expected_msm_ops(n, p.scalar_bits, p.window, p.group_size, n_one)
    return p.padd_modmuls * (a + d)


def sparse_msm_modmuls(n_one: int, n_dense: int, p: CensusParams,
                       profile: tuple[int, ...] | None = None) -> float:
    ones = max(n_one - 1, 0)
    final = 1 if n_one and n_dense else 0
    dense = msm_modmuls(n_dense, p, profile=profile) if n_dense else 0.0
    return p.padd_modmuls * (ones + final) + dense


def sumcheck_modmuls(mu: int, kind: str) -> int:
    per, tail = SUMCHECK_COST[kind]
    return per * ((1 << mu) - 1) + tail * mu


def frac_modmuls(n: int, batch: int) -> int:
    full, rest = divmod(n, batch)
    inv = full * 3 * (batch - 1) + (3 * (rest - 1) if rest else 0)
    return n + inv


def build_eq_modmuls(mu: int) -> int:
    return (1 << (mu + 1)) - 4


def analytical_census(mu: int, p: CensusParams = CensusParams(),
                      witness_tallies: list[SparsityTally] | None = None,
                      profiles: dict[str, list[tuple[int, ...]]] | None = None) -> Census:
    """Closed-form census.

    ``witness_tallies`` (one per witness column) replaces the expected
    sparsity split when given.  ``profiles`` carries per-window digit
    counts for scalars far from uniform: "witness" holds one per column
    (dense part only), "wiring" holds (ones, profile) for phi and pi.
    """
    profiles = profiles or {}
    n = 1 << mu
    sb, pb = p.scalar_bytes, p.point_bytes
    if witness_tallies is None:
        n_one = round(n * p.sparsity.frac_one)
        n_zero = round(n * p.sparsity.frac_zero)
        witness_tallies = [SparsityTally(n_zero, n_one, n - n_one - n_zero)] * 3
    c = Census(mu)
    R = c.rows
    wprof = profiles.get("witness", [None] * 3)
    R["Witness MSMs"] = CensusRow("Witness MSMs", sum(sparse_msm_modmuls(t.one, t.dense, p, pr)
                                                      for t, pr in zip(witness_tallies, wprof)),
                                  sum(t.one * pb + t.dense * (pb + sb) for t in witness_tallies))
    if "wiring" in profiles:
        wire = sum(msm_modmuls(n, p, ones, pr) for ones, pr in profiles["wiring"])
    else:
        wire = 2 * msm_modmuls(n, p)
    R["Wire Identity MSMs"] = CensusRow("Wire Identity MSMs", wire, 2 * n * (pb + sb))
    R["Poly Open MSMs"] = CensusRow("Poly Open MSMs", sum(msm_modmuls(1 << k, p) for k in range(mu)),
                                    (n - 1) * (pb + sb))
    R["Batch Evaluations"] = CensusRow("Batch Evaluations", 22 * (n - 1), 13 * n * sb)
    for kind, name in ((ZEROCHECK, "ZeroCheck Rounds"), (PERMCHECK, "PermCheck Rounds"),
                       (OPENCHECK, "OpenCheck Rounds")):
        R[name] = CensusRow(name, sumcheck_modmuls(mu, kind), SUMCHECK_TABLES[kind] * n * sb)
    R["FracMLE"] = CensusRow("FracMLE", frac_modmuls(n, p.batch), 2 * n * sb, n * sb)
    # y_1..y_6 from 22 weighted tables (and 22 powers of eta), then g'
    R["Linear Combine"] = CensusRow("Linear Combine", 28 * n + 22, 13 * n * sb, 7 * n * sb)
    R["Construct N&D"] = CensusRow("Construct N&D", 10 * n, 6 * n * sb, 2 * n * sb)
    R["ProdMLE"] = CensusRow("ProdMLE", n - 1, n * sb, 2 * n * sb)
    T = sum(SUMCHECK_TABLES.values())
    R["All MLE Updates"] = CensusRow("All MLE Updates", T * (n - 1), 2 * T * (n - 1) * sb,
                                     T * (n - 1) * sb)
    # fz for ZeroCheck and the six OpenCheck eq tables
    R["Build eq"] = CensusRow("Build eq", 7 * build_eq_modmuls(mu), 0, 7 * n * sb)
    return c


# --------------------------------------------------------------------------
# instrumented

def _count(fn, *args, **kw) -> int:
    with count_modmuls() as c:
        fn(*args, **kw)
    return c.count


def _sumcheck_counts(comp, tables, challenges) -> tuple[int, int]:
    """(evaluation, update) modmuls of one SumCheck with the per-term datapath."""
    cur = {s: tables[s] for s in comp.slots}
    ev = up = 0
    for r in challenges:
        ev += _count(round_evals, comp, cur, comp.max_degree, shared=False)
        with count_modmuls() as c:
            cur = {s: fix_variable(t, r) for s, t in cur.items()}
        up += c.count
    return ev, up


def instrumented_census(circuit, curve: CurveConfig | None = None, window: int = 8,
                        group_size: int = 16, batch: int = DEFAULT_BATCH) -> tuple[Census, CensusParams]:
    """Run one proof of ``circuit`` and count every kernel.

    Returns the census plus the :class:`CensusParams` under which
    :func:`analytical_census` describes the same run.
    """
    from ..prover import (ProverKnobs, _combined_tables, _opening_polynomial, batch_evaluate,
                          commitment_key, opening_quotients, prove_all)
    from ..circuit import WITNESS

    curve = curve or preset_curve("desk24")
    bits = curve.scalar_field.modulus.bit_length()
    window = min(window, bits)
    knobs = ProverKnobs(window_size=window, group_size=group_size, inversion_batch=batch)
    b = prove_all(circuit, knobs, curve)
    aux = b.aux
    mu, n = circuit.mu, circuit.n
    key = list(commitment_key(curve, n))
    rows: dict[str, float] = {}

    tallies = []
    wit = 0
    for w in WITNESS:
        s = circuit.tables[w].ints()
        t = SparsityTally.of(s)
        tallies.append(t)
        wit += _count(msm_sparse_with_stats, MsmInstance(s, key[:n], window), t, group_size)
    rows["Witness MSMs"] = wit

    def dense(tab):
        return _count(pippenger, MsmInstance(tab.ints(), key[:len(tab)], window), group_size)

    ws = aux["wiring"]
    rows["Wire Identity MSMs"] = dense(ws.phi) + dense(ws.prod.pi)
    rows["Poly Open MSMs"] = sum(dense(q) for q in aux["quotients"])
    tables, points = aux["tables"], aux["points"]
    rows["Batch Evaluations"] = _count(batch_evaluate, tables, points)

    zc_t = dict(circuit.tables)
    zc_t["fz"] = build_eq(aux["r_z"])
    pc_t = {"pi": ws.prod.pi, "p1": ws.prod.p1, "p2": ws.prod.p2, "phi": ws.phi,
            "fz": build_eq(aux["r_p"])}
    for j in range(3):
        pc_t[f"D{j + 1}"] = ws.nd.D_parts[j]
        pc_t[f"N{j + 1}"] = ws.nd.N_parts[j]
    with count_modmuls() as c:
        ys = _combined_tables(tables, aux["eta"])
        g = _opening_polynomial(ys, [b.opencheck.final_evals[f"k{k}"] for k in range(1, 7)])
    rows["Linear Combine"] = c.count
    oc_t = {}
    eq_cost = 0
    for k, (y, pt) in enumerate(zip(ys, points), start=1):
        oc_t[f"y{k}"] = y
        with count_modmuls() as ce:
            oc_t[f"k{k}"] = build_eq(pt)
        eq_cost += ce.count
    eq_cost += _count(build_eq, aux["r_z"])
    rows["Build eq"] = eq_cost

    updates = 0
    for comp, tabs, proof, name in (
            (zerocheck_composition(), zc_t, b.zerocheck, "ZeroCheck Rounds"),
            (permcheck_composition(aux["alpha"]), pc_t, b.permcheck, "PermCheck Rounds"),
            (opencheck_composition(), oc_t, b.opencheck, "OpenCheck Rounds")):
        ev, up = _sumcheck_counts(comp, tabs, proof.challenges)
        rows[name] = ev
        updates += up
    rows["All MLE Updates"] = updates

    inp = WiringInputs(tuple(circuit.tables[w] for w in WITNESS), circuit.sigma, circuit.ids,
                       ws.beta, ws.gamma)
    rows["Construct N&D"] = _count(construct_nd, inp)
    rows["FracMLE"] = _count(frac_mle, ws.nd.N, ws.nd.D, batch)
    rows["ProdMLE"] = _count(build_product, ws.phi)

    census = Census(mu, {k: CensusRow(k, rows[k]) for k in ROWS}, mode="instrumented")
    census.tallies = {"witness": tallies}
    census.profiles = {
        "witness": [digit_profile([x for x in circuit.tables[w].ints() if x > 1], window, bits)
                    for w in WITNESS],
        "wiring": [(SparsityTally.of(t.ints()).one, digit_profile(t.ints(), window, bits))
                   for t in (ws.phi, ws.prod.pi)],
    }
    params = CensusParams(scalar_bits=bits, window=window, group_size=group_size,
                          sparsity=circuit.sparsity, batch=batch)
    return census, params


def compare_census(circuit, **kw) -> dict[str, tuple[float, float, float]]:
    """kernel -> (instrumented, analytical, relative error)."""
    inst, params = instrumented_census(circuit, **kw)
    ana = analytical_census(circuit.mu, params, inst.tallies["witness"], inst.profiles)
    out = {}
    for k in ROWS:
        a, i = ana.modmuls(k), inst.modmuls(k)
        out[k] = (i, a, abs(a - i) / i if i else float(a != 0))
    return out
