"""Synthetic Plonk-style gate traces with copy constraints.

Each gate i satisfies

    qL*w1 + qR*w2 + qM*w1*w2 - qO*w3 + qc = 0

Wire slots are numbered ``j * 2^mu + i`` for column j in {0, 1, 2} (w1, w2,
w3).  An input may copy the output of an earlier gate; every such group of
equal slots becomes one cycle of sigma.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .fp import FieldConfig, FieldElement
from .mle import DEFAULT_SPARSITY, MleError, MleTable, SparsityProfile

CONTROL = ("qL", "qR", "qM", "qO", "qc")
WITNESS = ("w1", "w2", "w3")


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Workload:
    mu: int
    sparsity: SparsityProfile = DEFAULT_SPARSITY
    seed: int = 0
    wiring_fraction: float = 0.25

    def __post_init__(self) -> None:
        if self.mu < 2:
            raise CircuitError("mu must be >= 2")
        if not 0.0 <= self.wiring_fraction <= 1.0:
            raise CircuitError("wiring_fraction must lie in [0, 1]")

    def to_dict(self) -> dict:
        return {"mu": self.mu, "sparsity": self.sparsity.to_dict(), "seed": self.seed,
                "wiring_fraction": self.wiring_fraction}

    @classmethod
    def from_dict(cls, d: dict) -> "Workload":
        sp = d.get("sparsity")
        return cls(int(d["mu"]), SparsityProfile.from_dict(sp) if sp else DEFAULT_SPARSITY,
                   int(d.get("seed", 0)), float(d.get("wiring_fraction", 0.25)))

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "Workload":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass
class MockCircuit:
    mu: int
    field: FieldConfig
    tables: dict[str, MleTable]  # qL qR qM qO qc w1 w2 w3
    sigma: tuple[MleTable, MleTable, MleTable]
    ids: tuple[MleTable, MleTable, MleTable]
    sparsity: SparsityProfile  # realized over w1..w3
    copies: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return 1 << self.mu

    def gate_residuals(self) -> list[FieldElement]:
        t = {k: v.entries for k, v in self.tables.items()}
        return [t["qL"][i] * t["w1"][i] + t["qR"][i] * t["w2"][i]
                + t["qM"][i] * t["w1"][i] * t["w2"][i] - t["qO"][i] * t["w3"][i] + t["qc"][i]
                for i in range(self.n)]

    def gates_ok(self) -> bool:
        return all(r.is_zero() for r in self.gate_residuals())

    def slot_value(self, slot: int) -> FieldElement:
        return self.tables[WITNESS[slot >> self.mu]].entries[slot & (self.n - 1)]

    def wiring_ok(self) -> bool:
        for j in range(3):
            for i, s in enumerate(self.sigma[j].entries):
                if self.slot_value(int(s)) != self.tables[WITNESS[j]].entries[i]:
                    return False
        return True

    def copy(self) -> "MockCircuit":
        return MockCircuit(self.mu, self.field,
                           {k: MleTable(v.num_vars, list(v.entries)) for k, v in self.tables.items()},
                           tuple(MleTable(t.num_vars, list(t.entries)) for t in self.sigma),
                           self.ids, self.sparsity, self.copies, dict(self.meta))


def _sample_class(rng: random.Random, sp: SparsityProfile) -> str:
    u = rng.random()
    if u < sp.frac_zero:
        return "zero"
    if u < sp.frac_zero + sp.frac_one:
        return "one"
    return "dense"


def _value(rng: random.Random, cls: str, q: int) -> int:
    if cls == "zero":
        return 0
    if cls == "one":
        return 1
    return rng.randrange(2, q)


def _class_of(v: int) -> str:
    return "zero" if v == 0 else "one" if v == 1 else "dense"


def gen_mock_circuit(mu: int, sparsity: SparsityProfile = DEFAULT_SPARSITY, seed: int = 0,
                     wiring_fraction: float = 0.25, field: FieldConfig | None = None) -> MockCircuit:
    """Deterministic random gate trace realizing ``sparsity`` on w1..w3."""
    if mu < 2:
        raise CircuitError("mu must be >= 2")
    if not isinstance(sparsity, SparsityProfile):
        raise MleError("sparsity must be a SparsityProfile")
    if field is None:
        from .ec import preset_curve
        field = preset_curve("desk24").scalar_field
    n = 1 << mu
    q = field.modulus
    if 3 * n > q:
        raise CircuitError(f"field too small for {3 * n} wire slots")
    rng = random.Random(seed)
    cols = {k: [0] * n for k in CONTROL + WITNESS}
    sigma = [list(range(j * n, (j + 1) * n)) for j in range(3)]
    cycles: dict[int, list[int]] = {}  # output slot -> input slots copying it
    for i in range(n):
        ins = []
        for j in (0, 1):
            if i > 0 and rng.random() < wiring_fraction:
                k = rng.randrange(i)
                ins.append(cols["w3"][k])
                cycles.setdefault(2 * n + k, []).append(j * n + i)
            else:
                ins.append(_value(rng, _sample_class(rng, sparsity), q))
        a, b = ins
        out = _value(rng, _sample_class(rng, sparsity), q)
        want = _class_of(out)
        if _class_of((a + b) % q) == want:
            cols["qL"][i] = cols["qR"][i] = cols["qO"][i] = 1
            out = (a + b) % q
        elif _class_of(a * b % q) == want:
            cols["qM"][i] = cols["qO"][i] = 1
            out = a * b % q
        else:
            cols["qL"][i] = cols["qR"][i] = cols["qO"][i] = 1
            cols["qc"][i] = (out - a - b) % q
        cols["w1"][i], cols["w2"][i], cols["w3"][i] = a, b, out
    for src, dsts in cycles.items():
        ring = [src] + dsts
        for x, y in zip(ring, ring[1:] + ring[:1]):
            sigma[x // n][x % n] = y
    tables = {k: MleTable.from_ints(field, v) for k, v in cols.items()}
    wvals = cols["w1"] + cols["w2"] + cols["w3"]
    return MockCircuit(
        mu, field, tables,
        tuple(MleTable.from_ints(field, s) for s in sigma),
        tuple(MleTable.from_ints(field, range(j * n, (j + 1) * n)) for j in range(3)),
        SparsityProfile.measure(wvals),
        sum(len(d) for d in cycles.values()),
        {"seed": seed, "wiring_fraction": wiring_fraction},
    )


def circuit_from_workload(w: Workload, field: FieldConfig | None = None) -> MockCircuit:
    return gen_mock_circuit(w.mu, w.sparsity, w.seed, w.wiring_fraction, field)


# --------------------------------------------------------------------------
# corruptions for soundness tests

def corrupt_gate(c: MockCircuit, i: int | None = None, rng: random.Random | None = None) -> MockCircuit:
    """Bump one w3 entry by 1 (breaks that gate's identity)."""
    c = c.copy()
    rng = rng or random.Random(0)
    i = rng.randrange(c.n) if i is None else i
    e = c.tables["w3"].entries
    e[i] = e[i] + 1
    c.meta["corrupt_gate"] = i
    return c


def corrupt_wiring(c: MockCircuit, rng: random.Random | None = None) -> MockCircuit:
    """Swap the sigma targets of two slots holding different values."""
    c = c.copy()
    rng = rng or random.Random(0)
    total = 3 * c.n
    for _ in range(10_000):
        x, y = rng.randrange(total), rng.randrange(total)
        if c.slot_value(x) != c.slot_value(y):
            break
    else:  # pragma: no cover - only all-equal witnesses
        raise CircuitError("no two slots with different values")
    sx, sy = c.sigma[x >> c.mu].entries, c.sigma[y >> c.mu].entries
    ix, iy = x & (c.n - 1), y & (c.n - 1)
    sx[ix], sy[iy] = sy[iy], sx[ix]
    c.meta["corrupt_wiring"] = (x, y)
    return c
