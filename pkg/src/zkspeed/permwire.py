"""Wiring identity tables: N and D, the fraction table phi, and the product
structure (v, pi, p1, p2).

Product layout for phi over mu variables (n = 2^mu entries):

    v  = phi ‖ pi                       (2n entries, mu + 1 variables)
    p1[j] = v[2j],  p2[j] = v[2j + 1]   (mu variables each)
    pi[j] = p1[j] * p2[j]               for every j

pi therefore holds the product-tree layers back to back (leaf-adjacent
layer first), the total product sits at ``pi[n - 2]`` and ``pi[n - 1]`` is 0,
which satisfies its own constraint because p1[n-1] * 0 = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .fp import FieldElement, NotInvertibleError, batch_inverse
from .mle import MleError, MleTable

DEFAULT_BATCH = 64


class WiringError(ValueError):
    pass


@dataclass
class WiringInputs:
    w: tuple[MleTable, MleTable, MleTable]
    sigma: tuple[MleTable, MleTable, MleTable]
    ids: tuple[MleTable, MleTable, MleTable]
    beta: FieldElement
    gamma: FieldElement

    def __post_init__(self) -> None:
        tabs = [*self.w, *self.sigma, *self.ids]
        mu = tabs[0].num_vars
        if any(t.num_vars != mu for t in tabs):
            raise WiringError("all wiring tables must share mu")
        s = [int(x) for t in self.sigma for x in t.entries]
        i = [int(x) for t in self.ids for x in t.entries]
        if sorted(s) != sorted(i) or len(set(i)) != len(i):
            raise WiringError("sigma is not a permutation of the slot indices")

    @property
    def num_vars(self) -> int:
        return self.w[0].num_vars


@dataclass
class NdTables:
    N_parts: tuple[MleTable, MleTable, MleTable]
    D_parts: tuple[MleTable, MleTable, MleTable]
    N: MleTable
    D: MleTable


def construct_nd(inp: WiringInputs) -> NdTables:
    """N_j = w_j + beta*id_j + gamma, D_j = w_j + beta*sigma_j + gamma."""
    b, g = inp.beta, inp.gamma
    Ns, Ds = [], []
    for w, s, i in zip(inp.w, inp.sigma, inp.ids):
        Ns.append(MleTable(w.num_vars, [x + b * y + g for x, y in zip(w.entries, i.entries)]))
        Ds.append(MleTable(w.num_vars, [x + b * y + g for x, y in zip(w.entries, s.entries)]))
    N = MleTable(inp.num_vars, [a * c * e for a, c, e in zip(*(t.entries for t in Ns))])
    D = MleTable(inp.num_vars, [a * c * e for a, c, e in zip(*(t.entries for t in Ds))])
    return NdTables(tuple(Ns), tuple(Ds), N, D)


def frac_mle(N: MleTable, D: MleTable, batch_size: int = DEFAULT_BATCH) -> MleTable:
    """phi = N / D element-wise, inverting D in Montgomery batches of ``batch_size``."""
    if N.num_vars != D.num_vars:
        raise MleError("N and D differ in size")
    if batch_size < 1:
        raise WiringError("batch size must be >= 1")
    d = D.entries
    out: list[FieldElement] = []
    for start in range(0, len(d), batch_size):
        chunk = d[start:start + batch_size]
        try:
            inv = batch_inverse(chunk)
        except NotInvertibleError as e:
            raise NotInvertibleError(f"zero denominator at index {start + e.index}",
                                     index=start + e.index) from None
        out.extend(n * v for n, v in zip(N.entries[start:start + batch_size], inv))
    return MleTable(N.num_vars, out)


@dataclass
class ProductTables:
    v: MleTable
    pi: MleTable
    p1: MleTable
    p2: MleTable

    @property
    def root(self) -> FieldElement:
        return self.pi.entries[len(self.pi) - 2]


def build_product(phi: MleTable | Sequence[FieldElement]) -> ProductTables:
    if not isinstance(phi, MleTable):
        phi = MleTable.from_entries(list(phi))
    mu = phi.num_vars
    if mu < 1:
        raise MleError("phi needs at least one variable")
    F = phi.field
    n = len(phi)
    pi: list[FieldElement] = []
    v = list(phi.entries)
    # pi[j] = v[2j] * v[2j+1]; each pass reads entries already written
    for j in range(n - 1):
        x = v[2 * j] * v[2 * j + 1]
        pi.append(x)
        v.append(x)
    pi.append(F.zero)
    v.append(F.zero)
    return ProductTables(
        MleTable(mu + 1, v),
        MleTable(mu, pi),
        MleTable(mu, v[0::2]),
        MleTable(mu, v[1::2]),
    )
