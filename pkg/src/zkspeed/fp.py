"""Prime-field arithmetic in Montgomery form.

Elements keep their residue as ``x * R mod q`` with ``R = 2**W``.  Every
multiplication goes through :func:`FieldConfig.redc`, and can be tallied by
the opt-in :func:`count_modmuls` context so the hardware model can check its
analytical operation counts against real runs.

Inversion uses the constant-time binary extended Euclidean loop: always
``2W - 1`` iterations, with swaps and subtractions done by arithmetic masks
instead of branches.
"""

from __future__ import annotations

import random
import threading
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import sympy

try:  # Python 3.11+
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib


class FieldError(ValueError):
    pass


class ConfigMismatchError(FieldError):
    """Operands belong to different fields."""


class NotInvertibleError(FieldError, ZeroDivisionError):
    def __init__(self, msg: str, index: int | None = None):
        super().__init__(msg)
        self.index = index


# --------------------------------------------------------------------------
# modmul instrumentation

class ModmulCounter:
    def __init__(self) -> None:
        self.count = 0

    def __repr__(self) -> str:
        return f"ModmulCounter({self.count})"


_local = threading.local()
_active_contexts = 0
_active_lock = threading.Lock()


def _stack() -> list[ModmulCounter]:
    st = getattr(_local, "stack", None)
    if st is None:
        st = _local.stack = []
    return st


@contextmanager
def count_modmuls() -> Iterator[ModmulCounter]:
    """Count modular multiplications issued by the current thread.

    Contexts nest; an inner count is also added to every enclosing counter.
    """
    global _active_contexts
    counter = ModmulCounter()
    st = _stack()
    st.append(counter)
    with _active_lock:
        _active_contexts += 1
    try:
        yield counter
    finally:
        st.pop()
        with _active_lock:
            _active_contexts -= 1


def _tick(n: int = 1) -> None:
    if _active_contexts:
        for c in getattr(_local, "stack", ()):
            c.count += n


# --------------------------------------------------------------------------
# configuration

@dataclass(frozen=True)
class FieldConfig:
    modulus: int
    bit_width: int
    name: str = field(default="", compare=False)
    r_mod: int = field(init=False, repr=False, compare=False)
    r2: int = field(init=False, repr=False, compare=False)
    q_neg_inv: int = field(init=False, repr=False, compare=False)
    mask: int = field(init=False, repr=False, compare=False)
    byte_width: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        q, w = self.modulus, self.bit_width
        if q < 3 or q % 2 == 0:
            raise FieldError(f"modulus must be an odd prime, got {q}")
        if not (1 << (w - 1)) <= q < (1 << w):
            raise FieldError(f"modulus {q} is not a {w}-bit number")
        if not sympy.isprime(q):
            raise FieldError(f"modulus {q} is not prime")
        R = 1 << w
        object.__setattr__(self, "r_mod", R % q)
        object.__setattr__(self, "r2", (R * R) % q)
        object.__setattr__(self, "q_neg_inv", (-pow(q, -1, R)) % R)
        object.__setattr__(self, "mask", R - 1)
        object.__setattr__(self, "byte_width", (w + 7) // 8)

    @classmethod
    def for_modulus(cls, q: int, name: str = "") -> "FieldConfig":
        return cls(q, q.bit_length(), name)

    # Montgomery reduction: t * R^-1 mod q for 0 <= t < q*R
    def redc(self, t: int) -> int:
        m = ((t & self.mask) * self.q_neg_inv) & self.mask
        u = (t + m * self.modulus) >> self.bit_width
        return u - self.modulus if u >= self.modulus else u

    def to_mont(self, x: int) -> int:
        return (x % self.modulus) * self.r_mod % self.modulus

    def from_mont(self, v: int) -> int:
        return self.redc(v)

    def __call__(self, x: int) -> "FieldElement":
        return FieldElement(self, self.to_mont(x))

    def elements(self, xs: Iterable[int]) -> list["FieldElement"]:
        return [self(x) for x in xs]

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, self.r_mod)

    def random(self, rng: random.Random) -> "FieldElement":
        return self(rng.randrange(self.modulus))

    def random_nonzero(self, rng: random.Random) -> "FieldElement":
        return self(rng.randrange(1, self.modulus))

    def __str__(self) -> str:
        return self.name or f"F_{self.modulus}"


class FieldElement:
    """Element of F_q.  ``mont`` is the Montgomery residue, always < q."""

    __slots__ = ("cfg", "mont")

    def __init__(self, cfg: FieldConfig, mont: int):
        self.cfg = cfg
        self.mont = mont

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.cfg is not self.cfg and other.cfg != self.cfg:
                raise ConfigMismatchError(f"{self.cfg} vs {other.cfg}")
            return other
        if isinstance(other, int):
            return self.cfg(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        v = self.mont + o.mont
        q = self.cfg.modulus
        return FieldElement(self.cfg, v - q if v >= q else v)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        v = self.mont - o.mont
        return FieldElement(self.cfg, v + self.cfg.modulus if v < 0 else v)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if _active_contexts:
            _tick()
        return FieldElement(self.cfg, self.cfg.redc(self.mont * o.mont))

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(self.cfg, (self.cfg.modulus - self.mont) if self.mont else 0)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * mod_inv_beea(o)

    def __pow__(self, e: int):
        if e < 0:
            return mod_inv_beea(self) ** (-e)
        return self.cfg(pow(int(self), e, self.cfg.modulus))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.mont == other.mont and (other.cfg is self.cfg or other.cfg == self.cfg)
        if isinstance(other, int):
            return int(self) == other % self.cfg.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.cfg.modulus, self.mont))

    def __int__(self):
        return self.cfg.redc(self.mont)

    def __bool__(self):
        return self.mont != 0

    def is_zero(self) -> bool:
        return self.mont == 0

    def inverse(self) -> "FieldElement":
        return mod_inv_beea(self)

    def to_bytes(self) -> bytes:
        return int(self).to_bytes(self.cfg.byte_width, "little")

    def __repr__(self):
        return f"{int(self)} (mod {self.cfg.modulus})"


def mod_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


# --------------------------------------------------------------------------
# inversion

def beea_inverse_int(x: int, q: int, width: int) -> tuple[int, int, int]:
    """Constant-time binary extended Euclid on canonical integers.

    Returns ``(inverse, gcd, iterations)``.  The loop body is the same
    straight-line sequence on every pass; the conditional swap and
    subtraction are applied through 0/1 multipliers.
    """
    a, b, u, v = x, q, 1, 0
    half = (q + 1) >> 1  # 1/2 mod q
    iterations = 0
    for _ in range(2 * width - 1):
        odd = a & 1
        swap = odd & int(a < b)
        t = swap * (a ^ b)
        a ^= t
        b ^= t
        t = swap * (u ^ v)
        u ^= t
        v ^= t
        a -= odd * b
        u -= odd * v
        u += q & -(u < 0)
        a >>= 1
        u = (u >> 1) + (u & 1) * half
        iterations += 1
    return v, b, iterations


def mod_inv_beea(a: FieldElement) -> FieldElement:
    cfg = a.cfg
    x = int(a)
    if x == 0:
        raise NotInvertibleError("zero has no inverse")
    y, g, _ = beea_inverse_int(x, cfg.modulus, cfg.bit_width)
    if g != 1:  # pragma: no cover - q is prime
        raise NotInvertibleError(f"gcd({x}, q) = {g}")
    return cfg(y)


def batch_inverse(xs: Sequence[FieldElement]) -> list[FieldElement]:
    """Montgomery batch inversion: one BEEA call plus 3(n-1) multiplications."""
    n = len(xs)
    if n == 0:
        return []
    for i, x in enumerate(xs):
        if x.is_zero():
            raise NotInvertibleError(f"element {i} is zero", index=i)
    prefix = [xs[0]]
    for x in xs[1:]:
        prefix.append(prefix[-1] * x)
    acc = mod_inv_beea(prefix[-1])
    out: list[FieldElement] = [None] * n  # type: ignore[list-item]
    for i in range(n - 1, 0, -1):
        out[i] = acc * prefix[i - 1]
        acc = acc * xs[i]
    out[0] = acc
    return out


# --------------------------------------------------------------------------
# presets and config files

BLS12_381_FR = 0x73EDA753299D7D483339D80809A1D80553BDA402FFFE5BFEFFFFFFFF00000001
BLS12_381_FQ = int(
    "1a0111ea397fe69a4b1ba7b6434bacd764774b84f38512bf6730d2a0f6b0f6241eabfffeb153ffffb9feffffffffaaab",
    16,
)

_PRESETS = {
    "bls12_381_fr": (BLS12_381_FR, 255),
    "bls12_381_fq": (BLS12_381_FQ, 381),
}
_preset_cache: dict[str, FieldConfig] = {}


def preset_field(name: str) -> FieldConfig:
    if name not in _preset_cache:
        try:
            q, w = _PRESETS[name]
        except KeyError:
            raise FieldError(f"unknown field preset {name!r}") from None
        _preset_cache[name] = FieldConfig(q, w, name)
    return _preset_cache[name]


def field_from_dict(d: dict) -> FieldConfig:
    """``{"preset": name}`` or ``{"modulus": "0x..", "bit_width": W}``."""
    if "preset" in d:
        return preset_field(d["preset"])
    q = d["modulus"]
    q = int(q, 0) if isinstance(q, str) else int(q)
    w = int(d.get("bit_width", q.bit_length()))
    return FieldConfig(q, w, d.get("name", ""))


def load_field_config(path: str | Path) -> FieldConfig:
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    return field_from_dict(doc.get("field", doc))
