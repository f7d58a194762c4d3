"""Short-Weierstrass curves in homogeneous projective coordinates.

Point addition uses the complete formulas of Renes, Costello and Batina:
one code path handles distinct points, doubling and the identity, which is
what a single pipelined PADD unit does in hardware.  Curves with ``a = 0``
take the cheaper 12M + 2m(3b) variant.

Coordinates are stored as canonical residues mod p rather than
:class:`~zkspeed.fp.FieldElement` objects; MSM oracles run millions of
additions and the object overhead dominated.  Modmuls are still tallied
through :func:`zkspeed.fp.count_modmuls`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import sympy

from . import fp
from .fp import FieldConfig, FieldElement, tomllib


class CurveError(ValueError):
    pass


# modmuls per complete addition (used by the census)
PADD_MODMULS_A0 = 14
PADD_MODMULS_GENERAL = 17


@dataclass(frozen=True)
class CurveConfig:
    base_field: FieldConfig
    a: int
    b: int
    generator: tuple[int, int]
    order: int  # order of the group generated by `generator`
    name: str = field(default="", compare=False)
    b3: int = field(init=False, repr=False, compare=False)
    scalar_field: FieldConfig | None = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        p = self.base_field.modulus
        object.__setattr__(self, "a", self.a % p)
        object.__setattr__(self, "b", self.b % p)
        object.__setattr__(self, "b3", 3 * self.b % p)
        if (4 * self.a ** 3 + 27 * self.b ** 2) % p == 0:
            raise CurveError("singular curve")
        gx, gy = self.generator
        if (gy * gy - (gx ** 3 + self.a * gx + self.b)) % p:
            raise CurveError("generator is not on the curve")
        sf = None
        if self.order > 2 and sympy.isprime(self.order):
            sf = FieldConfig.for_modulus(self.order, f"{self.name}_fr" if self.name else "")
        object.__setattr__(self, "scalar_field", sf)

    @property
    def p(self) -> int:
        return self.base_field.modulus

    @property
    def padd_modmuls(self) -> int:
        return PADD_MODMULS_A0 if self.a == 0 else PADD_MODMULS_GENERAL

    def point(self, x: int, y: int) -> "CurvePoint":
        pt = CurvePoint(self, x % self.p, y % self.p, 1)
        if not pt.is_on_curve():
            raise CurveError(f"({x}, {y}) is not on {self}")
        return pt

    @property
    def G(self) -> "CurvePoint":
        return CurvePoint(self, self.generator[0], self.generator[1], 1)

    @property
    def identity(self) -> "CurvePoint":
        return CurvePoint(self, 0, 1, 0)

    def affine_points(self) -> Iterator[tuple[int, int]]:
        """Every affine point, by brute force.  Only for tiny fields."""
        p = self.p
        roots: dict[int, list[int]] = {}
        for y in range(p):
            roots.setdefault(y * y % p, []).append(y)
        for x in range(p):
            for y in roots.get((x ** 3 + self.a * x + self.b) % p, ()):
                yield (x, y)

    def __str__(self) -> str:
        return self.name or f"y^2 = x^3 + {self.a}x + {self.b} over F_{self.p}"


class CurvePoint:
    __slots__ = ("curve", "X", "Y", "Z")

    def __init__(self, curve: CurveConfig, X: int, Y: int, Z: int):
        self.curve = curve
        self.X = X
        self.Y = Y
        self.Z = Z

    def is_identity(self) -> bool:
        return self.Z == 0

    def is_on_curve(self) -> bool:
        c = self.curve
        p = c.p
        X, Y, Z = self.X, self.Y, self.Z
        if Z % p == 0:
            return X % p == 0 and Y % p != 0
        lhs = Y * Y * Z
        rhs = X ** 3 + c.a * X * Z * Z + c.b * Z ** 3
        return (lhs - rhs) % p == 0

    def __add__(self, other: "CurvePoint") -> "CurvePoint":
        return padd(self, other)

    def __neg__(self) -> "CurvePoint":
        return CurvePoint(self.curve, self.X, (-self.Y) % self.curve.p, self.Z)

    def __sub__(self, other: "CurvePoint") -> "CurvePoint":
        return padd(self, -other)

    def double(self) -> "CurvePoint":
        return padd(self, self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CurvePoint):
            return NotImplemented
        if self.curve != other.curve:
            return False
        p = self.curve.p
        if self.is_identity() or other.is_identity():
            return self.is_identity() and other.is_identity()
        return ((self.X * other.Z - other.X * self.Z) % p == 0
                and (self.Y * other.Z - other.Y * self.Z) % p == 0)

    def __hash__(self):
        return hash(self.affine())

    def affine(self) -> tuple[int, int] | None:
        if self.is_identity():
            return None
        p = self.curve.p
        zi = pow(self.Z, -1, p)
        return (self.X * zi % p, self.Y * zi % p)

    def normalize(self) -> "CurvePoint":
        """Same point with Z = 1 (or the canonical identity)."""
        aff = self.affine()
        return self.curve.identity if aff is None else CurvePoint(self.curve, aff[0], aff[1], 1)

    def coords(self) -> tuple[FieldElement, FieldElement, FieldElement]:
        F = self.curve.base_field
        return F(self.X), F(self.Y), F(self.Z)

    def to_bytes(self) -> bytes:
        """Affine encoding: flag byte, then x and y little-endian."""
        w = self.curve.base_field.byte_width
        aff = self.affine()
        if aff is None:
            return b"\x01" + bytes(2 * w)
        return b"\x00" + aff[0].to_bytes(w, "little") + aff[1].to_bytes(w, "little")

    @classmethod
    def from_bytes(cls, curve: CurveConfig, data: bytes) -> "CurvePoint":
        w = curve.base_field.byte_width
        if data[0]:
            return curve.identity
        x = int.from_bytes(data[1:1 + w], "little")
        y = int.from_bytes(data[1 + w:1 + 2 * w], "little")
        return curve.point(x, y)

    def __repr__(self):
        aff = self.affine()
        return "O" if aff is None else f"({aff[0]}, {aff[1]})"


def _padd_a0(p: int, b3: int, X1, Y1, Z1, X2, Y2, Z2):
    t0 = X1 * X2 % p
    t1 = Y1 * Y2 % p
    t2 = Z1 * Z2 % p
    t3 = (X1 + Y1) * (X2 + Y2) % p
    t3 = (t3 - t0 - t1) % p
    t4 = (Y1 + Z1) * (Y2 + Z2) % p
    t4 = (t4 - t1 - t2) % p
    X3 = (X1 + Z1) * (X2 + Z2) % p
    Y3 = (X3 - t0 - t2) % p
    t0 = 3 * t0
    t2 = b3 * t2 % p
    Z3 = t1 + t2
    t1 = t1 - t2
    Y3 = b3 * Y3 % p
    X3 = (t3 * t1 - t4 * Y3) % p
    Y3 = (t1 * Z3 + Y3 * t0) % p
    Z3 = (Z3 * t4 + t0 * t3) % p
    return X3, Y3, Z3


def _padd_general(p: int, a: int, b3: int, X1, Y1, Z1, X2, Y2, Z2):
    t0 = X1 * X2 % p
    t1 = Y1 * Y2 % p
    t2 = Z1 * Z2 % p
    t3 = ((X1 + Y1) * (X2 + Y2) - t0 - t1) % p
    t4 = ((X1 + Z1) * (X2 + Z2) - t0 - t2) % p
    t5 = ((Y1 + Z1) * (Y2 + Z2) - t1 - t2) % p
    Z3 = a * t4 % p
    X3 = b3 * t2 % p
    Z3 = (X3 + Z3) % p
    X3 = (t1 - Z3) % p
    Z3 = (t1 + Z3) % p
    Y3 = X3 * Z3 % p
    t1 = 3 * t0
    t2 = a * t2 % p
    t4 = b3 * t4 % p
    t1 = (t1 + t2) % p
    t2 = (t0 - t2) % p
    t2 = a * t2 % p
    t4 = (t4 + t2) % p
    t0 = t1 * t4 % p
    Y3 = (Y3 + t0) % p
    t0 = t5 * t4 % p
    X3 = (t3 * X3 - t0) % p
    t0 = t3 * t1 % p
    Z3 = (t5 * Z3 + t0) % p
    return X3, Y3, Z3


def padd(P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    """Complete projective addition (also doubles and absorbs the identity)."""
    c = P.curve
    if Q.curve is not c and Q.curve != c:
        raise CurveError(f"mixed curves: {c} vs {Q.curve}")
    if fp._active_contexts:
        fp._tick(c.padd_modmuls)
    if c.a == 0:
        X3, Y3, Z3 = _padd_a0(c.p, c.b3, P.X, P.Y, P.Z, Q.X, Q.Y, Q.Z)
    else:
        X3, Y3, Z3 = _padd_general(c.p, c.a, c.b3, P.X, P.Y, P.Z, Q.X, Q.Y, Q.Z)
    if X3 == 0 and Y3 == 0 and Z3 == 0:
        # The complete formulas degenerate only for P - Q of order 2 on
        # even-order curves; the tiny test curves hit this.
        return _padd_affine(P, Q)
    return CurvePoint(c, X3, Y3, Z3)


def _padd_affine(P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    c = P.curve
    p = c.p
    a1, a2 = P.affine(), Q.affine()
    if a1 is None:
        return Q
    if a2 is None:
        return P
    (x1, y1), (x2, y2) = a1, a2
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return c.identity
        lam = (3 * x1 * x1 + c.a) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    y3 = (lam * (x1 - x3) - y1) % p
    return CurvePoint(c, x3, y3, 1)


def is_on_curve(P: CurvePoint) -> bool:
    return P.is_on_curve()


def scalar_mul(k, P: CurvePoint) -> CurvePoint:
    """Double-and-add, MSB first.  Test oracle only."""
    k = int(k)
    if k < 0:
        return scalar_mul(-k, -P)
    R = P.curve.identity
    for bit in bin(k)[2:] if k else "":
        R = padd(R, R)
        if bit == "1":
            R = padd(R, P)
    return R


# --------------------------------------------------------------------------
# presets

BLS12_381_G1 = dict(
    field="bls12_381_fq",
    a=0,
    b=4,
    generator=(
        0x17F1D3A73197D7942695638C4FA9AC0FC3688C4F9774B905A14E3A3F171BAC586C55E83FF97A1AEFFB3AF00ADB22C6BB,
        0x08B3F481E3AAA0F1A09E30ED741D8AE4FCF5E095D5D00AF600DB18CB2C04B3EDD03CC744A2888AE40CAA232946C5E7E1,
    ),
    order=fp.BLS12_381_FR,
)

# y^2 = x^3 + 7 over a 24-bit prime with prime group order, found by
# scripts/find_toy_curve.py; the end-to-end prover runs on this curve.
DESK24 = dict(field=(16777213, 24), a=0, b=7, generator=(6, 7827705), order=16770451)

# y^2 = x^3 + 7 over F_17; its group order is found by enumeration in tests.
TOY17 = dict(field=(17, 5), a=0, b=7, generator=(6, 6), order=18)

_CURVES = {"bls12_381_g1": BLS12_381_G1, "desk24": DESK24, "toy17": TOY17}
_curve_cache: dict[str, CurveConfig] = {}


def _curve_from_spec(name: str, spec: dict) -> CurveConfig:
    f = spec["field"]
    F = fp.preset_field(f) if isinstance(f, str) else FieldConfig(f[0], f[1], f"{name}_fq")
    return CurveConfig(F, spec["a"], spec["b"], tuple(spec["generator"]), spec["order"], name)


def preset_curve(name: str) -> CurveConfig:
    if name not in _curve_cache:
        try:
            spec = _CURVES[name]
        except KeyError:
            raise CurveError(f"unknown curve preset {name!r}") from None
        _curve_cache[name] = _curve_from_spec(name, spec)
    return _curve_cache[name]


def curve_from_dict(d: dict) -> CurveConfig:
    if "preset" in d:
        return preset_curve(d["preset"])
    F = fp.field_from_dict(d["field"])
    gx, gy = (int(v, 0) if isinstance(v, str) else int(v) for v in d["generator"])
    order = d["order"]
    order = int(order, 0) if isinstance(order, str) else int(order)
    return CurveConfig(F, int(d.get("a", 0)), int(d["b"]), (gx, gy), order, d.get("name", ""))


def load_curve_config(path: str | Path) -> CurveConfig:
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    return curve_from_dict(doc.get("curve", doc))
