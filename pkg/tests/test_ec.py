import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from zkspeed.ec import (PADD_MODMULS_A0, CurveConfig, CurveError, CurvePoint, padd, preset_curve,
                        scalar_mul)
from zkspeed.fp import FieldConfig, count_modmuls

BLS = preset_curve("bls12_381_g1")
TOY = preset_curve("toy17")


def affine_add(P, Q, p, a):
    """Textbook affine chord/tangent law; None is the point at infinity."""
    if P is None:
        return Q
    if Q is None:
        return P
    (x1, y1), (x2, y2) = P, Q
    if x1 == x2 and (y1 + y2) % p == 0:
        return None
    if P == Q:
        lam = (3 * x1 * x1 + a) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return x3, (lam * (x1 - x3) - y1) % p


def test_toy_curve_enumeration():
    pts = list(TOY.affine_points())
    assert len(pts) + 1 == 18
    assert all((y * y - x ** 3 - 7) % 17 == 0 for x, y in pts)


def test_toy_group_law_exhaustive():
    pts = [None] + list(TOY.affine_points())
    for P in pts:
        for Q in pts:
            want = affine_add(P, Q, 17, 0)
            A = TOY.identity if P is None else TOY.point(*P)
            B = TOY.identity if Q is None else TOY.point(*Q)
            assert padd(A, B).affine() == want


def test_generator_orders():
    for name in ("toy17", "desk24", "bls12_381_g1"):
        c = preset_curve(name)
        assert scalar_mul(c.order, c.G).is_identity()
        assert not scalar_mul(c.order - 1, c.G).is_identity()


@given(st.integers(0, 2 ** 64), st.integers(0, 2 ** 64))
def test_bls_scalar_mul_is_linear(a, b):
    G = BLS.G
    assert scalar_mul(a + b, G) == padd(scalar_mul(a, G), scalar_mul(b, G))


@given(st.integers(1, 2 ** 32))
def test_bls_points_stay_on_curve(k):
    P = scalar_mul(k, BLS.G)
    assert P.is_on_curve()
    assert CurvePoint.from_bytes(BLS, P.to_bytes()) == P


def test_padd_costs_fourteen_modmuls():
    P, Q = scalar_mul(3, BLS.G), scalar_mul(11, BLS.G)
    with count_modmuls() as c:
        padd(P, Q)
    assert c.count == PADD_MODMULS_A0 == 14
    with count_modmuls() as c:
        padd(P, P)
    assert c.count == 14


def test_complete_formula_handles_edge_cases(curve):
    P = scalar_mul(12345, curve.G)
    assert padd(P, -P).is_identity()
    assert padd(P, curve.identity) == P
    assert padd(curve.identity, curve.identity).is_identity()
    assert padd(P, P) == scalar_mul(2 * 12345, curve.G)


def test_curve_validation():
    F = FieldConfig(17, 5)
    with pytest.raises(CurveError):
        CurveConfig(F, 0, 7, (1, 1), 18)  # generator off the curve
    with pytest.raises(CurveError):
        CurveConfig(F, 0, 0, (0, 0), 1)  # singular
    with pytest.raises(CurveError):
        padd(TOY.G, BLS.G)
    with pytest.raises(CurveError):
        preset_curve("nope")


def test_desk24_random_multiples_agree(curve):
    rng = random.Random(5)
    for _ in range(20):
        a, b = rng.randrange(curve.order), rng.randrange(curve.order)
        lhs = scalar_mul(a * b % curve.order, curve.G)
        assert lhs == scalar_mul(a, scalar_mul(b, curve.G))
