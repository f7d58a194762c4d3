#!/usr/bin/env python3
"""Search for a small prime-order curve y^2 = x^3 + b (a = 0).

The end-to-end prover needs a curve whose group order is a prime n, so the
scalar field F_n can host the MLE tables.  Point counting is exhaustive
(Euler's criterion over every x), vectorised with numpy, so keep p < 2^25.

    python scripts/find_toy_curve.py --bits 24
"""

import argparse

import numpy as np
import sympy


def count_points(p: int, b: int) -> int:
    x = np.arange(p, dtype=np.int64)
    rhs = (x * x % p * x + b) % p
    # Euler's criterion: rhs^((p-1)/2)
    e = (p - 1) // 2
    acc = np.ones(p, dtype=np.int64)
    base = rhs.copy()
    while e:
        if e & 1:
            acc = acc * base % p
        base = base * base % p
        e >>= 1
    n_sq = int(np.count_nonzero(acc == 1))
    n_zero = int(np.count_nonzero(rhs == 0))
    return 1 + n_zero + 2 * n_sq


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--bits", type=int, default=24)
    ap.add_argument("--max-b", type=int, default=16)
    args = ap.parse_args()

    p = 1 << args.bits
    while True:
        p = sympy.prevprime(p)
        if p % 3 != 1:
            continue
        for b in range(1, args.max_b + 1):
            n = count_points(p, b)
            if n != p and sympy.isprime(n) and n.bit_length() == args.bits:
                for x in range(1, p):
                    rhs = (x ** 3 + b) % p
                    if rhs and sympy.is_quad_residue(rhs, p):
                        y = min(sympy.sqrt_mod(rhs, p, all_roots=True))
                        print(f"p = {p}\nb = {b}\nn = {n}\ngenerator = ({x}, {y})")
                        return
        print(f"p = {p}: no prime-order twist among b <= {args.max_b}")


if __name__ == "__main__":
    main()
