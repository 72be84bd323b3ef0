#!/usr/bin/env python3
"""Re-derive the shipped dim-8 counterexample from first principles.

Reconstructs the commuting triple by chasing the basis action
(e -> f_i -> signed g -> h layers), evaluates the cubic polynomial by
explicit monomial products, bounds the torus supremum with an
independent lattice-plus-pad computation, and cross-checks everything
against fixtures/crabb_davie.json.  Exits nonzero on any mismatch.

Run:  python scripts/crabb_davie_oracle.py
"""

import json
import pathlib
import sys

import numpy as np

FIXTURE = (
    pathlib.Path(__file__).resolve().parents[1]
    / "src"
    / "dilations"
    / "fixtures"
    / "crabb_davie.json"
)

# Basis layout: 0 = e, 1..3 = f_1..f_3, 4..6 = g_1..g_3, 7 = h.
E, F, G, H = 0, 1, 4, 7


def build_triple():
    mats = []
    for i in range(3):
        m = np.zeros((8, 8), dtype=complex)
        m[F + i, E] = 1.0
        for j in range(3):
            if j == i:
                m[G + i, F + i] = -1.0
            else:
                k = 3 - i - j
                m[G + k, F + j] = 1.0
        m[H, G + i] = 1.0
        mats.append(m)
    return mats


def check_algebra(mats):
    for i in range(3):
        assert np.linalg.norm(mats[i], 2) <= 1 + 1e-12, f"T_{i+1} is not a contraction"
        for j in range(3):
            comm = mats[i] @ mats[j] - mats[j] @ mats[i]
            assert np.abs(comm).max() == 0.0, f"T_{i+1}, T_{j+1} do not commute"


def poly_terms():
    # p(z) = z1 z2 z3 - z1^3 - z2^3 - z3^3
    return {
        (1, 1, 1): 1.0,
        (3, 0, 0): -1.0,
        (0, 3, 0): -1.0,
        (0, 0, 3): -1.0,
    }


def poly_on_triple(mats, terms):
    out = np.zeros((8, 8), dtype=complex)
    for alpha, coeff in terms.items():
        term = np.eye(8, dtype=complex)
        for i, a in enumerate(alpha):
            term = term @ np.linalg.matrix_power(mats[i], a)
        out += coeff * term
    return out


def certified_sup(terms, M):
    z = np.exp(2j * np.pi * np.arange(M) / M)
    z2, z3 = np.meshgrid(z, z, indexing="ij")
    grid_sup = 0.0
    for z1 in z:
        vals = np.zeros_like(z2)
        for alpha, coeff in terms.items():
            vals = vals + coeff * z1 ** alpha[0] * z2 ** alpha[1] * z3 ** alpha[2]
        grid_sup = max(grid_sup, float(np.abs(vals).max()))
    grad = sum(abs(c) * sum(a) for a, c in terms.items())
    pad = np.pi / M * grad
    return grid_sup, pad, grid_sup + pad


def main():
    mats = build_triple()
    check_algebra(mats)
    terms = poly_terms()

    lhs = float(np.linalg.norm(poly_on_triple(mats, terms), 2))
    grid_sup, pad, sup_upper = certified_sup(terms, 256)
    print(f"lhs (operator norm)      = {lhs!r}")
    print(f"grid_sup (M=256)         = {grid_sup!r}")
    print(f"lipschitz_pad            = {pad!r}")
    print(f"sup_upper                = {sup_upper!r}")
    print(f"violation margin         = {lhs - sup_upper!r}")

    ok = True
    if not lhs > sup_upper + 1e-3:
        print("FAIL: violation margin below 1e-3")
        ok = False

    with open(FIXTURE) as handle:
        shipped = json.load(handle)
    shipped_mats = [
        np.array([complex(re, im) for re, im in m["data"]]).reshape(8, 8)
        for m in shipped["tuple"]["matrices"]
    ]
    for i, (a, b) in enumerate(zip(mats, shipped_mats)):
        if np.abs(a - b).max() != 0.0:
            print(f"FAIL: shipped matrix {i+1} differs from the re-derived one")
            ok = False
    shipped_terms = {
        tuple(item["alpha"]): complex(item["coeff"][0], item["coeff"][1])
        for item in shipped["polynomial"]["terms"]
    }
    if shipped_terms != {a: complex(c) for a, c in terms.items()}:
        print("FAIL: shipped polynomial differs from the re-derived one")
        ok = False

    print("OK" if ok else "MISMATCH")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
