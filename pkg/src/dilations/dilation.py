"""Power dilations and von Neumann inequality certification.

The checker compares the operator norm of a polynomial in a commuting
contraction tuple against a certified upper bound for the supremum of
the polynomial's modulus on the d-torus.  The bound is a lattice
maximum plus an angular Lipschitz pad, so a VIOLATED verdict is sound:
the left side genuinely exceeds the true supremum.

Also here: the Parrott tuple generator (commuting contractions built
from a pair of unitaries and a nilpotent 2x2 factor), a block-companion
unitary dilation for a single contraction, the brute-force power
dilation verifier, and a seeded randomized search over commuting tuples.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .interpolation import ContractionTuple
from .linalg import (
    DEFAULT_TOL,
    InputError,
    NumericalError,
    as_matrix,
    dagger,
    identity,
    kron,
    matrix_from_json,
    matrix_to_json,
    max_entries,
    op_norm,
    psd_sqrt,
)

__all__ = [
    "MultiPolynomial",
    "DilationCandidate",
    "VnReport",
    "parrott_tuple",
    "eval_poly",
    "torus_sup",
    "vn_check",
    "vn_search",
    "power_dilation_verify",
    "egervary_dilation",
    "crabb_davie_tuple",
    "crabb_davie_polynomial",
]

DEGREE_CAP = 16


@dataclass(frozen=True)
class MultiPolynomial:
    """Finitely supported map from exponent vectors to complex coefficients."""

    d: int
    terms: dict

    def __post_init__(self):
        if self.d < 1:
            raise InputError(f"polynomial arity must be >= 1, got {self.d}")
        cleaned = {}
        for alpha, coeff in self.terms.items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.d:
                raise InputError(
                    f"exponent vector {alpha} has length {len(alpha)}, expected {self.d}"
                )
            if any(a < 0 for a in alpha):
                raise InputError(f"negative exponent in {alpha}")
            if sum(alpha) > DEGREE_CAP:
                raise InputError(
                    f"total degree of {alpha} exceeds the cap {DEGREE_CAP}"
                )
            coeff = complex(coeff)
            if coeff != 0:
                cleaned[alpha] = coeff
        object.__setattr__(self, "terms", cleaned)

    @property
    def degree(self) -> int:
        return max((sum(a) for a in self.terms), default=0)

    def __call__(self, point) -> complex:
        z = tuple(complex(x) for x in point)
        total = 0j
        for alpha, coeff in self.terms.items():
            value = coeff
            for zi, ai in zip(z, alpha):
                value *= zi**ai
            total += value
        return total

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "terms": [
                {"alpha": list(alpha), "coeff": [coeff.real, coeff.imag]}
                for alpha, coeff in sorted(self.terms.items())
            ],
        }

    @classmethod
    def from_json(cls, obj) -> "MultiPolynomial":
        try:
            d = int(obj["d"])
            terms = {
                tuple(item["alpha"]): complex(item["coeff"][0], item["coeff"][1])
                for item in obj["terms"]
            }
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise InputError(f"malformed polynomial JSON: {exc}") from exc
        return cls(d=d, terms=terms)


def parrott_tuple(
    r1,
    r2,
    tol: float = DEFAULT_TOL,
    allow_contraction_r2: bool = False,
) -> ContractionTuple:
    """Commuting 3-tuple (R1 x E21, R2 x E21, I x E21) on a doubled space.

    The nilpotent elementary factor forces every pairwise product to
    vanish exactly, so the tuple commutes regardless of R1, R2.  When
    the unitaries commute, the classical non-dilatability hypothesis
    fails; a warning is emitted and the tuple is still returned, since
    its algebraic properties hold either way.  (Non-dilatability itself
    is never verified here; only the stated algebra is.)

    With ``allow_contraction_r2`` the second factor may be any
    contraction instead of a unitary.
    """
    r1 = as_matrix(r1)
    r2 = as_matrix(r2)
    if r1.shape != r2.shape or r1.shape[0] != r1.shape[1]:
        raise InputError("R1 and R2 must be square and of equal size")
    n = r1.shape[0]
    _require_unitary(r1, "R1", tol)
    if allow_contraction_r2:
        if op_norm(r2) > 1 + tol:
            raise InputError("R2 must be a contraction")
    else:
        _require_unitary(r2, "R2", tol)
    if op_norm(r1 @ r2 - r2 @ r1) <= tol:
        warnings.warn(
            "R1 and R2 commute; the resulting tuple has no non-dilatability "
            "guarantee",
            stacklevel=2,
        )
    e21 = np.zeros((2, 2), dtype=np.complex128)
    e21[1, 0] = 1.0
    mats = (kron(r1, e21), kron(r2, e21), kron(identity(n), e21))
    return ContractionTuple(mats, tol=tol)


def _require_unitary(m: np.ndarray, name: str, tol: float) -> None:
    n = m.shape[0]
    dev = max(
        op_norm(dagger(m) @ m - identity(n)),
        op_norm(m @ dagger(m) - identity(n)),
    )
    if dev > tol:
        raise InputError(f"{name} is not unitary (deviation {dev:.3e})")


def eval_poly(tup: ContractionTuple, poly: MultiPolynomial) -> np.ndarray:
    """Functional calculus sum_alpha c_alpha prod_i S_i^alpha_i."""
    if poly.d != tup.d:
        raise InputError(
            f"polynomial arity {poly.d} does not match tuple d={tup.d}"
        )
    max_pow = [0] * tup.d
    for alpha in poly.terms:
        for i, a in enumerate(alpha):
            max_pow[i] = max(max_pow[i], a)
    powers = [tup.powers(i, max_pow[i]) for i in range(tup.d)]
    out = np.zeros((tup.dim, tup.dim), dtype=np.complex128)
    for alpha, coeff in poly.terms.items():
        term = powers[0][alpha[0]]
        for i in range(1, tup.d):
            term = term @ powers[i][alpha[i]]
        out += coeff * term
    return out


def torus_sup(poly: MultiPolynomial, M: int) -> tuple[float, float, float]:
    """Certified upper bound for sup |p| on the d-torus.

    Returns (grid_sup, lipschitz_pad, sup_upper) where grid_sup is the
    maximum of |p| over the M^d lattice of M-th roots of unity and the
    pad bounds the modulus change over half a grid step per axis via
    the angular gradient bound sum_j sum_alpha |c_alpha| alpha_j.
    """
    if M < 2:
        raise InputError(f"lattice size M must be >= 2, got {M}")
    # The lattice is streamed along the first axis, so the cap on total
    # points can sit well above the dense-matrix entry cap.
    if M**poly.d > 128 * max_entries():
        raise InputError(
            f"lattice of M^d = {M**poly.d} points exceeds the size cap; "
            "reduce M or the polynomial arity"
        )
    z = np.exp(2j * np.pi * np.arange(M) / M)
    if poly.d == 1:
        values = np.zeros(M, dtype=np.complex128)
        for alpha, coeff in poly.terms.items():
            values += coeff * z ** alpha[0]
        grid_sup = float(np.abs(values).max()) if poly.terms else 0.0
    else:
        # Sweep the first axis; broadcast the rest in one block.
        rest = np.meshgrid(*([z] * (poly.d - 1)), indexing="ij")
        grid_sup = 0.0
        for z0 in z:
            values = np.zeros(rest[0].shape, dtype=np.complex128)
            for alpha, coeff in poly.terms.items():
                term = coeff * z0 ** alpha[0]
                for i in range(1, poly.d):
                    term = term * rest[i - 1] ** alpha[i]
                values += term
            if poly.terms:
                grid_sup = max(grid_sup, float(np.abs(values).max()))
    gradient_bound = sum(
        abs(coeff) * sum(alpha) for alpha, coeff in poly.terms.items()
    )
    pad = math.pi / M * gradient_bound
    return grid_sup, pad, grid_sup + pad


@dataclass(frozen=True)
class VnReport:
    """Outcome of one inequality check."""

    lhs: float
    grid_sup: float
    lipschitz_pad: float
    sup_upper: float
    verdict: str

    def to_json(self) -> dict:
        return {
            "lhs": self.lhs,
            "grid_sup": self.grid_sup,
            "lipschitz_pad": self.lipschitz_pad,
            "sup_upper": self.sup_upper,
            "verdict": self.verdict,
        }


def vn_check(
    tup: ContractionTuple,
    poly: MultiPolynomial,
    M: int,
    tol: float = DEFAULT_TOL,
) -> VnReport:
    """Compare ||p(S)|| against the certified torus supremum bound.

    VIOLATED only when the left side beats grid maximum plus pad, so the
    verdict is sound; HOLDS when it is below the grid maximum itself;
    INCONCLUSIVE in between (a larger lattice will separate the two).
    """
    lhs = op_norm(eval_poly(tup, poly))
    grid_sup, pad, sup_upper = torus_sup(poly, M)
    # The relative slack absorbs last-ulp rounding (e.g. a constant
    # polynomial, where lhs and grid_sup are the same number computed
    # two ways); it only makes VIOLATED harder to reach, so the verdict
    # stays sound.
    if lhs > sup_upper * (1 + 1e-12) + tol:
        verdict = "VIOLATED"
    elif lhs <= grid_sup * (1 + 1e-12) + tol:
        verdict = "HOLDS"
    else:
        verdict = "INCONCLUSIVE"
    return VnReport(
        lhs=lhs,
        grid_sup=grid_sup,
        lipschitz_pad=pad,
        sup_upper=sup_upper,
        verdict=verdict,
    )


def _random_commuting_tuple(rng: np.random.Generator, d: int, dim: int) -> ContractionTuple:
    """Commuting by construction: each member is a polynomial in one contraction."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    z = z / max(1.0, op_norm(z) * (1 + 1e-12))
    z_pows = [identity(dim)]
    for _ in range(3):
        z_pows.append(z_pows[-1] @ z)
    mats = []
    for _ in range(d):
        coeffs = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        m = sum(c * p for c, p in zip(coeffs, z_pows))
        norm = op_norm(m)
        if norm > 1:
            m = m / (norm * (1 + 1e-12))
        mats.append(m)
    return ContractionTuple(tuple(mats), tol=1e-9)


def _random_polynomial(rng: np.random.Generator, d: int) -> MultiPolynomial:
    terms = {}
    n_terms = int(rng.integers(1, 5))
    for _ in range(n_terms):
        alpha = tuple(int(a) for a in rng.integers(0, 4, size=d))
        coeff = complex(rng.standard_normal(), rng.standard_normal())
        terms[alpha] = terms.get(alpha, 0) + coeff
    if not terms:
        terms = {(0,) * d: 1.0}
    return MultiPolynomial(d=d, terms=terms)


def vn_search(
    d: int,
    dim: int,
    trials: int,
    seed: int,
    M: int,
    extra_cases=(),
    tol: float = DEFAULT_TOL,
) -> dict:
    """Randomized search for inequality violations over commuting tuples.

    Each trial draws a commuting tuple (polynomials of one random
    contraction, rescaled to the unit ball) and a random polynomial,
    then runs the checker.  ``extra_cases`` are (tuple, polynomial)
    pairs appended to the pool, e.g. known literature counterexamples.
    Deterministic for a fixed seed; trial i uses seed + i.
    """
    if d < 1:
        raise InputError(f"d must be >= 1, got {d}")
    if trials < 0:
        raise InputError("trials must be nonnegative")
    results = []
    for index in range(trials):
        rng = np.random.default_rng(seed + index)
        tup = _random_commuting_tuple(rng, d, dim)
        poly = _random_polynomial(rng, d)
        results.append(("random", index, tup, poly))
    for index, (tup, poly) in enumerate(extra_cases):
        results.append(("fixture", index, tup, poly))

    max_ratio = 0.0
    violations = []
    reports = []
    for kind, index, tup, poly in results:
        report = vn_check(tup, poly, M, tol=tol)
        if report.grid_sup > 0:
            max_ratio = max(max_ratio, report.lhs / report.grid_sup)
        entry = {"kind": kind, "index": index, "report": report.to_json()}
        reports.append(entry)
        if report.verdict == "VIOLATED":
            violations.append(
                {
                    "kind": kind,
                    "index": index,
                    "tuple": tup.to_json(),
                    "polynomial": poly.to_json(),
                    "report": report.to_json(),
                }
            )
    return {
        "d": d,
        "dim": dim,
        "trials": trials,
        "seed": seed,
        "M": M,
        "cases": len(results),
        "max_ratio": max_ratio,
        "violations": violations,
        "reports": reports,
    }


@dataclass(frozen=True)
class DilationCandidate:
    """Commuting unitaries V_i on a larger space with an isometric embedding r."""

    vs: tuple[np.ndarray, ...]
    r: np.ndarray
    n_max: int
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.n_max < 1:
            raise InputError(f"n_max must be >= 1, got {self.n_max}")
        vs = tuple(as_matrix(v) for v in self.vs)
        object.__setattr__(self, "vs", vs)
        object.__setattr__(self, "r", as_matrix(self.r))
        if len(vs) < 1:
            raise InputError("a dilation candidate needs at least one unitary")
        big = vs[0].shape[0]
        for i, v in enumerate(vs):
            if v.shape != (big, big):
                raise InputError(f"unitary {i + 1} has shape {v.shape}")
            _require_unitary(v, f"V_{i + 1}", self.tol)
        for i in range(len(vs)):
            for j in range(i + 1, len(vs)):
                dev = op_norm(vs[i] @ vs[j] - vs[j] @ vs[i])
                if dev > self.tol:
                    raise InputError(
                        f"unitaries {i + 1} and {j + 1} do not commute "
                        f"(deviation {dev:.3e})"
                    )
        if self.r.shape[0] != big:
            raise InputError(
                f"embedding maps into dimension {self.r.shape[0]}, unitaries act on {big}"
            )
        small = self.r.shape[1]
        dev = op_norm(dagger(self.r) @ self.r - identity(small))
        if dev > self.tol:
            raise InputError(f"r is not an isometry (deviation {dev:.3e})")

    @property
    def d(self) -> int:
        return len(self.vs)

    def to_json(self) -> dict:
        return {
            "unitaries": [matrix_to_json(v) for v in self.vs],
            "embedding": matrix_to_json(self.r),
            "n_max": self.n_max,
        }

    @classmethod
    def from_json(cls, obj, tol: float = DEFAULT_TOL) -> "DilationCandidate":
        try:
            vs = tuple(matrix_from_json(v) for v in obj["unitaries"])
            r = matrix_from_json(obj["embedding"])
            n_max = int(obj["n_max"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed dilation candidate JSON: {exc}") from exc
        return cls(vs=vs, r=r, n_max=n_max, tol=tol)


def power_dilation_verify(
    tup: ContractionTuple,
    cand: DilationCandidate,
    tol: float = DEFAULT_TOL,
) -> dict:
    """Check prod S_i^{n_i} = r* (prod V_i^{n_i}) r over {0..n_max}^d."""
    if cand.d != tup.d:
        raise InputError(
            f"candidate has {cand.d} unitaries, tuple has d={tup.d}"
        )
    if cand.r.shape[1] != tup.dim:
        raise InputError(
            f"embedding domain has dimension {cand.r.shape[1]}, tuple dim is {tup.dim}"
        )
    s_pows = [tup.powers(i, cand.n_max) for i in range(tup.d)]
    big = cand.vs[0].shape[0]
    v_pows = []
    for v in cand.vs:
        pows = [identity(big)]
        for _ in range(cand.n_max):
            pows.append(pows[-1] @ v)
        v_pows.append(pows)
    r_dag = dagger(cand.r)
    max_dev = 0.0
    worst = None
    for ns in itertools.product(range(cand.n_max + 1), repeat=tup.d):
        lhs = s_pows[0][ns[0]]
        big_op = v_pows[0][ns[0]]
        for i in range(1, tup.d):
            lhs = lhs @ s_pows[i][ns[i]]
            big_op = big_op @ v_pows[i][ns[i]]
        dev = op_norm(lhs - r_dag @ big_op @ cand.r)
        if dev > max_dev:
            max_dev = dev
            worst = ns
    return {
        "max_deviation": max_dev,
        "worst_index": list(worst) if worst is not None else None,
        "n_max": cand.n_max,
        "passed": max_dev <= tol,
        "tol": tol,
    }


def egervary_dilation(s, m: int, tol: float = DEFAULT_TOL) -> DilationCandidate:
    """Block-companion unitary m-dilation of a single contraction.

    The unitary acts on m+1 copies of the base space: the first row
    applies S and feeds the defect of S* back from the last block, the
    second row collects the defect of S, and the remaining rows shift.
    Correctness is defined by the power dilation verification up to
    n_max = m, which runs as part of construction.
    """
    s = as_matrix(s)
    if s.shape[0] != s.shape[1]:
        raise InputError("dilation requires a square matrix")
    if m < 1:
        raise InputError(f"m must be >= 1, got {m}")
    n = s.shape[0]
    if op_norm(s) > 1 + tol:
        raise InputError("dilation input must be a contraction")
    defect = psd_sqrt(identity(n) - dagger(s) @ s, eps=max(tol, 1e-9))
    defect_adj = psd_sqrt(identity(n) - s @ dagger(s), eps=max(tol, 1e-9))
    big = n * (m + 1)
    v = np.zeros((big, big), dtype=np.complex128)

    def put(bi, bj, block):
        v[bi * n : (bi + 1) * n, bj * n : (bj + 1) * n] = block

    put(0, 0, s)
    put(0, m, defect_adj)
    put(1, 0, defect)
    put(1, m, -dagger(s))
    for row in range(2, m + 1):
        put(row, row - 1, identity(n))
    r = np.zeros((big, n), dtype=np.complex128)
    r[:n, :] = identity(n)
    cand = DilationCandidate(vs=(v,), r=r, n_max=m, tol=max(tol, 1e-8))
    check = power_dilation_verify(ContractionTuple((s,), tol=tol), cand, tol=tol)
    if not check["passed"]:
        raise NumericalError(
            f"dilation construction failed verification "
            f"(deviation {check['max_deviation']:.3e} at {check['worst_index']})"
        )
    return cand


def crabb_davie_tuple() -> ContractionTuple:
    """Three commuting contractions on an 8-dimensional space that break
    the polynomial inequality.

    Basis: e; f1, f2, f3; g1, g2, g3; h.  Operator i maps e -> f_i,
    f_i -> -g_i, f_j -> g_k ({i,j,k} = {1,2,3}), g_i -> h, everything
    else to 0.  Each operator is a contraction (it is a signed partial
    shift between orthogonal layers) and the tuple commutes exactly.
    """
    # Basis indices: 0=e, 1..3=f, 4..6=g, 7=h.
    mats = []
    for i in range(3):
        m = np.zeros((8, 8), dtype=np.complex128)
        m[1 + i, 0] = 1.0
        for j in range(3):
            if j == i:
                m[4 + i, 1 + i] = -1.0
            else:
                k = 3 - i - j
                m[4 + k, 1 + j] = 1.0
        m[7, 4 + i] = 1.0
        mats.append(m)
    return ContractionTuple(tuple(mats), tol=1e-12)


def crabb_davie_polynomial() -> MultiPolynomial:
    """z1*z2*z3 - z1^3 - z2^3 - z3^3; its norm on the tuple above is 4,
    while its supremum on the 3-torus is strictly below 4 (about 3.61)."""
    return MultiPolynomial(
        d=3,
        terms={
            (1, 1, 1): 1.0,
            (3, 0, 0): -1.0,
            (0, 3, 0): -1.0,
            (0, 0, 3): -1.0,
        },
    )
