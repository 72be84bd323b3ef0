"""Semigroup interpolation of commuting contraction tuples.

A validated commuting tuple {S_i} of contractions on a dim-n space,
together with a grid denominator N, defines an exact discrete semigroup
on the N^d-point torus grid tensored with the base space.  Evaluation at
a grid time t sends the basis vector at grid point t' to the basis
vector at t+t' (mod 1), applying the product of S_i raised to the power
selector kappa(t_i, t'_i) on the base factor.

Also here: the averaged compression of that evaluation, its closed
multilinear form, the lattice-sample blending operator, and the
quantitative error sweep that compares blends against a true matrix
semigroup exp(sum t_i A_i).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    InputError,
    as_matrix,
    identity,
    matrix_exp,
    matrix_from_json,
    matrix_to_json,
    max_entries,
    op_norm,
)
from .torus import GridTime

__all__ = [
    "ContractionTuple",
    "DiscretizedSemigroup",
    "BlendWeights",
    "kappa",
    "eval_discretized",
    "compress_discretized",
    "multilinear_compress",
    "scaled_blend",
    "approx_error_sweep",
]


@dataclass(frozen=True)
class ContractionTuple:
    """A commuting d-tuple of contractions on a common dim-n space."""

    mats: tuple[np.ndarray, ...]
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if len(self.mats) < 1:
            raise InputError("a contraction tuple needs at least one operator")
        mats = tuple(as_matrix(m) for m in self.mats)
        object.__setattr__(self, "mats", mats)
        dim = mats[0].shape[0]
        for i, m in enumerate(mats):
            if m.shape != (dim, dim):
                raise InputError(
                    f"operator {i + 1} has shape {m.shape}, expected ({dim}, {dim})"
                )
            norm = op_norm(m)
            if norm > 1 + self.tol:
                raise InputError(
                    f"operator {i + 1} has norm {norm:.12g} > 1 + tol"
                )
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                dev = op_norm(mats[i] @ mats[j] - mats[j] @ mats[i])
                if dev > self.tol:
                    raise InputError(
                        f"operators {i + 1} and {j + 1} do not commute "
                        f"(deviation {dev:.3e})"
                    )

    @property
    def d(self) -> int:
        return len(self.mats)

    @property
    def dim(self) -> int:
        return self.mats[0].shape[0]

    def powers(self, axis: int, up_to: int) -> list[np.ndarray]:
        """[S_axis^0, ..., S_axis^up_to] by repeated multiplication."""
        out = [identity(self.dim)]
        for _ in range(up_to):
            out.append(out[-1] @ self.mats[axis])
        return out

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "dim": self.dim,
            "matrices": [matrix_to_json(m) for m in self.mats],
        }

    @classmethod
    def from_json(cls, obj, tol: float = DEFAULT_TOL) -> "ContractionTuple":
        try:
            mats = tuple(matrix_from_json(m) for m in obj["matrices"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed tuple JSON: {exc}") from exc
        tup = cls(mats, tol=tol)
        if "d" in obj and int(obj["d"]) != tup.d:
            raise InputError(f"tuple JSON declares d={obj['d']} but has {tup.d} matrices")
        if "dim" in obj and int(obj["dim"]) != tup.dim:
            raise InputError(
                f"tuple JSON declares dim={obj['dim']} but matrices are {tup.dim}x{tup.dim}"
            )
        return tup


def kappa(num: int, num_prime: int, N: int) -> int:
    """Power selector floor(t) + [frac(t) + frac(t') >= 1] for t=num/N, t'=num_prime/N.

    Pure integer arithmetic; the tie frac(t)+frac(t') == 1 takes the +1 branch.
    """
    if N < 1:
        raise InputError(f"N must be >= 1, got {N}")
    if num < 0 or num_prime < 0:
        raise InputError("kappa requires nonnegative numerators")
    return num // N + (1 if (num % N) + (num_prime % N) >= N else 0)


@dataclass(frozen=True)
class DiscretizedSemigroup:
    """The exact discrete semigroup of a contraction tuple on the 1/N grid."""

    base: ContractionTuple
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise InputError(f"N must be >= 1, got {self.N}")
        total = self.total_dim
        if total * total > max_entries():
            raise InputError(
                f"semigroup carrier dimension {total} exceeds the size cap"
            )

    @property
    def total_dim(self) -> int:
        return self.N**self.base.d * self.base.dim

    def eval(self, t: GridTime) -> np.ndarray:
        return eval_discretized(self, t)

    def compress(self, t: GridTime) -> np.ndarray:
        return compress_discretized(self, t)


def _check_time(semi: DiscretizedSemigroup, t: GridTime) -> None:
    if t.N != semi.N:
        raise InputError(
            f"grid time has denominator {t.N}, semigroup uses {semi.N}"
        )
    if t.d != semi.base.d:
        raise InputError(f"grid time has arity {t.d}, tuple has d={semi.base.d}")


def eval_discretized(semi: DiscretizedSemigroup, t: GridTime) -> np.ndarray:
    """Matrix of the semigroup at grid time t.

    Built structurally: a torus permutation of grid points with one
    dim x dim operator block per source point.  The block for source
    point m is the product over axes of S_i^kappa(t_i, m_i/N).
    """
    _check_time(semi, t)
    N, d, dim = semi.N, semi.base.d, semi.base.dim
    floors = t.floors
    fracs = t.frac_nums

    # Per axis only two powers occur: floor(t_i) and floor(t_i)+1.
    axis_powers = []
    for i in range(d):
        pows = semi.base.powers(i, floors[i] + 1)
        axis_powers.append((pows[floors[i]], pows[floors[i] + 1]))
    block_cache: dict[tuple[int, ...], np.ndarray] = {}

    def block(carries: tuple[int, ...]) -> np.ndarray:
        cached = block_cache.get(carries)
        if cached is None:
            cached = identity(dim)
            for i, c in enumerate(carries):
                cached = cached @ axis_powers[i][c]
            block_cache[carries] = cached
        return cached

    out = np.zeros((semi.total_dim, semi.total_dim), dtype=np.complex128)
    for source in itertools.product(range(N), repeat=d):
        carries = tuple(1 if fracs[i] + source[i] >= N else 0 for i in range(d))
        target = tuple((source[i] + t.nums[i]) % N for i in range(d))
        src_idx = 0
        tgt_idx = 0
        for i in range(d):
            src_idx = src_idx * N + source[i]
            tgt_idx = tgt_idx * N + target[i]
        out[
            tgt_idx * dim : (tgt_idx + 1) * dim,
            src_idx * dim : (src_idx + 1) * dim,
        ] = block(carries)
    return out


def compress_discretized(semi: DiscretizedSemigroup, t: GridTime) -> np.ndarray:
    """Compression of the evaluation by the normalised all-ones embedding.

    Computed as the average of all dim x dim blocks of the assembled
    evaluation matrix; the closed multilinear form is deliberately not
    used here so the two routes stay independent.
    """
    _check_time(semi, t)
    N, d, dim = semi.N, semi.base.d, semi.base.dim
    grid = N**d
    full = eval_discretized(semi, t)
    blocks = full.reshape(grid, dim, grid, dim)
    return blocks.sum(axis=(0, 2)) / grid


def multilinear_compress(tup: ContractionTuple, t) -> np.ndarray:
    """Product over axes of (1-frac(t_i)) S_i^floor(t_i) + frac(t_i) S_i^(floor(t_i)+1).

    Accepts arbitrary finite nonnegative real times.
    """
    times = [float(x) for x in t]
    if len(times) != tup.d:
        raise InputError(f"time vector has arity {len(times)}, tuple has d={tup.d}")
    if any(not math.isfinite(x) or x < 0 for x in times):
        raise InputError(f"times must be finite and nonnegative: {times}")
    out = identity(tup.dim)
    for i, x in enumerate(times):
        fl = math.floor(x)
        fr = x - fl
        pows = tup.powers(i, fl + 1)
        out = out @ ((1 - fr) * pows[fl] + fr * pows[fl + 1])
    return out


@dataclass(frozen=True)
class BlendWeights:
    """One corner of the blending lattice cell and its weight."""

    e: tuple[int, ...]
    weight: float
    shifted: tuple[float, ...]


def scaled_blend(samples, eps: float, t):
    """Blend lattice samples of a semigroup at the corners around t.

    ``samples`` maps integer lattice vectors n to the operator at time
    n*eps; the sample at the origin must be the identity.  Returns
    ``(matrix, weights)`` where the weights are the per-corner convex
    coefficients prod_i w_i(e_i) with w_i(0) = 1 - frac(t_i/eps) and
    w_i(1) = frac(t_i/eps); they sum to 1.
    """
    if not (eps > 0):
        raise InputError(f"eps must be positive, got {eps}")
    times = [float(x) for x in t]
    d = len(times)
    if d < 1:
        raise InputError("blend needs at least one time coordinate")
    if any(not math.isfinite(x) or x < 0 for x in times):
        raise InputError(f"times must be finite and nonnegative: {times}")

    origin = _lookup_sample(samples, (0,) * d)
    dim = origin.shape[0]
    if float(np.abs(origin - identity(dim)).max()) > 1e-12:
        raise InputError("sample at the origin must be the identity")

    cells = [math.floor(x / eps) for x in times]
    fracs = [x / eps - c for x, c in zip(times, cells)]
    out = np.zeros((dim, dim), dtype=np.complex128)
    weights = []
    for e in itertools.product((0, 1), repeat=d):
        weight = 1.0
        for i in range(d):
            weight *= fracs[i] if e[i] else 1 - fracs[i]
        corner = tuple(cells[i] + e[i] for i in range(d))
        shifted = tuple(c * eps for c in corner)
        weights.append(BlendWeights(e=e, weight=weight, shifted=shifted))
        if weight == 0.0:
            continue
        sample = _lookup_sample(samples, corner)
        if sample.shape != (dim, dim):
            raise InputError(
                f"sample at {corner} has shape {sample.shape}, expected ({dim}, {dim})"
            )
        out += weight * sample
    return out, weights


def _lookup_sample(samples, key: tuple[int, ...]) -> np.ndarray:
    try:
        value = samples[key]
    except KeyError as exc:
        raise InputError(f"missing lattice sample at {key}") from exc
    return as_matrix(value)


def approx_error_sweep(generators, eps_list, time_grid, tol: float = DEFAULT_TOL):
    """Sup-error of lattice blends against the true semigroup exp(sum t_i A_i).

    ``generators`` are commuting matrices whose semigroup stays contractive
    on the swept time range; ``time_grid`` is an iterable of d-vectors.
    Returns [{"eps": e, "sup_error": err}, ...] in the order of eps_list.
    """
    gens = [as_matrix(g) for g in generators]
    d = len(gens)
    if d < 1:
        raise InputError("need at least one generator")
    dim = gens[0].shape[0]
    for i, g in enumerate(gens):
        if g.shape != (dim, dim):
            raise InputError(f"generator {i + 1} has shape {g.shape}")
    for i in range(d):
        for j in range(i + 1, d):
            dev = op_norm(gens[i] @ gens[j] - gens[j] @ gens[i])
            if dev > tol:
                raise InputError(
                    f"generators {i + 1} and {j + 1} do not commute (deviation {dev:.3e})"
                )

    grid = [tuple(float(x) for x in point) for point in time_grid]
    if not grid:
        raise InputError("time grid is empty")
    if any(len(p) != d for p in grid):
        raise InputError("time grid arity does not match the generators")
    t_max = max(max(p) for p in grid)
    for i, g in enumerate(gens):
        norm = op_norm(matrix_exp(g, t_max))
        if norm > 1 + tol:
            raise InputError(
                f"generator {i + 1} is not contractive on the grid "
                f"(norm of exp(t_max*A) is {norm:.6g})"
            )

    def true_value(point):
        combined = sum(point[i] * gens[i] for i in range(d))
        return matrix_exp(combined)

    report = []
    for eps in eps_list:
        eps = float(eps)
        if not (eps > 0):
            raise InputError(f"eps values must be positive, got {eps}")
        samples: dict[tuple[int, ...], np.ndarray] = {(0,) * d: identity(dim)}

        def sample_at(corner):
            cached = samples.get(corner)
            if cached is None:
                cached = true_value(tuple(c * eps for c in corner))
                samples[corner] = cached
            return cached

        sup_error = 0.0
        for point in grid:
            cells = [math.floor(x / eps) for x in point]
            for e in itertools.product((0, 1), repeat=d):
                sample_at(tuple(c + ei for c, ei in zip(cells, e)))
            blend, _ = scaled_blend(samples, eps, point)
            sup_error = max(sup_error, op_norm(blend - true_value(point)))
        report.append({"eps": eps, "sup_error": sup_error})
    return report
