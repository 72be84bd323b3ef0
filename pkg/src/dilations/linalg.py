"""Dense complex matrix arithmetic and spectral utilities.

Matrices are plain ``numpy.ndarray`` values of dtype complex128.  Every
public routine validates its inputs (shape, finiteness, size caps) and
raises :class:`InputError` on bad data, so callers can rely on the
arrays being well formed downstream.

Wire format for a single matrix::

    {"rows": r, "cols": c, "data": [[re, im], ...]}   # row-major

Round-trips preserve binary64 values exactly.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

__all__ = [
    "InputError",
    "NumericalError",
    "Tolerance",
    "DEFAULT_TOL",
    "max_entries",
    "as_matrix",
    "identity",
    "dagger",
    "kron",
    "op_norm",
    "psd_sqrt",
    "matrix_exp",
    "matrix_to_json",
    "matrix_from_json",
]


class InputError(ValueError):
    """Raised for malformed, out-of-contract, or oversized inputs."""


class NumericalError(RuntimeError):
    """Raised when a numerical routine cannot meet its accuracy contract."""


DEFAULT_TOL = 1e-10

# Total entries allowed in any constructed matrix.  Overridable through the
# environment so CLI pipelines can raise the cap deliberately.
_DEFAULT_MAX_ENTRIES = 1 << 20


def max_entries() -> int:
    raw = os.environ.get("DILATIONS_MAX_ENTRIES")
    if raw is None:
        return _DEFAULT_MAX_ENTRIES
    try:
        value = int(raw)
    except ValueError as exc:
        raise InputError(f"DILATIONS_MAX_ENTRIES is not an integer: {raw!r}") from exc
    if value <= 0:
        raise InputError("DILATIONS_MAX_ENTRIES must be positive")
    return value


def default_tol() -> float:
    raw = os.environ.get("DILATIONS_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        value = float(raw)
    except ValueError as exc:
        raise InputError(f"DILATIONS_TOL is not a number: {raw!r}") from exc
    if value < 0:
        raise InputError("DILATIONS_TOL must be nonnegative")
    return value


@dataclass(frozen=True)
class Tolerance:
    """Nonnegative comparison tolerance for approximate operator identities."""

    eps: float = DEFAULT_TOL

    def __post_init__(self):
        if not (self.eps >= 0):
            raise InputError(f"tolerance must be nonnegative, got {self.eps}")


def _check_cap(rows: int, cols: int) -> None:
    if rows * cols > max_entries():
        raise InputError(
            f"matrix of shape {rows}x{cols} exceeds the size cap of "
            f"{max_entries()} entries (set DILATIONS_MAX_ENTRIES to override)"
        )


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-d complex128 array, rejecting NaN/Inf entries."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise InputError(f"expected a 2-d matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise InputError("matrix contains non-finite entries")
    return m


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def kron(a, b) -> np.ndarray:
    """Kronecker product with entry ((i*rows_b+k),(j*cols_b+l)) = a[i,j]*b[k,l]."""
    a = as_matrix(a)
    b = as_matrix(b)
    _check_cap(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1])
    return np.kron(a, b)


def op_norm(a) -> float:
    """Largest singular value."""
    a = as_matrix(a)
    try:
        return float(np.linalg.norm(a, 2))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular value computation failed: {exc}") from exc


def psd_sqrt(a, eps: float = DEFAULT_TOL) -> np.ndarray:
    """Hermitian PSD square root, clamping eigenvalues in [-eps, 0) to zero."""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise InputError("psd_sqrt requires a square matrix")
    scale = max(1.0, float(np.abs(a).max()))
    herm_dev = float(np.abs(a - dagger(a)).max())
    if herm_dev > eps * scale:
        raise InputError(f"matrix is not Hermitian (deviation {herm_dev:.3e})")
    h = (a + dagger(a)) / 2
    try:
        evals, evecs = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    if evals.min() < -eps * scale:
        raise InputError(
            f"matrix is not positive semidefinite (min eigenvalue {evals.min():.3e})"
        )
    root = evecs @ np.diag(np.sqrt(np.clip(evals, 0.0, None))) @ dagger(evecs)
    return (root + dagger(root)) / 2


# Norm cap on t*A; beyond this scaling-and-squaring accuracy degrades and the
# caller almost certainly passed a wrong time scale.
_EXP_NORM_CAP = 50.0


def matrix_exp(a, t: float = 1.0) -> np.ndarray:
    """exp(t*A) by scaling-and-squaring with a truncated Taylor series."""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise InputError("matrix_exp requires a square matrix")
    ta = t * a
    norm = op_norm(ta)
    if norm > _EXP_NORM_CAP:
        raise InputError(
            f"norm of t*A is {norm:.3g}, beyond the cap {_EXP_NORM_CAP}"
        )
    # Scale so the series argument has norm <= 0.5, then square back up.
    squarings = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0
    x = ta / (2**squarings)
    n = a.shape[0]
    result = identity(n)
    term = identity(n)
    for k in range(1, 30):
        term = term @ x / k
        result = result + term
        if np.abs(term).max() < 1e-18 * max(1.0, np.abs(result).max()):
            break
    for _ in range(squarings):
        result = result @ result
    return result


def matrix_to_json(a) -> dict:
    a = as_matrix(a)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in a.ravel()],
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows = int(obj["rows"])
        cols = int(obj["cols"])
        data = obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed matrix JSON: {exc}") from exc
    if rows < 1 or cols < 1:
        raise InputError("matrix dimensions must be positive")
    if len(data) != rows * cols:
        raise InputError(
            f"matrix JSON has {len(data)} entries, expected {rows * cols}"
        )
    _check_cap(rows, cols)
    try:
        flat = [complex(float(re), float(im)) for re, im in data]
    except (TypeError, ValueError) as exc:
        raise InputError(f"malformed matrix entry: {exc}") from exc
    return as_matrix(np.array(flat, dtype=np.complex128).reshape(rows, cols))
