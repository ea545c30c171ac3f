"""Dense nonnegative matrices and the elementwise operations the solvers use.

Matrices are plain float64 numpy arrays in row-major order. The helpers here
add the validation the factorization code relies on: shape agreement, explicit
nonnegativity checks, and epsilon-guarded division that never raises.
"""

from __future__ import annotations

import numpy as np

from .exceptions import ConfigError, ParseError, ShapeError

DEFAULT_EPS = 1e-10


def as_matrix(data, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-D float64 C-contiguous array."""
    arr = np.ascontiguousarray(data, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got ndim={arr.ndim}")
    return arr


def check_nonnegative(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    if np.any(a < 0):
        bad = tuple(int(i) for i in np.argwhere(a < 0)[0])
        raise ShapeError(
            f"{name} must be entrywise nonnegative, "
            f"found {float(a[bad])} at {bad}"
        )
    return a


def hadamard(a, b) -> np.ndarray:
    """Entrywise product. Operands must have identical shape."""
    a = as_matrix(a, "left operand")
    b = as_matrix(b, "right operand")
    if a.shape != b.shape:
        raise ShapeError(f"hadamard shape mismatch: {a.shape} vs {b.shape}")
    return a * b


def safe_divide(a, b, eps: float = DEFAULT_EPS) -> np.ndarray:
    """Entrywise a / (b + eps). The guard keeps zero denominators finite."""
    if eps <= 0:
        raise ConfigError(f"eps must be positive, got {eps}")
    a = as_matrix(a, "numerator")
    b = as_matrix(b, "denominator")
    if a.shape != b.shape:
        raise ShapeError(f"safe_divide shape mismatch: {a.shape} vs {b.shape}")
    return a / (b + eps)


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a, "left operand")
    b = as_matrix(b, "right operand")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(
            f"matmul inner dimensions differ: {a.shape} @ {b.shape}"
        )
    return a @ b


def transpose(a) -> np.ndarray:
    return np.ascontiguousarray(as_matrix(a).T)


def write_csv(path, a) -> None:
    """Write as comma-separated rows, no header, full float64 precision."""
    a = as_matrix(a)
    with open(path, "w", encoding="utf-8") as fh:
        for row in a:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")


def read_csv(path) -> np.ndarray:
    """Read a comma-separated numeric matrix. Ragged rows are an error."""
    rows = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if width is None:
                width = len(fields)
            elif len(fields) != width:
                raise ParseError(
                    f"{path}: line {lineno} has {len(fields)} fields, "
                    f"expected {width}"
                )
            try:
                rows.append([float(f) for f in fields])
            except ValueError as exc:
                raise ParseError(f"{path}: line {lineno}: {exc}") from None
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return np.array(rows, dtype=np.float64)
