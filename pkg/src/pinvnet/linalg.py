"""Dense matrices, the pseudoinverse engine, and least-squares solving.

All numerics are float64: the experiments this library reproduces report
sums of squared errors down to the 1e-19 scale, which single precision
cannot express.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

EPS = float(np.finfo(np.float64).eps)

__all__ = [
    "EPS",
    "Matrix",
    "PinvOptions",
    "as_array",
    "pinv",
    "penrose_residual",
    "solve_least_squares",
    "sse",
    "write_matrix_csv",
    "read_matrix_csv",
]


class Matrix:
    """Immutable 2-D real matrix.

    Thin value wrapper over a read-only float64 ndarray. Constructors reject
    empty shapes and non-finite entries, so any Matrix in circulation is a
    valid operand.
    """

    __slots__ = ("_a",)

    def __init__(self, data):
        if isinstance(data, Matrix):
            self._a = data._a
            return
        a = np.array(data, dtype=np.float64, order="C")
        if a.ndim != 2:
            raise InvalidArgumentError(
                f"matrix data must be 2-D, got ndim={a.ndim}"
            )
        if a.shape[0] < 1 or a.shape[1] < 1:
            raise InvalidArgumentError(f"matrix shape {a.shape} has a zero dimension")
        if not np.isfinite(a).all():
            raise InvalidArgumentError("matrix entries must be finite")
        a.setflags(write=False)
        self._a = a

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self):
        return self._a.shape

    @property
    def array(self) -> np.ndarray:
        """The underlying read-only ndarray view."""
        return self._a

    def tolist(self):
        return self._a.tolist()

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self._a.shape == other._a.shape and bool(
            np.array_equal(self._a, other._a)
        )

    def __hash__(self):
        return hash((self._a.shape, self._a.tobytes()))

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols})"


def as_array(a, name="matrix") -> np.ndarray:
    """Validate a Matrix or array-like into a finite 2-D float64 ndarray."""
    if isinstance(a, Matrix):
        return a.array
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise InvalidArgumentError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidArgumentError(f"{name} shape {arr.shape} has a zero dimension")
    if not np.isfinite(arr).all():
        raise InvalidArgumentError(f"{name} entries must be finite")
    return arr


@dataclass(frozen=True)
class PinvOptions:
    """Pseudoinverse controls.

    tolerance_mode "automatic" treats singular values
    sigma <= max(rows, cols) * eps * sigma_max as zero (the standard
    rank-revealing convention). Mode "explicit" uses the absolute cutoff
    `tolerance` instead; tolerance=0.0 keeps every strictly positive
    singular value. ridge > 0 switches to the regularized closed forms
    and ignores truncation entirely.
    """

    tolerance_mode: str = "automatic"
    tolerance: float = 0.0
    ridge: float = 0.0

    def __post_init__(self):
        if self.tolerance_mode not in ("automatic", "explicit"):
            raise InvalidArgumentError(
                f"unknown tolerance_mode {self.tolerance_mode!r}"
            )
        if self.tolerance < 0:
            raise InvalidArgumentError("explicit tolerance must be >= 0")
        if self.ridge < 0:
            raise InvalidArgumentError("ridge must be >= 0")

    @classmethod
    def automatic(cls, ridge: float = 0.0) -> "PinvOptions":
        return cls("automatic", 0.0, ridge)

    @classmethod
    def explicit(cls, tolerance: float, ridge: float = 0.0) -> "PinvOptions":
        return cls("explicit", tolerance, ridge)


_DEFAULT_OPTS = PinvOptions()


def _pinv_array(a: np.ndarray, opts: PinvOptions) -> np.ndarray:
    if opts.ridge > 0.0:
        lam = opts.ridge
        m, n = a.shape
        if m >= n:
            return np.linalg.solve(a.T @ a + lam * np.eye(n), a.T)
        return np.linalg.solve(a @ a.T + lam * np.eye(m), a).T
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((a.shape[1], a.shape[0]))
    if opts.tolerance_mode == "automatic":
        tol = max(a.shape) * EPS * s[0]
    else:
        tol = opts.tolerance
    keep = s > tol
    if not keep.any():
        return np.zeros((a.shape[1], a.shape[0]))
    return (vt[keep].T * (1.0 / s[keep])) @ u[:, keep].T


def pinv(a, opts: PinvOptions = _DEFAULT_OPTS) -> Matrix:
    """Moore-Penrose pseudoinverse via SVD truncation (or ridge closed form).

    With ridge=0 the result satisfies the four Penrose conditions within
    numeric tolerance. With ridge=lambda>0 returns (A^T A + lambda I)^-1 A^T
    for tall inputs and the transposed analogue for wide ones.
    """
    arr = as_array(a, "pinv input")
    return Matrix(_pinv_array(arr, opts))


def penrose_residual(a, a_dag) -> float:
    """Worst relative violation of the four Penrose conditions.

    Returns max over {AXA=A, XAX=X, (AX)^T=AX, (XA)^T=XA} of
    ||lhs - rhs||_F / max(1, ||A||_F).
    """
    aa = as_array(a, "a")
    xx = as_array(a_dag, "a_dag")
    if xx.shape != (aa.shape[1], aa.shape[0]):
        raise InvalidArgumentError(
            f"shape mismatch: a is {aa.shape}, a_dag is {xx.shape}"
        )
    ax = aa @ xx
    xa = xx @ aa
    scale = max(1.0, float(np.linalg.norm(aa)))
    checks = (
        np.linalg.norm(ax @ aa - aa),
        np.linalg.norm(xa @ xx - xx),
        np.linalg.norm(ax.T - ax),
        np.linalg.norm(xa.T - xa),
    )
    return float(max(checks)) / scale


def solve_least_squares(a, y, opts: PinvOptions = _DEFAULT_OPTS) -> Matrix:
    """Minimum-norm least-squares solution Theta = A^dagger Y."""
    aa = as_array(a, "a")
    yy = as_array(y, "y")
    if aa.shape[0] != yy.shape[0]:
        raise InvalidArgumentError(
            f"row mismatch: a has {aa.shape[0]} rows, y has {yy.shape[0]}"
        )
    return Matrix(_pinv_array(aa, opts) @ yy)


def sse(g, y) -> float:
    """Sum of squared entry differences, trace((G-Y)^T (G-Y))."""
    gg = as_array(g, "g")
    yy = as_array(y, "y")
    if gg.shape != yy.shape:
        raise InvalidArgumentError(f"shape mismatch: {gg.shape} vs {yy.shape}")
    d = gg - yy
    return float(np.sum(d * d))


def write_matrix_csv(a, path) -> None:
    """One matrix row per line, comma separated, 17 significant digits,
    no header. 17 digits round-trips float64 exactly."""
    arr = as_array(a, "matrix")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for row in arr:
            fh.write(",".join("%.17g" % v for v in row))
            fh.write("\n")


def read_matrix_csv(path) -> Matrix:
    try:
        arr = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
    except ValueError as exc:
        raise InvalidArgumentError(f"cannot parse matrix CSV {path}: {exc}") from exc
    return Matrix(arr)
