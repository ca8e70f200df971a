"""Column-normalized matrices, coherence, and exact spectral oracles.

Everything here is deliberately exact (up to floating point): the bounds in
:mod:`colsel.bounds` are checked against these routines.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from colsel import _backend
from colsel.errors import (
    DidNotConvergeError,
    IndexInTError,
    IndexOutOfRangeError,
    NoRootInIntervalError,
    NonFiniteEntryError,
    NotSymmetricError,
    PoleProximityError,
    TooFewColumnsError,
    ZeroColumnError,
)

ZERO_COLUMN_TOL = 1e-14
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
SYMMETRY_TOL = 1e-12
POLE_GUARD = 1e-13
ROOT_FTOL = 1e-10
BISECT_WIDTH = 1e-6
# eigenvalues this close to zero count as the null space of X_T X_T^t
NULL_EIG_TOL = 1e-12
# max entries per block when forming X^t X blockwise for coherence
COHERENCE_BLOCK = 4_000_000


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ColumnMatrix:
    """Dense ``n x p`` float64 matrix whose columns are the features.

    The array is stored read-only; build through :func:`normalize_columns`
    to get unit columns.
    """

    data: np.ndarray

    def __post_init__(self):
        a = np.array(self.data, dtype=np.float64, order="F", copy=True)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError(f"expected a non-empty 2-D array, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise NonFiniteEntryError("matrix has NaN or infinite entries")
        object.__setattr__(self, "data", _frozen(a))

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def p(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    @property
    def entries(self) -> np.ndarray:
        """Row-major flat view of the entries."""
        return self.data.ravel(order="C")

    def column(self, j: int) -> np.ndarray:
        return self.data[:, j]

    def submatrix(self, T: Sequence[int]) -> np.ndarray:
        return self.data[:, list(T)]

    def column_norms(self) -> np.ndarray:
        return np.sqrt(np.einsum("ij,ij->j", self.data, self.data))

    def __eq__(self, other):
        if not isinstance(other, ColumnMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    __hash__ = None


def normalize_columns(raw) -> ColumnMatrix:
    """Scale every column of ``raw`` to unit l2 norm."""
    a = np.array(raw, dtype=np.float64)
    if a.ndim != 2 or a.size == 0:
        raise ValueError(f"expected a non-empty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFiniteEntryError("matrix has NaN or infinite entries")
    norms = np.sqrt(np.einsum("ij,ij->j", a, a))
    small = np.flatnonzero(norms < ZERO_COLUMN_TOL)
    if small.size:
        j = int(small[0])
        raise ZeroColumnError(f"column {j} has norm {norms[j]:.3g}", index=j)
    return ColumnMatrix(a / norms)


def _check_index(X: ColumnMatrix, j) -> int:
    j = int(j)
    if not 0 <= j < X.p:
        raise IndexOutOfRangeError(f"column index {j} outside [0, {X.p})", index=j)
    return j


def coherence(X: ColumnMatrix) -> float:
    """Largest absolute inner product between two distinct columns."""
    if X.p < 2:
        raise TooFewColumnsError(f"coherence needs at least 2 columns, got {X.p}")
    A = X.data
    block = max(1, COHERENCE_BLOCK // X.p)
    mu = 0.0
    for start in range(0, X.p, block):
        stop = min(X.p, start + block)
        G = np.abs(A[:, start:stop].T @ A)
        G[np.arange(stop - start), np.arange(start, stop)] = 0.0
        mu = max(mu, float(G.max()))
    return mu


def cross_gram_norm(X: ColumnMatrix, T: Sequence[int], j: int) -> float:
    """``||X_T^t X_j||_2`` for a column ``j`` outside ``T``."""
    T = [_check_index(X, k) for k in T]
    if not T:
        raise ValueError("T must be non-empty")
    if len(set(T)) != len(T):
        raise IndexInTError("T contains repeated indices")
    j = _check_index(X, j)
    if j in T:
        raise IndexInTError(f"column {j} already belongs to T", index=j)
    return float(np.linalg.norm(X.submatrix(T).T @ X.column(j)))


@dataclass(frozen=True, eq=False)
class SymSpectrum:
    """Eigenvalues (descending) and orthonormal eigenvectors (as columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def smallest(self) -> float:
        return float(self.eigenvalues[-1])

    def reconstruct(self) -> np.ndarray:
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.T


def sym_eigen(A) -> SymSpectrum:
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi.

    Eigenvector signs are fixed so that each vector's largest-magnitude entry
    is positive; the result is a deterministic function of the input bits.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotSymmetricError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NonFiniteEntryError("matrix has NaN or infinite entries")
    n = A.shape[0]
    scale = max(1.0, float(np.max(np.abs(A)))) if n else 1.0
    asym = float(np.max(np.abs(A - A.T))) if n else 0.0
    if asym > SYMMETRY_TOL * scale:
        raise NotSymmetricError(f"matrix asymmetric by {asym:.3g}")
    S = np.ascontiguousarray(0.5 * (A + A.T))

    diag, V, sweeps, converged = _backend.jacobi_eigh(S, JACOBI_TOL, JACOBI_MAX_SWEEPS)
    if not converged:
        raise DidNotConvergeError(
            f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps", iterations=sweeps
        )
    order = np.argsort(-diag, kind="stable")
    w = np.ascontiguousarray(diag[order])
    U = np.ascontiguousarray(V[:, order])
    if n:
        lead = np.argmax(np.abs(U), axis=0)
        flip = U[lead, np.arange(n)] < 0
        U[:, flip] *= -1.0
    return SymSpectrum(_frozen(w), _frozen(U), int(sweeps))


def gram(X: ColumnMatrix, T: Sequence[int]) -> np.ndarray:
    XT = X.submatrix([_check_index(X, k) for k in T])
    G = XT.T @ XT
    return 0.5 * (G + G.T)


def gram_eigenvalues(X: ColumnMatrix, T: Sequence[int]) -> np.ndarray:
    """Eigenvalues of ``X_T^t X_T``, descending."""
    return sym_eigen(gram(X, T)).eigenvalues


def smallest_singular_value(X: ColumnMatrix, T: Sequence[int]) -> float:
    T = list(T)
    if not T:
        raise ValueError("T must be non-empty")
    lam = gram_eigenvalues(X, T)[-1]
    return math.sqrt(max(float(lam), 0.0))


def bottom_singular_values(X: ColumnMatrix, T: Sequence[int], m: int = 5) -> np.ndarray:
    """The ``m`` smallest singular values of ``X_T``, ascending."""
    lam = gram_eigenvalues(X, T)[::-1][:m]
    return np.sqrt(np.clip(lam, 0.0, None))


@dataclass(frozen=True, eq=False)
class SecularFunction:
    """``f(x) = 1 - sum_i w_i / (x - lam_i)``.

    Its roots are the eigenvalues of ``A + v v^t`` when ``lam`` is the
    spectrum of ``A`` and ``w_i = <v, u_i>^2``.
    """

    eigenvalues: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        lam = np.ascontiguousarray(self.eigenvalues, dtype=np.float64)
        w = np.ascontiguousarray(self.weights, dtype=np.float64)
        if lam.shape != w.shape or lam.ndim != 1:
            raise ValueError("eigenvalues and weights must be 1-D of equal length")
        if np.any(w < 0):
            raise ValueError("weights must be non-negative")
        object.__setattr__(self, "eigenvalues", _frozen(lam))
        object.__setattr__(self, "weights", _frozen(w))

    @classmethod
    def from_rank_one(cls, spectrum: SymSpectrum, v) -> "SecularFunction":
        v = np.asarray(v, dtype=np.float64)
        return cls(spectrum.eigenvalues, (spectrum.eigenvectors.T @ v) ** 2)

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    def __call__(self, x: float) -> float:
        return secular_eval(self, x)


def secular_eval(f: SecularFunction, x: float) -> float:
    x = float(x)
    if f.eigenvalues.size:
        k = int(np.argmin(np.abs(f.eigenvalues - x)))
        if abs(f.eigenvalues[k] - x) < POLE_GUARD:
            raise PoleProximityError(
                f"x={x!r} within {POLE_GUARD} of eigenvalue {f.eigenvalues[k]!r}",
                eigenvalue=float(f.eigenvalues[k]),
            )
    s1, _ = _backend.secular_terms(f.eigenvalues, f.weights, x)
    return 1.0 - s1


def _limit_sign(lam, w, x, side):
    """Sign-bearing value of f as x is approached from inside the interval."""
    if math.isinf(x):
        return 1.0
    near = np.abs(lam - x) <= NULL_EIG_TOL
    if np.any(w[near] > 0):
        return -math.inf if side == "lo" else math.inf
    far = ~near
    return 1.0 - float(np.sum(w[far] / (x - lam[far])))


def secular_smallest_root(
    f: SecularFunction, interval: Optional[Tuple[float, float]] = None
) -> float:
    """Root of ``f`` on an interval free of poles.

    The default interval is ``(0, lam_lo)`` with ``lam_lo`` the smallest
    eigenvalue above :data:`NULL_EIG_TOL`; eigenvalues within that tolerance
    of an endpoint are treated as sitting on it. Bisection narrows the
    bracket to :data:`BISECT_WIDTH`, then bracketed Newton finishes.
    """
    lam = np.array(f.eigenvalues)
    w = np.ascontiguousarray(f.weights)
    if interval is None:
        lo = 0.0
        above = lam[lam > NULL_EIG_TOL]
        hi = float(above.min()) if above.size else math.inf
    else:
        lo, hi = map(float, interval)
    if not lo < hi:
        raise ValueError(f"empty interval ({lo}, {hi})")
    lam[np.abs(lam - lo) <= NULL_EIG_TOL] = lo
    if not math.isinf(hi):
        lam[np.abs(lam - hi) <= NULL_EIG_TOL] = hi
    inside = (lam > lo) & (lam < hi) & (w > 0)
    if np.any(inside):
        raise NoRootInIntervalError("interval contains a pole", interval=[lo, hi])
    lam = np.ascontiguousarray(lam)

    f_lo = _limit_sign(lam, w, lo, "lo")
    f_hi = _limit_sign(lam, w, hi, "hi")
    if f_lo == 0.0:
        return lo
    if not (f_lo < 0.0 < f_hi):
        raise NoRootInIntervalError(
            f"f does not change sign on ({lo}, {hi})", interval=[lo, hi]
        )

    a, b = lo, hi
    if math.isinf(b):
        # f > 0 beyond the largest pole plus the total weight
        b = max(float(lam.max()), lo) + float(w.sum()) + 1.0

    def fd(x):
        s1, s2 = _backend.secular_terms(lam, w, x)
        return 1.0 - s1, s2

    while b - a > BISECT_WIDTH:
        m = 0.5 * (a + b)
        fm, _ = fd(m)
        if fm == 0.0:
            return m
        if fm < 0.0:
            a = m
        else:
            b = m

    x = 0.5 * (a + b)
    for _ in range(200):
        fx, dfx = fd(x)
        if abs(fx) <= ROOT_FTOL:
            return x
        if fx < 0.0:
            a = x
        else:
            b = x
        if b - a <= 4.0 * np.finfo(float).eps * max(1.0, abs(x)):
            return x
        xn = x - fx / dfx if dfx > 0 else math.nan
        if not a < xn < b:
            xn = 0.5 * (a + b)
        x = xn
    return x


def append_eigenvalue_exact(X: ColumnMatrix, T: Iterable[int], j: int) -> float:
    """Smallest eigenvalue of the Gram of ``T + [j]`` (the appended spectrum)."""
    return float(gram_eigenvalues(X, list(T) + [int(j)])[-1])
