"""Greedy incoherent column selection with a running eigenvalue certificate,
plus the random and leverage-score baselines it is compared against."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np

from colsel.bounds import _decrement
from colsel.errors import (
    EmptyMatrixError,
    KOutOfRangeError,
    ParamOutOfRangeError,
    RankOutOfRangeError,
    StartIndexOutOfRangeError,
)
from colsel.linalg import ColumnMatrix, coherence, smallest_singular_value, sym_eigen

DEFAULT_GRAM_BUDGET = 10**8

STOP_ETA = "eta_below"
STOP_MAX = "max_cols"
STOP_EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class SelectionConfig:
    epsilon: float = 0.5
    max_cols: Optional[int] = None
    seed: int = 0
    start: Union[int, str] = "random"
    mode: str = "exact"
    parallel_scan: bool = False
    scan_workers: int = 4
    # harness comparisons select a fixed number of columns regardless of eta
    stop_on_eta: bool = True
    gram_budget: int = DEFAULT_GRAM_BUDGET

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ParamOutOfRangeError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")
        if self.max_cols is not None and self.max_cols < 1:
            raise ParamOutOfRangeError(f"max_cols must be >= 1, got {self.max_cols!r}")
        if self.mode not in ("exact", "certificate"):
            raise ParamOutOfRangeError(f"mode must be 'exact' or 'certificate', got {self.mode!r}")
        if isinstance(self.start, str) and self.start != "random":
            raise ParamOutOfRangeError(f"start must be 'random' or an index, got {self.start!r}")
        if self.scan_workers < 1:
            raise ParamOutOfRangeError("scan_workers must be >= 1")

    def as_dict(self):
        return {
            "epsilon": self.epsilon,
            "max_cols": self.max_cols,
            "seed": self.seed,
            "start": self.start,
            "mode": self.mode,
            "parallel_scan": self.parallel_scan,
            "stop_on_eta": self.stop_on_eta,
        }


@dataclass(frozen=True)
class StepRecord:
    """State after the ``s``-th column joined ``T``.

    ``alpha`` and ``score`` describe the append that produced this step, and
    ``eta`` lower-bounds the smallest eigenvalue of the resulting Gram.
    """

    s: int
    j: int
    score: float
    alpha: float
    eta: float
    lambda_exact: Optional[float] = None

    def as_dict(self):
        return {
            "s": self.s,
            "j": self.j,
            "score": self.score,
            "alpha": self.alpha,
            "eta": self.eta,
            "lambda_exact": self.lambda_exact,
        }


@dataclass(frozen=True)
class SelectionTrace:
    steps: Tuple[StepRecord, ...]
    final_T: Tuple[int, ...]
    stop_reason: str
    mu: float
    mode: str

    @property
    def etas(self) -> np.ndarray:
        return np.array([st.eta for st in self.steps])

    def as_dict(self):
        return {
            "steps": [st.as_dict() for st in self.steps],
            "final_T": list(self.final_T),
            "stop_reason": self.stop_reason,
            "mu": self.mu,
            "mode": self.mode,
        }


class ScoreState:
    """Running squared scores ``c_j = ||X_T^t X_j||^2`` for every column."""

    def __init__(self, p: int):
        self.sq_scores = np.zeros(p)
        self.consumed = np.zeros(p, dtype=bool)

    def append(self, k: int, inner: np.ndarray):
        """Add column ``k`` to ``T``; ``inner`` holds ``<X_k, X_j>`` for all j."""
        self.sq_scores += inner * inner
        self.consumed[k] = True

    @property
    def remaining(self) -> int:
        return int(self.consumed.size - self.consumed.sum())

    def _chunk_min(self, lo: int, hi: int) -> Tuple[float, int]:
        masked = np.where(self.consumed[lo:hi], np.inf, self.sq_scores[lo:hi])
        i = int(np.argmin(masked))
        return float(masked[i]), lo + i

    def argmin(self, executor: Optional[ThreadPoolExecutor] = None, parts: int = 1) -> Tuple[int, float]:
        """Unconsumed column with the smallest score, lowest index on ties."""
        p = self.sq_scores.size
        if executor is None or parts <= 1:
            val, j = self._chunk_min(0, p)
        else:
            bounds = np.linspace(0, p, parts + 1).astype(int)
            spans = [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
            # (value, index) lexicographic min is independent of partitioning
            val, j = min(executor.map(lambda ab: self._chunk_min(*ab), spans))
        return j, val


def _resolve_start(cfg: SelectionConfig, p: int) -> int:
    if cfg.start == "random":
        return int(np.random.default_rng(cfg.seed).integers(p))
    j = int(cfg.start)
    if not 0 <= j < p:
        raise StartIndexOutOfRangeError(f"start index {j} outside [0, {p})", index=j)
    return j


def greedy_select(X: ColumnMatrix, cfg: Optional[SelectionConfig] = None) -> SelectionTrace:
    """Append, one at a time, the column least correlated with those chosen.

    In ``exact`` mode the certificate update uses the smallest eigenvalue of
    the current Gram (one Jacobi solve per step). ``certificate`` mode
    replaces it with ``1 - mu_T``, an upper bound on that eigenvalue from the
    worst 2x2 principal minor; the decrement can only grow, so eta stays a
    valid lower bound and never exceeds the exact-mode eta.
    """
    cfg = cfg or SelectionConfig()
    if X is None or X.p == 0 or X.n == 0:
        raise EmptyMatrixError("matrix has no columns")
    n, p = X.shape
    max_cols = cfg.max_cols if cfg.max_cols is not None else min(n, p)
    start = _resolve_start(cfg, p)
    A = X.data

    if p * p <= cfg.gram_budget:
        G = A.T @ A
        if p >= 2:
            off = np.abs(G)
            np.fill_diagonal(off, 0.0)
            mu = float(off.max())
        else:
            mu = 0.0

        def inner(k):
            return G[k]

    else:
        G = None
        mu = coherence(X) if p >= 2 else 0.0

        def inner(k):
            return A.T @ A[:, k]

    exact = cfg.mode == "exact"
    threshold = 1.0 - cfg.epsilon
    executor = ThreadPoolExecutor(cfg.scan_workers) if cfg.parallel_scan else None
    try:
        state = ScoreState(p)
        row = inner(start)
        state.append(start, row)
        T = [start]
        gram_T = np.array([[row[start]]])
        lam = float(row[start]) if exact else None
        mu_T = 0.0
        eta = 1.0
        steps: List[StepRecord] = [StepRecord(1, start, 0.0, 0.0, eta, lam)]

        while True:
            if cfg.stop_on_eta and eta < threshold:
                reason = STOP_ETA
                break
            if state.remaining == 0:
                reason = STOP_EXHAUSTED
                break
            if len(T) >= max_cols:
                reason = STOP_MAX
                break
            j, c = state.argmin(executor, cfg.scan_workers)
            s = len(T)
            alpha = min(1.0, c / (s * mu * mu)) if mu > 0.0 else 0.0
            lam_s = lam if exact else 1.0 - mu_T
            eta = eta - _decrement(lam_s, alpha * mu * mu * s)

            row = inner(j)
            cross = row[T]
            if cross.size:
                mu_T = max(mu_T, float(np.max(np.abs(cross))))
            gram_T = np.block([[gram_T, cross[:, None]], [cross[None, :], np.array([[row[j]]])]])
            T.append(j)
            state.append(j, row)
            if exact:
                lam = sym_eigen(gram_T).smallest
            steps.append(StepRecord(s + 1, j, math.sqrt(c), alpha, eta, lam))
    finally:
        if executor is not None:
            executor.shutdown()

    return SelectionTrace(tuple(steps), tuple(T), reason, mu, cfg.mode)


@dataclass(frozen=True)
class BaselineResult:
    method: str
    selected: Tuple[int, ...]
    sigma_min: float
    scores: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def as_dict(self):
        return {"method": self.method, "selected": list(self.selected), "sigma_min": self.sigma_min}


def _check_k(k, p):
    if int(k) != k or not 1 <= k <= p:
        raise KOutOfRangeError(f"k must lie in [1, {p}], got {k!r}", k=k)
    return int(k)


def random_select(X: ColumnMatrix, k: int, seed: int) -> BaselineResult:
    k = _check_k(k, X.p)
    rng = np.random.default_rng(seed)
    sel = tuple(int(j) for j in rng.choice(X.p, size=k, replace=False))
    return BaselineResult("random", sel, smallest_singular_value(X, sel))


def leverage_scores(X: ColumnMatrix, r: int) -> np.ndarray:
    """Squared row norms of the top-``r`` right singular basis of ``X``."""
    n, p = X.shape
    if int(r) != r or not 1 <= r <= min(n, p):
        raise RankOutOfRangeError(f"rank must lie in [1, {min(n, p)}], got {r!r}", rank=r)
    r = int(r)
    A = X.data
    if n < p:
        # right singular vectors recovered from X X^t: v_k = X^t u_k / sigma_k
        spec = sym_eigen(A @ A.T)
        lam = spec.eigenvalues[:r]
        if lam[-1] > 1e-12 * max(lam[0], 1.0):
            proj = A.T @ spec.eigenvectors[:, :r]
            return np.sum(proj * proj / lam, axis=1)
    spec = sym_eigen(A.T @ A)
    V = spec.eigenvectors[:, :r]
    return np.sum(V * V, axis=1)


def leverage_select(X: ColumnMatrix, k: int, r: int) -> BaselineResult:
    """Deterministic top-``k`` columns by rank-``r`` leverage, lowest index on ties."""
    k = _check_k(k, X.p)
    scores = leverage_scores(X, r)
    order = np.lexsort((np.arange(X.p), -scores))
    sel = tuple(int(j) for j in order[:k])
    return BaselineResult("leverage", sel, smallest_singular_value(X, sel), scores)
