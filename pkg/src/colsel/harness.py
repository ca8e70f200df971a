"""Seeded Monte Carlo comparisons and bound-versus-truth traces.

Per-trial randomness: trial ``t`` of a run with master seed ``S`` draws three
64-bit words from ``numpy.random.SeedSequence([S, t]).generate_state(3,
numpy.uint64)``; they seed, in order, the Gaussian matrix, the greedy start
column, and the random baseline. Published tables are regenerable from
``S`` alone.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from colsel import bounds
from colsel.errors import EmptyResultsError, KOutOfRangeError, ParamOutOfRangeError
from colsel.linalg import ColumnMatrix, bottom_singular_values, normalize_columns
from colsel.selection import (
    SelectionConfig,
    greedy_select,
    leverage_select,
    random_select,
)

METHODS = ("greedy-exact", "greedy-certificate", "random", "leverage")
BOUND_SLACK = 1e-9


def gen_gaussian(n: int, p: int, seed: int) -> ColumnMatrix:
    """i.i.d. standard normal ``n x p`` matrix with unit columns."""
    if n < 1 or p < 1:
        raise ParamOutOfRangeError(f"need n, p >= 1, got {n}x{p}")
    rng = np.random.default_rng(seed)
    return normalize_columns(rng.standard_normal((n, p)))


def gen_near_orthogonal(n: int, p: int, noise: float, seed: int) -> ColumnMatrix:
    """``p <= n`` orthonormal columns plus Gaussian noise of size ``noise``,
    renormalized; coherence grows roughly linearly with ``noise``."""
    if p > n:
        raise ParamOutOfRangeError(f"need p <= n, got {n}x{p}")
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((n, p)))
    return normalize_columns(Q + noise * rng.standard_normal((n, p)) / math.sqrt(n))


def trial_seeds(seed: int, trial: int) -> Tuple[int, int, int]:
    words = np.random.SeedSequence([int(seed), int(trial)]).generate_state(3, np.uint64)
    return tuple(int(w) for w in words)


@dataclass(frozen=True)
class EnsembleSpec:
    rows: int = 100
    cols: int = 1000
    trials: int = 20
    seed: int = 0
    k: int = 10
    epsilon: float = 0.5
    methods: Tuple[str, ...] = ("greedy-exact", "random")
    m: int = 5
    leverage_rank: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.trials < 1:
            raise ParamOutOfRangeError("trials must be >= 1")
        if self.rows < 1 or self.cols < 1:
            raise ParamOutOfRangeError("rows and cols must be >= 1")
        if not 1 <= self.k <= self.cols:
            raise KOutOfRangeError(f"k must lie in [1, {self.cols}], got {self.k}")
        if self.m < 1:
            raise ParamOutOfRangeError("m must be >= 1")
        unknown = [mth for mth in self.methods if mth not in METHODS]
        if unknown or not self.methods:
            raise ParamOutOfRangeError(f"unknown methods {unknown}; choose from {METHODS}")

    def as_dict(self):
        return {
            "rows": self.rows,
            "cols": self.cols,
            "trials": self.trials,
            "seed": self.seed,
            "k": self.k,
            "epsilon": self.epsilon,
            "methods": list(self.methods),
            "m": self.m,
            "leverage_rank": self.leverage_rank,
        }


@dataclass(frozen=True)
class TrialResult:
    trial: int
    selected: Dict[str, Tuple[int, ...]]
    bottom_sv: Dict[str, Tuple[float, ...]]
    wall_time: Dict[str, float]

    def sigma_min(self, method: str) -> float:
        return self.bottom_sv[method][0]

    def as_dict(self):
        return {
            "trial": self.trial,
            "selected": {k: list(v) for k, v in self.selected.items()},
            "bottom_sv": {k: list(v) for k, v in self.bottom_sv.items()},
            "wall_time": dict(self.wall_time),
        }


def _select(method: str, X: ColumnMatrix, spec: EnsembleSpec, start_seed: int, rand_seed: int):
    if method.startswith("greedy-"):
        cfg = SelectionConfig(
            epsilon=spec.epsilon,
            max_cols=spec.k,
            seed=start_seed,
            mode=method.split("-", 1)[1],
            stop_on_eta=False,
        )
        return greedy_select(X, cfg).final_T
    if method == "random":
        return random_select(X, spec.k, rand_seed).selected
    rank = spec.leverage_rank or min(spec.k, X.n, X.p)
    return leverage_select(X, spec.k, rank).selected


def run_trial(spec: EnsembleSpec, trial: int) -> TrialResult:
    mat_seed, start_seed, rand_seed = trial_seeds(spec.seed, trial)
    X = gen_gaussian(spec.rows, spec.cols, mat_seed)
    selected, sv, times = {}, {}, {}
    for method in spec.methods:
        t0 = time.perf_counter()
        sel = _select(method, X, spec, start_seed, rand_seed)
        times[method] = time.perf_counter() - t0
        selected[method] = tuple(sel)
        sv[method] = tuple(float(v) for v in bottom_singular_values(X, sel, spec.m))
    return TrialResult(trial, selected, sv, times)


def run_trials(spec: EnsembleSpec, workers: int = 1) -> List[TrialResult]:
    """All trials of ``spec``, ordered by trial id."""
    if workers <= 1:
        return [run_trial(spec, t) for t in range(spec.trials)]
    with ThreadPoolExecutor(workers) as pool:
        results = list(pool.map(lambda t: run_trial(spec, t), range(spec.trials)))
    return sorted(results, key=lambda r: r.trial)


@dataclass(frozen=True)
class PairwiseCount:
    first: str
    second: str
    first_wins: int
    second_wins: int
    ties: int
    # mean over trials of how many of the m smallest singular values of
    # ``first`` exceed those of ``second`` (matched by rank)
    mean_larger_count: float

    def as_dict(self):
        return {
            "first": self.first,
            "second": self.second,
            "first_wins": self.first_wins,
            "second_wins": self.second_wins,
            "ties": self.ties,
            "mean_larger_count": self.mean_larger_count,
        }


@dataclass(frozen=True)
class CompareReport:
    trials: int
    methods: Tuple[str, ...]
    mean_sigma_min: Dict[str, float]
    median_sigma_min: Dict[str, float]
    mean_wall_time: Dict[str, float]
    pairwise: Tuple[PairwiseCount, ...]

    def win_rate(self, first: str, second: str) -> float:
        """Fraction of trials where ``first`` has sigma_min >= ``second``'s."""
        for pc in self.pairwise:
            if (pc.first, pc.second) == (first, second):
                return (pc.first_wins + pc.ties) / self.trials
            if (pc.first, pc.second) == (second, first):
                return (pc.second_wins + pc.ties) / self.trials
        raise KeyError((first, second))

    def as_dict(self):
        return {
            "trials": self.trials,
            "methods": list(self.methods),
            "mean_sigma_min": dict(self.mean_sigma_min),
            "median_sigma_min": dict(self.median_sigma_min),
            "mean_wall_time": dict(self.mean_wall_time),
            "pairwise": [pc.as_dict() for pc in self.pairwise],
        }


def summarize(results: Sequence[TrialResult]) -> CompareReport:
    if not results:
        raise EmptyResultsError("no trial results to summarize")
    methods = tuple(results[0].selected)
    sig = {mth: np.array([r.sigma_min(mth) for r in results]) for mth in methods}
    pairwise = []
    for a_i, a in enumerate(methods):
        for b in methods[a_i + 1 :]:
            wins_a = int(np.sum(sig[a] > sig[b]))
            wins_b = int(np.sum(sig[a] < sig[b]))
            larger = [
                int(np.sum(np.array(r.bottom_sv[a]) > np.array(r.bottom_sv[b]))) for r in results
            ]
            pairwise.append(
                PairwiseCount(a, b, wins_a, wins_b, len(results) - wins_a - wins_b, float(np.mean(larger)))
            )
    return CompareReport(
        trials=len(results),
        methods=methods,
        mean_sigma_min={m: float(sig[m].mean()) for m in methods},
        median_sigma_min={m: float(np.median(sig[m])) for m in methods},
        mean_wall_time={m: float(np.mean([r.wall_time[m] for r in results])) for m in methods},
        pairwise=tuple(pairwise),
    )


@dataclass(frozen=True)
class TraceRow:
    s: int
    exact: float
    eta: float
    cor34: float
    gershgorin: float

    def as_dict(self):
        return {"s": self.s, "exact": self.exact, "eta": self.eta, "cor34": self.cor34, "gershgorin": self.gershgorin}


@dataclass(frozen=True)
class BoundTraceReport:
    rows: Tuple[TraceRow, ...]
    selected: Tuple[int, ...]
    mu: float

    def violations(self, slack: float = BOUND_SLACK) -> List[Tuple[int, str]]:
        """(step, curve) pairs where a non-vacuous bound exceeds the exact value."""
        out = []
        for r in self.rows:
            for name in ("eta", "cor34", "gershgorin"):
                b = getattr(r, name)
                if b > 0.0 and b > r.exact + slack:
                    out.append((r.s, name))
        return out

    def eta_above_gershgorin(self) -> List[int]:
        return [r.s for r in self.rows if r.eta > r.gershgorin]

    def as_dict(self):
        return {"mu": self.mu, "selected": list(self.selected), "rows": [r.as_dict() for r in self.rows]}


def bound_trace(X: ColumnMatrix, cfg: Optional[SelectionConfig] = None) -> BoundTraceReport:
    """Greedy run (exact mode) annotated with every lower bound per step.

    The batch curve starts from a single column (``s0 = 1``, eigenvalue 1)
    and uses the largest ratio alpha realized so far.
    """
    cfg = cfg or SelectionConfig()
    if cfg.mode != "exact":
        cfg = replace(cfg, mode="exact")
    trace = greedy_select(X, cfg)
    T = list(trace.final_T)
    A = X.data
    rows = []
    alpha_max = 0.0
    mu_T = 0.0
    for i, st in enumerate(trace.steps):
        alpha_max = max(alpha_max, st.alpha)
        if i:
            cross = A[:, T[:i]].T @ A[:, T[i]]
            mu_T = max(mu_T, float(np.max(np.abs(cross))))
        params = bounds.BatchBoundParams(mu=trace.mu, alpha=alpha_max, s0=1, s1=st.s - 1, lambda_s0=1.0)
        rows.append(
            TraceRow(
                s=st.s,
                exact=float(st.lambda_exact),
                eta=st.eta,
                cor34=bounds.batch_lower_bound(params, short_circuit=True),
                gershgorin=bounds.gershgorin_lower_bound(min(mu_T, 1.0), st.s),
            )
        )
    return BoundTraceReport(tuple(rows), tuple(T), trace.mu)
