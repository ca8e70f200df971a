"""Lower bounds on the smallest nonzero eigenvalue after appending columns.

All functions are pure and scalar. ``lam`` is always the smallest nonzero
eigenvalue of the current outer-product matrix ``X_T X_T^t`` (equivalently
the smallest eigenvalue of the Gram ``X_T^t X_T``), which is at most 1 for
unit columns.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from colsel.errors import LambdaOutOfRangeError, ParamOutOfRangeError

# eigenvalues of unit-column Grams can exceed 1 by rounding
LAMBDA_SLACK = 1e-12
G_MONOTONE_LIMIT = 0.75


def _check_lambda(lam) -> float:
    lam = float(lam)
    if not (math.isfinite(lam) and 0.0 < lam <= 1.0 + LAMBDA_SLACK):
        raise LambdaOutOfRangeError(f"lambda must lie in (0, 1], got {lam!r}", value=lam)
    return min(lam, 1.0)


def _check_gram_norm(w) -> float:
    w = float(w)
    if not (math.isfinite(w) and w >= 0.0):
        raise ParamOutOfRangeError(f"gram_norm must be finite and >= 0, got {w!r}", value=w)
    return w


def _decrement(lam: float, w_sq: float) -> float:
    """``min(w, w^2 / (1 - lam))``; the second branch is dropped at lam = 1."""
    first = math.sqrt(w_sq)
    if lam >= 1.0:
        return first
    return min(first, w_sq / (1.0 - lam))


def bound_append_sharp(lambda_prev, gram_norm) -> float:
    """Smaller root of ``x^2 - (1 + lam) x + (lam - w^2)``, clamped at 0.

    Written as ``2 (lam - w^2) / (1 + lam + sqrt((1 - lam)^2 + 4 w^2))`` to
    avoid cancellation.
    """
    lam = _check_lambda(lambda_prev)
    w = _check_gram_norm(gram_norm)
    disc = math.sqrt((1.0 - lam) ** 2 + 4.0 * w * w)
    return max(0.0, 2.0 * (lam - w * w) / (1.0 + lam + disc))


@dataclass(frozen=True)
class AppendBound:
    lambda_prev: float
    gram_norm: float
    sharp_bound: float
    minform_bound: float
    vacuous: bool

    def as_dict(self):
        return {
            "lambda_prev": self.lambda_prev,
            "gram_norm": self.gram_norm,
            "sharp_bound": self.sharp_bound,
            "minform_bound": self.minform_bound,
            "vacuous": self.vacuous,
        }


def bound_append_minform(lambda_prev, gram_norm) -> AppendBound:
    lam = _check_lambda(lambda_prev)
    w = _check_gram_norm(gram_norm)
    minform = max(0.0, lam - _decrement(lam, w * w))
    return AppendBound(
        lambda_prev=lam,
        gram_norm=w,
        sharp_bound=bound_append_sharp(lam, w),
        minform_bound=minform,
        vacuous=minform <= 0.0,
    )


@dataclass(frozen=True)
class BatchBoundParams:
    """Coherence ``mu``, realized ratio ``alpha``, ``s0`` selected columns with
    smallest eigenvalue ``lambda_s0``, and ``s1`` further columns to append."""

    mu: float
    alpha: float
    s0: int
    s1: int
    lambda_s0: float

    def __post_init__(self):
        for name in ("mu", "alpha"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and 0.0 <= v <= 1.0):
                raise ParamOutOfRangeError(f"{name} must lie in [0, 1], got {v!r}", param=name)
            object.__setattr__(self, name, v)
        if int(self.s0) != self.s0 or self.s0 < 1:
            raise ParamOutOfRangeError(f"s0 must be an integer >= 1, got {self.s0!r}", param="s0")
        if int(self.s1) != self.s1 or self.s1 < 0:
            raise ParamOutOfRangeError(f"s1 must be an integer >= 0, got {self.s1!r}", param="s1")
        object.__setattr__(self, "s0", int(self.s0))
        object.__setattr__(self, "s1", int(self.s1))
        try:
            lam = _check_lambda(self.lambda_s0)
        except LambdaOutOfRangeError as exc:
            raise ParamOutOfRangeError(str(exc), param="lambda_s0") from None
        object.__setattr__(self, "lambda_s0", lam)


def bound_append_alpha(params: BatchBoundParams) -> float:
    """One appended column with ``||X_T^t X_j||^2 <= alpha s0 mu^2``.

    ``params.s1`` is ignored.
    """
    w = math.sqrt(params.alpha * params.s0 * params.mu**2)
    return bound_append_minform(params.lambda_s0, w).minform_bound


def eps_min_branches(params: BatchBoundParams):
    """The two closed-form caps on total loss after ``s1`` appends.

    Sums run over the printed index ranges even when ``s1 = 0``. The second
    branch is infinite at ``lambda_s0 = 1``.
    """
    a_mu2 = params.alpha * params.mu**2
    s0, s1, lam = params.s0, params.s1, params.lambda_s0
    first = math.sqrt(a_mu2) * sum(math.sqrt(i) for i in range(s0, s0 + s1 + 1))
    if lam >= 1.0:
        second = math.inf
    else:
        gap = 1.0 - lam
        second = a_mu2 * s0 / gap + (2.0 * gap / s0) * sum(
            i / (i - 1) for i in range(s0 + 1, s0 + s1 + 1)
        )
    return first, second


def eps_min(params: BatchBoundParams, short_circuit: bool = False) -> float:
    """Minimum of :func:`eps_min_branches`.

    With ``short_circuit`` set, ``s1 = 0`` returns 0 (nothing appended,
    nothing lost) instead of the literal single-term sum.
    """
    if short_circuit and params.s1 == 0:
        return 0.0
    return min(eps_min_branches(params))


def batch_lower_bound(params: BatchBoundParams, short_circuit: bool = False) -> float:
    """``lambda_s0 - eps_min``, clamped at 0."""
    return max(0.0, params.lambda_s0 - eps_min(params, short_circuit))


def g_increasing_condition(alpha, mu, size_next, lam) -> bool:
    """Whether ``alpha mu^2 (s0+s+1) / (1 - lam)^2 < 3/4``.

    ``size_next`` is ``s0 + s + 1``; ``lam >= 1`` counts as failing.
    """
    if lam >= 1.0:
        return False
    return alpha * mu * mu * size_next / (1.0 - lam) ** 2 < G_MONOTONE_LIMIT


@dataclass(frozen=True)
class SuccessiveBoundTrace:
    lambda_min_seq: np.ndarray
    per_step_decrement: np.ndarray
    eps_min_closed: float
    eps_min_first: float
    eps_min_second: float
    monotonicity_ok: np.ndarray
    truncated: bool = False

    @property
    def total_decrement(self) -> float:
        return float(self.per_step_decrement.sum())

    @property
    def final(self) -> float:
        return float(self.lambda_min_seq[-1])

    def as_dict(self):
        second = self.eps_min_second
        return {
            "lambda_min_seq": self.lambda_min_seq.tolist(),
            "per_step_decrement": self.per_step_decrement.tolist(),
            "eps_min_closed": self.eps_min_closed,
            "eps_min_first": self.eps_min_first,
            "eps_min_second": second if math.isfinite(second) else None,
            "monotonicity_ok": [bool(b) for b in self.monotonicity_ok],
            "truncated": self.truncated,
        }


def bound_successive_recursion(
    params: BatchBoundParams, alphas: Optional[Union[Sequence[float], np.ndarray]] = None
) -> SuccessiveBoundTrace:
    """Iterate the one-column bound ``s1`` times from ``lambda_s0``.

    Each step uses the running lower bound in place of the unknown true
    eigenvalue. ``alphas`` optionally gives a realized ratio per step
    (length ``s1``); otherwise ``params.alpha`` is used throughout. Once the
    running bound reaches 0 the remaining entries stay 0.
    """
    s0, s1, mu = params.s0, params.s1, params.mu
    if alphas is None:
        alphas = np.full(s1, params.alpha)
    else:
        alphas = np.asarray(alphas, dtype=np.float64)
        if alphas.shape != (s1,) or np.any(alphas < 0) or np.any(alphas > 1 + 1e-12):
            raise ParamOutOfRangeError("alphas must be s1 values in [0, 1]", param="alphas")

    lam_seq = np.zeros(s1 + 1)
    dec = np.zeros(s1)
    mono = np.zeros(s1, dtype=bool)
    lam_seq[0] = params.lambda_s0
    truncated = False
    for s in range(s1):
        cur = lam_seq[s]
        size = s0 + s
        a = float(alphas[s])
        if truncated:
            continue
        mono[s] = g_increasing_condition(a, mu, size + 1, cur)
        step = _decrement(cur, a * mu * mu * size)
        if cur - step <= 0.0:
            dec[s] = cur
            lam_seq[s + 1] = 0.0
            truncated = True
        else:
            dec[s] = step
            lam_seq[s + 1] = cur - step

    first, second = eps_min_branches(params)
    return SuccessiveBoundTrace(
        lambda_min_seq=lam_seq,
        per_step_decrement=dec,
        eps_min_closed=min(first, second),
        eps_min_first=first,
        eps_min_second=second,
        monotonicity_ok=mono,
        truncated=truncated,
    )


def gershgorin_lower_bound(mu_T, s) -> float:
    """Disc bound ``max(0, 1 - (s - 1) mu_T)`` on the smallest Gram eigenvalue."""
    mu_T = float(mu_T)
    if not (math.isfinite(mu_T) and 0.0 <= mu_T <= 1.0):
        raise ParamOutOfRangeError(f"mu_T must lie in [0, 1], got {mu_T!r}", param="mu_T")
    if int(s) != s or s < 1:
        raise ParamOutOfRangeError(f"s must be an integer >= 1, got {s!r}", param="s")
    return max(0.0, 1.0 - (int(s) - 1) * mu_T)
