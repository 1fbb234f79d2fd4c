"""Correlation, significance and rater-agreement statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import betainc

from ..errors import DegenerateVarianceError, ValidationError

SCORE_MIN = 1
SCORE_MAX = 6


def pearson_or_none(x: np.ndarray, y: np.ndarray) -> Optional[float]:
    """Sample Pearson r, or None when either side has zero variance."""
    # decide constancy on the values: the mean of equal floats can be off by an ulp
    if x.min() == x.max() or y.min() == y.max():
        return None
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        return None
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def pearson_r(x: Sequence[float], y: Sequence[float]) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError("pearson_r needs two 1-D sequences of equal length")
    if len(x) < 3:
        raise ValidationError("pearson_r needs at least 3 pairs")
    r = pearson_or_none(x, y)
    if r is None:
        raise DegenerateVarianceError("constant sequence has no correlation")
    return r


@dataclass(frozen=True)
class TTestResult:
    t: float
    p_value: float
    df: int
    significant: bool
    infinite: bool = False


def t_two_tailed_p(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if math.isinf(t):
        return 0.0
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))


def t_significance(r: float, n: int, alpha: float = 0.05) -> TTestResult:
    """Test H0: rho = 0 with t = r * sqrt((n - 2) / (1 - r^2)), two-tailed."""
    if n < 3:
        raise ValidationError("t_significance needs n >= 3")
    if not -1.0 <= r <= 1.0:
        raise ValidationError(f"correlation out of range: {r}")
    df = n - 2
    if abs(r) == 1.0:
        return TTestResult(math.copysign(math.inf, r), 0.0, df, True, infinite=True)
    t = r * math.sqrt(df / (1.0 - r * r))
    p = t_two_tailed_p(t, df)
    return TTestResult(t, p, df, p < alpha)


def quadratic_weighted_kappa(
    a: Sequence[int], b: Sequence[int], min_rating: int = SCORE_MIN, max_rating: int = SCORE_MAX
) -> float:
    a = np.asarray(a, dtype=int)
    b = np.asarray(b, dtype=int)
    k = max_rating - min_rating + 1
    observed = np.zeros((k, k))
    np.add.at(observed, (a - min_rating, b - min_rating), 1.0)
    idx = np.arange(k)
    weights = (idx[:, None] - idx[None, :]) ** 2 / (k - 1) ** 2
    expected = np.outer(observed.sum(axis=1), observed.sum(axis=0)) / len(a)
    num = float((weights * observed).sum())
    den = float((weights * expected).sum())
    if den == 0.0:
        return 1.0 if num == 0.0 else math.nan
    return 1.0 - num / den


@dataclass(frozen=True)
class Agreement:
    pearson: Optional[float]
    quadratic_weighted_kappa: float


def interrater_agreement(scores_a: Sequence[float], scores_b: Sequence[float]) -> Agreement:
    """Pearson r and quadratic-weighted kappa over the six score categories.

    Kappa needs categories, so fractional scores are rounded to the nearest
    integer first. Pearson is None when a rater is constant.
    """
    a = np.asarray(scores_a, dtype=np.float64)
    b = np.asarray(scores_b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or len(a) < 2:
        raise ValidationError("need two equal-length rating sequences of length >= 2")
    for arr in (a, b):
        if arr.min() < SCORE_MIN or arr.max() > SCORE_MAX:
            raise ValidationError(f"ratings must lie in [{SCORE_MIN}, {SCORE_MAX}]")
    pearson = pearson_or_none(a, b)
    kappa = quadratic_weighted_kappa(np.rint(a).astype(int), np.rint(b).astype(int))
    return Agreement(pearson, kappa)
