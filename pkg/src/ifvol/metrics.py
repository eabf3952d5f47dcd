"""Closed-form volatility indices and order statistics.

All functions are pure. The volatility formulas accept any real numbers,
so passing :class:`fractions.Fraction` arguments gives exact rational
results; plain ints and floats give floats.

Notation: a journal starts with ``n1`` papers, ``c1`` citations and
citation average ``f1 = c1 / n1``; one extra paper cited ``c`` times is
then added.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from numbers import Real
from typing import Sequence

import numpy as np

from .model import SubjectStats, ValidationError

# Global per-paper citation mean and standard deviation of the 2017 JCR
# corpus (3,088,511 papers), used when no subject table is supplied.
JCR2017_MU = 2.92
JCR2017_SIGMA = 8.12


def _require_size(n1: int) -> None:
    if n1 < 1:
        raise ValidationError(f"journal size must be >= 1, got {n1}")


def citation_average(citations: Sequence[int]) -> float:
    if len(citations) == 0:
        raise ValidationError("empty journal")
    return sum(citations) / len(citations)


def volatility_exact(c: Real, f1: Real, n1: int) -> Real:
    """Change in the citation average when a paper cited ``c`` times is added.

    Equals ``(c1 + c) / (n1 + 1) - c1 / n1``, simplified to
    ``(c - f1) / (n1 + 1)``.
    """
    _require_size(n1)
    return (c - f1) / (n1 + 1)


def volatility_approx(c: Real, f1: Real, n1: int) -> Real:
    """Large-journal form ``(c - f1) / n1``; overshoots the exact value by ``(n1 + 1) / n1``."""
    _require_size(n1)
    return (c - f1) / n1


def relative_volatility(c: Real, f1: Real, n1: int) -> Real:
    _require_size(n1)
    if f1 == 0:
        raise ValidationError("relative volatility undefined for zero initial average")
    return (c - f1) / (f1 * (n1 + 1))


def relative_volatility_high_c(c: Real, c1_total: int) -> Real:
    """``c / c1``: the relative change for a paper cited far above the journal average."""
    if c1_total < 1:
        raise ValidationError("total citations must be >= 1")
    return c / c1_total


def benefit_case_high(c: Real, n1: int) -> Real:
    """``c / n1``: absolute gain from a paper cited far above the journal average."""
    _require_size(n1)
    return c / n1


def penalty_case_low(f1: Real, n1: int) -> Real:
    """``-f1 / n1``: absolute loss from a paper cited far below the journal average."""
    _require_size(n1)
    if f1 < 0:
        raise ValidationError("citation average must be non-negative")
    return -f1 / n1


def phi_index(f: float, n2y: int, subject: SubjectStats) -> float:
    """Size-standardized citation average ``(f - mu_s) / (sigma_s / sqrt(n2y))``."""
    _require_size(n2y)
    if not subject.sigma_s > 0:
        raise ValidationError("sigma_s must be positive")
    return (f - subject.mu_s) * math.sqrt(n2y) / subject.sigma_s


def global_subject() -> SubjectStats:
    return SubjectStats("all", JCR2017_MU, JCR2017_SIGMA)


@dataclass(frozen=True)
class WhatIf:
    """Outcome of adding one paper cited ``c`` times to a journal."""

    n1: int
    f1: float
    c: int
    f2: float
    delta_f: float
    delta_f_r: float | None
    label: str = ""

    @property
    def c1(self) -> float:
        return self.f1 * self.n1


def whatif(n1: int, f1: float, c: int, label: str = "") -> WhatIf:
    if c < 0 or f1 < 0:
        raise ValidationError("citation counts and averages must be non-negative")
    delta = volatility_exact(c, f1, n1)
    rel = relative_volatility(c, f1, n1) if f1 > 0 else None
    return WhatIf(n1, f1, c, f1 + delta, delta, rel, label)


@dataclass(frozen=True)
class FiveNumberSummary:
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    iqr: float
    lower_fence: float
    upper_fence: float
    outliers: int

    def to_dict(self) -> dict[str, float]:
        return dict(self.__dict__)


def median_and_summary(citations: Sequence[int]) -> FiveNumberSummary:
    """Five-number summary with Tukey fences at 1.5 IQR.

    Quantiles interpolate linearly between closest ranks at
    ``h = (n - 1) p + 1`` (numpy's ``linear`` method).
    """
    if len(citations) == 0:
        raise ValidationError("empty journal")
    arr = np.asarray(citations, dtype=float)
    lo, q1, med, q3, hi = np.quantile(arr, [0.0, 0.25, 0.5, 0.75, 1.0], method="linear")
    iqr = q3 - q1
    lower, upper = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    outliers = int(np.count_nonzero((arr < lower) | (arr > upper)))
    return FiveNumberSummary(
        float(lo), float(q1), float(med), float(q3), float(hi),
        float(iqr), float(lower), float(upper), outliers,
    )
