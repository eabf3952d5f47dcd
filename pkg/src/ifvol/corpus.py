"""Corpus-level volatility analyses.

The central operation is :func:`remove_top`, which measures how much a
journal's citation average owes to its single most cited paper. Everything
else (threshold tables, rankings, top-k boosts, global statistics, tail
fits, the log-log band check) is built from it or from the raw profiles.
"""

from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .metrics import phi_index
from .model import (
    CorpusStats,
    JournalProfile,
    RemovalKReport,
    SubjectStats,
    ValidationError,
    VolatilityReport,
)

# Citation thresholds of the tail-count table (papers cited at least c_t times).
TAIL_THRESHOLDS = (0, 1, 2, 5, 10, 20, 30, 40, 50, 100, 200, 300, 400, 500,
                   1000, 1500, 2000, 2500, 3000, 4000)
ABSOLUTE_THRESHOLDS = (0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 10.0, 50.0)
RELATIVE_THRESHOLDS = (0.10, 0.20, 0.25, 0.30, 0.40, 0.50, 0.60, 0.70, 0.75, 0.80,
                       0.90, 1.00, 2.00, 3.00, 4.00)
MODES = ("absolute", "relative")


class CorpusError(ValueError):
    """A corpus-level analysis cannot be carried out on the given data."""


def _profiles(profiles: Iterable[JournalProfile] | Mapping[str, JournalProfile]) -> list[JournalProfile]:
    if isinstance(profiles, Mapping):
        return list(profiles.values())
    return list(profiles)


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def remove_top_exact(profile: JournalProfile) -> tuple[Fraction, Fraction, Fraction, Fraction | None]:
    """Exact ``(f, f_star, delta_f, delta_f_r)`` for removal of the top paper."""
    n, total = profile.n2y, profile.total_citations
    c_star = profile.citations_sorted[0]
    f = Fraction(total, n)
    f_star = Fraction(total - c_star, n - 1) if n > 1 else Fraction(0)
    delta = f - f_star
    return f, f_star, delta, (delta / f_star if f_star > 0 else None)


def remove_top(profile: JournalProfile) -> VolatilityReport:
    """Volatility of a journal's citation average to its top-cited paper.

    The journal without that paper (size ``n2y - 1``) is the initial state.
    A single-paper journal has ``f_star = 0``. Values are computed exactly
    and rounded once to float.
    """
    f, f_star, delta, rel = remove_top_exact(profile)
    c_star = profile.citations_sorted[0]
    return VolatilityReport(
        journal_id=profile.journal_id,
        c_star=c_star,
        f=float(f),
        f_star=float(f_star),
        delta_f=float(delta),
        delta_f_r=None if rel is None else float(rel),
        n2y=profile.n2y,
        only_cited_flag=f_star == 0 and c_star > 0,
        zero_cited_flag=profile.total_citations == 0,
        top_paper_id=profile.top_paper_id,
    )


def remove_top_k(profile: JournalProfile, k: int) -> RemovalKReport:
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    if k >= profile.n2y:
        raise ValidationError(
            f"cannot remove all papers: k={k} but journal {profile.journal_id} has {profile.n2y}"
        )
    rest = profile.citations_sorted[k:]
    f = Fraction(profile.total_citations, profile.n2y)
    f_minus = Fraction(sum(rest), len(rest))
    boost = (f - f_minus) / f_minus if f_minus > 0 else None
    return RemovalKReport(
        profile.journal_id, k, float(f), float(f_minus), None if boost is None else float(boost)
    )


@dataclass(frozen=True)
class ThresholdRow:
    threshold: float
    count: int
    fraction: float
    mode: str = "absolute"

    def to_dict(self) -> dict:
        return asdict(self)


def threshold_table(
    reports: Sequence[VolatilityReport], thresholds: Sequence[float], mode: str = "absolute"
) -> list[ThresholdRow]:
    """Count journals whose volatility is strictly greater than each threshold.

    ``fraction`` is relative to all reports, including those without a
    relative volatility.
    """
    _check_mode(mode)
    if any(b < a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError("thresholds must be sorted ascending")
    if mode == "absolute":
        values = np.array([r.delta_f for r in reports], dtype=float)
    else:
        values = np.array([r.delta_f_r for r in reports if r.delta_f_r is not None], dtype=float)
    total = len(reports)
    rows = []
    for t in thresholds:
        count = int(np.count_nonzero(values > t))
        rows.append(ThresholdRow(float(t), count, count / total if total else 0.0, mode))
    return rows


@dataclass(frozen=True)
class RankRow:
    rank: int
    journal_id: str
    delta_f: float
    c_star: int
    delta_f_r: float | None
    f: float
    f_star: float
    n2y: int

    def to_dict(self) -> dict:
        return asdict(self)


def rank_by_volatility(
    reports: Iterable[VolatilityReport], key: str = "absolute", top_n: int = 50
) -> list[RankRow]:
    """Top ``top_n`` journals by descending volatility; ties go to the lower journal id."""
    _check_mode(key)
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    if key == "absolute":
        eligible = [(r.delta_f, r) for r in reports]
    else:
        eligible = [(r.delta_f_r, r) for r in reports if r.delta_f_r is not None]
    eligible.sort(key=lambda item: (-item[0], item[1].journal_id))
    return [
        RankRow(i, r.journal_id, r.delta_f, r.c_star, r.delta_f_r, r.f, r.f_star, r.n2y)
        for i, (_, r) in enumerate(eligible[:top_n], start=1)
    ]


@dataclass(frozen=True)
class BoostRow:
    k: int
    count: int
    fraction: float
    eligible: int

    def to_dict(self) -> dict:
        return asdict(self)


def topk_boost_counts(
    profiles: Iterable[JournalProfile] | Mapping[str, JournalProfile],
    ks: Sequence[int],
    threshold: float = 0.5,
) -> list[BoostRow]:
    """For each ``k``, count journals whose top ``k`` papers lift the average by more than ``threshold``.

    Journals with ``n2y <= k`` cannot lose ``k`` papers and are not counted;
    ``fraction`` is relative to all journals.
    """
    plist = _profiles(profiles)
    rows = []
    for k in ks:
        count = eligible = 0
        for p in plist:
            if p.n2y <= k:
                continue
            eligible += 1
            boost = remove_top_k(p, k).relative_boost
            if boost is not None and boost > threshold:
                count += 1
        rows.append(BoostRow(k, count, count / len(plist) if plist else 0.0, eligible))
    return rows


def global_stats(
    profiles: Iterable[JournalProfile] | Mapping[str, JournalProfile],
    thresholds: Sequence[int] = TAIL_THRESHOLDS,
) -> CorpusStats:
    """Mean, population standard deviation and tail counts over every paper."""
    plist = _profiles(profiles)
    hist: Counter[int] = Counter()
    for p in plist:
        hist.update(p.citations_sorted)
    n = sum(hist.values())
    if n == 0:
        raise CorpusError("empty corpus: no papers")
    s1 = sum(c * m for c, m in hist.items())
    s2 = sum(c * c * m for c, m in hist.items())
    # Exact integer variance numerator: n * sum(c^2) - (sum c)^2.
    var = Fraction(n * s2 - s1 * s1, n * n)
    tails = {t: sum(m for c, m in hist.items() if c >= t) for t in thresholds}
    return CorpusStats(n, len(plist), s1 / n, math.sqrt(var), tails)


@dataclass(frozen=True)
class TailFit:
    alpha: float
    n_tail: int
    cutoff: int


def hill_estimate(citations: Iterable[int], cutoff: int, min_samples: int = 10) -> TailFit:
    """Discrete power-law exponent by maximum likelihood.

    ``alpha = 1 + n / sum(ln(c_i / (cutoff - 0.5)))`` over ``c_i >= cutoff``;
    the half-unit shift approximates the discrete likelihood.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    arr = np.asarray(list(citations) if not isinstance(citations, np.ndarray) else citations)
    tail = arr[arr >= cutoff].astype(float)
    if tail.size < min_samples:
        raise CorpusError(
            f"too few tail samples: {tail.size} papers with citations >= {cutoff}, need {min_samples}"
        )
    total = float(np.sum(np.log(tail / (cutoff - 0.5))))
    return TailFit(1.0 + tail.size / total, int(tail.size), cutoff)


def tail_exponent(
    profiles: Iterable[JournalProfile] | Mapping[str, JournalProfile], cutoff: int = 10
) -> TailFit:
    plist = _profiles(profiles)
    cites = np.fromiter((c for p in plist for c in p.citations_sorted if c >= cutoff), dtype=np.int64)
    return hill_estimate(cites, cutoff)


@dataclass(frozen=True)
class BandFit:
    c_star: int
    slope: float
    intercept: float
    count: int


def parallel_band_check(
    reports: Iterable[VolatilityReport],
    c_star_values: Sequence[int] | None = None,
    f_star_cap: float = math.inf,
    *,
    f_star_ratio: float | None = None,
    min_group: int = 3,
) -> dict[int, BandFit]:
    """Least-squares slope of ``log(delta_f)`` against ``log(n2y)`` per top-citation group.

    A journal joins the group of its ``c_star`` when ``f_star <= f_star_cap``
    and, if ``f_star_ratio`` is given, ``f_star <= f_star_ratio * c_star``.
    Since ``delta_f = (c_star - f_star) / n2y`` exactly, groups with
    ``c_star >> f_star`` should have slope close to -1. With
    ``c_star_values=None`` every group present is fitted. Groups with fewer
    than ``min_group`` members or a single distinct size are skipped with a
    warning.
    """
    groups: dict[int, list[VolatilityReport]] = {}
    for r in reports:
        if r.delta_f <= 0 or r.f_star > f_star_cap:
            continue
        if f_star_ratio is not None and r.f_star > f_star_ratio * r.c_star:
            continue
        groups.setdefault(r.c_star, []).append(r)
    wanted = sorted(groups) if c_star_values is None else list(c_star_values)
    fits: dict[int, BandFit] = {}
    for c in wanted:
        members = groups.get(c, [])
        if len(members) < min_group:
            warnings.warn(f"c*={c}: {len(members)} qualifying journals, need {min_group}; skipped")
            continue
        x = np.log([r.n2y for r in members])
        y = np.log([r.delta_f for r in members])
        if np.ptp(x) == 0:
            warnings.warn(f"c*={c}: all journals have the same size; skipped")
            continue
        slope, intercept = np.polyfit(x, y, 1)
        fits[c] = BandFit(c, float(slope), float(intercept), len(members))
    return fits


@dataclass(frozen=True)
class PhiRow:
    rank: int
    journal_id: str
    f: float
    n2y: int
    phi: float
    subject_id: str

    def to_dict(self) -> dict:
        return asdict(self)


def phi_table(
    profiles: Iterable[JournalProfile] | Mapping[str, JournalProfile],
    subjects: SubjectStats | Callable[[str], SubjectStats],
) -> list[PhiRow]:
    """Standardized citation average per journal, highest first (ties by journal id).

    ``subjects`` is either one subject shared by every journal or a lookup
    from journal id to that journal's subject.
    """
    lookup = (lambda _jid: subjects) if isinstance(subjects, SubjectStats) else subjects
    scored = []
    for p in _profiles(profiles):
        subject = lookup(p.journal_id)
        scored.append((phi_index(p.citation_average, p.n2y, subject), p, subject.subject_id))
    scored.sort(key=lambda item: (-item[0], item[1].journal_id))
    return [
        PhiRow(i, p.journal_id, p.citation_average, p.n2y, phi, sid)
        for i, (phi, p, sid) in enumerate(scored, start=1)
    ]


def corpus_subject(stats: CorpusStats, subject_id: str = "all") -> SubjectStats:
    """Treat the whole corpus as a single subject."""
    if stats.sigma <= 0:
        raise CorpusError("corpus standard deviation is zero; the standardized average is undefined")
    return SubjectStats(subject_id, stats.mu, stats.sigma)
