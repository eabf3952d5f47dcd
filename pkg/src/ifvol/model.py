"""Domain types shared across the package.

Every type is a frozen dataclass that validates its invariants on
construction and raises :class:`ValidationError` on violation. Each type
serializes to a plain JSON-compatible dict via ``to_dict`` and parses back
via ``from_dict``.
"""

from __future__ import annotations

import math
import re
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable, Mapping

ID_PATTERN = re.compile(r"^[A-Za-z0-9_.:-]+$")

# Relative tolerance for float invariants derived from exact integer sums.
REL_TOL = 1e-12


class ValidationError(ValueError):
    """A value violates a domain-type invariant."""


def _check_id(name: str, value: str) -> None:
    if not isinstance(value, str) or not ID_PATTERN.match(value):
        raise ValidationError(f"{name} must match [A-Za-z0-9_.:-]+, got {value!r}")


def _check_count(name: str, value: Any) -> None:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{name} must be an integer, got {value!r}")
    if value < 0:
        raise ValidationError(f"{name} must be non-negative, got {value}")


def _close(a: float, b: float, scale: float = 1.0) -> bool:
    return math.isclose(a, b, rel_tol=REL_TOL, abs_tol=REL_TOL * max(1.0, abs(scale)))


@dataclass(frozen=True)
class PaperRecord:
    """One citable item and the citations it received in the citation window."""

    journal_id: str
    paper_id: str
    citations: int

    def __post_init__(self) -> None:
        _check_id("journal_id", self.journal_id)
        _check_id("paper_id", self.paper_id)
        _check_count("citations", self.citations)

    @property
    def key(self) -> tuple[str, str]:
        return (self.journal_id, self.paper_id)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> PaperRecord:
        return cls(data["journal_id"], data["paper_id"], data["citations"])


@dataclass(frozen=True)
class JournalProfile:
    """Aggregated state of one journal over its biennial publication window.

    ``citations_sorted`` is non-increasing. ``top_paper_id`` names the
    top-cited paper (lowest paper id among ties) when known.
    """

    journal_id: str
    n2y: int
    total_citations: int
    citation_average: float
    citations_sorted: tuple[int, ...]
    top_paper_id: str | None = None

    def __post_init__(self) -> None:
        _check_id("journal_id", self.journal_id)
        if not isinstance(self.citations_sorted, tuple):
            object.__setattr__(self, "citations_sorted", tuple(self.citations_sorted))
        cites = self.citations_sorted
        if self.n2y < 1 or self.n2y != len(cites):
            raise ValidationError(
                f"journal {self.journal_id}: n2y={self.n2y} must equal the number of citation counts "
                f"{len(cites)} and be at least 1"
            )
        for c in cites:
            _check_count("citations", c)
        if any(a < b for a, b in zip(cites, cites[1:])):
            raise ValidationError(f"journal {self.journal_id}: citations_sorted is not non-increasing")
        if self.total_citations != sum(cites):
            raise ValidationError(f"journal {self.journal_id}: total_citations != sum of citations")
        if self.citation_average != self.total_citations / self.n2y:
            raise ValidationError(f"journal {self.journal_id}: citation_average != total/n2y")
        if self.top_paper_id is not None:
            _check_id("top_paper_id", self.top_paper_id)

    @classmethod
    def from_citations(
        cls, journal_id: str, citations: Iterable[int], top_paper_id: str | None = None
    ) -> JournalProfile:
        cites = tuple(sorted(citations, reverse=True))
        if not cites:
            raise ValidationError(f"empty journal {journal_id!r}: at least one paper is required")
        for c in cites:
            _check_count("citations", c)
        total = sum(cites)
        return cls(journal_id, len(cites), total, total / len(cites), cites, top_paper_id)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["citations_sorted"] = list(self.citations_sorted)
        return d

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> JournalProfile:
        return cls(
            data["journal_id"],
            data["n2y"],
            data["total_citations"],
            data["citation_average"],
            tuple(data["citations_sorted"]),
            data.get("top_paper_id"),
        )


@dataclass(frozen=True)
class VolatilityReport:
    """Effect of a journal's top-cited paper on its citation average.

    The journal without its top paper (size ``n2y - 1``, average ``f_star``)
    is the initial state; the full journal (average ``f``) is the final one.
    ``delta_f_r`` is ``None`` whenever ``f_star`` is zero.
    """

    journal_id: str
    c_star: int
    f: float
    f_star: float
    delta_f: float
    delta_f_r: float | None
    n2y: int
    only_cited_flag: bool
    zero_cited_flag: bool
    top_paper_id: str | None = None

    def __post_init__(self) -> None:
        _check_id("journal_id", self.journal_id)
        _check_count("c_star", self.c_star)
        if self.n2y < 1:
            raise ValidationError(f"n2y must be >= 1, got {self.n2y}")
        if self.f < 0 or self.f_star < 0:
            raise ValidationError("citation averages must be non-negative")
        if not _close(self.delta_f, self.f - self.f_star, self.f):
            raise ValidationError(
                f"delta_f={self.delta_f} inconsistent with f - f_star={self.f - self.f_star}"
            )
        if (self.delta_f_r is not None) != (self.f_star > 0):
            raise ValidationError("delta_f_r must be present exactly when f_star > 0")
        if self.delta_f_r is not None and not _close(
            self.delta_f_r, self.delta_f / self.f_star, self.delta_f / self.f_star
        ):
            raise ValidationError("delta_f_r != delta_f / f_star")
        if self.only_cited_flag and self.f_star != 0:
            raise ValidationError("only_cited_flag requires f_star == 0")
        if self.zero_cited_flag != (self.f == 0):
            raise ValidationError("zero_cited_flag must be set exactly when f == 0")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> VolatilityReport:
        return cls(**{k: data[k] for k in _fields(cls) if k in data})


@dataclass(frozen=True)
class RemovalKReport:
    """Citation average before and after removing a journal's top ``k`` papers."""

    journal_id: str
    k: int
    f: float
    f_minus_k: float
    relative_boost: float | None

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValidationError(f"k must be >= 1, got {self.k}")
        if (self.relative_boost is None) != (self.f_minus_k == 0):
            raise ValidationError("relative_boost must be absent exactly when f_minus_k == 0")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> RemovalKReport:
        return cls(**{k: data[k] for k in _fields(cls)})


@dataclass(frozen=True)
class CorpusStats:
    """Corpus-wide citation statistics.

    ``tail_counts`` maps a citation threshold to the number of papers cited
    at least that many times.
    """

    paper_count: int
    journal_count: int
    mu: float
    sigma: float
    tail_counts: dict[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        _check_count("paper_count", self.paper_count)
        _check_count("journal_count", self.journal_count)
        if self.sigma < 0:
            raise ValidationError(f"sigma must be non-negative, got {self.sigma}")
        ordered = dict(sorted((int(k), int(v)) for k, v in self.tail_counts.items()))
        object.__setattr__(self, "tail_counts", ordered)
        counts = list(ordered.values())
        if any(a < b for a, b in zip(counts, counts[1:])):
            raise ValidationError("tail_counts must be non-increasing in the threshold")
        if 0 in ordered and ordered[0] != self.paper_count:
            raise ValidationError("tail_counts[0] must equal paper_count")

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["tail_counts"] = {str(k): v for k, v in self.tail_counts.items()}
        return d

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> CorpusStats:
        return cls(
            data["paper_count"],
            data["journal_count"],
            data["mu"],
            data["sigma"],
            {int(k): v for k, v in data["tail_counts"].items()},
        )


@dataclass(frozen=True)
class SubjectStats:
    """Mean and standard deviation of the per-paper citation distribution of a subject."""

    subject_id: str
    mu_s: float
    sigma_s: float

    def __post_init__(self) -> None:
        if not (self.sigma_s > 0):
            raise ValidationError(f"subject {self.subject_id!r}: sigma_s must be positive")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> SubjectStats:
        return cls(data["subject_id"], float(data["mu_s"]), float(data["sigma_s"]))


@dataclass(frozen=True)
class LowCitationMixture:
    """Per-paper citation distribution outside the Pareto tail.

    A paper is uncited with probability ``zero_fraction`` and falls in the
    tail (``c >= tail_cutoff``) with probability ``tail_fraction``. The
    remaining mass is spread over ``1 .. tail_cutoff - 1`` with weights
    proportional to ``decay ** (c - 1)``. When the cutoff is 1 that range is
    empty and its mass goes to the tail.

    Defaults follow the tail counts of the 2017 JCR corpus: 30.77% uncited,
    5.72% cited at least 10 times.
    """

    zero_fraction: float = 0.3077
    tail_fraction: float = 0.0572
    decay: float = 0.7

    def __post_init__(self) -> None:
        if not 0 <= self.zero_fraction < 1:
            raise ValidationError("zero_fraction must lie in [0, 1)")
        if not 0 <= self.tail_fraction <= 1:
            raise ValidationError("tail_fraction must lie in [0, 1]")
        if self.zero_fraction + self.tail_fraction > 1:
            raise ValidationError("zero_fraction + tail_fraction must not exceed 1")
        if not 0 < self.decay <= 1:
            raise ValidationError("decay must lie in (0, 1]")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> LowCitationMixture:
        return cls(**data)


@dataclass(frozen=True)
class SynthConfig:
    """Parameters of the synthetic corpus generator.

    ``tail_exponent`` is the exponent of the per-paper citation density
    ``p(c) ~ c**-tail_exponent`` for ``c >= tail_cutoff``. The default 3.1
    matches the slope (about -2.1) of the survival counts between c = 10
    and c = 1000 in the 2017 JCR data.
    """

    seed: int
    journal_count: int
    size_quartiles: tuple[int, int, int] = (68, 130, 270)
    tail_exponent: float = 3.1
    tail_cutoff: int = 10
    low_citation_mixture: LowCitationMixture = field(default_factory=LowCitationMixture)

    def __post_init__(self) -> None:
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise ValidationError(f"seed must be an integer, got {self.seed!r}")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must fit in an unsigned 64-bit integer")
        if self.journal_count < 1:
            raise ValidationError(f"journal_count must be >= 1, got {self.journal_count}")
        q = tuple(int(v) for v in self.size_quartiles)
        if len(q) != 3 or not (0 < q[0] < q[1] < q[2]):
            raise ValidationError(f"size_quartiles must be three strictly increasing positive ints, got {q}")
        object.__setattr__(self, "size_quartiles", q)
        if not self.tail_exponent > 1:
            raise ValidationError(f"tail_exponent must be > 1, got {self.tail_exponent}")
        if self.tail_cutoff < 1:
            raise ValidationError(f"tail_cutoff must be >= 1, got {self.tail_cutoff}")

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["size_quartiles"] = list(self.size_quartiles)
        return d

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> SynthConfig:
        return cls(
            seed=data["seed"],
            journal_count=data["journal_count"],
            size_quartiles=tuple(data["size_quartiles"]),
            tail_exponent=data["tail_exponent"],
            tail_cutoff=data["tail_cutoff"],
            low_citation_mixture=LowCitationMixture.from_dict(data["low_citation_mixture"]),
        )


def _fields(cls: type) -> list[str]:
    return list(cls.__dataclass_fields__)
