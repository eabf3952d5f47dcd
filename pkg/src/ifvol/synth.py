"""Seeded synthetic citation corpora.

Random numbers come from numpy's ``PCG64`` bit generator (PCG XSL-RR
128/64, O'Neill 2014) seeded with the 64-bit ``SynthConfig.seed``. Draws
happen in a fixed order: journal sizes, per-paper category uniforms, body
values, tail uniforms. Output is therefore a pure function of the config
for a given numpy release.

Journal sizes are log-normal with location and scale fitted by least
squares to the three target size quartiles, rounded to integers and
clipped below at 1. Citations are drawn independently of journal:

* 0 with probability ``zero_fraction``;
* ``c >= tail_cutoff`` with probability ``tail_fraction``, from a continuous
  Pareto with minimum ``tail_cutoff - 0.5`` rounded to the nearest integer;
* otherwise ``1 <= c < tail_cutoff`` with weights ``decay ** (c - 1)``.
"""

from __future__ import annotations

import math
from typing import Iterator

import numpy as np

from .model import JournalProfile, PaperRecord, SynthConfig

# Upper quartile point of the standard normal distribution.
_Z75 = 0.6744897501960817
# Keeps extreme Pareto draws inside int64 for exponents close to 1.
MAX_CITATIONS = 10**9


def lognormal_params(quartiles: tuple[int, int, int]) -> tuple[float, float]:
    """Log-normal (mu, sigma) whose quartiles best match ``quartiles`` in log space."""
    logs = [math.log(q) for q in quartiles]
    mu = sum(logs) / 3
    sigma = (logs[2] - logs[0]) / (2 * _Z75)
    return mu, sigma


def _draw(config: SynthConfig) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.Generator(np.random.PCG64(config.seed))
    mu, sigma = lognormal_params(config.size_quartiles)
    sizes = np.maximum(1, np.rint(rng.lognormal(mu, sigma, config.journal_count))).astype(np.int64)
    total = int(sizes.sum())

    mix = config.low_citation_mixture
    cutoff = config.tail_cutoff
    zero_p = mix.zero_fraction
    tail_p = mix.tail_fraction if cutoff > 1 else 1.0 - zero_p

    u = rng.random(total)
    cites = np.zeros(total, dtype=np.int64)
    is_tail = u >= 1.0 - tail_p
    is_body = (u >= zero_p) & ~is_tail

    n_body = int(np.count_nonzero(is_body))
    if n_body:
        support = np.arange(1, cutoff, dtype=np.int64)
        weights = mix.decay ** (support - 1).astype(float)
        cites[is_body] = rng.choice(support, size=n_body, p=weights / weights.sum())

    n_tail = int(np.count_nonzero(is_tail))
    if n_tail:
        xmin = cutoff - 0.5
        x = xmin * (1.0 - rng.random(n_tail)) ** (-1.0 / (config.tail_exponent - 1.0))
        cites[is_tail] = np.minimum(np.floor(x + 0.5), MAX_CITATIONS).astype(np.int64)
    return sizes, cites


def _id_width(n: int) -> int:
    return max(5, len(str(n)))


def generate(config: SynthConfig) -> Iterator[PaperRecord]:
    """Stream records journal by journal, papers in id order."""
    sizes, cites = _draw(config)
    jw = _id_width(config.journal_count)
    pw = _id_width(int(sizes.max()))
    pos = 0
    for j, n in enumerate(sizes.tolist(), start=1):
        jid = f"J{j:0{jw}d}"
        for i, c in enumerate(cites[pos:pos + n].tolist(), start=1):
            yield PaperRecord(jid, f"P{i:0{pw}d}", c)
        pos += n


def generate_profiles(config: SynthConfig) -> dict[str, JournalProfile]:
    """Same corpus as :func:`generate` but aggregated straight from arrays.

    Equal to ``ingest.aggregate(generate(config))`` and much faster.
    """
    sizes, cites = _draw(config)
    jw = _id_width(config.journal_count)
    pw = _id_width(int(sizes.max()))
    profiles = {}
    pos = 0
    for j, n in enumerate(sizes.tolist(), start=1):
        block = cites[pos:pos + n]
        jid = f"J{j:0{jw}d}"
        top = f"P{int(np.argmax(block)) + 1:0{pw}d}"
        profiles[jid] = JournalProfile.from_citations(jid, block.tolist(), top)
        pos += n
    return profiles


def table1_corpus() -> dict[str, JournalProfile]:
    """Four journals with citation average 3 and sizes 50 to 50,000.

    Every paper is cited exactly 3 times.
    """
    sizes = {"A": 50, "B": 500, "C": 5000, "D": 50000}
    return {jid: JournalProfile.from_citations(jid, [3] * n) for jid, n in sizes.items()}


def add_paper(profile: JournalProfile, citations: int, paper_id: str | None = None) -> JournalProfile:
    """Profile after publishing one more paper cited ``citations`` times."""
    top = profile.top_paper_id
    if paper_id is not None and citations > profile.citations_sorted[0]:
        top = paper_id
    return JournalProfile.from_citations(
        profile.journal_id, profile.citations_sorted + (citations,), top
    )
