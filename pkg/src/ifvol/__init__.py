"""Volatility of journal citation averages to single papers."""

from .corpus import (
    global_stats,
    parallel_band_check,
    rank_by_volatility,
    remove_top,
    remove_top_k,
    tail_exponent,
    threshold_table,
)
from .ingest import aggregate, clean, load_profiles, parse_corpus
from .metrics import (
    citation_average,
    median_and_summary,
    phi_index,
    relative_volatility,
    volatility_approx,
    volatility_exact,
    whatif,
)
from .model import (
    CorpusStats,
    JournalProfile,
    PaperRecord,
    SubjectStats,
    SynthConfig,
    ValidationError,
    VolatilityReport,
)

__version__ = "0.1.0"
