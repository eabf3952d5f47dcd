"""Reading, cleaning and aggregating per-paper citation corpora.

Two on-disk formats are supported:

* ``delimited``: UTF-8, comma-separated, header ``journal_id,paper_id,citations``.
  The header may be omitted; line numbers in errors are physical file lines.
* ``jsonl``: one JSON object per line with the same three keys.

Ids are restricted to ``[A-Za-z0-9_.:-]`` so no quoting is ever needed.
"""

from __future__ import annotations

import csv
import json
import logging
from array import array
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Iterator, TextIO

from .model import JournalProfile, PaperRecord, ValidationError

log = logging.getLogger(__name__)

FIELDS = ("journal_id", "paper_id", "citations")
FORMATS = ("delimited", "jsonl")


class IngestError(ValueError):
    """Malformed or inconsistent corpus input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _normalize_format(fmt: str) -> str:
    fmt = fmt.lower().replace("_", "-")
    if fmt in ("json-lines", "jsonl", "ndjson"):
        return "jsonl"
    if fmt in ("delimited", "csv"):
        return "delimited"
    raise IngestError(f"unknown corpus format {fmt!r}; expected one of {FORMATS}")


def _parse_count(raw: object, line: int) -> int:
    if isinstance(raw, bool):
        raise IngestError(f"citations must be an integer, got {raw!r}", line)
    if isinstance(raw, int):
        value = raw
    elif isinstance(raw, str) and raw.strip().lstrip("+-").isdigit():
        value = int(raw)
    else:
        raise IngestError(f"citations must be an integer, got {raw!r}", line)
    if value < 0:
        raise IngestError(f"negative citation count {value}", line)
    return value


def _make_record(journal_id: object, paper_id: object, citations: object, line: int) -> PaperRecord:
    count = _parse_count(citations, line)
    try:
        return PaperRecord(journal_id, paper_id, count)
    except ValidationError as exc:
        raise IngestError(str(exc), line) from None


def _iter_delimited(fh: TextIO) -> Iterator[tuple[int, PaperRecord]]:
    for lineno, row in enumerate(csv.reader(fh), start=1):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        row = [cell.strip() for cell in row]
        if lineno == 1 and tuple(row) == FIELDS:
            continue
        if len(row) != 3:
            raise IngestError(f"expected 3 comma-separated fields, got {len(row)}", lineno)
        yield lineno, _make_record(row[0], row[1], row[2], lineno)


def _iter_jsonl(fh: TextIO) -> Iterator[tuple[int, PaperRecord]]:
    for lineno, text in enumerate(fh, start=1):
        if not text.strip():
            continue
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise IngestError(f"invalid JSON: {exc.msg}", lineno) from None
        if not isinstance(obj, dict) or any(k not in obj for k in FIELDS):
            raise IngestError(f"expected an object with keys {FIELDS}", lineno)
        yield lineno, _make_record(obj["journal_id"], obj["paper_id"], obj["citations"], lineno)


def parse_corpus(
    path: str | Path, format: str = "delimited", *, allow_duplicates: bool = False
) -> Iterator[PaperRecord]:
    """Stream the records of a corpus file in input order.

    A repeated ``(journal_id, paper_id)`` key raises :class:`IngestError`
    unless ``allow_duplicates`` is set, in which case repeats are passed
    through for :func:`clean` to resolve.
    """
    fmt = _normalize_format(format)
    reader = _iter_delimited if fmt == "delimited" else _iter_jsonl
    seen: set[tuple[str, str]] = set()
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, record in reader(fh):
            if not allow_duplicates:
                if record.key in seen:
                    raise IngestError(f"duplicate key journal_id={record.journal_id} paper_id={record.paper_id}", lineno)
                seen.add(record.key)
            yield record


def write_corpus(records: Iterable[PaperRecord], path: str | Path, format: str = "delimited") -> int:
    """Write records in either ingest format and return the row count."""
    fmt = _normalize_format(format)
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if fmt == "delimited":
            fh.write(",".join(FIELDS) + "\n")
            for r in records:
                fh.write(f"{r.journal_id},{r.paper_id},{r.citations}\n")
                n += 1
        else:
            for r in records:
                fh.write(json.dumps(r.to_dict(), separators=(",", ":")) + "\n")
                n += 1
    return n


@dataclass
class CleaningLog:
    """Counters filled while a cleaned stream is consumed."""

    rows_in: int = 0
    rows_out: int = 0
    duplicates_removed: int = 0
    journals_dropped: int = 0

    def to_dict(self) -> dict[str, int]:
        return asdict(self)


def _clean_iter(
    records: Iterable[PaperRecord], drop: frozenset[str], log_: CleaningLog
) -> Iterator[PaperRecord]:
    seen: dict[tuple[str, str], int] = {}
    dropped: set[str] = set()
    for r in records:
        log_.rows_in += 1
        if r.journal_id in drop:
            if r.journal_id not in dropped:
                dropped.add(r.journal_id)
                log_.journals_dropped += 1
            continue
        prior = seen.get(r.key)
        if prior is not None:
            if prior != r.citations:
                raise IngestError(
                    f"conflicting duplicate for journal_id={r.journal_id} paper_id={r.paper_id}: "
                    f"citations {prior} vs {r.citations}"
                )
            log_.duplicates_removed += 1
            continue
        seen[r.key] = r.citations
        log_.rows_out += 1
        yield r


def clean(
    records: Iterable[PaperRecord], drop_list: Iterable[str] | None = None
) -> tuple[Iterator[PaperRecord], CleaningLog]:
    """Drop exact duplicate rows and blacklisted journals.

    Returns a lazy stream and its log; the log is complete once the stream
    is exhausted. Two rows sharing a key but not a citation count raise
    :class:`IngestError` when reached.
    """
    cleaning_log = CleaningLog()
    return _clean_iter(records, frozenset(drop_list or ()), cleaning_log), cleaning_log


def aggregate(records: Iterable[PaperRecord]) -> dict[str, JournalProfile]:
    """Group records into one profile per journal, keyed and ordered by journal id.

    Only per-journal citation counts and the current top paper are held in
    memory. The result does not depend on input order.
    """
    counts: dict[str, array] = {}
    top: dict[str, tuple[int, str]] = {}
    for r in records:
        bucket = counts.get(r.journal_id)
        if bucket is None:
            bucket = counts[r.journal_id] = array("q")
            top[r.journal_id] = (r.citations, r.paper_id)
        bucket.append(r.citations)
        best_c, best_p = top[r.journal_id]
        if r.citations > best_c or (r.citations == best_c and r.paper_id < best_p):
            top[r.journal_id] = (r.citations, r.paper_id)
    return {
        jid: JournalProfile.from_citations(jid, counts[jid], top[jid][1])
        for jid in sorted(counts)
    }


def load_profiles(
    path: str | Path, format: str = "delimited", drop_list: Iterable[str] | None = None
) -> tuple[dict[str, JournalProfile], CleaningLog]:
    """Parse, clean and aggregate a corpus file in one streaming pass."""
    stream, cleaning_log = clean(parse_corpus(path, format, allow_duplicates=True), drop_list)
    profiles = aggregate(stream)
    log.info("loaded %d journals from %s (%s)", len(profiles), path, cleaning_log)
    return profiles, cleaning_log
