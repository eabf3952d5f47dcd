"""Command-line interface.

Exit codes: 0 success, 1 usage or configuration error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path
from typing import Sequence

from . import corpus, ingest, metrics, report, synth
from .model import LowCitationMixture, SubjectStats, SynthConfig, ValidationError

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

log = logging.getLogger("ifvol")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits with 2 by default
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_range(text: str) -> range:
    parts = text.split(":")
    try:
        nums = [int(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected START:STOP[:STEP], got {text!r}") from None
    if len(nums) not in (2, 3):
        raise argparse.ArgumentTypeError(f"expected START:STOP[:STEP], got {text!r}")
    start, stop = nums[0], nums[1]
    step = nums[2] if len(nums) == 3 else 1
    return range(start, stop + 1, step)


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8", newline="\n")


def _write_json(path: Path, obj: object) -> None:
    _write(path, json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


# -- whatif ------------------------------------------------------------------

def cmd_whatif(args: argparse.Namespace) -> int:
    if args.size < 1:
        raise UsageError("--size must be >= 1")
    if args.if_ < 0 or args.cites < 0:
        raise UsageError("--if and --cites must be non-negative")
    if args.relative and args.if_ == 0:
        raise UsageError(
            "relative volatility requires a positive initial citation average (f1 > 0); got --if 0"
        )
    result = metrics.whatif(args.size, args.if_, args.cites)
    print(f"Δf = {report.significant(result.delta_f)}")
    print(f"f2 = {report.significant(result.f2)}")
    if args.relative:
        print(f"Δf_r = {report.significant(100 * result.delta_f_r)}%")
    return EXIT_OK


# -- analyze -----------------------------------------------------------------

def _emit_table(out: Path, stem: str, rows: list, style: str) -> None:
    if rows:
        rendered = report.render_table(rows, style)
        _write(out / f"{stem}.txt", rendered.text)
        _write(out / f"{stem}.jsonl", rendered.jsonl)
    else:
        _write(out / f"{stem}.txt", "(no eligible journals)\n")
        _write(out / f"{stem}.jsonl", "")


def run_analysis(
    input_path: Path,
    fmt: str,
    out: Path,
    thresholds: Sequence[float] = corpus.ABSOLUTE_THRESHOLDS,
    rel_thresholds: Sequence[float] = corpus.RELATIVE_THRESHOLDS,
    top: int = 50,
    topk: int = 4,
    boost_threshold: float = 0.5,
    drop: Sequence[str] = (),
) -> None:
    """Full pipeline: ingest, removal analysis, tables, plot data and SVGs under ``out``."""
    profiles, cleaning_log = ingest.load_profiles(input_path, fmt, drop)
    stats = corpus.global_stats(profiles)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "cleaning_log.json", cleaning_log.to_dict())
    _write_json(out / "corpus_stats.json", stats.to_dict())
    _emit_table(out, "tail_counts", list(stats.tail_counts.items()), "tail")

    reports = [corpus.remove_top(p) for p in profiles.values()]
    _write(out / "volatility_reports.jsonl",
           "".join(json.dumps(r.to_dict(), allow_nan=False) + "\n" for r in reports))

    _emit_table(out, "threshold_absolute",
                corpus.threshold_table(reports, sorted(thresholds), "absolute"), "threshold")
    _emit_table(out, "threshold_relative",
                corpus.threshold_table(reports, sorted(rel_thresholds), "relative"), "threshold")
    _emit_table(out, "top_absolute", corpus.rank_by_volatility(reports, "absolute", top), "volatility_top_n")
    _emit_table(out, "top_relative", corpus.rank_by_volatility(reports, "relative", top), "volatility_top_n")
    _emit_table(out, "topk_boost",
                corpus.topk_boost_counts(profiles, range(1, topk + 1), boost_threshold), "topk_boost")

    _write(out / "journal_summaries.jsonl", "".join(
        json.dumps({"journal_id": p.journal_id, "n2y": p.n2y, "f": p.citation_average,
                    **metrics.median_and_summary(p.citations_sorted).to_dict()}) + "\n"
        for p in profiles.values()
    ))

    for axes in report.AXES:
        data = report.export_plot_data(reports, axes)
        _write(out / f"plot_{axes}.jsonl", data.points_jsonl())
        _write_json(out / f"plot_{axes}.meta.json", data.meta())
        if data.points:
            svg = report.render_scatter_svg(data, report.SvgOptions(title=f"{data.y_label} vs {data.x_label}"))
            _write(out / f"plot_{axes}.svg", svg)
    log.info("wrote analysis of %d journals to %s", len(reports), out)


def cmd_analyze(args: argparse.Namespace) -> int:
    if args.top < 1 or args.topk < 1:
        raise UsageError("--top and --topk must be >= 1")
    rel = [t / 100 for t in args.rel_thresholds] if args.rel_thresholds else corpus.RELATIVE_THRESHOLDS
    run_analysis(
        Path(args.input), args.format, Path(args.out),
        thresholds=args.thresholds or corpus.ABSOLUTE_THRESHOLDS,
        rel_thresholds=rel, top=args.top, topk=args.topk,
        boost_threshold=args.boost_threshold,
        drop=[d for d in (args.drop or "").split(",") if d],
    )
    return EXIT_OK


# -- synth -------------------------------------------------------------------

def cmd_synth(args: argparse.Namespace) -> int:
    try:
        config = SynthConfig(
            seed=args.seed,
            journal_count=args.journals,
            size_quartiles=tuple(int(q) for q in args.quartiles),
            tail_exponent=args.tail_exponent,
            tail_cutoff=args.tail_cutoff,
            low_citation_mixture=LowCitationMixture(args.zero_fraction, args.tail_fraction, args.decay),
        )
    except ValidationError as exc:
        raise UsageError(f"invalid synthetic corpus configuration: {exc}") from None
    n = ingest.write_corpus(synth.generate(config), args.out, args.format)
    log.info("wrote %d records for %d journals to %s", n, config.journal_count, args.out)
    return EXIT_OK


# -- phi ---------------------------------------------------------------------

def _subject_lookup(path: Path):
    data = json.loads(path.read_text(encoding="utf-8"))
    try:
        subjects = {s["subject_id"]: SubjectStats.from_dict(s) for s in data["subjects"]}
        mapping = dict(data["journals"])
    except (KeyError, TypeError) as exc:
        raise ingest.IngestError(f"{path}: subject table needs 'subjects' and 'journals' entries ({exc})") from None

    def lookup(journal_id: str) -> SubjectStats:
        sid = mapping.get(journal_id)
        if sid is None:
            raise corpus.CorpusError(f"journal {journal_id} has no subject in {path}")
        if sid not in subjects:
            raise corpus.CorpusError(f"journal {journal_id} is mapped to unknown subject {sid!r}")
        return subjects[sid]

    return lookup


def cmd_phi(args: argparse.Namespace) -> int:
    if (args.mu is None) != (args.sigma is None):
        raise UsageError("--mu and --sigma must be given together")
    if args.subjects and args.mu is not None:
        raise UsageError("use either --subjects or --mu/--sigma, not both")
    if args.sigma is not None and args.sigma <= 0:
        raise UsageError("--sigma must be positive")
    profiles, _ = ingest.load_profiles(args.input, args.format)
    if args.subjects:
        subjects = _subject_lookup(Path(args.subjects))
    elif args.mu is not None:
        subjects = SubjectStats("all", args.mu, args.sigma)
    else:
        subjects = corpus.corpus_subject(corpus.global_stats(profiles))
    rows = corpus.phi_table(profiles, subjects)
    if not rows:
        raise corpus.CorpusError("empty corpus: no journals")
    rendered = report.render_table(rows, "phi")
    sys.stdout.write(rendered.text)
    if args.out:
        _write(Path(args.out), rendered.jsonl)
    return EXIT_OK


# -- surface -----------------------------------------------------------------

def cmd_surface(args: argparse.Namespace) -> int:
    try:
        grid = report.surface_grid(args.f1, args.n1, args.c, args.form)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.out:
        _write(Path(args.out), grid.jsonl())
    print(f"{grid.values.shape[0]} x {grid.values.shape[1]} grid, f1 = {args.f1:g}, form = {args.form}")
    print(f"min Δf = {report.significant(float(grid.values.min()))}")
    print(f"max Δf = {report.significant(float(grid.values.max()))}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ifvol", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("whatif", help="change in citation average from one extra paper")
    p.add_argument("--size", type=int, required=True, help="journal size N1 before the new paper")
    p.add_argument("--if", dest="if_", type=float, required=True, help="initial citation average f1")
    p.add_argument("--cites", type=int, required=True, help="citations c of the new paper")
    p.add_argument("--relative", action="store_true", help="also print the relative change")
    p.set_defaults(func=cmd_whatif)

    p = sub.add_parser("analyze", help="top-cited-paper volatility analysis of a corpus")
    p.add_argument("--input", required=True)
    p.add_argument("--format", default="delimited", choices=["delimited", "jsonl", "json-lines"])
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--thresholds", type=_float_list, help="absolute volatility thresholds")
    p.add_argument("--rel-thresholds", type=_float_list, help="relative volatility thresholds in percent")
    p.add_argument("--top", type=int, default=50, help="rows in the ranking tables")
    p.add_argument("--topk", type=int, default=4, help="largest k for the top-k boost table")
    p.add_argument("--boost-threshold", type=float, default=0.5, help="relative boost counted in the top-k table")
    p.add_argument("--drop", help="comma-separated journal ids to exclude")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("synth", help="write a seeded synthetic corpus")
    d = LowCitationMixture()
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--journals", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", default="delimited", choices=["delimited", "jsonl", "json-lines"])
    p.add_argument("--quartiles", type=_float_list, default=[68, 130, 270], help="target size quartiles")
    p.add_argument("--tail-exponent", type=float, default=3.1)
    p.add_argument("--tail-cutoff", type=int, default=10)
    p.add_argument("--zero-fraction", type=float, default=d.zero_fraction)
    p.add_argument("--tail-fraction", type=float, default=d.tail_fraction)
    p.add_argument("--decay", type=float, default=d.decay)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("phi", help="standardized citation average per journal")
    p.add_argument("--input", required=True)
    p.add_argument("--format", default="delimited", choices=["delimited", "jsonl", "json-lines"])
    p.add_argument("--subjects", help="JSON subject table")
    p.add_argument("--mu", type=float, help="single-subject mean")
    p.add_argument("--sigma", type=float, help="single-subject standard deviation")
    p.add_argument("--out", help="also write rows as JSON lines here")
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("surface", help="volatility grid over journal size and citation count")
    p.add_argument("--f1", type=float, default=10.0)
    p.add_argument("--n1", type=_int_range, default=range(10, 501), help="START:STOP[:STEP]")
    p.add_argument("--c", type=_int_range, default=range(0, 501), help="START:STOP[:STEP]")
    p.add_argument("--form", choices=["exact", "approx"], default="exact")
    p.add_argument("--out", help="write the grid as JSON lines here")
    p.set_defaults(func=cmd_surface)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, or a usage error already reported
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except UsageError as exc:
        print(f"ifvol: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ingest.IngestError, corpus.CorpusError, ValidationError, OSError) as exc:
        print(f"ifvol: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
