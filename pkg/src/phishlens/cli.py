"""Command-line front end: ``phishlens {extract,rank,select,report,correlate}``."""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path

from . import plotting, reports
from .content import CONTENT_FEATURES, HtmlDocument, RtConfig, extract_content_features
from .dataset import (
    LABEL_COLUMN,
    DatasetError,
    UnknownFeature,
    discretize,
    load_csv,
    split_dataset,
)
from .models import PROTOCOLS, SELECT_ON_TRAIN, TrainingError, run_experiment_grid
from .selection import CHI_SQUARED, IG, combine_top_n, correlation_matrix, rank_features
from .urls import (
    DEFAULT_PCT_THRESHOLDS,
    DEFAULT_URL_LENGTH_THRESHOLDS,
    LEXICAL_FEATURES,
    SENSITIVE_WORDS,
    InvalidThresholds,
    MalformedUrl,
    apply_rt_thresholds,
    extract_lexical_features,
    load_brand_list,
    parse_url,
    read_word_list,
)

log = logging.getLogger("phishlens")

EXIT_INPUT = 2
EXIT_TRAINING = 3

_LOG_LEVELS = {"quiet": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


class UsageError(Exception):
    pass


class Outputs:
    """Stage files as temporaries and rename them into place only on success."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.staged: list[tuple[Path, Path]] = []

    def path(self, name: str) -> Path:
        final = self.out_dir / name
        tmp = self.out_dir / f".{name}.partial"
        self.staged.append((tmp, final))
        return tmp

    def write_text(self, name: str, text: str) -> None:
        self.path(name).write_text(text, encoding="utf-8", newline="\n")

    def __enter__(self):
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            for tmp, final in self.staged:
                os.replace(tmp, final)
        else:
            for tmp, _ in self.staged:
                tmp.unlink(missing_ok=True)
        return False


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected LO,HI, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data", type=Path, help="feature CSV (header row, CLASS_LABEL column)")
    common.add_argument("--urls", type=Path, help="URL manifest CSV: record_id,url[,label]")
    common.add_argument("--html-dir", type=Path, help="directory of <record_id>.html pages")
    common.add_argument("--brands", type=Path, help="brand list, one token per line")
    common.add_argument("--sensitive-words", type=Path, help="override the sensitive word list")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--split", type=float, default=0.7, help="training fraction")
    common.add_argument("--bins", type=int, default=10, help="equal-frequency bins for scoring")
    common.add_argument("--n", type=_int_list, default=[10, 15, 20], help="top-n values, e.g. 10,15,20")
    common.add_argument("--protocol", choices=PROTOCOLS, default=SELECT_ON_TRAIN)
    common.add_argument("--invert-labels", action="store_true", help="dataset uses 1 = phishing")
    common.add_argument("--rt-pct", type=_pair, default=DEFAULT_PCT_THRESHOLDS, metavar="LO,HI")
    common.add_argument("--rt-url-length", type=_pair, default=DEFAULT_URL_LENGTH_THRESHOLDS, metavar="LO,HI")
    common.add_argument("--features", type=lambda s: [f for f in s.split(",") if f], help="feature names for correlate")
    common.add_argument("--out", type=Path, default=Path("phishlens-out"))

    parser = argparse.ArgumentParser(prog="phishlens", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("extract", "extract lexical (and content) features from a URL manifest"),
        ("rank", "rank features by information gain and chi-squared"),
        ("select", "build combined top-n feature lists"),
        ("report", "run the classifier grid and write the correlation matrix"),
        ("correlate", "write the Pearson correlation matrix of selected features"),
    ):
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


# --- commands -------------------------------------------------------------


def _read_manifest(path: Path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if not reader.fieldnames or not {"record_id", "url"} <= set(reader.fieldnames):
            raise UsageError(f"{path}: manifest needs record_id and url columns")
        return list(reader)


def _format(v) -> str:
    return repr(v) if isinstance(v, float) and not v.is_integer() else str(int(v))


def cmd_extract(args) -> int:
    if args.urls is None:
        raise UsageError("extract needs --urls")
    if args.html_dir is not None and not args.html_dir.is_dir():
        raise UsageError(f"--html-dir {args.html_dir} is not a directory")
    manifest = _read_manifest(args.urls)
    brands = load_brand_list(args.brands)
    words = read_word_list(args.sensitive_words) if args.sensitive_words else SENSITIVE_WORDS
    rt = RtConfig(args.rt_pct, args.rt_pct)
    # fail fast on bad thresholds instead of once per record
    apply_rt_thresholds(0, *args.rt_pct)
    apply_rt_thresholds(0, *args.rt_url_length)

    with_content = args.html_dir is not None
    with_label = "label" in manifest[0] if manifest else False
    header = ["id", *LEXICAL_FEATURES] + (list(CONTENT_FEATURES) if with_content else [])
    if with_label:
        header.append(LABEL_COLUMN)

    rows, skipped = [], 0
    for rec in manifest:
        rid, url = rec["record_id"], rec["url"]
        try:
            parts = parse_url(url)
        except MalformedUrl as exc:
            skipped += 1
            log.warning("skipping record %s: %s", rid, exc)
            continue
        feats = extract_lexical_features(parts, url, brands, words, args.rt_url_length).as_dict()
        if with_content:
            page = args.html_dir / f"{rid}.html"
            markup = b""
            if page.is_file():
                markup = page.read_bytes()
            else:
                log.warning("record %s: no HTML page at %s, content features take empty-page values", rid, page)
            feats.update(extract_content_features(HtmlDocument(parts, markup), rt_config=rt).as_dict())
        row = [rid] + [_format(feats[h]) for h in header[1:len(header) - with_label]]
        if with_label:
            label = rec["label"].strip()
            if label not in ("0", "1"):
                skipped += 1
                log.warning("skipping record %s: label %r not in {0, 1}", rid, label)
                continue
            row.append(str(1 - int(label)) if args.invert_labels else label)
        rows.append(row)

    with Outputs(args.out) as out:
        with open(out.path("features.csv"), "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    if skipped:
        print(f"phishlens: skipped {skipped} record(s)", file=sys.stderr)
    log.info("wrote %d rows to %s", len(rows), args.out / "features.csv")
    return 0


def _load(args):
    if args.data is None:
        raise UsageError(f"{args.command} needs --data")
    d = load_csv(args.data, invert_labels=args.invert_labels)
    phish, legit = d.class_counts()
    log.info("loaded %d rows (%d phishing, %d legitimate), %d features", len(d), phish, legit, len(d.schema))
    for n in args.n:
        if not 1 <= n <= len(d.schema):
            raise UsageError(f"--n value {n} outside [1, {len(d.schema)}]")
    return d


def _ranking_view(d, args):
    if args.protocol == SELECT_ON_TRAIN:
        train, _ = split_dataset(d, args.split, args.seed)
        return train
    return d


def _rankings(d, args):
    dd = discretize(_ranking_view(d, args), args.bins)
    return rank_features(dd, IG), rank_features(dd, CHI_SQUARED)


def cmd_rank(args) -> int:
    d = _load(args)
    ig, chi = _rankings(d, args)
    with Outputs(args.out) as out:
        out.write_text("ranking_ig.csv", reports.ranking_csv(ig))
        out.write_text("ranking_chi2.csv", reports.ranking_csv(chi))
    sys.stdout.write(reports.ranking_table(chi, 20))
    sys.stdout.write("\n")
    sys.stdout.write(reports.ranking_table(ig, 20))
    return 0


def cmd_select(args) -> int:
    d = _load(args)
    ig, chi = _rankings(d, args)
    selected = {n: combine_top_n(ig, chi, n) for n in args.n}
    with Outputs(args.out) as out:
        out.write_text("selection.csv", reports.selection_csv(selected, ig, chi))
    for n, feats in selected.items():
        print(f"n={n} ({len(feats)} features): {','.join(feats)}")
    return 0


def _correlation(d, args, features=None):
    if features is None:
        ig, chi = _rankings(d, args)
        features = combine_top_n(ig, chi, min(10, len(d.schema)))
    return correlation_matrix(d, features)


def _write_correlation(out: Outputs, cm) -> None:
    out.write_text("correlation.csv", reports.correlation_csv(cm))
    plotting.plot_correlation(cm, out.path("correlation.png"))


def cmd_report(args) -> int:
    d = _load(args)
    report = run_experiment_grid(
        d, args.n, seed=args.seed, train_fraction=args.split, protocol=args.protocol, bins=args.bins
    )
    cm = _correlation(d, args)
    with Outputs(args.out) as out:
        out.write_text("grid.txt", reports.report_text(report))
        out.write_text("grid.csv", reports.grid_csv(report))
        plotting.plot_accuracy_grid(report, out.path("accuracy.png"))
        _write_correlation(out, cm)
    sys.stdout.write(reports.grid_csv(report))
    return 0


def cmd_correlate(args) -> int:
    d = _load(args)
    cm = _correlation(d, args, args.features)
    if cm.constant:
        log.warning("constant columns (coefficient 0 by convention): %s", ", ".join(cm.constant))
    with Outputs(args.out) as out:
        _write_correlation(out, cm)
    sys.stdout.write(reports.correlation_csv(cm))
    return 0


COMMANDS = {
    "extract": cmd_extract,
    "rank": cmd_rank,
    "select": cmd_select,
    "report": cmd_report,
    "correlate": cmd_correlate,
}


def _configure_logging() -> None:
    level = _LOG_LEVELS.get(os.environ.get("PHISHLENS_LOG", "info").lower(), logging.INFO)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr, force=True)


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except TrainingError as exc:
        log.error("training failed: %s", exc)
        return EXIT_TRAINING
    except (UsageError, DatasetError, UnknownFeature, InvalidThresholds, OSError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
