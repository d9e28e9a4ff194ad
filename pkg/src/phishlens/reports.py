"""Text and CSV renderings of rankings, grids and correlation matrices."""

from __future__ import annotations

import csv
import io

import numpy as np

from .models import CLASSIFIERS, EvaluationReport
from .selection import CorrelationMatrix, Ranking

REPORT_KEYS = ("classifier", "n_features", "feature_list", "accuracy", "tp", "tn", "fp", "fn", "seed")


def ranking_csv(ranking: Ranking) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["method", "rank", "feature", "score"])
    for pos, s in enumerate(ranking.scores, start=1):
        w.writerow([ranking.method, pos, s.feature, f"{s.value:.2f}"])
    return buf.getvalue()


def ranking_table(ranking: Ranking, top: int = 20, header: str = "URL Feature") -> str:
    """Two-column plain-text table of the top entries."""
    rows = ranking.scores[:top]
    width = max([len(header)] + [len(s.feature) for s in rows])
    label = "chi2" if ranking.method == "ChiSquared" else ranking.method
    lines = [f"{header:<{width}}  {label:>10}"]
    lines += [f"{s.feature:<{width}}  {s.value:>10.2f}" for s in rows]
    return "\n".join(lines) + "\n"


def selection_csv(selected: dict[int, list[str]], ig: Ranking, chi: Ranking) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "position", "feature", "ig_rank", "chi2_rank"])
    for n, features in selected.items():
        for pos, f in enumerate(features, start=1):
            w.writerow([n, pos, f, ig.rank_of(f), chi.rank_of(f)])
    return buf.getvalue()


def report_text(report: EvaluationReport) -> str:
    """Key/value document: a metadata block, then one block per grid cell."""
    h = report.hyper
    lines = [
        f"seed: {report.seed}",
        f"train_fraction: {report.train_fraction}",
        f"protocol: {report.protocol}",
        f"bins: {report.bins}",
        f"knn_k: {report.k}",
        f"svc_reg: {h.reg}",
        f"svc_epochs: {h.epochs}",
        f"svc_step0: {h.step0}",
        f"svc_decay: {h.decay}",
        f"n_train: {report.n_train}",
        f"n_test: {report.n_test}",
    ]
    for c in report.cells:
        r = c.result
        lines += [
            "",
            f"classifier: {c.classifier}",
            f"n_features: {c.n_features}",
            f"feature_list: {','.join(c.feature_list)}",
            f"accuracy: {r.accuracy:.3f}",
            f"tp: {r.tp}",
            f"tn: {r.tn}",
            f"fp: {r.fp}",
            f"fn: {r.fn}",
            f"seed: {report.seed}",
        ]
    return "\n".join(lines) + "\n"


def parse_report_text(text: str) -> tuple[dict[str, str], list[dict[str, str]]]:
    """Inverse of :func:`report_text`: (metadata, list of cell dicts)."""
    blocks = []
    current: dict[str, str] = {}
    for line in text.splitlines():
        if not line.strip():
            if current:
                blocks.append(current)
                current = {}
            continue
        key, _, value = line.partition(":")
        current[key.strip()] = value.strip()
    if current:
        blocks.append(current)
    if not blocks:
        return {}, []
    return blocks[0], blocks[1:]


def grid_csv(report: EvaluationReport) -> str:
    """Table-2 layout: one row per classifier, one column per feature count."""
    cols = report.columns
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["classifier"] + [str(n) for n in cols])
    for name in CLASSIFIERS:
        w.writerow([name] + [f"{report.accuracy(name, n):.3f}" for n in cols])
    return buf.getvalue()


def correlation_csv(cm: CorrelationMatrix) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["feature"] + list(cm.features))
    for name, row in zip(cm.features, cm.matrix):
        w.writerow([name] + [f"{v:.4f}" for v in row])
    return buf.getvalue()


def read_correlation_csv(text: str) -> CorrelationMatrix:
    rows = list(csv.reader(io.StringIO(text)))
    names = tuple(rows[0][1:])
    M = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
    return CorrelationMatrix(names, M)
