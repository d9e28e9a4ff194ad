"""Acceptance checks, one test per criterion.

Each test records its outcome in ``conftest.ACCEPTANCE`` so the terminal
summary prints one PASS/FAIL/SKIP line per criterion. Criteria 3 to 5 need
the real 48-feature CSV (set PHISHLENS_REFERENCE_CSV); without it they are
reported as SKIP, after checking their runtime budgets on synthetic data of
the same shape.
"""

import csv
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracle
from conftest import ACCEPTANCE
from phishlens.cli import main
from phishlens.content import extract_content_features
from phishlens.dataset import (
    Dataset,
    FeatureSchema,
    discretize,
    load_csv,
    project,
    split_dataset,
    write_csv,
)
from phishlens.models import (
    KNN,
    LINEAR_SVC,
    NAIVE_BAYES,
    SELECT_BEFORE_SPLIT,
    run_experiment_grid,
)
from phishlens.selection import (
    CHI_SQUARED,
    IG,
    ContingencyTable,
    Ranking,
    FeatureScore,
    chi2_from_table,
    chi_squared,
    combine_top_n,
    correlation_matrix,
    entropy,
    information_gain,
    rank_features,
    select_top_n_combined,
)
from phishlens.urls import SENSITIVE_WORDS, count_sensitive_words, extract_lexical_features, parse_url
from synth import make_reference_like
from test_content import load_fixture, partition_holds

TOL = 1e-9

TABLE1_TOP10 = (
    "PctExtNullSelfRedirectHyperlinksRT",
    "FrequentDomainNameMismatch",
    "NumDash",
    "SubmitInfoToEmail",
    "PctNullSelfRedirectHyperlinks",
    "InsecureForms",
    "NumDots",
    "PctExtHyperlinks",
    "NumSensitiveWords",
    "IframeOrFrame",
)


def record(num, ok, detail):
    ACCEPTANCE[num] = (ok, detail)
    assert ok, detail


def skip(num, detail):
    ACCEPTANCE[num] = (None, detail)
    pytest.skip(detail)


@pytest.fixture(scope="module")
def synthetic_full():
    return make_reference_like(10_000, seed=0)


# 1 ----------------------------------------------------------------------


def test_criterion_1_oracle_equivalence():
    start = time.perf_counter()
    cases = worst = 0
    failures = []
    for columns, labels in oracle.exhaustive_cases(max_rows=12, max_features=3):
        cases += 1
        got_h = entropy([labels.count(0), labels.count(1)])
        diffs = [abs(got_h - oracle.entropy_of(labels))]
        for col in columns:
            diffs.append(abs(information_gain(col, labels).value - oracle.info_gain(col, labels)))
            diffs.append(abs(chi_squared(col, labels).value - oracle.chi2(col, labels)))
        worst = max(worst, *diffs)
        if max(diffs) > TOL and len(failures) < 3:
            failures.append((columns, labels))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 10.0
    record(1, ok, f"{cases} datasets, max |diff| {worst:.2e} (tol 1e-9), {elapsed:.2f}s (< 10s) {failures or ''}")


# 2 ----------------------------------------------------------------------


def test_criterion_2_hand_values():
    h = entropy((9, 1))
    chi = chi2_from_table(ContingencyTable(np.array([[30, 10], [10, 30]])))
    n = 100
    perfect = chi_squared([0] * (n // 2) + [1] * (n // 2), [0] * (n // 2) + [1] * (n // 2)).value
    ig = information_gain(["A"] * 4 + ["B"] * 6, [0] * 5 + [1] * 5).value
    checks = [
        abs(h - 0.4690) <= 1e-4,
        chi == 20.0,
        perfect == float(n),
        abs(ig - 0.6100) <= 1e-3,
    ]
    record(2, all(checks), f"entropy(9,1)={h:.6f} chi2={chi} perfect(n=100)={perfect} IG={ig:.6f}")


# 3 ----------------------------------------------------------------------


def _rank_timed(d):
    start = time.perf_counter()
    dd = discretize(d)
    ig, chi = rank_features(dd, IG), rank_features(dd, CHI_SQUARED)
    return ig, chi, time.perf_counter() - start


def test_criterion_3_table1(reference_csv, synthetic_full):
    if reference_csv is None:
        _, _, elapsed = _rank_timed(synthetic_full)
        assert elapsed < 10.0
        skip(3, f"PHISHLENS_REFERENCE_CSV not set; synthetic 10000x48 ranking {elapsed:.2f}s (< 10s)")
    d = load_csv(reference_csv)
    _, chi, elapsed = _rank_timed(d)
    top10 = chi.top(10)
    overlap = len(set(top10) & set(TABLE1_TOP10))
    ok = top10[0] == TABLE1_TOP10[0] and overlap >= 7 and elapsed < 10.0
    record(3, ok, f"chi2 rank 1 = {top10[0]}, overlap {overlap}/10 (>= 7), {elapsed:.2f}s; top10={top10}")


# 4 ----------------------------------------------------------------------


def test_criterion_4_table2(reference_csv, synthetic_full):
    d = synthetic_full if reference_csv is None else load_csv(reference_csv)
    start = time.perf_counter()
    report = run_experiment_grid(d, (10, 15, 20), seed=42, protocol=SELECT_BEFORE_SPLIT)
    elapsed = time.perf_counter() - start
    if reference_csv is None:
        assert elapsed < 60.0
        skip(4, f"PHISHLENS_REFERENCE_CSV not set; synthetic 10000x48 grid {elapsed:.2f}s (< 60s)")
    nb = report.accuracy(NAIVE_BAYES, 48)
    svc = report.accuracy(LINEAR_SVC, 20)
    knn = [report.accuracy(KNN, n) for n in (10, 15, 20)]
    ok = abs(nb - 0.837) <= 0.05 and abs(svc - 0.957) <= 0.05 and min(knn) >= 0.95 and elapsed < 60.0
    record(4, ok, f"NB@48={nb:.3f} (0.837+-0.05) SVC@20={svc:.3f} (0.957+-0.05) "
                  f"KNN@10/15/20={'/'.join(f'{a:.3f}' for a in knn)} (>= 0.95), {elapsed:.1f}s")


# 5 ----------------------------------------------------------------------


def test_criterion_5_correlations(reference_csv):
    if reference_csv is None:
        skip(5, "PHISHLENS_REFERENCE_CSV not set")
    d = load_csv(reference_csv)
    a = ("PctExtNullSelfRedirectHyperlinksRT", "FrequentDomainNameMismatch")
    b = ("NumDots", "NumSensitiveWords")
    cm = correlation_matrix(d, [*a, *b])
    ra, rb = cm.get(*a), cm.get(*b)
    ok = abs(ra - 0.60) <= 0.15 and abs(rb - 0.30) <= 0.15
    record(5, ok, f"corr{a}={ra:.3f} (0.60+-0.15), corr{b}={rb:.3f} (0.30+-0.15)")


# 6 ----------------------------------------------------------------------


def test_criterion_6_lexical_goldens(fixtures_dir):
    six = "http://www.network.solutions.com.012892378267.239827432.mobi/login,secure"
    dots = extract_lexical_features(parse_url(six), six).NumDots
    pp = "http://www.pay-pal.com"
    f = extract_lexical_features(parse_url(pp), pp)
    with open(fixtures_dir / "sensitive_urls.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    mismatched = [
        r["url"] for r in rows
        if count_sensitive_words(r["url"]) != int(r["expected"])
        or count_sensitive_words(r["url"].swapcase()) != int(r["expected"])
    ]
    ok = dots == 6 and f.NumDash == f.NumDashInHostname == 1 and len(rows) >= 20 and not mismatched
    record(6, ok, f"NumDots={dots}, pay-pal dashes={f.NumDash}/{f.NumDashInHostname}, "
                  f"{len(rows)} sensitive-word fixtures ({len(SENSITIVE_WORDS)} words), mismatches={mismatched}")


# 7 ----------------------------------------------------------------------


def test_criterion_7_content_goldens(fixtures_dir):
    def feats(name):
        return extract_content_features(load_fixture(fixtures_dir, name))

    values = {
        "SubmitInfoToEmail": feats("mailto").SubmitInfoToEmail,
        "IframeOrFrame": feats("iframe").IframeOrFrame,
        "PctNullSelfRedirectHyperlinks": feats("null_anchors").PctNullSelfRedirectHyperlinks,
        "InsecureForms": feats("insecure_form").InsecureForms,
    }
    expected = {"SubmitInfoToEmail": 1, "IframeOrFrame": 1, "PctNullSelfRedirectHyperlinks": 0.5, "InsecureForms": 1}
    pages = sorted(p.stem for p in (fixtures_dir / "html").glob("*.html"))
    broken = [p for p in pages if not partition_holds(load_fixture(fixtures_dir, p))]
    record(7, values == expected and not broken, f"{values}, partition holds on {len(pages) - len(broken)}/{len(pages)} fixtures")


# 8 ----------------------------------------------------------------------


def _random_dataset(n, f, seed):
    rng = np.random.default_rng(seed)
    names = tuple(f"f{i}" for i in range(f))
    X = rng.integers(0, 5, size=(n, f)).astype(float)
    y = rng.integers(0, 2, size=n)
    ids = tuple(str(i) for i in range(n))
    return Dataset(FeatureSchema(names, ("count",) * f), X, y, ids)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 300), st.floats(0.05, 0.95), st.integers(0, 2**31))
def _split_property(n, frac, seed):
    d = _random_dataset(n, 2, seed)
    try:
        train, test = split_dataset(d, frac, seed)
    except ValueError:
        return
    a, b = set(train.ids), set(test.ids)
    assert not a & b
    assert a | b == set(d.ids)
    assert len(train) == int(np.floor(frac * n + 1e-9))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.data())
def _projection_property(f, data):
    d = _random_dataset(20, f, data.draw(st.integers(0, 999)))
    names = data.draw(st.lists(st.sampled_from(d.schema.names), min_size=1, unique=True))
    once = project(d, names)
    assert project(once, names) == once
    assert once.schema.names == tuple(names)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 12), st.data())
def _combined_size_property(f, data):
    names = [f"f{i}" for i in range(f)]
    n = data.draw(st.integers(1, f))
    ig_order = data.draw(st.permutations(names))
    chi_order = data.draw(st.permutations(names))

    def ranking(method, order):
        return Ranking(method, [FeatureScore(name, method, float(f - i)) for i, name in enumerate(order)], "name")

    combined = combine_top_n(ranking(IG, ig_order), ranking(CHI_SQUARED, chi_order), n)
    assert n <= len(combined) <= 2 * n
    assert len(set(combined)) == len(combined)
    # and through the full scoring path
    d = _random_dataset(40, f, data.draw(st.integers(0, 999)))
    selected = select_top_n_combined(discretize(d, 4), n)
    assert n <= len(selected) <= 2 * n


def test_criterion_8_pipeline_invariants(tmp_path):
    details = []
    for name, prop in (
        ("split", _split_property),
        ("projection", _projection_property),
        ("combined size", _combined_size_property),
    ):
        try:
            prop()
            details.append(f"{name} ok")
        except Exception as exc:
            record(8, False, f"{name} property failed: {type(exc).__name__}: {exc}")

    data = tmp_path / "d.csv"
    write_csv(make_reference_like(600, seed=5), data)
    outputs = []
    for run in ("a", "b"):
        out = tmp_path / run
        assert main(["report", "--data", str(data), "--out", str(out)]) == 0
        outputs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    same = outputs[0] == outputs[1]
    details.append(f"two report runs byte-identical over {len(outputs[0])} files: {same}")
    record(8, same, "; ".join(details))
