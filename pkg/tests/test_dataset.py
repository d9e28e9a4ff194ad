import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phishlens.dataset import (
    REFERENCE_FEATURES,
    REFERENCE_SCHEMA,
    BadLabel,
    BadValue,
    Dataset,
    EmptyDataset,
    FeatureSchema,
    SchemaMismatch,
    UnknownFeature,
    discretize,
    equal_frequency_edges,
    load_csv,
    project,
    split_dataset,
    standardize,
    write_csv,
)
from synth import make_reference_like


def small(n=10, seed=0):
    rng = np.random.default_rng(seed)
    schema = FeatureSchema(("NumDots", "PctExtHyperlinks", "IpAddress"), ("count", "fraction", "binary"))
    X = np.column_stack([rng.integers(0, 8, n), rng.random(n).round(3), rng.integers(0, 2, n)])
    y = np.arange(n) % 2
    return Dataset(schema, X, y, tuple(str(i) for i in range(n)))


def write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


class TestSchema:
    def test_reference_has_48(self):
        assert len(REFERENCE_SCHEMA) == 48
        assert len(set(REFERENCE_FEATURES)) == 48
        assert REFERENCE_SCHEMA.kind("PctExtNullSelfRedirectHyperlinksRT") == "ternary"
        assert REFERENCE_SCHEMA.kind("AbnormalExtFormActionR") == "ternary"
        assert REFERENCE_SCHEMA.kind("SubmitInfoToEmail") == "binary"
        assert REFERENCE_SCHEMA.kind("PctExtHyperlinks") == "fraction"
        assert REFERENCE_SCHEMA.kind("NumDots") == "count"

    def test_label_not_a_feature(self):
        with pytest.raises(SchemaMismatch):
            FeatureSchema(("a", "CLASS_LABEL"), ("count", "count"))

    def test_unique_names(self):
        with pytest.raises(SchemaMismatch):
            FeatureSchema(("a", "a"), ("count", "count"))


class TestLoadCsv:
    def test_three_rows(self, tmp_path):
        p = write(tmp_path, "id,NumDots,NumDash,CLASS_LABEL\n1,3,0,1\n2,5,2,0\n3,1,0,1\n")
        d = load_csv(p)
        assert len(d) == 3
        assert d.schema.names == ("NumDots", "NumDash")
        assert d.ids == ("1", "2", "3")
        assert d.class_counts() == (1, 2)
        assert d.example(1).features == {"NumDots": 5.0, "NumDash": 2.0}

    def test_missing_column(self, tmp_path):
        schema = FeatureSchema(("NumDots", "NumDash"), ("count", "count"))
        p = write(tmp_path, "NumDash,CLASS_LABEL\n1,0\n")
        with pytest.raises(SchemaMismatch, match="NumDots"):
            load_csv(p, schema)

    def test_extra_column(self, tmp_path):
        schema = FeatureSchema(("NumDots",), ("count",))
        p = write(tmp_path, "NumDots,Bogus,CLASS_LABEL\n1,2,0\n")
        with pytest.raises(SchemaMismatch, match="Bogus"):
            load_csv(p, schema)

    def test_bad_label(self, tmp_path):
        p = write(tmp_path, "NumDots,CLASS_LABEL\n1,0\n2,2\n")
        with pytest.raises(BadLabel, match="row 3"):
            load_csv(p)

    def test_bad_value(self, tmp_path):
        p = write(tmp_path, "NumDots,NumDash,CLASS_LABEL\n1,x,0\n")
        with pytest.raises(BadValue, match="row 2, column 'NumDash'"):
            load_csv(p)

    def test_missing_cell_is_error(self, tmp_path):
        p = write(tmp_path, "NumDots,NumDash,CLASS_LABEL\n1,,0\n")
        with pytest.raises(BadValue, match="missing"):
            load_csv(p)

    def test_kind_inference(self, tmp_path):
        p = write(tmp_path, "b,t,f,c,CLASS_LABEL\n0,-1,0.5,7,0\n1,1,0.25,0,1\n")
        assert load_csv(p).schema.kinds == ("binary", "ternary", "fraction", "count")

    def test_invert_labels(self, tmp_path):
        p = write(tmp_path, "a,CLASS_LABEL\n1,0\n2,1\n")
        assert load_csv(p, invert_labels=True).y.tolist() == [1, 0]

    def test_reference_layout_round_trip(self, tmp_path):
        d = make_reference_like(300, seed=5)
        p = tmp_path / "ref.csv"
        write_csv(d, p)
        back = load_csv(p, REFERENCE_SCHEMA)
        assert back == d
        assert load_csv(p) == d
        assert p.read_text().splitlines()[0].startswith("id,NumDots,SubdomainLevel,")

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 30), st.integers(0, 1000))
    def test_round_trip_property(self, n, seed):
        import tempfile
        from pathlib import Path

        d = small(n, seed)
        with tempfile.TemporaryDirectory() as tmp:
            p = Path(tmp) / "d.csv"
            write_csv(d, p)
            assert load_csv(p, d.schema) == d


class TestSplit:
    def test_ten_rows(self):
        tr, te = split_dataset(small(10), 0.7, 42)
        assert (len(tr), len(te)) == (7, 3)
        assert not set(tr.ids) & set(te.ids)

    def test_deterministic(self):
        a = split_dataset(small(10), 0.7, 42)
        b = split_dataset(small(10), 0.7, 42)
        assert a[0] == b[0] and a[1] == b[1]

    def test_ten_thousand(self):
        d = make_reference_like(10_000)
        tr, te = split_dataset(d, 0.7, 42)
        # floor(0.7 * 10000) = 7000
        assert (len(tr), len(te)) == (7000, 3000)

    def test_too_small(self):
        with pytest.raises(EmptyDataset):
            split_dataset(small(1), 0.7, 1)

    @given(st.integers(2, 200), st.floats(0.05, 0.95), st.integers(0, 2**32 - 1))
    def test_partition(self, n, frac, seed):
        d = small(n, seed % 100)
        try:
            tr, te = split_dataset(d, frac, seed)
        except EmptyDataset:
            assert int(frac * n + 1e-9) in (0, n)
            return
        assert len(tr) == int(np.floor(frac * n + 1e-9))
        assert sorted(tr.ids + te.ids, key=int) == list(d.ids)


class TestDiscretize:
    def test_quantile_bins(self):
        schema = FeatureSchema(("c",), ("count",))
        d = Dataset(schema, np.arange(1, 11), np.zeros(10))
        dd = discretize(d, 5)
        assert np.bincount(dd.codes[:, 0]).tolist() == [2, 2, 2, 2, 2]

    def test_constant_column(self):
        d = Dataset(FeatureSchema(("c",), ("count",)), np.full(7, 3.0), np.zeros(7))
        dd = discretize(d, 4)
        assert set(dd.codes[:, 0].tolist()) == {0}
        assert dd.bin_counts == (1,)

    def test_ternary_passthrough(self):
        d = Dataset(FeatureSchema(("t",), ("ternary",)), np.array([-1, 0, 1, 1, 0]), np.zeros(5))
        dd = discretize(d, 10)
        assert dd.codes[:, 0].tolist() == [0, 1, 2, 2, 1]
        assert dd.bin_counts == (3,)

    @given(st.lists(st.integers(0, 1000), min_size=1, max_size=200), st.integers(2, 12))
    def test_populations(self, values, bins):
        vals = np.array(values, dtype=float)
        e = equal_frequency_edges(vals, bins)
        assert np.all(np.diff(e) > 0)
        codes = np.searchsorted(e, vals, side="right")
        counts = np.bincount(codes, minlength=len(e) + 1)
        assert codes.max() < len(e) + 1
        if len(set(values)) == len(values) and len(values) >= bins:
            assert counts.max() - counts.min() <= 1

    def test_row_count_and_labels(self):
        d = make_reference_like(500, seed=9)
        dd = discretize(d)
        assert dd.codes.shape == d.X.shape
        assert np.array_equal(dd.y, d.y)
        assert all(dd.codes[:, j].max() < c for j, c in enumerate(dd.bin_counts))


class TestProject:
    def test_identity(self):
        d = small()
        assert project(d, d.schema.names) == d

    def test_subset(self):
        d = make_reference_like(50)
        p = project(d, REFERENCE_FEATURES[:10])
        assert len(p.schema) == 10 and len(p) == 50

    def test_value_preserved(self):
        d = small()
        assert project(d, ["NumDots"]).X[1, 0] == d.column("NumDots")[1]

    def test_unknown(self):
        with pytest.raises(UnknownFeature):
            project(small(), ["Nope"])

    @given(st.data())
    def test_idempotent(self, data):
        d = make_reference_like(30, seed=1)
        a = data.draw(st.lists(st.sampled_from(REFERENCE_FEATURES), min_size=1, max_size=12, unique=True))
        b = data.draw(st.lists(st.sampled_from(a), min_size=1, max_size=len(a), unique=True))
        assert project(project(d, a), b) == project(d, b)


class TestStandardize:
    def test_z_score(self):
        schema = FeatureSchema(("x",), ("count",))
        train = Dataset(schema, np.array([3.0, 7.0]), np.array([0, 1]))
        test = Dataset(schema, np.array([7.0]), np.array([1]))
        _, te, params = standardize(train, test)
        assert params.mean[0] == 5.0 and params.scale[0] == 2.0
        assert te.X[0, 0] == 1.0

    def test_constant(self):
        schema = FeatureSchema(("x",), ("fraction",))
        train = Dataset(schema, np.full(5, 0.1), np.zeros(5))
        tr, te, _ = standardize(train, train)
        assert not tr.X.any() and not te.X.any()

    def test_mean_zero_and_idempotent(self):
        d = make_reference_like(400, seed=3)
        tr, _, _ = standardize(d)
        assert np.all(np.abs(tr.X.mean(axis=0)) < 1e-9)
        again, _, _ = standardize(tr)
        assert np.allclose(again.X, tr.X, atol=1e-9)
        assert np.array_equal(tr.y, d.y)
