"""
Tests for dataset loading, covariate selection, standardization and synthesis.
"""

import json
import os
import tempfile

os.environ["LOG_LEVEL"] = "ERROR"

import numpy as np
import pandas as pd

from app.core.data import (
    DataError,
    Dataset,
    design_matrix,
    inverse_transform,
    load_csv,
    save_dataset,
    select_covariates,
    standardize,
    synthesize_imbalanced,
)

TOY_CSV = """x1,x2,x3,class
1,0,0.5,2
2,0,1.5,1
3,?,2.5,2
4,1,3.5,1
5,0,4.5,1
"""


def _write(tmp: str, name: str, text: str) -> str:
    path = os.path.join(tmp, name)
    with open(path, "w") as f:
        f.write(text)
    return path


def test_load_csv():
    print("=" * 60)
    print("TEST: CSV loading with missing markers and label binarization")
    print("=" * 60)

    with tempfile.TemporaryDirectory() as tmp:
        path = _write(tmp, "toy.csv", TOY_CSV)
        ds = load_csv(path, positive_class="2")
        assert ds.dropped_rows == 1
        assert ds.n == 4 and ds.d == 3
        assert ds.column_names == ["x1", "x2", "x3"]
        assert np.array_equal(ds.labels, [1.0, 0.0, 0.0, 0.0])
        assert np.array_equal(ds.features[:, 0], [1.0, 2.0, 4.0, 5.0])

        by_name = load_csv(path, label_column="class", positive_class="1")
        assert np.array_equal(by_name.labels, [0.0, 1.0, 1.0, 1.0])
        by_index = load_csv(path, label_column="0", positive_class="4")
        assert by_index.column_names == ["x2", "x3", "class"]

        headerless = _write(tmp, "plain.csv", "0.5,1\n1.5,0\n2.5,1\n")
        plain = load_csv(headerless, header=False)
        assert plain.n == 3 and np.array_equal(plain.labels, [1.0, 0.0, 1.0])

        try:
            load_csv(path)
            raise AssertionError("expected DataError for {1, 2} labels")
        except DataError as e:
            assert "positive_class" in str(e)
    print("   ✅ PASSED")


def test_load_csv_errors():
    print("\nTEST: Loader errors name the problem")
    with tempfile.TemporaryDirectory() as tmp:
        bad = _write(tmp, "bad.csv", "a,b,y\n1,2,0\nabc,3,1\n")
        try:
            load_csv(bad)
            raise AssertionError("expected DataError")
        except DataError as e:
            print(f"   {e}")
            assert "line 3" in str(e) and "'a'" in str(e)

        missing_only = _write(tmp, "holes.csv", "a,y\n?,0\n,1\n")
        cases = [
            lambda: load_csv(os.path.join(tmp, "absent.csv")),
            lambda: load_csv(missing_only),
            lambda: load_csv(bad, label_column="nope"),
            lambda: load_csv(_write(tmp, "ok.csv", "a,y\n1,0\n2,1\n"), positive_class="7"),
        ]
        for call in cases:
            try:
                call()
            except DataError:
                continue
            raise AssertionError("expected DataError")
    print("   ✅ PASSED")


def test_select_covariates():
    print("\nTEST: Imbalanced columns first, then regular ones, in file order")
    with tempfile.TemporaryDirectory() as tmp:
        ds = load_csv(_write(tmp, "toy.csv", TOY_CSV), positive_class="2")
    chosen = select_covariates(ds, n_imbalanced=1, n_regular=2, rarity_threshold=1, categorical_max_levels=3)
    assert chosen.column_names == ["x2", "x1", "x3"]
    assert np.array_equal(chosen.features[:, 0], [0.0, 0.0, 1.0, 0.0])
    assert np.array_equal(ds.column_names, ["x1", "x2", "x3"])

    try:
        select_covariates(ds, n_imbalanced=2, n_regular=0, rarity_threshold=1, categorical_max_levels=3)
        raise AssertionError("expected DataError")
    except DataError:
        pass

    synthetic = synthesize_imbalanced(n=200, d_imbalanced=4, d_regular=3, seed=2)
    picked = select_covariates(synthetic, n_imbalanced=2, n_regular=3)
    assert picked.column_names == ["imb_0", "imb_1", "reg_0", "reg_1", "reg_2"]
    print("   ✅ PASSED")


def test_standardize_round_trip():
    print("\nTEST: Standardization and its inverse")
    ds = synthesize_imbalanced(n=150, d_imbalanced=3, d_regular=4, seed=5)
    scaled = standardize(ds)
    assert np.allclose(scaled.features.mean(axis=0), 0.0, atol=1e-12)
    assert np.allclose(scaled.features.std(axis=0), 1.0, atol=1e-12)
    assert np.allclose(inverse_transform(scaled), ds.features, atol=1e-10)
    assert ds.scaling is None
    assert [s.column for s in scaled.scaling] == ds.column_names

    X = design_matrix(scaled)
    assert X.shape == (150, 8) and np.all(X[:, 0] == 1.0)
    assert design_matrix(scaled, include_intercept=False).shape == (150, 7)

    flat = Dataset(features=np.ones((4, 2)), labels=np.zeros(4), column_names=["c0", "c1"])
    try:
        standardize(flat)
        raise AssertionError("expected DataError")
    except DataError as e:
        assert "c0" in str(e)
    try:
        inverse_transform(ds)
        raise AssertionError("expected DataError")
    except DataError:
        pass

    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, "scaled.csv")
        save_dataset(scaled, out)
        df = pd.read_csv(out)
        assert list(df.columns) == ds.column_names + ["label"]
        with open(out + ".scaling.json") as f:
            records = json.load(f)
        assert len(records) == 7 and records[0]["column"] == "imb_0"
    print("   ✅ PASSED")


def test_synthetic_imbalance():
    print("\nTEST: Synthetic imbalanced datasets")
    ds = synthesize_imbalanced(seed=0)
    assert ds.n == 452 and ds.d == 50
    assert np.all(ds.features[:, :25].sum(axis=0) == 2)
    assert set(np.unique(ds.features[:, :25])) == {0.0, 1.0}
    assert set(np.unique(ds.labels)) <= {0.0, 1.0}
    assert 0.2 < ds.labels.mean() < 0.8

    # raw continuous columns span orders of magnitude, and so does the likelihood gradient at zero
    spread = ds.features[:, 25:].std(axis=0)
    assert spread.max() / spread.min() > 20
    gradient = ds.features[:, 25:].T @ (ds.labels - 0.5)
    assert np.abs(gradient).max() / np.abs(gradient).min() > 20

    again = synthesize_imbalanced(seed=0)
    assert np.array_equal(ds.features, again.features) and np.array_equal(ds.labels, again.labels)
    other = synthesize_imbalanced(seed=1)
    assert not np.array_equal(ds.features, other.features)

    four = synthesize_imbalanced(n=100, d_imbalanced=2, d_regular=1, rare_count=4, seed=3)
    assert np.all(four.features[:, :2].sum(axis=0) == 4)
    for rare_count in (0, 11):
        try:
            synthesize_imbalanced(n=100, rare_count=rare_count)
            raise AssertionError("expected DataError")
        except DataError:
            pass
    print("   ✅ PASSED")


if __name__ == "__main__":
    test_load_csv()
    test_load_csv_errors()
    test_select_covariates()
    test_standardize_round_trip()
    test_synthetic_imbalance()
