import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fairgroup.errors import LengthMismatchError, TooFewPointsError
from fairgroup.importance import (
    build_importance,
    pearson,
    rank_column,
    weights_from_correlations,
    write_feature_csv,
)

from conftest import make_dataset
from fairgroup_oracles import moment_pearson


def test_pearson_perfect():
    assert pearson([1, 2, 3], [1, 2, 3]) == pytest.approx(1.0, abs=1e-15)
    assert pearson([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0, abs=1e-15)


def test_pearson_against_formula():
    expected = moment_pearson([1, 2, 3, 4], [0, 0, 1, 1])
    assert expected == pytest.approx(2 / math.sqrt(5), abs=1e-15)
    assert pearson([1, 2, 3, 4], [0, 0, 1, 1]) == pytest.approx(0.894427191, abs=1e-9)
    assert pearson([1, 2, 3, 4], [0, 0, 1, 1]) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("x", [[5, 5, 5], [0.1, 0.1, 0.1]])
def test_pearson_constant_is_zero(x):
    assert pearson(x, [1, 0, 1]) == 0.0
    assert pearson([1, 0, 1], x) == 0.0


def test_pearson_errors():
    with pytest.raises(LengthMismatchError):
        pearson([1, 2], [1, 2, 3])
    with pytest.raises(TooFewPointsError):
        pearson([1], [1])


@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=30), st.floats(0.01, 100), st.floats(-100, 100))
def test_pearson_affine_images(xs, a, b):
    x = np.array(xs)
    if np.ptp(x) < 1e-3:
        return
    assert pearson(x, a * x + b) == pytest.approx(1.0, abs=1e-9)
    assert pearson(x, -a * x + b) == pytest.approx(-1.0, abs=1e-9)


def test_weights_table_one_ordering():
    # |corr| for household income, age, region
    np.testing.assert_array_equal(weights_from_correlations([0.398, 0.0783, 0.00132]), [3, 2, 1])
    np.testing.assert_array_equal(weights_from_correlations([-0.398, 0.0783, -0.00132]), [3, 2, 1])


def test_weights_edge_cases():
    np.testing.assert_array_equal(weights_from_correlations([0.7]), [1])
    np.testing.assert_array_equal(weights_from_correlations([0.5, 0.5]), [1, 2])
    np.testing.assert_array_equal(weights_from_correlations([0.5, -0.5, 0.1]), [2, 3, 1])


def test_rank_column_examples():
    np.testing.assert_array_equal(rank_column([5, 2, 9], True), [2, 3, 1])
    np.testing.assert_array_equal(rank_column([5, 2, 9], False), [2, 1, 3])
    np.testing.assert_array_equal(rank_column([4, 4, 1], True), [1, 2, 3])
    np.testing.assert_array_equal(rank_column([4, 1, 1], False), [3, 1, 2])


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=40), st.booleans())
def test_rank_column_is_permutation(xs, sign):
    r = rank_column(xs, sign)
    np.testing.assert_array_equal(np.sort(r), np.arange(1, len(xs) + 1))


def test_build_importance_smallest_case():
    d = make_dataset({"x": [10, 20]}, [0, 1])
    m = build_importance(d)
    assert m.correlations[0] == pytest.approx(1.0)
    np.testing.assert_array_equal(m.weights, [1])
    np.testing.assert_array_equal(m.ranks, [[2], [1]])
    np.testing.assert_array_equal(m.importance, [[2], [1]])


def test_build_importance_weights_scale_ranks(rng):
    n = 400
    y = rng.integers(0, 2, n)
    strong = y + 0.3 * rng.normal(size=n)  # |corr| near 0.85
    weak = rng.normal(size=n) + 0.1 * y  # |corr| near 0.05
    d = make_dataset({"A": strong, "B": weak}, y)
    m = build_importance(d)
    assert abs(m.correlations[0]) > abs(m.correlations[1])
    np.testing.assert_array_equal(m.importance[:, 0], 2 * m.ranks[:, 0])
    np.testing.assert_array_equal(m.importance[:, 1], 1 * m.ranks[:, 1])


def test_build_importance_excludes_protected_and_target(rng):
    d = make_dataset({"a": rng.normal(size=30), "b": rng.normal(size=30)}, rng.integers(0, 2, 30), protected=rng.integers(0, 2, 30))
    assert build_importance(d).feature_names == ("a", "b")


def test_build_importance_matches_stepwise_recomputation():
    from fairgroup.dataset import binarize_protected, synth_acs

    d = binarize_protected(synth_acs(600, 5), "household_income", 20000)
    m = build_importance(d)
    y = d.target.astype(float)
    names = [nm for nm in d.names if nm not in ("household_income", "medicaid")]
    assert list(m.feature_names) == names
    corrs = []
    for nm in names:
        x = d.column(nm).tolist()
        corrs.append(0.0 if len(set(x)) == 1 else moment_pearson(x, y.tolist()))
    np.testing.assert_allclose(m.correlations, corrs, atol=1e-12)
    # weights by sorting |corr| (position breaks ties)
    order = sorted(range(len(names)), key=lambda i: (abs(m.correlations[i]), i))
    weights = [0] * len(names)
    for w, i in enumerate(order, start=1):
        weights[i] = w
    np.testing.assert_array_equal(m.weights, weights)
    for i, nm in enumerate(names):
        x = d.column(nm)
        sign = 1 if m.correlations[i] >= 0 else -1
        order = sorted(range(d.n), key=lambda j: (-sign * x[j], j))
        ranks = np.empty(d.n, dtype=int)
        ranks[order] = np.arange(1, d.n + 1)
        np.testing.assert_array_equal(m.ranks[:, i], ranks)
        np.testing.assert_array_equal(m.importance[:, i], weights[i] * ranks)


def test_importance_invariants(rng):
    for _ in range(20):
        n, N = int(rng.integers(2, 60)), int(rng.integers(1, 6))
        feats = {f"f{i}": rng.integers(0, 8, n) for i in range(N)}
        d = make_dataset(feats, rng.integers(0, 2, n))
        m = build_importance(d)
        assert np.all(np.abs(m.correlations) <= 1)
        np.testing.assert_array_equal(np.sort(m.weights), np.arange(1, N + 1))
        for i in range(N):
            np.testing.assert_array_equal(np.sort(m.ranks[:, i]), np.arange(1, n + 1))
        assert m.importance.dtype.kind == "i"
        np.testing.assert_array_equal(m.importance, m.ranks * m.weights[None, :])


def test_sign_coherence(rng):
    n = 50
    x = rng.permutation(n).astype(float)
    y = (x > 20).astype(int)
    m = build_importance(make_dataset({"x": x}, y))
    assert m.correlations[0] > 0
    assert m.ranks[np.argmax(x), 0] == 1
    m = build_importance(make_dataset({"x": -x}, y))
    assert m.ranks[np.argmax(x), 0] == 1


def test_ranks_invariant_under_positive_affine_map(rng):
    n = 80
    x = rng.normal(size=n)
    y = rng.integers(0, 2, n)
    a = build_importance(make_dataset({"x": x, "z": rng.normal(size=n)}, y))
    b = build_importance(make_dataset({"x": 2 * x + 3, "z": a.ranks[:, 1] * 0 + rng.normal(size=n)}, y))
    np.testing.assert_array_equal(a.ranks[:, 0], b.ranks[:, 0])


def test_feature_csv(tmp_path):
    m = build_importance(make_dataset({"a": [1, 2, 3], "b": [3, 1, 2]}, [0, 1, 1]))
    p = tmp_path / "imp.csv"
    write_feature_csv(m, p)
    rows = p.read_text().splitlines()
    assert rows[0] == "feature,correlation,weight"
    assert len(rows) == 3 and rows[1].startswith("a,")
