"""One-hot encoding + standard scaling, statistics fitted on training data only."""

import numpy as np
import pytest

from mesbench.dataset import Table
from mesbench.errors import EmptyTable, SchemaMismatch
from mesbench.preprocess import fit_preprocessor, transform


def cat(values):
    return np.array(values, dtype=object)


def num(values):
    return np.array(values, dtype=float)


def test_numeric_scaling_uses_population_std():
    # mean 2012, population std sqrt(((-2)^2 + 2^2)/2) = 2 -> scaled [-1, 1]
    t = Table(("construction_year",), {"construction_year": num([2010, 2014])})
    pre = fit_preprocessor(t)
    out = transform(pre, t)
    np.testing.assert_allclose(out, [[-1.0], [1.0]])


def test_vocab_is_first_appearance_order():
    t = Table(("model",), {"model": cat(["b", "a", "b"])})
    pre = fit_preprocessor(t)
    out = transform(pre, t)
    # vocab (b, a): b -> [1, 0], a -> [0, 1]
    np.testing.assert_array_equal(out, [[1, 0], [0, 1], [1, 0]])


def test_unknown_category_encodes_to_zero_block():
    train = Table(("model",), {"model": cat(["a", "b"])})
    pre = fit_preprocessor(train)
    test = Table(("model",), {"model": cat(["c", "a"])})
    out = transform(pre, test)
    np.testing.assert_array_equal(out, [[0, 0], [1, 0]])


def test_constant_column_scales_to_zero():
    t = Table(("working_hours",), {"working_hours": num([7.0, 7.0, 7.0])})
    pre = fit_preprocessor(t)
    out = transform(pre, t)
    np.testing.assert_array_equal(out, [[0.0], [0.0], [0.0]])


def test_statistics_come_from_the_fit_table_only():
    train = Table(("working_hours",), {"working_hours": num([2010, 2014])})
    pre = fit_preprocessor(train)
    other = Table(("working_hours",), {"working_hours": num([2020.0])})
    out = transform(pre, other)
    np.testing.assert_allclose(out, [[(2020.0 - 2012.0) / 2.0]])


def test_block_layout_follows_table_column_order():
    t = Table(
        ("model", "working_hours", "location"),
        {
            "model": cat(["a", "b"]),
            "working_hours": num([0.0, 10.0]),
            "location": cat(["x", "x"]),
        },
    )
    pre = fit_preprocessor(t)
    out = transform(pre, t)
    assert out.shape == (2, 2 + 1 + 1)
    assert pre.feature_names == ("model=a", "model=b", "working_hours", "location=x")
    np.testing.assert_allclose(out[:, 2], [-1.0, 1.0])  # scaled hours block in the middle


def test_transform_rejects_wrong_schema():
    pre = fit_preprocessor(Table(("model",), {"model": cat(["a"])}))
    with pytest.raises(SchemaMismatch):
        transform(pre, Table(("location",), {"location": cat(["a"])}))


def test_fit_rejects_empty_input():
    with pytest.raises(EmptyTable):
        fit_preprocessor(Table(("model",), {"model": cat([])}))
    with pytest.raises(EmptyTable):
        fit_preprocessor(Table((), {}))


def test_transform_is_pure():
    t = Table(("model", "working_hours"),
              {"model": cat(["a", "b", "a"]), "working_hours": num([1.0, 2.0, 3.0])})
    pre = fit_preprocessor(t)
    np.testing.assert_array_equal(transform(pre, t), transform(pre, t))
