"""Decibel/linear conversion invariants."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from skymarket.units import db_to_linear, dbm_to_watt, dbw_to_watt, linear_to_db


def test_known_values():
    assert db_to_linear(0.0) == 1.0
    assert db_to_linear(10.0) == pytest.approx(10.0)
    assert dbm_to_watt(30.0) == pytest.approx(1.0)
    assert dbm_to_watt(0.0) == pytest.approx(1e-3)
    assert dbw_to_watt(0.0) == pytest.approx(1.0)
    assert dbw_to_watt(9.23) == pytest.approx(10.0 ** 0.923, rel=1e-12)


@settings(max_examples=1000, deadline=None)
@given(st.floats(min_value=-300.0, max_value=300.0, allow_nan=False))
def test_db_round_trip(x_db):
    assert linear_to_db(db_to_linear(x_db)) == pytest.approx(x_db, abs=1e-9)


@settings(max_examples=1000, deadline=None)
@given(st.floats(min_value=1e-30, max_value=1e30, allow_nan=False))
def test_linear_round_trip(x):
    assert db_to_linear(linear_to_db(x)) == pytest.approx(x, rel=1e-12)


def test_linear_to_db_rejects_nonpositive():
    with pytest.raises(ValueError):
        linear_to_db(0.0)
    with pytest.raises(ValueError):
        linear_to_db(-1.0)


def test_array_inputs():
    xs = np.array([-10.0, 0.0, 10.0])
    out = db_to_linear(xs)
    assert np.allclose(out, [0.1, 1.0, 10.0])
