import json
import math

import numpy as np
import pytest

from lsst.ts.radon_inversion.utils import (
    THREADS_ENV_VAR,
    Timer,
    angle_distance,
    get_thread_count,
    make_json_safe,
    ordered_map,
    reduce_angle,
    relative_l2,
    rotation,
    unit_vector,
)


def test_get_thread_count(monkeypatch):
    monkeypatch.setenv(THREADS_ENV_VAR, "4")
    assert get_thread_count() == 4


def test_get_thread_count_fallbacks(monkeypatch):
    monkeypatch.delenv(THREADS_ENV_VAR, raising=False)
    assert get_thread_count(3) == 3
    monkeypatch.setenv(THREADS_ENV_VAR, "many")
    assert get_thread_count() == 1
    monkeypatch.setenv(THREADS_ENV_VAR, "0")
    assert get_thread_count(2) == 2


# Angles
def test_reduce_angle():
    assert reduce_angle(-0.5) == pytest.approx(2 * math.pi - 0.5)
    assert reduce_angle(7.0) == pytest.approx(7.0 - 2 * math.pi)
    assert reduce_angle(math.pi, math.pi) == 0.0
    values = reduce_angle(np.array([-math.pi, 0.0, 2 * math.pi]), math.pi)
    assert np.allclose(values, [0.0, 0.0, 0.0])
    # one ulp below the period stays below it
    assert reduce_angle(-1e-300) < 2 * math.pi


def test_angle_distance():
    assert angle_distance(0.1, 2 * math.pi - 0.1) == pytest.approx(0.2)
    assert angle_distance(0.0, math.pi) == pytest.approx(math.pi)


def test_rotation_and_unit_vector():
    r = rotation(math.pi / 2)
    assert np.allclose(r @ [1.0, 0.0], [0.0, 1.0])
    assert np.allclose(r.T @ r, np.eye(2))
    w = unit_vector(np.array([0.0, math.pi / 2]))
    assert np.allclose(w, [[1.0, 0.0], [0.0, 1.0]])


# Relative error
def test_relative_l2():
    assert relative_l2([1.1, 0.0], [1.0, 0.0]) == pytest.approx(0.1)
    assert relative_l2([0.0], [0.0]) == 0.0
    assert relative_l2([1.0], [0.0]) == math.inf
    assert relative_l2([2.0, 1.0], [1.0, 1.0], weights=[0.0, 1.0]) == 0.0


def test_timer():
    timer = Timer()
    first = timer.toc
    second = timer.toc
    assert 0.0 <= first <= second
    timer.tic
    assert timer.toc <= second + 1.0


def test_ordered_map_keeps_order(monkeypatch):
    monkeypatch.setenv(THREADS_ENV_VAR, "4")
    assert ordered_map(lambda x: x * x, range(20)) == [x * x for x in range(20)]
    monkeypatch.setenv(THREADS_ENV_VAR, "1")
    assert ordered_map(str, [3, 1]) == ["3", "1"]


# Basic types
def test_make_json_safe_basic_types():
    assert make_json_safe(None) is None
    assert make_json_safe(True) is True
    assert make_json_safe("hello") == "hello"
    assert make_json_safe(42) == 42
    assert make_json_safe(3.14) == 3.14


# Special floats
def test_make_json_safe_nan_and_inf():
    assert make_json_safe(float("nan")) is None
    assert make_json_safe(float("inf")) is None
    assert make_json_safe(np.nan) is None
    assert make_json_safe(np.inf) is None


# NumPy types
def test_make_json_safe_numpy_bool():
    result = make_json_safe(np.bool_(True))
    assert result is True
    assert isinstance(result, bool)


def test_make_json_safe_numpy_integers():
    assert make_json_safe(np.int32(100)) == 100
    assert isinstance(make_json_safe(np.int64(42)), int)


def test_make_json_safe_numpy_arrays():
    assert make_json_safe(np.array([1, 2, 3])) == [1, 2, 3]
    assert make_json_safe(np.array([1.0, np.nan, 3.0])) == [1.0, None, 3.0]
    assert make_json_safe(np.float64(2.5)) == 2.5


# Complex values
def test_make_json_safe_complex():
    assert make_json_safe(1 + 2j) == [1.0, 2.0]
    assert make_json_safe(np.complex128(0.5 - 1j)) == [0.5, -1.0]
    assert make_json_safe(np.array([1j])) == [[0.0, 1.0]]


# Containers
def test_make_json_safe_containers():
    nested = {"values": [np.int64(1), np.nan], "count": np.int32(5), "pair": (1.0, np.inf)}
    result = make_json_safe(nested)
    assert result == {"values": [1, None], "count": 5, "pair": (1.0, None)}
    assert json.dumps(result) is not None
