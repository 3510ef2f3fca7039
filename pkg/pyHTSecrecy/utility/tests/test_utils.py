import os

import numpy as np
import pytest

from pyHTSecrecy.utility.exceptions import ConfigError, SizeGuardError
from pyHTSecrecy.utility.process_functions import map_parallel
from pyHTSecrecy.utility.utils import THREADS_ENV_VAR, as_real, derive_rng, thread_count


def test_as_real():
    assert as_real("1/3") == 1 / 3
    assert as_real(" 2/5 ") == 0.4
    assert as_real(3) == 3.0
    assert as_real(np.float32(0.5)) == 0.5
    with pytest.raises(TypeError):
        as_real(True)
    with pytest.raises(TypeError):
        as_real(None)
    with pytest.raises(ValueError):
        as_real("a/b")
    with pytest.raises(ValueError):
        as_real("1/0")


def test_derive_rng_streams():
    a = derive_rng(7, 1, 2).random(5)
    b = derive_rng(7, 1, 2).random(5)
    c = derive_rng(7, 2, 1).random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_map_parallel_keeps_order():
    items = list(range(37))
    assert map_parallel(lambda x: x * x, items, max_workers=4) == [x * x for x in items]
    assert map_parallel(lambda x: x + 1, items, max_workers=1) == [x + 1 for x in items]
    assert map_parallel(lambda x: x, []) == []


def test_thread_count(monkeypatch):
    monkeypatch.setenv(THREADS_ENV_VAR, "3")
    assert thread_count() == 3
    monkeypatch.setenv(THREADS_ENV_VAR, "0")
    assert thread_count() == 1
    monkeypatch.setenv(THREADS_ENV_VAR, "many")
    assert thread_count() == (os.cpu_count() or 1)


def test_error_messages():
    er = ConfigError("model.px", "bad", 4)
    assert er.field == "model.px" and er.line == 4
    assert "model.px (line 4)" in str(er)
    guard = SizeGuardError("enumeration", 2e9, 1e8)
    assert guard.size == 2e9 and "exceeds" in guard.message
