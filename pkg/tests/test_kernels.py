import os
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from toricount import kernels
from toricount.fan import library_fan
from toricount.ffcount import raw_form_count

needs_compiled = pytest.mark.skipif(not kernels.HAVE_COMPILED, reason="extension not built")

CASES = [("p1", 3, (2, 2), None), ("p1", 4, (2, 2), None), ("p1", 5, (3, 3), (2, 2)),
         ("p2", 2, (2, 2, 2), None), ("p2", 3, (2, 2, 2), None), ("p2", 4, (1, 1, 1), None),
         ("p1xp1", 3, (1, 1, 2, 2), None), ("f1", 2, (1, 2, 1, 3), None),
         ("f2", 2, (1, 1, 1, 3), None), ("dp6", 2, (1, 1, 1, 1, 1, 1), None),
         ("p2", 9, (1, 1, 1), None), ("p1", 8, (2, 2), (2, 2))]


def test_backend_selection():
    assert kernels.BACKEND in ("cython", "python")
    assert kernels.backend("python").count_forms is not None
    with pytest.raises(ValueError):
        kernels.backend("fortran")


def test_pure_python_can_be_forced():
    code = "from toricount import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, TORICOUNT_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True)
    assert out.stdout.strip() == "python"


@needs_compiled
@pytest.mark.parametrize("name,q,d,m", CASES)
def test_backends_agree(name, q, d, m):
    fan = library_fan(name)
    py = raw_form_count(fan, q, d, m, backend="python")
    cy = raw_form_count(fan, q, d, m, backend="cython")
    assert py == cy


@needs_compiled
@given(st.sampled_from(["p1", "p2", "p1xp1", "f1"]), st.sampled_from([2, 3, 4]),
       st.integers(0, 2), st.integers(0, 2), st.integers(1, 9))
@settings(max_examples=25, deadline=None)
def test_backends_agree_on_partitions(name, q, a, b, parts):
    fan = library_fan(name)
    d = {"p1": (a, a), "p2": (a, a, a), "p1xp1": (a, a, b, b), "f1": (a, b, a, a + b)}[name]
    if q ** (sum(d) + len(d)) > 3 * 10 ** 4:
        return
    whole = raw_form_count(fan, q, d, backend="python", partitions=1)
    assert raw_form_count(fan, q, d, backend="cython", partitions=parts) == whole


@pytest.mark.skipif(kernels.HAVE_COMPILED, reason="only meaningful without the extension")
def test_missing_extension_is_reported():
    with pytest.raises(ImportError):
        kernels.backend("cython")
