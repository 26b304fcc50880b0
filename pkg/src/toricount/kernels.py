"""Pick the compiled enumeration kernel when it is built, else pure Python.

Set TORICOUNT_PURE_PYTHON=1 to force the fallback.
"""
import os

from toricount import _kernels_py

try:
    if os.environ.get("TORICOUNT_PURE_PYTHON"):
        raise ImportError("pure Python forced")
    from toricount import _kernels as _compiled
except ImportError:
    _compiled = None

HAVE_COMPILED = _compiled is not None
BACKEND = "cython" if HAVE_COMPILED else "python"


def backend(name=None):
    """Module providing ``count_forms``: 'cython', 'python' or None for the default."""
    if name is None:
        return _compiled or _kernels_py
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernel is not built (run: python setup.py build_ext --inplace)")
        return _compiled
    raise ValueError(f"unknown kernel backend {name!r}")


count_forms = backend().count_forms
count_divisors = _kernels_py.count_divisors
