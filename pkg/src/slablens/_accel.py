"""Backend selection for the compiled kernels.

Numba is used when it imports and ``SLABLENS_DISABLE_NUMBA`` is unset (or
``0``).  Every compiled kernel has a pure-numpy twin, and the active backend
can also be switched at runtime with :func:`set_backend`.
"""

import os
from contextlib import contextmanager

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None
    _HAVE_NUMBA = False

_DISABLED = os.environ.get("SLABLENS_DISABLE_NUMBA", "").strip() not in ("", "0")

_state = {"backend": "numba" if (_HAVE_NUMBA and not _DISABLED) else "numpy"}


def njit(*args, **kwargs):
    """``numba.njit`` when available, identity decorator otherwise."""
    if _HAVE_NUMBA:
        kwargs.setdefault("error_model", "numpy")
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


def have_numba():
    return _HAVE_NUMBA


def get_backend():
    return _state["backend"]


def set_backend(name):
    """Select ``"numba"`` or ``"numpy"`` for subsequent kernel calls."""
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not _HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    _state["backend"] = name


@contextmanager
def backend(name):
    old = get_backend()
    set_backend(name)
    try:
        yield
    finally:
        _state["backend"] = old
