"""Backend selection for the tree kernels.

The compiled extension is used when it imports; setting ``HTDML_PURE=1``
forces the numpy fallback.
"""
import os

from . import _pykernels

try:
    if os.environ.get("HTDML_PURE", "") not in ("", "0"):
        raise ImportError("pure-Python backend requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKENDS = {"python": _pykernels}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled

BACKEND = "compiled" if _compiled is not None else "python"
_active = BACKENDS[BACKEND]


def best_split(X, Y, idx, min_leaf=1, backend=None):
    impl = BACKENDS[backend] if backend else _active
    return impl.best_split(X, Y, idx, min_leaf)


def route(X, feature, threshold, left, right, backend=None):
    impl = BACKENDS[backend] if backend else _active
    return impl.route(X, feature, threshold, left, right)
