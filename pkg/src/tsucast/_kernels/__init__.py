"""Backend selection for the DTW kernels.

The compiled extension is preferred when its build succeeded; the
array-sweep fallback is always available. Set ``TSUCAST_PURE_PYTHON=1``
to force the fallback (useful for benchmarking and debugging).
"""

import os

from . import _dtw_py


def _want_pure_python():
    flag = os.environ.get("TSUCAST_PURE_PYTHON", "").strip().lower()
    return flag not in ("", "0", "false", "no")


if _want_pure_python():
    _impl = _dtw_py
    BACKEND = "python"
else:
    try:
        from . import _dtw_cy as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _dtw_py
        BACKEND = "python"

dtw_batch = _impl.dtw_batch
dtw_prefix_batch = _impl.dtw_prefix_batch
dtw_banded = _impl.dtw_banded

__all__ = ["BACKEND", "dtw_batch", "dtw_prefix_batch", "dtw_banded"]
