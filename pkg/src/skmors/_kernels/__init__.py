"""Backend selection for the numeric inner loops.

Set ``SKMORS_NUMBA=0`` to force the pure-numpy path. The numba path is used
by default whenever numba imports cleanly.
"""

import importlib
import os

import numpy as np

from . import numpy_impl

_want_numba = os.environ.get("SKMORS_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")

numba_impl = None
if _want_numba:
    try:
        # import_module, since a plain "from . import" would see the placeholder above
        numba_impl = importlib.import_module(f"{__name__}.numba_impl")
    except ImportError:  # pragma: no cover - numba is a declared dependency
        numba_impl = None

BACKEND = "numba" if numba_impl is not None else "numpy"
_impl = numba_impl if numba_impl is not None else numpy_impl


def pareto_mask(F):
    F = np.ascontiguousarray(F, dtype=np.float64)
    return np.asarray(_impl.pareto_mask(F), dtype=bool)


def hv2d(points, ref):
    P = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 2)
    return float(_impl.hv2d(P, np.asarray(ref, dtype=np.float64)))


def ehvd_many(front, means, preds, on_front, ref):
    return _impl.ehvd_many(
        np.ascontiguousarray(front, dtype=np.float64).reshape(-1, 2),
        np.ascontiguousarray(means, dtype=np.float64),
        np.ascontiguousarray(preds, dtype=np.float64),
        np.ascontiguousarray(on_front, dtype=np.int64),
        np.asarray(ref, dtype=np.float64),
    )


def nearest_rows(A, B):
    return np.asarray(
        _impl.nearest_rows(
            np.ascontiguousarray(A, dtype=np.float64), np.ascontiguousarray(B, dtype=np.float64)
        ),
        dtype=np.int64,
    )
