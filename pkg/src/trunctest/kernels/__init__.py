"""Hot loops over packed hypercube points.

Two interchangeable implementations share one surface:

* ``_numba``: ``@njit`` loops (default when numba imports).
* ``_numpy``: vectorized numpy, no compilation step.

Set ``TRUNCTEST_BACKEND=numpy`` to force the fallback. Points are ``uint64``
words, so every kernel assumes ``n <= 64``.
"""

import os

from . import _numpy

BACKENDS = {"numpy": _numpy}

try:
    from . import _numba
except ImportError:  # pragma: no cover - numba missing
    _numba = None
else:
    BACKENDS["numba"] = _numba

_requested = os.environ.get("TRUNCTEST_BACKEND", "").strip().lower()
if _requested and _requested not in ("numba", "numpy"):
    raise ImportError(f"TRUNCTEST_BACKEND must be 'numba' or 'numpy', got {_requested!r}")
if _requested == "numpy" or _numba is None:
    BACKEND = "numpy"
else:
    BACKEND = "numba"

_impl = BACKENDS[BACKEND]

popcount = _impl.popcount
weight_k_masks = _impl.weight_k_masks
project = _impl.project
distinct_counts = _impl.distinct_counts
collision_counts = _impl.collision_counts
row_collisions = _impl.row_collisions
dual_weight_counts = _impl.dual_weight_counts
parity_consistent_counts = _impl.parity_consistent_counts

__all__ = [
    "BACKEND",
    "BACKENDS",
    "popcount",
    "weight_k_masks",
    "project",
    "distinct_counts",
    "collision_counts",
    "row_collisions",
    "dual_weight_counts",
    "parity_consistent_counts",
]
