"""Kernel backend selection.

The hot inner loops (convolution sweeps, spline fractional integrals) exist
twice: numba-compiled in ``_kernels_nb`` and pure numpy/fsum in
``_kernels_py``.  The environment variable ``FRACSPLINE_BACKEND`` picks one at
import time:

* unset or ``numba`` -- use the compiled kernels, silently falling back to the
  pure ones if numba cannot be imported;
* ``numpy`` -- force the pure implementations (useful for debugging and for
  the backend benchmark).
"""

from __future__ import annotations

import os
import warnings

_requested = os.environ.get("FRACSPLINE_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    warnings.warn(
        f"unknown FRACSPLINE_BACKEND={_requested!r}, expected 'numba' or 'numpy'; "
        "using 'numba'",
        stacklevel=1,
    )
    _requested = "numba"

if _requested == "numba":
    try:
        from . import _kernels_nb as _impl

        BACKEND = "numba"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "numpy"
else:
    from . import _kernels_py as _impl

    BACKEND = "numpy"

conv_weight_arrays = _impl.conv_weight_arrays
conv_at_nodes = _impl.conv_at_nodes
conv_lag = _impl.conv_lag
cdot = _impl.cdot
frac_integral_spline = _impl.frac_integral_spline
kernel_segment_integrals = _impl.kernel_segment_integrals

__all__ = [
    "BACKEND",
    "conv_weight_arrays",
    "conv_at_nodes",
    "conv_lag",
    "cdot",
    "frac_integral_spline",
    "kernel_segment_integrals",
]
