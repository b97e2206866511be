"""Kernel dispatch: the compiled extension when it was built, numpy otherwise.

Set BIGKTYPE_PURE=1 to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
trace_sum = _pykernels.trace_sum
dirichlet_line = _pykernels.dirichlet_line
ellipsoid_points = _pykernels.ellipsoid_points
det_points = _pykernels.det_points

if not os.environ.get("BIGKTYPE_PURE"):
    try:
        from . import _core
    except ImportError:
        pass
    else:
        BACKEND = "compiled"
        trace_sum = _core.trace_sum
        dirichlet_line = _core.dirichlet_line
        ellipsoid_points = _core.ellipsoid_points
        det_points = _core.det_points
