"""Numeric kernels with a compiled fast path.

The Cython extension ``_ckern`` is used when it was built; otherwise the
pure-Python mirror ``_pykern`` takes over.  Setting ``COVIEW_PURE_PYTHON=1``
forces the Python backend (useful for debugging and benchmarking).  Both
backends implement the same functions with identical semantics.
"""

import os

if os.environ.get("COVIEW_PURE_PYTHON"):
    from . import _pykern as _impl
else:
    try:
        from . import _ckern as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _pykern as _impl

BACKEND = _impl.BACKEND

louvain_local_pass = _impl.louvain_local_pass
label_prop_pass = _impl.label_prop_pass
spinglass_sweep = _impl.spinglass_sweep
edge_betweenness_arcs = _impl.edge_betweenness_arcs
geodesic_histogram = _impl.geodesic_histogram
triangle_count = _impl.triangle_count
core_numbers = _impl.core_numbers

__all__ = [
    "BACKEND",
    "louvain_local_pass",
    "label_prop_pass",
    "spinglass_sweep",
    "edge_betweenness_arcs",
    "geodesic_histogram",
    "triangle_count",
    "core_numbers",
]
