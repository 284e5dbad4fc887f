"""Hot-loop kernels with a compiled core and a pure NumPy fallback.

The compiled extension (``_native``, Cython) is preferred when it was
built; otherwise the pure implementation is used transparently. Both
expose the same two functions with identical semantics:

- ``smo_solve``: pairwise coordinate solver for the regression dual
- ``edge_widths``: ramp-width tracer for the blur-detection metric

``BACKEND`` names the implementation actually in use.
"""

from . import pure

try:
    from . import _native

    _impl = _native
    BACKEND = "native"
except ImportError:  # extension not built; fall back
    _impl = pure
    BACKEND = "pure"

smo_solve = _impl.smo_solve
edge_widths = _impl.edge_widths

__all__ = ["smo_solve", "edge_widths", "BACKEND", "pure"]
