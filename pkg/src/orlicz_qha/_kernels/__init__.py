"""Hot-kernel backend selection.

Prefers the compiled Cython extension; falls back to the pure-numpy
implementations when the extension is missing or when the environment
variable ORLICZ_QHA_FORCE_FALLBACK is set to a non-empty value.
"""

import os

if os.environ.get("ORLICZ_QHA_FORCE_FALLBACK"):
    from . import fallback as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import fallback as _impl

BACKEND = _impl.BACKEND
jacobi_singular_values = _impl.jacobi_singular_values
displacement_batch = _impl.displacement_batch

__all__ = ["BACKEND", "jacobi_singular_values", "displacement_batch"]
