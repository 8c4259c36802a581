"""Select the compiled core when it is importable, else the NumPy fallback.

Set ``KERRKERNEL_BACKEND=python`` to force the fallback.
"""
import os

from . import _pycore

BACKEND = "python"
_impl = _pycore

if os.environ.get("KERRKERNEL_BACKEND", "").lower() != "python":
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        pass

kerr2_closed_gram = _impl.kerr2_closed_gram
smo_solve = _impl.smo_solve

__all__ = ["BACKEND", "kerr2_closed_gram", "smo_solve", "_pycore"]
