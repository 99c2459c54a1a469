"""Selects the compiled kernels when built, else the NumPy fallback.

Set ``GENBURGERS_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("GENBURGERS_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    NAME = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
        NAME = "compiled"
    except ImportError:  # extension not built
        _impl = _kernels_py
        NAME = "python"

duhamel_accumulate = _impl.duhamel_accumulate
fd_explicit_advance = _impl.fd_explicit_advance
