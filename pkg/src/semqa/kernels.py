"""Backend selection for the DP kernels.

The compiled extension is used when it imports; set ``SEMQA_PURE_PYTHON=1``
to force the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("SEMQA_PURE_PYTHON") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "cython"

lcs_length = _impl.lcs_length
levenshtein = _impl.levenshtein

__all__ = ["BACKEND", "lcs_length", "levenshtein"]
