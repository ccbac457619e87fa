"""Kernel backend selection.

Prefers the compiled extension; falls back to the numpy implementation when
the extension is missing or CIDLAB_PURE_PYTHON=1 is set. Both backends are
bit-identical, so the choice never changes results, only speed.
"""

from __future__ import annotations

import os

if os.environ.get("CIDLAB_PURE_PYTHON", "") == "1":
    from cidlab import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from cidlab import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from cidlab import _kernels_py as _impl

        BACKEND = "python"

polya_paths = _impl.polya_paths
