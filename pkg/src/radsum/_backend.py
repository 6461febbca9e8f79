"""Kernel backend selection.

Prefers the compiled extension (``radsum._kernels``) and falls back to the
numpy implementation in ``_kernels_py``.  Set RADSUM_FORCE_PURE=1 to skip
the compiled module (used by the backend benchmark and tests).
"""

from __future__ import annotations

import os

if os.environ.get("RADSUM_FORCE_PURE") == "1":
    from . import _kernels_py as kernels

    HAVE_COMPILED = False
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]

        HAVE_COMPILED = True
    except ImportError:
        from . import _kernels_py as kernels

        HAVE_COMPILED = False

enum_dist_int64 = kernels.enum_dist_int64
enum_dist_big = kernels.enum_dist_big
panel_sums = kernels.panel_sums

CODE_KG1 = 11
CODE_KG2 = 12
CODE_KH1 = 21
CODE_KH2 = 22
CODE_KH3 = 23
CODE_KGAUSS = 3
