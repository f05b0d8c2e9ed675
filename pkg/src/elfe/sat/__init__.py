"""SAT kernel selection: compiled extension if built, pure Python otherwise.

Set ELFE_SAT_KERNEL=python to force the fallback (used by the benchmark and
the kernel-equivalence tests).
"""

from __future__ import annotations

import os

if os.environ.get("ELFE_SAT_KERNEL") == "python":
    from .pure import solve_cnf

    KERNEL = "python (forced)"
else:
    try:
        from ._satcore import solve_cnf  # type: ignore[no-redef]

        KERNEL = "compiled"
    except ImportError:
        from .pure import solve_cnf  # type: ignore[no-redef]

        KERNEL = "python"

__all__ = ["solve_cnf", "KERNEL"]
