"""Kernel backend selection.

The integration loops live in ``_kernel_impl.py``, which doubles as the
pure-Python fallback; setup.py compiles that same file into the extension
``dotsim._kernel_c``.  The compiled kernel is preferred when present.  Set
``DOTSIM_KERNEL=python`` or ``DOTSIM_KERNEL=compiled`` to force one side
(the latter raises if the extension was never built).
"""

from __future__ import annotations

import os


def _load():
    forced = os.environ.get("DOTSIM_KERNEL", "").strip().lower()
    if forced not in ("", "python", "compiled"):
        raise RuntimeError(f"DOTSIM_KERNEL must be 'python' or 'compiled', got {forced!r}")
    if forced == "python":
        from . import _kernel_impl
        return _kernel_impl, "python"
    try:
        from . import _kernel_c  # type: ignore[attr-defined]
        return _kernel_c, "compiled"
    except ImportError:
        if forced == "compiled":
            raise RuntimeError(
                "DOTSIM_KERNEL=compiled but dotsim._kernel_c is not built; "
                "run: pip install -e . --no-build-isolation") from None
        from . import _kernel_impl
        return _kernel_impl, "python"


kernel, KERNEL_NAME = _load()
