"""Kernel backend selection.

The compiled extension ``robustnewton._core`` is preferred when importable;
otherwise the pure-Python twin ``_core_py`` is used.  Set the environment
variable ROBUSTNEWTON_BACKEND to ``python`` or ``compiled`` to force one.
"""

import os

_forced = os.environ.get("ROBUSTNEWTON_BACKEND", "").strip().lower()

if _forced == "python":
    from . import _core_py as kernels

    BACKEND = "python"
elif _forced == "compiled":
    from . import _core as kernels  # raises ImportError if not built

    BACKEND = "compiled"
else:
    try:
        from . import _core as kernels

        BACKEND = "compiled"
    except ImportError:
        from . import _core_py as kernels

        BACKEND = "python"


def backend_name():
    """Name of the active kernel backend: 'compiled' or 'python'."""
    return BACKEND
