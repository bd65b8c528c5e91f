"""Selects the step-kernel backend at import time.

The compiled Cython module is preferred when it importable; the numpy
module is the fallback.  `DYNTEMP_BACKEND=py|ext` forces a choice, which
the benchmark and the parity tests use.  Both backends implement the same
function set with the same tie-break rules; they may differ in the last
ulp because the compiled matvecs accumulate in a different order than
BLAS.
"""

from __future__ import annotations

import os

from . import _stepkernels_py

_choice = os.environ.get("DYNTEMP_BACKEND", "auto")

if _choice not in ("auto", "py", "ext"):
    raise ImportError(f"DYNTEMP_BACKEND must be auto, py or ext, got {_choice!r}")

kernels = _stepkernels_py
if _choice in ("auto", "ext"):
    try:
        from . import _stepkernels as _ext  # type: ignore[attr-defined]

        kernels = _ext
    except ImportError:
        if _choice == "ext":
            raise ImportError(
                "DYNTEMP_BACKEND=ext but the compiled kernels are not built; "
                "run `pip install -e . --no-build-isolation`"
            )

BACKEND_NAME: str = kernels.BACKEND_NAME


def available_backends() -> dict[str, object]:
    """Name -> kernel module for every importable backend."""
    out: dict[str, object] = {"numpy": _stepkernels_py}
    try:
        from . import _stepkernels as _ext  # type: ignore[attr-defined]

        out["compiled"] = _ext
    except ImportError:
        pass
    return out
