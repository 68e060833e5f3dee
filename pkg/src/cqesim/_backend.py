"""Kernel backend selection.

CQESIM_BACKEND=python forces the numpy kernels, CQESIM_BACKEND=c requires
the compiled extension, anything else (or unset) prefers the extension
and falls back to numpy.
"""

import os

from . import kernels_py

_choice = os.environ.get("CQESIM_BACKEND", "").strip().lower()

if _choice in ("python", "py", "numpy"):
    impl = kernels_py
elif _choice in ("c", "ext", "compiled"):
    from . import _kernels as impl  # noqa: F401
else:
    try:
        from . import _kernels as impl  # type: ignore[no-redef]
    except ImportError:
        impl = kernels_py

excitation_context = impl.excitation_context
expectation = impl.expectation
accumulate = impl.accumulate
apply_givens = impl.apply_givens
apply_phase = impl.apply_phase
qwc_degrees = impl.qwc_degrees


def backend_name() -> str:
    return impl.BACKEND
