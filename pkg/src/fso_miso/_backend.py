"""Backend selection: compiled kernels when importable, NumPy otherwise.

FSO_MISO_BACKEND=python forces the fallback; FSO_MISO_BACKEND=compiled
insists on the extension and raises if it cannot be imported.
"""

from __future__ import annotations

import os

from . import _kernels_fallback

_requested = os.environ.get("FSO_MISO_BACKEND", "").strip().lower()

if _requested == "python":
    _impl = _kernels_fallback
elif _requested == "compiled":
    from . import _kernels as _impl  # noqa: F401  (ImportError is the contract)
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_fallback

backend_name: str = _impl.BACKEND_NAME
quad_form_pe_batch = _impl.quad_form_pe_batch
oracle_errors_batch = _impl.oracle_errors_batch


def available_backends() -> tuple:
    """Names of the kernel implementations importable in this install."""
    names = ["python"]
    try:
        from . import _kernels  # noqa: F401
    except ImportError:
        pass
    else:
        names.append("compiled")
    return tuple(names)


def get_backend(name: str):
    """Return the kernel module for an explicit backend name (for tests
    and benchmarks; the engine always uses the import-time selection)."""
    if name == "python":
        return _kernels_fallback
    if name == "compiled":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown backend {name!r}")
