"""Backend selection for the hot kernels.

The compiled extension (``_core``, Cython) is used when available; the
pure-NumPy twin (``_ref``) is the fallback.  Set ``TTBEAM_BACKEND`` to
``compiled`` or ``python`` to force one side (``compiled`` raises if the
extension is missing); anything else means automatic selection.
"""

import os

from . import _ref

_requested = os.environ.get("TTBEAM_BACKEND", "auto").strip().lower()

if _requested == "python":
    _impl = _ref
elif _requested == "compiled":
    from . import _core as _impl
else:
    try:
        from . import _core as _impl
    except ImportError:
        _impl = _ref

BACKEND = _impl.BACKEND_NAME


def backend():
    """Name of the active kernel backend: ``"compiled"`` or ``"python"``."""
    return BACKEND


def get_impl(name):
    """Fetch a specific backend module by name (for tests and benchmarks)."""
    if name == "python":
        return _ref
    if name == "compiled":
        from . import _core

        return _core
    raise ValueError(f"unknown backend {name!r}")


def eval_indices(cores, idx):
    return _impl.eval_indices(cores, idx)


def sweep_max(cores, k):
    return _impl.sweep_max(cores, k)


top_k_rows = _ref.top_k_rows
