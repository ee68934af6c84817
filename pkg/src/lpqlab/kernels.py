"""Kernel selection.

The compiled extension is used when it imports; otherwise the numpy
fallback. Set ``LPQLAB_PURE=1`` to force the fallback.
"""
import os

import numpy as np

from . import _kernels_py

if os.environ.get("LPQLAB_PURE", "") == "1":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:  # extension not built
        _impl = _kernels_py
        BACKEND = "python"


def backend_module(name=None):
    """Kernel module for ``"compiled"``, ``"python"`` or ``None`` (the selected one)."""
    if name is None:
        return _impl
    if name == "python":
        return _kernels_py
    if name == "compiled":
        from . import _kernels  # type: ignore[attr-defined]

        return _kernels
    raise ValueError(f"unknown kernel backend {name!r}")


def wigner_d_table(two_lmax, beta, impl=None):
    """Return ``[d^{0}, d^{1/2}, ..., d^{two_lmax/2}]`` evaluated at ``beta``.

    Each entry has shape ``(len(beta), 2l+1, 2l+1)`` with rows and columns
    ordered by ``m = l, l-1, ..., -l``. ``impl`` picks a backend by name.
    """
    mod = backend_module(impl)
    beta = np.ascontiguousarray(np.atleast_1d(beta), dtype=np.float64)
    flat, offsets = mod.wigner_d_packed(int(two_lmax), beta)
    nb = beta.shape[0]
    return [
        flat[offsets[t]:offsets[t + 1]].reshape(nb, t + 1, t + 1)
        for t in range(int(two_lmax) + 1)
    ]
