"""Backend selection for the term-assembly kernels.

The compiled extension is used when importable; set ``DYSONIZE_KERNEL=python``
to force the numpy fallback.
"""

import os

import numpy as np

from . import _assembly_py

_forced = os.environ.get("DYSONIZE_KERNEL", "").strip().lower()

if _forced == "python":
    _impl = _assembly_py
    BACKEND = "python"
else:
    try:
        from . import _assembly as _impl
        BACKEND = "compiled"
    except ImportError:
        if _forced == "compiled":
            raise
        _impl = _assembly_py
        BACKEND = "python"

BACKENDS = {"python": _assembly_py}
if BACKEND == "compiled":
    BACKENDS["compiled"] = _impl


def _prep(dims, mats):
    dims = np.ascontiguousarray(dims, dtype=np.int64)
    mats = [np.ascontiguousarray(m, dtype=complex) for m in mats]
    return dims, mats


def accumulate(H, dims, sites, mats, coeff=1.0, backend=None):
    """Add ``coeff * prod_k embed(mats[k], sites[k])`` into the dense matrix ``H`` in place.

    Supports one- and two-site products; ``H`` must be C-contiguous complex128.
    """
    impl = BACKENDS[backend] if backend else _impl
    dims, mats = _prep(dims, mats)
    if len(sites) == 1:
        impl.accumulate_one(H, dims, int(sites[0]), mats[0], complex(coeff))
    elif len(sites) == 2:
        impl.accumulate_two(H, dims, int(sites[0]), mats[0], int(sites[1]), mats[1], complex(coeff))
    else:
        raise ValueError(f"terms must act on one or two sites, got {len(sites)}")
    return H
