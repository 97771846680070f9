"""Hot-kernel backend selection.

The compiled Cython extension is used when present; otherwise the numpy
fallback is selected.  CVBENCH_FORCE_FALLBACK=1 forces the fallback (used by
the equivalence tests and the kernel benchmark).
"""

import os

if os.environ.get("CVBENCH_FORCE_FALLBACK"):
    from . import numpy_backend as _impl
else:
    try:
        from . import _gaussian_fock as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import numpy_backend as _impl

fock_batch = _impl.fock_batch
eta_accumulate = _impl.eta_accumulate
backend_name = _impl.backend_name

__all__ = ["fock_batch", "eta_accumulate", "backend_name"]
