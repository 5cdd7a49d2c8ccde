"""Backend selection for the hot kernels.

The environment variable ``ACTIVEFLUX_BACKEND`` picks the implementation:

  auto   (default) numba if importable, else pure numpy
  numba  require the compiled kernels, fail if numba is missing
  numpy  force the pure-numpy path

Both backends expose the same functions with identical numerics; see
``benchmarks/bench_backends.py`` for a speed comparison.
"""

from __future__ import annotations

import os

from . import numpy_backend


def _resolve():
    choice = os.environ.get("ACTIVEFLUX_BACKEND", "auto").strip().lower()
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(
            f"ACTIVEFLUX_BACKEND={choice!r} not understood; use auto, numba, or numpy"
        )
    if choice == "numpy":
        return numpy_backend, "numpy"
    try:
        from . import numba_backend
    except ImportError:
        if choice == "numba":
            raise RuntimeError("ACTIVEFLUX_BACKEND=numba but numba is not importable")
        return numpy_backend, "numpy"
    return numba_backend, "numba"


_impl, BACKEND = _resolve()

dual_rhs = _impl.dual_rhs
rk3_step = _impl.rk3_step
cons_max_speed = _impl.cons_max_speed
max_wave_speed = _impl.max_wave_speed
si_raw_core = _impl.si_raw_core
staggered_targets = _impl.staggered_targets
residual_limit_update = _impl.residual_limit_update
flux_form_smooth = _impl.flux_form_smooth
postprocess_step = _impl.postprocess_step
llf_step = _impl.llf_step
llf_solve = _impl.llf_solve
