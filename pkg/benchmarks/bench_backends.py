"""Timing comparison of the numba and numpy kernel backends.

Times the hot kernels (RK3 step, coupling step, LLF step, wave-speed scan)
at several grid sizes, plus a short end-to-end Sod integration per backend.
Run with ``python3 benchmarks/bench_backends.py``.
"""

import time

import numpy as np

from activeflux.kernels import numpy_backend

try:
    from activeflux.kernels import numba_backend
except ImportError:
    numba_backend = None

SIZES = (400, 3200, 12800)
GAMMA = 1.4


def solver_state(n, seed=0):
    rng = np.random.default_rng(seed)
    vbar = np.empty((n + 1, 3))
    vbar[:, 0] = 0.8 + 0.4 * rng.random(n + 1)
    vbar[:, 1] = 0.3 * rng.standard_normal(n + 1)
    vbar[:, 2] = 0.8 + 0.4 * rng.random(n + 1)
    ubar = np.empty((n, 3))
    ubar[:, 0] = 0.8 + 0.4 * rng.random(n)
    ubar[:, 1] = 0.3 * rng.standard_normal(n)
    ubar[:, 2] = 2.2 + 0.4 * rng.random(n)
    return ubar, vbar


def time_call(fn, *args, budget=0.4):
    fn(*args)  # warm-up (and jit compile)
    reps = 0
    t0 = time.perf_counter()
    while True:
        fn(*args)
        reps += 1
        elapsed = time.perf_counter() - t0
        if elapsed > budget and reps >= 3:
            return elapsed / reps


def kernel_suite(backend, n):
    ubar, vbar = solver_state(n)
    dx = 1.0 / n
    masks = np.ones(n + 1, dtype=bool)
    face = masks.copy()
    face[:3] = face[-3:] = False
    upad1 = np.concatenate([ubar[:1], ubar, ubar[-1:]])
    return {
        "rk3_step": (backend.rk3_step, (ubar, vbar, GAMMA, 1.3, dx, 0.1 * dx, 1, -1.0)),
        "postprocess": (
            backend.postprocess_step,
            (ubar, vbar, GAMMA, 1.3, dx, 0.5, 1, masks, face, -1.0),
        ),
        "llf_step": (backend.llf_step, (upad1, GAMMA, 0.1)),
        "max_wave_speed": (backend.max_wave_speed, (ubar, vbar, GAMMA)),
    }


def end_to_end(backend_name):
    """Sod at N=800 through the full driver, forcing the given backend."""
    import os
    import subprocess
    import sys

    code = (
        "import time; t0=time.perf_counter();"
        "from activeflux import registry_lookup, run;"
        "run(registry_lookup('sod'), 200);"  # warm-up / compile
        "t0=time.perf_counter();"
        "rec = run(registry_lookup('sod'), 800);"
        "print(f'{time.perf_counter()-t0:.3f} {rec.steps}')"
    )
    env = dict(os.environ, ACTIVEFLUX_BACKEND=backend_name)
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
    )
    wall, steps = out.stdout.split()
    return float(wall), int(steps)


def main():
    backends = {"numpy": numpy_backend}
    if numba_backend is not None:
        backends["numba"] = numba_backend
    else:
        print("numba unavailable: timing the numpy backend only")

    print(f"{'kernel':<16} {'N':>7} " + "".join(f"{name:>12}" for name in backends) + "  speedup")
    for n in SIZES:
        suites = {name: kernel_suite(mod, n) for name, mod in backends.items()}
        for kernel in next(iter(suites.values())):
            times = {}
            for name, suite in suites.items():
                fn, args = suite[kernel]
                times[name] = time_call(fn, *args)
            row = f"{kernel:<16} {n:>7} " + "".join(
                f"{times[name] * 1e6:>10.0f}us" for name in backends
            )
            if len(times) == 2:
                row += f"  {times['numpy'] / times['numba']:>6.1f}x"
            print(row)

    print("\nend-to-end: sod N=800 full run")
    for name in backends:
        wall, steps = end_to_end(name)
        print(f"  {name:<6} {wall:7.2f}s for {steps} steps ({wall / steps * 1e3:.2f} ms/step)")


if __name__ == "__main__":
    main()
