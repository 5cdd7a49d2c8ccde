"""Run driver, convergence and SI-study harnesses, and CSV emission.

Per-step ordering is fixed: advance (SSP-RK3), then the smoothness
indicator on the fresh pre-coupling state, then the conservative
post-processing.  The emitted record carries the last step's indicator.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .grid import DualSolution, OverlapGrid
from .indicator import SiField, compute_si, si_decay_rate
from .integrator import StepControl, compute_dt, ssprk3_step
from .physics import GasModel, InvalidStateError, cons_to_prim
from .postprocess import CouplingConfig, apply_postprocess
from .problems import ProblemSpec

_TIME_EPS = 1e-14


@dataclass(frozen=True)
class RunConfig:
    """Numerical parameters of a run; problem-level values can be overridden."""

    cfl: float = 0.25
    theta: float = 1.3
    beta: float = 0.5
    gate: str = "everywhere"
    k: float | None = None  # None: use the problem's registered constant
    alpha: str | None = None
    t_end: float | None = None
    max_steps: int = 5_000_000
    floor: float | None = None


@dataclass
class RunRecord:
    """Per-cell final state plus run metadata."""

    problem: str
    n: int
    dx: float
    x: np.ndarray
    rho: np.ndarray
    u: np.ndarray
    p: np.ndarray
    E: np.ndarray
    eps: np.ndarray
    eps_hat: np.ndarray
    flags: np.ndarray
    eps_ave: float
    k: float
    c_ref: float
    steps: int
    time: float
    dt_min: float
    dt_max: float
    conservation_drift: np.ndarray  # per component, boundary-flux corrected
    slope_fallbacks: int
    solution: DualSolution


def run(
    spec: ProblemSpec,
    n: int,
    config: RunConfig = RunConfig(),
    observer=None,
) -> RunRecord:
    """Integrate a benchmark to its final time.

    ``observer``, when given, is called with the event names "advance",
    "si", and "postprocess" as each sub-step completes (used to pin the
    ordering in tests).
    """
    if n < 8:
        raise ValueError(f"need at least 8 cells, got {n}")
    grid = OverlapGrid(n, spec.x_min, spec.x_max, spec.bc)
    gas = GasModel(spec.gamma, floor=config.floor)
    t_end = config.t_end if config.t_end is not None else spec.t_end
    control = StepControl(t_end=t_end, cfl=config.cfl, max_steps=config.max_steps)
    k = config.k if config.k is not None else spec.k
    alpha = config.alpha if config.alpha is not None else spec.alpha
    coupling = CouplingConfig(beta=config.beta, gate=config.gate)

    sol = spec.initial_solution(grid, gas)
    totals0 = sol.ubar.sum(axis=0) * grid.dx
    boundary_integral = np.zeros(3)  # time integral of (F_right - F_left)
    dt_min, dt_max = np.inf, 0.0
    fallbacks = 0
    steps = 0
    si: SiField | None = None

    while sol.time < t_end - _TIME_EPS * max(1.0, t_end):
        if steps >= control.max_steps:
            raise RuntimeError(
                f"step cap {control.max_steps} reached at t={sol.time:.6g}"
            )
        try:
            dt = compute_dt(sol, grid, gas, control.cfl, t_end)
            if dt <= 0.0:
                break
            sol, diag = ssprk3_step(sol, grid, gas, config.theta, dt)
            if observer is not None:
                observer("advance")
            si = compute_si(sol, gas, alpha=alpha, k=k)
            if observer is not None:
                observer("si")
            sol = apply_postprocess(
                sol, grid, gas, coupling, theta=config.theta, si_flags=si.flags
            )
            if observer is not None:
                observer("postprocess")
        except InvalidStateError as exc:
            raise InvalidStateError(
                f"{spec.name} N={n} failed at step {steps}, t={sol.time:.9g}: {exc}",
                index=exc.index,
                values=exc.values,
            ) from exc
        boundary_integral += dt * (diag["flux_right"] - diag["flux_left"])
        fallbacks += diag["slope_fallbacks"]
        dt_min = min(dt_min, dt)
        dt_max = max(dt_max, dt)
        steps += 1

    if si is None:  # zero-step run (t_end below the first dt floor)
        si = compute_si(sol, gas, alpha=alpha, k=k)

    totals = sol.ubar.sum(axis=0) * grid.dx
    residual = totals - totals0 + boundary_integral
    scale = np.maximum(
        np.maximum(np.abs(totals0), np.abs(totals)), np.abs(boundary_integral)
    )
    drift = np.abs(residual) / np.where(scale > 0.0, scale, 1.0)

    prim = cons_to_prim(sol.ubar, gas)
    return RunRecord(
        problem=spec.name,
        n=n,
        dx=grid.dx,
        x=grid.centers(),
        rho=prim[:, 0],
        u=prim[:, 1],
        p=prim[:, 2],
        E=sol.ubar[:, 2].copy(),
        eps=si.eps,
        eps_hat=si.eps_hat,
        flags=si.flags,
        eps_ave=si.eps_ave,
        k=k,
        c_ref=spec.c_ref,
        steps=steps,
        time=sol.time,
        dt_min=float(dt_min) if steps else 0.0,
        dt_max=float(dt_max),
        conservation_drift=drift,
        slope_fallbacks=fallbacks,
        solution=sol,
    )


def _fmt(v):
    return f"{v:.17g}"


def write_csv(record: RunRecord, path):
    """Emit the per-cell record: header x,rho,u,p,E,eps,eps_hat,flag."""
    _write_rows(record, path, extra_cols=())


def write_si_csv(record: RunRecord, path):
    """Record CSV extended with the two SI reference levels per row."""
    k_eps_ave = record.k * record.eps_ave
    c_dx2 = record.c_ref * record.dx * record.dx
    _write_rows(record, path, extra_cols=(("k_eps_ave", k_eps_ave), ("c_dx2", c_dx2)))


def _write_rows(record, path, extra_cols):
    header = "x,rho,u,p,E,eps,eps_hat,flag"
    for name, _ in extra_cols:
        header += f",{name}"
    lines = [header]
    for j in range(record.n):
        row = [
            _fmt(record.x[j]),
            _fmt(record.rho[j]),
            _fmt(record.u[j]),
            _fmt(record.p[j]),
            _fmt(record.E[j]),
            _fmt(record.eps[j]),
            _fmt(record.eps_hat[j]),
            "1" if record.flags[j] else "0",
        ]
        row.extend(_fmt(v) for _, v in extra_cols)
        lines.append(",".join(row))
    data = "\n".join(lines) + "\n"
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(data)
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


@dataclass
class ConvergenceRow:
    n: int
    dx: float
    l1_error: float
    order: float | None


def convergence_study(spec: ProblemSpec, n_list, config: RunConfig = RunConfig()):
    """L1 density error of the primary field against the exact solution
    (or a fine-grid self-reference), with observed orders between grids."""
    n_list = list(n_list)
    reference = None
    if not spec.advected_exact:
        n_ref = 4 * max(n_list)
        for n in n_list:
            if n_ref % n:
                raise ValueError(f"n={n} must divide the reference grid {n_ref}")
        reference = run(spec, n_ref, config)

    rows = []
    prev = None
    for n in n_list:
        rec = run(spec, n, config)
        grid = OverlapGrid(n, spec.x_min, spec.x_max, spec.bc)
        if spec.advected_exact:
            exact = spec.exact_density_averages(grid, rec.time)
        else:
            ratio = reference.n // n
            exact = reference.rho.reshape(n, ratio).mean(axis=1)
        err = float(np.sum(np.abs(rec.rho - exact)) * grid.dx)
        order = None if prev is None else float(np.log2(prev / err)) if err > 0 else None
        rows.append(ConvergenceRow(n=n, dx=grid.dx, l1_error=err, order=order))
        prev = err
    return rows


def format_convergence_table(rows):
    lines = [f"{'N':>8} {'dx':>12} {'L1 error':>14} {'order':>8}"]
    prev = None
    for r in rows:
        order = f"{r.order:8.3f}" if r.order is not None else " " * 8
        note = ""
        if prev is not None and r.l1_error > prev:
            note = "  ! error grew"
        lines.append(f"{r.n:>8} {r.dx:>12.6g} {r.l1_error:>14.6e} {order}{note}")
        prev = r.l1_error
    return "\n".join(lines)


@dataclass
class SiStudyResult:
    records: list
    rates: list  # decay rate between consecutive grids, None if undefined
    window: tuple | None


def si_study(spec: ProblemSpec, n_list, config: RunConfig = RunConfig(), out_dir=None):
    """Run a mesh sweep and report the indicator decay over the declared
    smooth window; optionally dump per-N SI CSVs into ``out_dir``."""
    n_list = list(n_list)
    records = [run(spec, n, config) for n in n_list]
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        for rec in records:
            write_si_csv(rec, os.path.join(out_dir, f"si_{spec.name}_n{rec.n}.csv"))

    window = spec.smooth_window_fractions()
    rates = []
    for coarse, fine in zip(records, records[1:]):
        if window is None:
            rates.append(None)
        else:
            rate = si_decay_rate(coarse.eps_hat, fine.eps_hat, window)
            rates.append(None if np.isnan(rate) else float(rate))
    return SiStudyResult(records=records, rates=rates, window=spec.smooth_window)


def format_si_table(result: SiStudyResult):
    lines = [f"{'N':>8} {'max eps_hat':>14} {'eps_ave':>14} {'flagged':>8} {'decay':>8}"]
    for i, rec in enumerate(result.records):
        rate = ""
        if i > 0:
            r = result.rates[i - 1]
            rate = f"{r:8.3f}" if r is not None else "  undef"
        lines.append(
            f"{rec.n:>8} {rec.eps_hat.max():>14.6e} {rec.eps_ave:>14.6e} "
            f"{int(rec.flags.sum()):>8} {rate}"
        )
    if result.window is None:
        lines.append("(no declared smooth window: decay rates omitted)")
    return "\n".join(lines)
