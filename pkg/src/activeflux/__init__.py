"""Second-order finite-volume solver for the 1-D Euler equations on
overlapping grids, co-evolving conservative and primitive cell averages,
with a smoothness indicator built from the discrepancy between the two."""

from .driver import RunConfig, RunRecord, convergence_study, run, si_study, write_csv
from .grid import DualSolution, OverlapGrid
from .indicator import SiField, compute_si, si_classify, si_decay_rate, si_filter, si_raw
from .integrator import StepControl, compute_dt, ssprk3_step
from .kernels import BACKEND
from .physics import GasModel, InvalidStateError, cons_to_prim, prim_to_cons
from .postprocess import CouplingConfig, apply_postprocess
from .problems import PROBLEMS, ProblemSpec, registry_lookup
from .riemann import RiemannProblem, exact_riemann, llf_reference_solve
from .scheme import DualRhs, compute_rhs

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CouplingConfig",
    "DualRhs",
    "DualSolution",
    "GasModel",
    "InvalidStateError",
    "OverlapGrid",
    "PROBLEMS",
    "ProblemSpec",
    "RiemannProblem",
    "RunConfig",
    "RunRecord",
    "SiField",
    "StepControl",
    "apply_postprocess",
    "compute_dt",
    "compute_rhs",
    "compute_si",
    "cons_to_prim",
    "convergence_study",
    "exact_riemann",
    "llf_reference_solve",
    "prim_to_cons",
    "registry_lookup",
    "run",
    "si_classify",
    "si_decay_rate",
    "si_filter",
    "si_raw",
    "ssprk3_step",
    "write_csv",
    "si_study",
]
