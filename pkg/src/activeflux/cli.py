"""Command-line interface: run / convergence / si-study.

A flat ``key = value`` configuration file can preset any flag; explicit
flags win.  Keys match the long flag names with either '-' or '_'.
"""

from __future__ import annotations

import argparse
import sys

from . import kernels
from .driver import (
    RunConfig,
    convergence_study,
    format_convergence_table,
    format_si_table,
    run,
    si_study,
    write_csv,
)
from .indicator import ALPHAS
from .physics import InvalidStateError
from .postprocess import GATES
from .problems import PROBLEMS, registry_lookup


def parse_config_file(path):
    """Parse flat 'key = value' lines; '#' starts a comment."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, _, val = line.partition("=")
            values[key.strip().replace("-", "_")] = val.strip()
    return values


def _add_common(p, multi_n=False):
    p.add_argument("--config", help="flat key = value file presetting any flag")
    p.add_argument("--problem", choices=sorted(PROBLEMS), help="benchmark name")
    if multi_n:
        p.add_argument("--n", help="comma-separated cell counts, e.g. 64,128,256")
    else:
        p.add_argument("--n", help="number of primary cells")
    p.add_argument("--t-end", dest="t_end", help="override final time")
    p.add_argument("--cfl", help="Courant number (default 0.25)")
    p.add_argument("--theta", help="minmod parameter in [1,2] (default 1.3)")
    p.add_argument("--k", help="SI threshold constant (default: per problem)")
    p.add_argument("--alpha", choices=ALPHAS, help="SI functional (default momentum)")
    p.add_argument("--beta", help="post-processing strength in [0,1] (default 0.5)")
    p.add_argument("--gate", choices=GATES, help="post-processing gating")
    p.add_argument("--out", help="output CSV path (run) or directory (si-study)")


def _merged(args, file_cfg, key, fallback=None):
    cli = getattr(args, key, None)
    if cli is not None:
        return cli
    return file_cfg.get(key, fallback)


def _build(args, multi_n=False):
    file_cfg = parse_config_file(args.config) if args.config else {}
    name = _merged(args, file_cfg, "problem")
    if name is None:
        raise ValueError("no problem selected: pass --problem or set it in the config file")
    spec = registry_lookup(name)

    def num(key, cast, default=None):
        v = _merged(args, file_cfg, key)
        return default if v is None else cast(v)

    config = RunConfig(
        cfl=num("cfl", float, 0.25),
        theta=num("theta", float, 1.3),
        beta=num("beta", float, 0.5),
        gate=_merged(args, file_cfg, "gate", "everywhere"),
        k=num("k", float),
        alpha=_merged(args, file_cfg, "alpha"),
        t_end=num("t_end", float),
    )
    n_raw = _merged(args, file_cfg, "n")
    if n_raw is None:
        raise ValueError("no grid size given: pass --n")
    if multi_n:
        n = [int(s) for s in str(n_raw).split(",") if s.strip()]
    else:
        n = int(n_raw)
    out = _merged(args, file_cfg, "out")
    return spec, n, config, out


def cmd_run(args):
    spec, n, config, out = _build(args)
    record = run(spec, n, config)
    path = out or f"{spec.name}_n{n}.csv"
    write_csv(record, path)
    print(
        f"{spec.name}: N={n} steps={record.steps} t={record.time:.6g} "
        f"flagged={int(record.flags.sum())}/{n} "
        f"mass-drift={record.conservation_drift[0]:.3e} "
        f"slope-fallbacks={record.slope_fallbacks}"
    )
    print(f"wrote {path}")
    return 0


def cmd_convergence(args):
    spec, n_list, config, out = _build(args, multi_n=True)
    rows = convergence_study(spec, n_list, config)
    print(format_convergence_table(rows))
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write("n,dx,l1_error,order\n")
            for r in rows:
                order = "" if r.order is None else f"{r.order:.17g}"
                fh.write(f"{r.n},{r.dx:.17g},{r.l1_error:.17g},{order}\n")
        print(f"wrote {out}")
    return 0


def cmd_si_study(args):
    spec, n_list, config, out = _build(args, multi_n=True)
    result = si_study(spec, n_list, config, out_dir=out)
    print(format_si_table(result))
    if out:
        print(f"wrote per-N SI CSVs to {out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="activeflux",
        description="1-D Euler solver on overlapping grids with a dual-solution "
        f"smoothness indicator (kernel backend: {kernels.BACKEND})",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate one benchmark and write a CSV")
    _add_common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_conv = sub.add_parser("convergence", help="L1 convergence study over a mesh sweep")
    _add_common(p_conv, multi_n=True)
    p_conv.set_defaults(func=cmd_convergence)

    p_si = sub.add_parser("si-study", help="SI decay study over a mesh sweep")
    _add_common(p_si, multi_n=True)
    p_si.set_defaults(func=cmd_si_study)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidStateError, ValueError, KeyError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
