"""Command-line studies: ``converge``, ``timing``, ``diag`` and ``mesh``."""

from __future__ import annotations

import argparse
from dataclasses import fields, replace
import logging
from pathlib import Path
import sys

from threadpoolctl import threadpool_limits

from . import bench
from .coarse import build_mesh, write_mesh
from .lattice import make_config
from .plot import write_loglog
from .potential import EamParams
from .solver import SolveOptions

log = logging.getLogger("qnll")

EAM_KEYS = {f.name for f in fields(EamParams)}
SOLVER_KEYS = {"grad_tol", "max_iter", "shrink", "armijo", "max_backtracks"}


def read_config(path: str | Path | None) -> tuple[EamParams, SolveOptions]:
    """Parse ``key=value`` lines overriding potential and solver parameters."""
    eam, opts = EamParams(), SolveOptions()
    if path is None:
        return eam, opts
    eam_kw, opt_kw = {}, {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key in EAM_KEYS:
            eam_kw[key] = float(val)
        elif key in SOLVER_KEYS:
            opt_kw[key] = int(val) if key in ("max_iter", "max_backtracks") else float(val)
        else:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
    return EamParams(**eam_kw), replace(opts, **opt_kw)


def _int_list(s: str) -> list[int]:
    return [int(v) for v in s.split(",") if v.strip()]


def _float_list(s: str) -> list[float]:
    return [float(v) for v in s.split(",") if v.strip()]


def _str_list(s: str) -> list[str]:
    return [v.strip().upper() for v in s.split(",") if v.strip()]


def _tag(alpha: float) -> str:
    return f"{alpha:g}".replace(".", "p")


# -- subcommands -------------------------------------------------------------------

def cmd_converge(args) -> int:
    eam, opts = read_config(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    k_list = args.k_list or ([4, 8, 16, 32, 64, 128] if args.paper_scale else [4, 8, 16, 32])
    if any(b <= a for a, b in zip(k_list, k_list[1:])):
        raise SystemExit("--k-list must be increasing")
    res = bench.run_convergence(args.alpha, k_list, args.regime, args.models, args.scheme, eam, opts)
    stem = f"converge_{args.regime}_{args.scheme}_a{_tag(args.alpha)}"
    bench.write_rows(out / f"{stem}.csv", res.rows)
    if res.differences:
        bench.write_differences(out / f"{stem}_qnl_vs_qnll.csv", res.differences)
    xname = "L" if args.regime == "no_coarse" else "dof"
    series = {m: (res.column(m, xname), res.errors(m)) for m in args.models}
    write_loglog(out / f"{stem}.svg", series, xname, "||grad(y_exact - y)||_L2",
                 f"alpha={args.alpha:g}, {args.regime}, {args.scheme}")
    for m in args.models:
        x, e = res.column(m, xname), res.errors(m)
        slope = bench.fit_slope(x, e) if len(x) > 1 else float("nan")
        print(f"{m}: slope vs {xname} = {slope:.3f}")
    for d in res.differences:
        print(f"K={d[0]}: ||grad(y_QNL - y_QNLL)|| = {d[5]:.3e} ({d[5] / d[6]:.2%} of QNL error)")
    for msg in res.flagged:
        log.warning(msg)
    print(f"wrote {out / stem}.csv")
    return 0


def cmd_timing(args) -> int:
    eam, opts = read_config(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    base = bench.PAPER_SCALE_TIMING if args.paper_scale else bench.TimingSetup()
    setup = replace(base, alpha=args.alpha, K=args.K)
    with threadpool_limits(limits=1):
        recs = bench.run_timing(setup, args.nl_fractions, eam, opts)
    path = out / f"timing_a{_tag(args.alpha)}.csv"
    bench.write_dicts(path, recs)
    print(f"{'method':>8} {'nl_fraction':>12} {'time_s':>10} {'ratio':>8}")
    for r in recs:
        print(f"{r['model']:>8} {r['nl_fraction']:12.4f} {r['wall_time_s']:10.4f} {r['ratio']:8.2%}")
    print(f"wrote {path}")
    return 0


def cmd_diag(args) -> int:
    eam, _ = read_config(args.config)
    cfg = make_config(args.N, args.K, args.L, args.F, args.alpha, eam)
    rep = bench.diagnostics(cfg, args.models)
    lines = [f"config N={cfg.N} K={cfg.K} Kbar={cfg.Kbar} L={cfg.L} F={cfg.F:g}"]
    for k, v in rep.items():
        lines.append(f"{k}: {v:.6e}" if isinstance(v, float) else f"{k}: {v}")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "diag.txt").write_text(text)
    return 0


def cmd_mesh(args) -> int:
    mesh, N = build_mesh(args.K, args.L, args.alpha, N=args.N)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"mesh_K{args.K}_L{args.L}_a{_tag(args.alpha)}.txt"
        write_mesh(path, mesh, args.K, args.L, args.alpha)
        print(f"wrote {path} ({len(mesh)} nodes, N={N})")
    else:
        sys.stdout.write(f"# {args.K} {args.L} {N} {args.alpha}\n")
        sys.stdout.write("\n".join(str(int(v)) for v in mesh.nodes) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qnll", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, out_default="results"):
        p.add_argument("--out", default=out_default, help="output directory")
        p.add_argument("--config", default=None, help="key=value file overriding EAM and solver parameters")
        p.add_argument("--paper-scale", action="store_true", help="use the large problem sizes")

    p = sub.add_parser("converge", help="error vs size sweep against the exact solution")
    p.add_argument("--alpha", type=float, default=1.2)
    p.add_argument("--k-list", type=_int_list, default=None, help="comma separated, increasing")
    p.add_argument("--regime", choices=["no_coarse", "coarse"], default="no_coarse")
    p.add_argument("--models", type=_str_list, default=["QNL", "QNLL"])
    p.add_argument("--scheme", choices=["balanced", "unbalanced"], default="balanced",
                   help="unbalanced keeps Kbar and N but sets L = Kbar")
    common(p)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("timing", help="QNLL/QNL solve-time ratios on a fixed mesh")
    p.add_argument("--alpha", type=float, default=1.2)
    p.add_argument("--K", type=int, default=4)
    p.add_argument("--nl-fractions", type=_float_list, default=[0.25, 0.5, 0.75, 1.0])
    common(p)
    p.set_defaults(func=cmd_timing)

    p = sub.add_parser("diag", help="homogeneous-state consistency report")
    p.add_argument("--N", type=int, default=32)
    p.add_argument("--K", type=int, default=4)
    p.add_argument("--L", type=int, default=8)
    p.add_argument("--F", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=1.2)
    p.add_argument("--models", type=_str_list, default=["ATM", "QNL", "QNLL"])
    common(p, out_default=None)
    p.set_defaults(func=cmd_diag)

    p = sub.add_parser("mesh", help="print or save a graded mesh")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--N", type=int, default=None, help="override the derived domain size")
    common(p, out_default=None)
    p.set_defaults(func=cmd_mesh)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
