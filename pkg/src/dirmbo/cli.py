"""Command-line entry point.

Single-experiment mode runs seeded trials on one domain and writes the run
report, label exports, delimited outputs, and figures into --out.  Table mode
(--table) reproduces a whole published-table bundle instead.

Environment: DIRMBO_THREADS caps FFT worker threads (default 1).
"""

import argparse
import os
import sys

from .domains import labels_to_csv, save_labels
from .figures import save_energy_trace_figure, save_partition_figure
from .render import render_slices, render_sphere, render_torus2, write_ppm
from .runs import (
    DOMAIN_KINDS,
    build_report,
    make_domain,
    run_trials,
    write_report,
    write_trace_csv,
    write_trials_csv,
)
from .tables import run_table

__all__ = ["main", "build_parser"]


def build_parser():
    p = argparse.ArgumentParser(
        prog="dirmbo",
        description="Diffusion-generated Dirichlet k-partitions of periodic boxes and the sphere.",
    )
    p.add_argument("--domain", choices=DOMAIN_KINDS, help="computational domain")
    p.add_argument("--n", type=int, help="grid points per axis (sphere: per angle)")
    p.add_argument("--k", type=int, help="number of partition components")
    p.add_argument("--tau", type=float, help="diffusion time per sweep")
    p.add_argument("--length", type=float, default=2.0, help="torus side length (default 2)")
    p.add_argument("--seed", type=int, default=0, help="base RNG seed (trial t uses seed+t)")
    p.add_argument("--trials", type=int, default=1, help="independent trials, best kept")
    p.add_argument("--max-iters", type=int, default=1000, help="sweep cap per trial")
    p.add_argument("--init", default="random", help="random | schwarz-p | file:<labels.bin>")
    p.add_argument("--out", default="runs/out", help="output directory")
    p.add_argument("--render", nargs="?", const="default",
                   help="extra renderings: extend=<m> (2d) or slices=<axis> (3d/4d)")
    p.add_argument("--jobs", type=int, default=1, help="concurrent trials")
    p.add_argument("--table", choices=("t2d", "t3d", "sphere"), help="reproduce a whole table bundle")
    p.add_argument("--scale", choices=("paper", "small"), default="paper",
                   help="table mode: full-size grids or small CI grids")
    p.add_argument("--csv-labels", action="store_true", help="also export labels.csv (one row per point)")
    return p


def _parse_render(token):
    if token in (None, "default"):
        return {}
    key, _, value = token.partition("=")
    if key == "extend":
        return {"extend": int(value)}
    if key == "slices":
        return {"axis": int(value)}
    raise ValueError(f"bad --render argument {token!r}; use extend=<m> or slices=<axis>")


def _write_renders(labeling, out_dir, render_opts, requested, report):
    kind = report["config"]["domain_kind"]
    if kind == "torus2":
        write_ppm(render_torus2(labeling), os.path.join(out_dir, "partition.ppm"))
        if requested:
            extend = render_opts.get("extend", 2)
            img = render_torus2(labeling, extend=extend, boundary=True)
            write_ppm(img, os.path.join(out_dir, f"partition_x{extend}.ppm"))
    elif kind == "sphere":
        write_ppm(render_sphere(labeling), os.path.join(out_dir, "partition.ppm"))
        if requested:
            for view in ("vertical", "front", "side"):
                write_ppm(render_sphere(labeling, view), os.path.join(out_dir, f"view_{view}.ppm"))
    else:
        axis = render_opts.get("axis", 0)
        mid = [labeling.domain.axis_coords()[labeling.domain.n // 2]]
        write_ppm(render_slices(labeling, axis, mid)[0][1], os.path.join(out_dir, "partition.ppm"))
        if requested:
            cuts = render_slices(labeling, axis=axis)
            snapped = []
            for j, (pos, img) in enumerate(cuts):
                write_ppm(img, os.path.join(out_dir, f"slice_ax{axis}_{j}.ppm"))
                snapped.append(pos)
            report["slices"] = {"axis": axis, "positions": snapped}


def _run_single(args):
    for name in ("domain", "n", "k", "tau"):
        if getattr(args, name) is None:
            print(f"error: --{name} is required (or use --table)", file=sys.stderr)
            return 2
    try:
        domain = make_domain(args.domain, args.n, args.length)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.domain == "torus4" or (args.domain == "torus3" and args.n >= 128):
        print(
            f"note: {args.domain} at n={args.n} is a large run; expect minutes "
            "(and hours for 4d at n=64 with many trials)",
            file=sys.stderr,
        )
    try:
        render_opts = _parse_render(args.render)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    os.makedirs(args.out, exist_ok=True)
    try:
        records, best, labeling, traces = run_trials(
            domain, args.k, args.tau, args.init, args.trials, args.seed,
            max_iters=args.max_iters, jobs=args.jobs,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = build_report(
        domain, args.k, args.tau, args.init, args.trials, args.seed, args.max_iters, records, best,
    )
    write_trials_csv(records, os.path.join(args.out, "trials.csv"))
    if best is None:
        write_report(report, os.path.join(args.out, "report.json"))
        failures = {r.get("error") for r in records}
        seeds = [r["seed"] for r in records]
        print(
            f"error: all {args.trials} trial(s) failed ({', '.join(sorted(failures))}); "
            f"seeds {seeds}. See trials.csv for per-trial component context.",
            file=sys.stderr,
        )
        return 1

    save_labels(labeling, os.path.join(args.out, "labels.bin"))
    if args.csv_labels:
        labels_to_csv(labeling, os.path.join(args.out, "labels.csv"))
    best_trace = dict(traces).get(best)
    if best_trace is not None:
        write_trace_csv(best_trace, os.path.join(args.out, "trace.csv"))
    save_energy_trace_figure(traces, best, os.path.join(args.out, "energy_trace.png"))
    save_partition_figure(labeling, os.path.join(args.out, "partition.png"))
    _write_renders(labeling, args.out, render_opts, args.render is not None, report)
    write_report(report, os.path.join(args.out, "report.json"))
    best_rec = records[best]
    print(
        f"best trial {best}: energy={best_rec['energy']:.4f} "
        f"iterations={best_rec['iterations']} converged={best_rec['converged']} "
        f"ties={best_rec['tie_count']}"
    )
    print(f"outputs written to {args.out}")
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.table:
        bundle = run_table(
            args.table,
            scale=args.scale,
            out_dir=args.out,
            base_seed=args.seed,
            trials_override=None if args.trials == 1 else args.trials,
            jobs=args.jobs,
            max_iters=args.max_iters,
        )
        return 0 if bundle["all_passed"] else 1
    return _run_single(args)


if __name__ == "__main__":
    raise SystemExit(main())
