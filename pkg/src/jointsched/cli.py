"""Command-line experiment runner.

Subcommands:
  run          run scheme(s) on one seeded instance, write result JSON/CSV
  sweep        run a grid over one axis (cores, subcarriers, sinr_threshold,
               payload_config, branch_config)
  gantt        render a stored result JSON as an SVG timeline
  oracle       brute-force a tiny instance and report per-scheme gaps
  convergence  run the three GA schemes and emit convergence CSV + SVG
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .config import default_config, load_config
from .experiments import ExperimentPlan, emit_convergence, run_plan
from .ga import GaParams
from .gantt import emit_gantt, render_gantt_svg
from .instance import generate_instance
from .oracle import OracleLimits, brute_force_optimum
from .rng import substream_seed
from .schemes import SCHEME_IDS, run_scheme, scheme_result_to_dict


def _load_cfg(path):
    return default_config() if path is None else load_config(path)


def _ga_from_args(args, scheme, seed):
    return GaParams(
        population=args.population,
        generations=args.generations,
        stall_limit=None if args.no_stall else 10,
        seed=substream_seed(seed, "ga", scheme),
    )


def _add_ga_args(p):
    p.add_argument("--population", type=int, default=40)
    p.add_argument("--generations", type=int, default=35)
    p.add_argument("--no-stall", action="store_true", help="disable stall-based early stop")


def cmd_run(args):
    cfg = _load_cfg(args.config)
    inst = generate_instance(cfg, substream_seed(args.seed, "instance"))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for scheme in args.scheme:
        res = run_scheme(scheme, inst, _ga_from_args(args, scheme, args.seed))
        data = scheme_result_to_dict(res, inst)
        (out / f"{scheme}.json").write_text(
            json.dumps(data, sort_keys=True, separators=(",", ":"))
        )
        res.comm.write_csv(out / f"{scheme}.comm.csv", inst)
        res.comm.write_summary_csv(out / f"{scheme}.streams.csv")
        if res.exec_schedule is not None:
            res.exec_schedule.write_csv(out / f"{scheme}.exec.csv", inst)
        j_ms = res.report.composite * 1e3
        print(f"{scheme}: J = {j_ms:.3f} ms feasible={res.report.feasible}")
    return 0


def _parse_seeds(spec: str):
    if ".." in spec:
        lo, hi = spec.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(s) for s in spec.split(",")]


def cmd_sweep(args):
    cfg = _load_cfg(args.config)
    values = [v for v in args.values.split(",") if v]
    if args.axis in ("cores", "subcarriers"):
        values = [int(v) for v in values]
    elif args.axis == "sinr_threshold":
        values = [float(v) for v in values]
    plan = ExperimentPlan(
        config=cfg,
        axis=args.axis,
        values=values,
        schemes=args.scheme or list(SCHEME_IDS),
        seeds=_parse_seeds(args.seeds),
        ga=GaParams(
            population=args.population,
            generations=args.generations,
            stall_limit=None if args.no_stall else 10,
        ),
        name=args.name,
    )
    rows = run_plan(plan, args.out)
    errors = [r for r in rows if "error" in r]
    print(f"{len(rows)} cells, {len(errors)} errors -> {Path(args.out) / plan.name}")
    return 1 if errors else 0


def cmd_gantt(args):
    data = json.loads(Path(args.input).read_text())
    svg = render_gantt_svg(data)
    Path(args.out).write_text(svg)
    print(f"wrote {args.out}")
    return 0


def cmd_oracle(args):
    cfg = _load_cfg(args.config)
    inst = generate_instance(cfg, substream_seed(args.seed, "instance"))
    result = brute_force_optimum(inst, OracleLimits(max_states=args.max_states))
    print(f"J* = {result.j_star * 1e3:.4f} ms")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if result.comm is not None:
        result.comm.write_csv(out / "oracle.comm.csv", inst)
        result.exec_schedule.write_csv(out / "oracle.exec.csv", inst)
    import csv

    with open(out / "gaps.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["scheme", "J_ms", "Jstar_ms", "gap_pct"])
        for scheme in SCHEME_IDS:
            res = run_scheme(scheme, inst, _ga_from_args(args, scheme, args.seed))
            gap = 100.0 * (res.report.composite - result.j_star) / result.j_star
            w.writerow(
                [scheme, repr(res.report.composite * 1e3), repr(result.j_star * 1e3), f"{gap:.3f}"]
            )
            print(f"{scheme}: J = {res.report.composite * 1e3:.4f} ms (gap {gap:.2f}%)")
    return 0


def cmd_convergence(args):
    cfg = _load_cfg(args.config)
    inst = generate_instance(cfg, substream_seed(args.seed, "instance"))
    traces = {}
    for scheme in ("ga-dag", "ga-dacs", "ga-joint"):
        ga = replace(_ga_from_args(args, scheme, args.seed), stall_limit=None)
        res = run_scheme(scheme, inst, ga)
        traces[scheme] = res.trace
        print(f"{scheme}: final best J = {res.trace.best[-1] * 1e3:.3f} ms")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    emit_convergence(traces, out / "convergence.csv", out / "convergence.svg")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="jointsched", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("run", help="run scheme(s) on one seeded instance")
    pr.add_argument("--config", default=None, help="scenario YAML (defaults built in)")
    pr.add_argument("--scheme", action="append", choices=SCHEME_IDS, required=True)
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--out", default="out/run")
    _add_ga_args(pr)
    pr.set_defaults(fn=cmd_run)

    ps = sub.add_parser("sweep", help="sweep one axis over seeds and schemes")
    ps.add_argument("--config", default=None)
    ps.add_argument("--axis", required=True,
                    choices=["cores", "subcarriers", "sinr_threshold", "payload_config", "branch_config"])
    ps.add_argument("--values", required=True, help="comma-separated axis values")
    ps.add_argument("--seeds", default="0..9", help="lo..hi or comma list")
    ps.add_argument("--scheme", action="append", choices=SCHEME_IDS)
    ps.add_argument("--out", default="out")
    ps.add_argument("--name", default="sweep")
    _add_ga_args(ps)
    ps.set_defaults(fn=cmd_sweep)

    pg = sub.add_parser("gantt", help="render a result JSON as SVG")
    pg.add_argument("--input", required=True)
    pg.add_argument("--out", required=True)
    pg.set_defaults(fn=cmd_gantt)

    po = sub.add_parser("oracle", help="brute-force a tiny instance")
    po.add_argument("--config", required=True)
    po.add_argument("--seed", type=int, default=0)
    po.add_argument("--out", default="out/oracle")
    po.add_argument("--max-states", type=int, default=5_000_000)
    _add_ga_args(po)
    po.set_defaults(fn=cmd_oracle)

    pc = sub.add_parser("convergence", help="GA convergence curves")
    pc.add_argument("--config", default=None)
    pc.add_argument("--seed", type=int, default=0)
    pc.add_argument("--out", default="out/convergence")
    _add_ga_args(pc)
    pc.set_defaults(fn=cmd_convergence)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
