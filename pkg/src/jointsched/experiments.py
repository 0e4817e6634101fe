"""Seeded experiment sweeps with CSV persistence and summary statistics.

A plan is a grid of (axis value x seed x scheme) cells. Each cell generates
its instance and GA master seed from labeled sub-streams of the cell seed,
runs the scheme, and persists the result; failures in one cell are recorded
without stopping the others. Reruns of an identical plan reproduce the
result CSVs byte for byte.
"""

from __future__ import annotations

import csv
import os
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from statistics import mean, pstdev

from .config import ScenarioConfig
from .ga import GaParams, GaTrace
from .instance import generate_instance
from .rng import substream_seed
from .schemes import SCHEME_IDS, run_scheme, scheme_result_to_dict

__all__ = [
    "ExperimentPlan",
    "PAYLOAD_CONFIGS",
    "BRANCH_CONFIGS",
    "apply_axis",
    "run_plan",
    "emit_convergence",
]

WORKERS_ENV = "JOINTSCHED_WORKERS"

# Named payload configurations for the communication-load grid.
PAYLOAD_CONFIGS = {
    "x5": dict(payloads_kb=[1.0, 7.5, 25.0, 10.0, 35.0, 50.0]),
    "x1": dict(payloads_kb=[0.2, 1.5, 5.0, 2.0, 7.0, 10.0]),
    "half": dict(payloads_kb=[0.1, 0.75, 2.5, 1.0, 3.5, 5.0]),
    "uniform4": dict(payloads_kb=[4.0] * 6),
    "subset3": dict(
        payloads_kb=[0.2, 5.0, 7.0],
        groups=[[0, 1], [2]],
        branch_lengths=[5, 5, 5],
    ),
}

# Named branch-length configurations for the computation-shape grid.
BRANCH_CONFIGS = {
    "5x6": dict(branch_lengths=[5] * 6),
    "8x6": dict(branch_lengths=[8] * 6),
    "mixed": dict(branch_lengths=[2, 8, 4, 8, 6, 5]),
    "split": dict(branch_lengths=[2, 2, 2, 8, 8, 8]),
    "alternating": dict(branch_lengths=[2, 8, 2, 8, 2, 8]),
}

_AXES = ("cores", "subcarriers", "sinr_threshold", "payload_config", "branch_config")


@dataclass
class ExperimentPlan:
    config: ScenarioConfig
    axis: str
    values: list
    schemes: list = field(default_factory=lambda: list(SCHEME_IDS))
    seeds: list = field(default_factory=lambda: list(range(10)))
    ga: GaParams = field(default_factory=GaParams)
    name: str = "plan"

    def validate(self):
        if self.axis not in _AXES:
            raise ValueError(f"unknown sweep axis {self.axis!r} (expected one of {_AXES})")
        if not self.values or not self.seeds or not self.schemes:
            raise ValueError("plan needs at least one axis value, seed, and scheme")
        unknown = [s for s in self.schemes if s not in SCHEME_IDS]
        if unknown:
            raise ValueError(f"unknown scheme(s): {unknown}")
        return self


def apply_axis(cfg: ScenarioConfig, axis: str, value) -> ScenarioConfig:
    """Derive the scenario for one axis value."""
    if axis == "cores":
        return cfg.with_overrides(cores=int(value))
    if axis == "subcarriers":
        return cfg.with_overrides(num_subcarriers=int(value))
    if axis == "sinr_threshold":
        return cfg.with_overrides(sinr_threshold_db=float(value))
    if axis == "payload_config":
        return cfg.with_overrides(**PAYLOAD_CONFIGS[str(value)])
    if axis == "branch_config":
        return cfg.with_overrides(**BRANCH_CONFIGS[str(value)])
    raise ValueError(f"unknown sweep axis {axis!r}")


def _run_cell(args):
    cfg, axis, value, seed, scheme, ga = args
    try:
        cell_cfg = apply_axis(cfg, axis, value)
        inst = generate_instance(cell_cfg, substream_seed(seed, "instance"))
        cell_ga = replace(ga, seed=substream_seed(seed, "ga", scheme))
        res = run_scheme(scheme, inst, cell_ga)
        return (value, seed, scheme), scheme_result_to_dict(res, inst), None
    except Exception:
        return (value, seed, scheme), None, traceback.format_exc()


def run_plan(plan: ExperimentPlan, out_dir) -> list:
    """Run every cell of the grid; persist per-cell JSON, a results CSV, and
    a per-(axis value, scheme) summary CSV. Returns the result rows."""
    plan.validate()
    out = Path(out_dir) / plan.name
    out.mkdir(parents=True, exist_ok=True)
    cells = [
        (plan.config, plan.axis, value, seed, scheme, plan.ga)
        for value in plan.values
        for seed in plan.seeds
        for scheme in plan.schemes
    ]
    workers = int(os.environ.get(WORKERS_ENV, "1"))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_cell, cells))
    else:
        outcomes = [_run_cell(c) for c in cells]

    rows = []
    for (value, seed, scheme), data, err in outcomes:
        cell_dir = out / f"{plan.axis}={value}" / str(seed)
        cell_dir.mkdir(parents=True, exist_ok=True)
        if err is not None:
            (cell_dir / f"{scheme}.error.txt").write_text(err)
            rows.append(
                {"axis_value": value, "seed": seed, "scheme": scheme, "error": err.strip().splitlines()[-1]}
            )
            continue
        import json

        (cell_dir / f"{scheme}.json").write_text(
            json.dumps(data, sort_keys=True, separators=(",", ":"))
        )
        rep = data["report"]
        rows.append(
            {
                "axis_value": value,
                "seed": seed,
                "scheme": scheme,
                "e2e_ms": None if rep["e2e_s"] is None else rep["e2e_s"] * 1e3,
                "psync_ms": None if rep["sync_s"] is None else rep["sync_s"] * 1e3,
                "J_ms": rep["composite_s"] * 1e3,
                "feasible": rep["feasible"],
            }
        )

    with open(out / "results.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["axis_value", "seed", "scheme", "e2e_ms", "psync_ms", "J_ms", "feasible"])
        for r in rows:
            if "error" in r:
                w.writerow([r["axis_value"], r["seed"], r["scheme"], "", "", "", f"error:{r['error']}"])
            else:
                w.writerow(
                    [
                        r["axis_value"],
                        r["seed"],
                        r["scheme"],
                        repr(r["e2e_ms"]) if r["e2e_ms"] is not None else "",
                        repr(r["psync_ms"]) if r["psync_ms"] is not None else "",
                        repr(r["J_ms"]),
                        int(r["feasible"]),
                    ]
                )

    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["axis_value", "scheme", "mean_J_ms", "std_J_ms", "min_J_ms", "n"])
        for value in plan.values:
            for scheme in plan.schemes:
                js = [
                    r["J_ms"]
                    for r in rows
                    if r.get("J_ms") is not None
                    and r["axis_value"] == value
                    and r["scheme"] == scheme
                ]
                if js:
                    w.writerow(
                        [value, scheme, repr(mean(js)), repr(pstdev(js)), repr(min(js)), len(js)]
                    )
    return rows


def emit_convergence(traces: dict, csv_path, svg_path=None) -> None:
    """Write best-so-far fitness per generation for each GA scheme (CSV, and
    optionally a simple polyline SVG)."""
    if not traces:
        raise ValueError("no traces to plot")
    schemes = sorted(traces)
    gmax = max(t.generations for t in traces.values())
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["generation"] + [f"{s}_best_J_ms" for s in schemes])
        for g in range(gmax):
            row = [g]
            for s in schemes:
                tr: GaTrace = traces[s]
                # a stalled trace holds its last best value
                val = tr.best[min(g, tr.generations - 1)]
                row.append(repr(val * 1e3))
            w.writerow(row)
    if svg_path is None:
        return
    width, height, pad = 640, 360, 45
    all_vals = [v for t in traces.values() for v in t.best]
    vmin, vmax = min(all_vals), max(all_vals)
    if vmax == vmin:
        vmax = vmin + 1e-9
    colors = ["#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="sans-serif" font-size="11">'
    ]
    for i, s in enumerate(schemes):
        tr = traces[s]
        pts = []
        for g in range(gmax):
            val = tr.best[min(g, tr.generations - 1)]
            px = pad + (width - 2 * pad) * (g / max(gmax - 1, 1))
            py = height - pad - (height - 2 * pad) * ((val - vmin) / (vmax - vmin))
            pts.append(f"{px:.1f},{py:.1f}")
        color = colors[i % len(colors)]
        pts_attr = " ".join(pts)
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts_attr}"/>'
        )
        parts.append(f'<text x="{width - pad + 4}" y="{20 + 14 * i}" fill="{color}">{s}</text>')
    parts.append(
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="#333"/>'
    )
    parts.append(f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="#333"/>')
    parts.append(f'<text x="{width // 2}" y="{height - 10}">generation</text>')
    parts.append(f'<text x="6" y="{pad - 10}">best J (ms): {vmin * 1e3:.1f}..{vmax * 1e3:.1f}</text>')
    parts.append("</svg>")
    with open(svg_path, "w") as fh:
        fh.write("\n".join(parts))
