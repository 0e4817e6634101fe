"""Native SVG Gantt rendering: one lane per stream's RB grants, one per core."""

from __future__ import annotations

from .instance import Instance

__all__ = ["render_gantt_svg", "emit_gantt"]

_CLASS_COLORS = {"branch": "#4c72b0", "alignment": "#dd8452", "head": "#55a868"}
_COMM_COLOR = "#8172b3"
_LANE_H = 22
_BAR_H = 14
_LEFT = 110
_WIDTH = 960
_TOP = 30


def render_gantt_svg(data: dict) -> str:
    """Render a serialized scheme result (see scheme_result_to_dict) to SVG."""
    if not data["report"]["feasible"]:
        raise ValueError("cannot render a Gantt chart for an infeasible result")
    meta = data["meta"]
    k, c = meta["num_streams"], meta["num_cores"]
    slot_s = data["slot_s"]
    classes = meta["node_classes"]
    exec_ = data["exec"]
    t_end = max(
        max(exec_["finish_s"]),
        max(tau for tau in data["completion_slots"]) * slot_s,
    )
    scale = (_WIDTH - _LEFT - 20) / (t_end * 1e3 if t_end > 0 else 1.0)
    lanes = k + c
    height = _TOP + lanes * _LANE_H + 40

    def x(seconds):
        return _LEFT + seconds * 1e3 * scale

    def bar(x0, x1, lane, color, title):
        y = _TOP + lane * _LANE_H + (_LANE_H - _BAR_H) / 2
        w = max(x1 - x0, 0.5)
        return (
            f'<rect x="{x0:.2f}" y="{y:.2f}" width="{w:.2f}" height="{_BAR_H}" '
            f'fill="{color}"><title>{title}</title></rect>'
        )

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{height}" '
        f'font-family="sans-serif" font-size="11">',
        f'<text x="{_LEFT}" y="16">{data["scheme"]} — J = '
        f'{data["report"]["composite_s"] * 1e3:.2f} ms</text>',
    ]
    for lane in range(lanes):
        y = _TOP + lane * _LANE_H
        label = f"stream {lane}" if lane < k else f"core {lane - k}"
        parts.append(f'<text x="6" y="{y + 15}">{label}</text>')
        parts.append(
            f'<line x1="{_LEFT}" y1="{y + _LANE_H}" x2="{_WIDTH - 10}" '
            f'y2="{y + _LANE_H}" stroke="#ddd"/>'
        )
    for stream, t, _f in data["grants"]:
        parts.append(
            bar(x(t * slot_s), x((t + 1) * slot_s), stream, _COMM_COLOR, f"RB slot {t}")
        )
    for v, core in enumerate(exec_["core"]):
        parts.append(
            bar(
                x(exec_["start_s"][v]),
                x(exec_["finish_s"][v]),
                k + core,
                _CLASS_COLORS.get(classes[v], "#999"),
                f"node {v} ({classes[v]})",
            )
        )
    # marker at the last upload completion
    tmax = max(data["completion_slots"]) * slot_s
    parts.append(
        f'<line x1="{x(tmax):.2f}" y1="{_TOP}" x2="{x(tmax):.2f}" '
        f'y2="{_TOP + lanes * _LANE_H}" stroke="#c44e52" stroke-dasharray="4,3"/>'
    )
    parts.append(
        f'<text x="{x(tmax) + 4:.2f}" y="{_TOP + lanes * _LANE_H + 14}" '
        f'fill="#c44e52">last upload {tmax * 1e3:.2f} ms</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts)


def emit_gantt(result, inst: Instance, path) -> None:
    """Write the execution timeline of a feasible SchemeResult as SVG."""
    from .schemes import scheme_result_to_dict

    svg = render_gantt_svg(scheme_result_to_dict(result, inst))
    with open(path, "w") as fh:
        fh.write(svg)
