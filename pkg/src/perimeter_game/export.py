"""Trajectory, outcome, and plot writers. Output is byte-for-byte deterministic."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from .core import to_cartesian
from .scenario_file import scenario_to_dict
from .simulator import Trajectory
from .strategies import StageLabel

CSV_HEADER = ("t", "stage", "R", "theta", "beta", "ax", "ay", "dx", "dy", "alpha", "u", "p")

STAGE_COLORS = {
    StageLabel.PRE_GAME: "#7f7f7f",
    StageLabel.PARTIAL_INFO: "#1f77b4",
    StageLabel.FULL_INFO: "#ff7f0e",
    StageLabel.ESCAPE: "#2ca02c",
}


def trajectory_csv(traj: Trajectory) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for s in traj.samples:
        writer.writerow([repr(s.t), s.stage.value] + [repr(getattr(s, k)) for k in CSV_HEADER[2:]])
    return buf.getvalue()


def _state_dict(state) -> dict:
    attacker, defender = to_cartesian(state)
    return {"t": state.t, "R": state.R, "theta": state.theta, "beta": state.beta,
            "attacker": list(attacker), "defender": list(defender)}


def special_points(traj: Trajectory) -> dict:
    """Labelled attacker/defender positions at the start and at each stage change.

    A defender point is only added when the defender has moved since the last one.
    """
    first = traj.samples[0]
    att = [(first.t, first.ax, first.ay)]
    dfd = [(first.t, first.dx, first.dy)]
    for t, ev in traj.events:
        if ev.kind in ("waypoint", "aligned") and ev.to == ev.from_stage.value:
            continue
        (ax, ay), (dx, dy) = to_cartesian(ev.state)
        if math.hypot(ax - att[-1][1], ay - att[-1][2]) > 1e-9:
            att.append((t, ax, ay))
        if math.hypot(dx - dfd[-1][1], dy - dfd[-1][2]) > 1e-6:
            dfd.append((t, dx, dy))
    return {
        "attacker": [{"label": f"x_A^{i}", "t": t, "x": x, "y": y} for i, (t, x, y) in enumerate(att)],
        "defender": [{"label": f"x_D^{i}", "t": t, "x": x, "y": y} for i, (t, x, y) in enumerate(dfd)],
    }


def outcome_dict(traj: Trajectory) -> dict:
    o = traj.outcome
    return {
        "verdict": o.verdict.value,
        "stages_visited": [{"stage": st.value, "t": t} for st, t in o.stages_visited],
        "terminal_state": _state_dict(o.terminal_state),
        "classification_at_full_info": o.classification_at_full_info.value if o.classification_at_full_info else None,
        "events": [{"t": t, "kind": ev.kind, "from": ev.from_stage.value, "to": ev.to,
                    "R": ev.state.R, "theta": ev.state.theta} for t, ev in traj.events],
        "special_points": special_points(traj),
        "config": scenario_to_dict(traj.config),
    }


def outcome_json(traj: Trajectory) -> str:
    return json.dumps(outcome_dict(traj), indent=2, sort_keys=True) + "\n"


def _fmt(x: float) -> str:
    return f"{x:.4f}"


def render_svg(traj: Trajectory, scale: float = 160.0) -> str:
    cfg = traj.config
    xs = [s.ax for s in traj.samples] + [s.dx for s in traj.samples]
    ys = [s.ay for s in traj.samples] + [s.dy for s in traj.samples]
    extent = max([1.0, cfg.R0 if cfg.constrained else 1.0] + [abs(v) for v in xs + ys]) + 0.3
    size = 2.0 * extent * scale

    def px(x, y):
        return _fmt((x + extent) * scale), _fmt((extent - y) * scale)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(size)}" height="{_fmt(size)}" '
        f'viewBox="0 0 {_fmt(size)} {_fmt(size)}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_fmt(size)}" height="{_fmt(size)}" fill="white"/>',
    ]
    cx, cy = px(0.0, 0.0)
    out.append(f'<circle cx="{cx}" cy="{cy}" r="{_fmt(scale)}" fill="#f2f2f2" stroke="black" stroke-width="1.5"/>')
    if cfg.constrained:
        out.append(f'<circle cx="{cx}" cy="{cy}" r="{_fmt(cfg.R0 * scale)}" fill="none" stroke="#555" '
                   f'stroke-dasharray="6 4"/>')
        for t, ev in traj.events:
            if ev.to == StageLabel.FULL_INFO.value:
                (ax, ay), _ = to_cartesian(ev.state)
                ex, ey = px(ax, ay)
                out.append(f'<circle cx="{ex}" cy="{ey}" r="{_fmt(cfg.rA * scale)}" fill="none" '
                           f'stroke="#9467bd" stroke-dasharray="3 3"/>')
                break

    for stage, samples in traj.stage_segments():
        color = STAGE_COLORS[stage]
        # Join each segment to the previous sample so the path is continuous.
        idx = traj.samples.index(samples[0])
        seg = traj.samples[max(idx - 1, 0): idx + len(samples)]
        a_pts = " ".join("{},{}".format(*px(s.ax, s.ay)) for s in seg)
        d_pts = " ".join("{},{}".format(*px(s.dx, s.dy)) for s in seg)
        out.append(f'<polyline points="{a_pts}" fill="none" stroke="{color}" stroke-width="2"/>')
        out.append(f'<polyline points="{d_pts}" fill="none" stroke="{color}" stroke-width="4" '
                   f'stroke-opacity="0.6"/>')

    points = special_points(traj)
    for who, marker in (("attacker", "#d62728"), ("defender", "#17becf")):
        for pt in points[who]:
            x, y = px(pt["x"], pt["y"])
            base, sup = pt["label"].split("^")
            sub = base.split("_")[1]
            out.append(f'<circle cx="{x}" cy="{y}" r="3.5" fill="{marker}"/>')
            out.append(f'<text x="{_fmt(float(x) + 5)}" y="{_fmt(float(y) - 5)}">x'
                       f'<tspan baseline-shift="sub" font-size="9">{sub}</tspan>'
                       f'<tspan baseline-shift="super" font-size="9">{sup}</tspan></text>')

    y0 = 18
    for i, (stage, color) in enumerate(STAGE_COLORS.items()):
        out.append(f'<rect x="10" y="{y0 + 16 * i - 9}" width="14" height="4" fill="{color}"/>')
        out.append(f'<text x="30" y="{y0 + 16 * i}">{stage.value}</text>')
    out.append(f'<text x="10" y="{_fmt(size - 10)}">verdict: {traj.outcome.verdict.value}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_run_outputs(traj: Trajectory, output_dir) -> dict:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "trajectory.csv": trajectory_csv(traj),
        "outcome.json": outcome_json(traj),
        "plot.svg": render_svg(traj),
    }
    for name, text in files.items():
        (out / name).write_text(text, encoding="utf-8")
    return {name: out / name for name in files}
