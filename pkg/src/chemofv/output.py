"""File outputs (snapshots CSV, diagnostics CSV, summary JSON) and run
comparison reports.

CSV values are written with 17 significant digits, so reruns of the same
configuration on the same build produce byte-identical files.  The summary
document additionally records wall-clock time and is therefore not meant to
be byte-stable.
"""

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .config import config_to_text
from .driver import count_bumps, error_norms, interface_location, restrict
from .model import Grid, StateField

SNAPSHOT_HEADER = "t,x,rho,q,u,phi"
DIAGNOSTIC_HEADER = "t,mass,res_rho,res_q,min_rho,l2_err,linf_err,bumps,neg_events"


class OutputError(RuntimeError):
    """I/O failure while writing run outputs (carries path context)."""


def _fmt(value):
    return format(float(value), ".17g")


def _snapshot_lines(result):
    lines = [SNAPSHOT_HEADER]
    x = result.grid.centers
    for t, field in zip(result.snapshot_times, result.snapshots):
        u = field.velocity()
        ts = _fmt(t)
        for i in range(result.grid.n_cells):
            lines.append(",".join((ts, _fmt(x[i]), _fmt(field.rho[i]),
                                   _fmt(field.q[i]), _fmt(u[i]), _fmt(field.phi[i]))))
    return lines


def _diagnostic_lines(result):
    lines = [DIAGNOSTIC_HEADER]
    d = result.diagnostics
    for i in range(len(d)):
        lines.append(",".join((
            _fmt(d.t[i]), _fmt(d.mass[i]), _fmt(d.res_rho[i]), _fmt(d.res_q[i]),
            _fmt(d.min_rho[i]), _fmt(d.l2_err[i]), _fmt(d.linf_err[i]),
            str(d.bumps[i]), str(d.neg_events[i]))))
    return lines


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def summary_dict(result, base_name):
    d = result.diagnostics
    final = result.final
    return {
        "name": base_name,
        "stop_reason": result.stop_reason,
        "failure_detail": result.failure_detail,
        "final_time": result.final_time,
        "n_steps": result.n_steps,
        "wall_time_s": result.wall_time,
        "final_mass": final.mass(),
        "final_bumps": count_bumps(final.rho),
        "final_min_rho": float(final.rho.min()),
        "final_res_rho": _json_safe(d.res_rho[-1] if len(d) else math.nan),
        "final_res_q": _json_safe(d.res_q[-1] if len(d) else math.nan),
        "final_l2_err": _json_safe(d.l2_err[-1] if len(d) else math.nan),
        "final_linf_err": _json_safe(d.linf_err[-1] if len(d) else math.nan),
        "interface_location": _json_safe(interface_location(final.rho, result.grid)),
        "neg_events": result.stats.neg_events,
        "roe_fallbacks": result.stats.roe_fallbacks,
        "config": config_to_text(result.config),
    }


def write_outputs(result, out_dir, base_name, quiet=False):
    """Write <base>_snapshots.csv, <base>_diagnostics.csv, <base>_summary.json
    into out_dir; returns {kind: path}."""
    paths = {
        "snapshots": os.path.join(out_dir, f"{base_name}_snapshots.csv"),
        "diagnostics": os.path.join(out_dir, f"{base_name}_diagnostics.csv"),
        "summary": os.path.join(out_dir, f"{base_name}_summary.json"),
    }
    payloads = {
        "snapshots": "\n".join(_snapshot_lines(result)) + "\n",
        "diagnostics": "\n".join(_diagnostic_lines(result)) + "\n",
        "summary": json.dumps(summary_dict(result, base_name), indent=2,
                              allow_nan=False) + "\n",
    }
    try:
        os.makedirs(out_dir, exist_ok=True)
        for kind, path in paths.items():
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(payloads[kind])
    except OSError as exc:
        raise OutputError(f"cannot write output under {out_dir!r}: {exc}") from exc
    return paths


def read_final_snapshot(path):
    """Load the last recorded state from a snapshots CSV.

    Returns (t, StateField); the grid is rebuilt from the x column.
    """
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except OSError as exc:
        raise OutputError(f"cannot read snapshots file {path!r}: {exc}") from exc
    if data.size == 0:
        raise OutputError(f"snapshots file {path!r} has no rows")
    t = data[:, 0]
    last = data[t == t[-1]]
    x = last[:, 1]
    n = last.shape[0]
    dx = x[1] - x[0] if n > 1 else 2.0 * x[0]
    grid = Grid(n, float(n * dx))
    field = StateField(grid, last[:, 2].copy(), last[:, 3].copy(), last[:, 5].copy())
    return float(t[-1]), field


def read_summary(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise OutputError(f"cannot read summary file {path!r}: {exc}") from exc


@dataclass(frozen=True)
class ComparisonReport:
    """Density error norms, momentum sizes and interface locations of run A
    against run B (or an analytic profile)."""

    label_a: str
    label_b: str
    n_cells: int
    l1_rho: float
    l2_rho: float
    linf_rho: float
    linf_q_a: float
    linf_q_b: float
    interface_a: float
    interface_b: float

    @property
    def interface_error(self):
        if math.isnan(self.interface_a) or math.isnan(self.interface_b):
            return math.nan
        return abs(self.interface_a - self.interface_b)

    def as_text(self):
        rows = [
            ("compared on cells", str(self.n_cells)),
            ("L1 density error", f"{self.l1_rho:.6e}"),
            ("L2 density error", f"{self.l2_rho:.6e}"),
            ("Linf density error", f"{self.linf_rho:.6e}"),
            (f"Linf momentum [{self.label_a}]", f"{self.linf_q_a:.6e}"),
            (f"Linf momentum [{self.label_b}]", f"{self.linf_q_b:.6e}"),
            (f"interface [{self.label_a}]", f"{self.interface_a:.6g}"),
            (f"interface [{self.label_b}]", f"{self.interface_b:.6g}"),
            ("interface error", f"{self.interface_error:.6e}"),
        ]
        width = max(len(name) for name, _ in rows)
        header = f"comparison: {self.label_a} vs {self.label_b}"
        return "\n".join([header] + [f"  {name.ljust(width)}  {val}" for name, val in rows])


def _common_grid(field_a, field_b):
    na, nb = field_a.grid.n_cells, field_b.grid.n_cells
    if abs(field_a.grid.length - field_b.grid.length) > 1e-9 * field_a.grid.length:
        raise ValueError("cannot compare runs on different domains")
    if na == nb:
        return field_a, field_b
    if na % nb == 0:
        coarse = StateField(field_b.grid, restrict(field_a.rho, na // nb),
                            restrict(field_a.q, na // nb),
                            restrict(field_a.phi, na // nb))
        return coarse, field_b
    if nb % na == 0:
        coarse = StateField(field_a.grid, restrict(field_b.rho, nb // na),
                            restrict(field_b.q, nb // na),
                            restrict(field_b.phi, nb // na))
        return field_a, coarse
    raise ValueError(
        f"incompatible grids: {na} and {nb} cells (need equal or an integer "
        f"refinement factor)")


def compare_fields(field_a, field_b, label_a="A", label_b="B"):
    """Error report of run A against run B after restriction to the coarser grid."""
    fa, fb = _common_grid(field_a, field_b)
    err = error_norms(fa.rho, fb.rho, fa.grid.dx)
    return ComparisonReport(
        label_a=label_a, label_b=label_b, n_cells=fa.grid.n_cells,
        l1_rho=err.l1, l2_rho=err.l2, linf_rho=err.linf,
        linf_q_a=float(np.abs(fa.q).max(initial=0.0)),
        linf_q_b=float(np.abs(fb.q).max(initial=0.0)),
        interface_a=interface_location(fa.rho, fa.grid),
        interface_b=interface_location(fb.rho, fb.grid))


def compare_to_profile(field, profile, label_a="run", label_b="analytic"):
    """Error report of a discrete field against an analytic stationary profile."""
    ref = profile.rho(field.grid.centers)
    err = error_norms(field.rho, ref, field.grid.dx)
    return ComparisonReport(
        label_a=label_a, label_b=label_b, n_cells=field.grid.n_cells,
        l1_rho=err.l1, l2_rho=err.l2, linf_rho=err.linf,
        linf_q_a=float(np.abs(field.q).max(initial=0.0)),
        linf_q_b=0.0,
        interface_a=interface_location(field.rho, field.grid),
        interface_b=profile.xbar if profile.kind == "lateral" else profile.ybar)
