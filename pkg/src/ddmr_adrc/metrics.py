"""Performance indices over a simulation log and the two-controller
comparison report.

Index conventions: the pose indices are plain means of squared errors over
the log grid; the time-weighted tracking index and the control-energy
index use a left-rectangle rule with the log step as dt, so reported
numbers are bit-reproducible from a given log.
"""

from dataclasses import dataclass, fields

import numpy as np

from .simulation import SimLog


@dataclass(frozen=True)
class PerformanceReport:
    opi_x: float
    opi_y: float
    opi_theta: float
    itae_right: float
    itae_left: float
    isu_right: float
    isu_left: float
    tv_right: float
    tv_left: float
    peak_e_theta: float

    def rows(self) -> list[tuple[str, float]]:
        return [(f.name, getattr(self, f.name)) for f in fields(self)]


def opi(series_ref: np.ndarray, series_actual: np.ndarray) -> float:
    """Mean squared deviation between two equal-length series."""
    ref = np.asarray(series_ref, dtype=float)
    act = np.asarray(series_actual, dtype=float)
    if ref.shape != act.shape:
        raise ValueError("series lengths differ")
    if ref.size < 1:
        raise ValueError("need at least one sample")
    return float(np.mean((ref - act) ** 2))


def itae(t: np.ndarray, omega_ref: np.ndarray, omega_actual: np.ndarray) -> float:
    """Time-weighted absolute tracking error, sum over t_i*|e_i|*dt
    (left rectangles over the grid's intervals)."""
    t = np.asarray(t, dtype=float)
    ref = np.asarray(omega_ref, dtype=float)
    act = np.asarray(omega_actual, dtype=float)
    if not (t.shape == ref.shape == act.shape):
        raise ValueError("series lengths differ")
    if t.size < 2:
        return 0.0
    dt = t[1] - t[0]
    e = np.abs(ref - act)
    return float(np.sum(t[:-1] * e[:-1]) * dt)


def isu(t: np.ndarray, u: np.ndarray) -> float:
    """Control energy, sum over u_i^2*dt (left rectangles)."""
    t = np.asarray(t, dtype=float)
    u = np.asarray(u, dtype=float)
    if t.shape != u.shape:
        raise ValueError("series lengths differ")
    if t.size < 2:
        return 0.0
    dt = t[1] - t[0]
    return float(np.sum(u[:-1] ** 2) * dt)


def total_variation(series: np.ndarray) -> float:
    """Sum of absolute sample-to-sample changes (chattering measure)."""
    s = np.asarray(series, dtype=float)
    if s.size < 2:
        return 0.0
    return float(np.sum(np.abs(np.diff(s))))


def peak_abs(series: np.ndarray) -> float:
    s = np.asarray(series, dtype=float)
    if s.size == 0:
        raise ValueError("empty series")
    return float(np.max(np.abs(s)))


def report_from_log(log: SimLog) -> PerformanceReport:
    """All indices for one run, computed over the full horizon."""
    t = log.t
    return PerformanceReport(
        opi_x=opi(log["x_ref"], log["x"]),
        opi_y=opi(log["y_ref"], log["y"]),
        opi_theta=opi(log["theta_ref"], log["theta"]),
        itae_right=itae(t, log["wr_ref"], log["wr"]),
        itae_left=itae(t, log["wl_ref"], log["wl"]),
        isu_right=isu(t, log["ur"]),
        isu_left=isu(t, log["ul"]),
        tv_right=total_variation(log["ur"]),
        tv_left=total_variation(log["ul"]),
        peak_e_theta=peak_abs(log["e_theta"]),
    )


def reduction_percent(baseline: float, improved: float) -> float:
    """100*(1 - improved/baseline); 0 when the two values are equal
    (including both zero)."""
    if improved == baseline:
        return 0.0
    if baseline == 0.0:
        return float("-inf") if improved > 0 else float("inf")
    return 100.0 * (1.0 - improved / baseline)


_ROW_LABELS = {
    "opi_x": "OPI_x",
    "opi_y": "OPI_y",
    "opi_theta": "OPI_theta",
    "itae_right": "ITAE right",
    "itae_left": "ITAE left",
    "isu_right": "ISU right",
    "isu_left": "ISU left",
    "tv_right": "TV(u) right",
    "tv_left": "TV(u) left",
    "peak_e_theta": "peak |e_theta|",
}


def comparison_rows(
    baseline: PerformanceReport, improved: PerformanceReport
) -> list[tuple[str, float, float, float]]:
    """(label, baseline, improved, reduction %) per index."""
    out = []
    for (name, base_v), (_, imp_v) in zip(baseline.rows(), improved.rows()):
        out.append(
            (_ROW_LABELS[name], base_v, imp_v, reduction_percent(base_v, imp_v))
        )
    return out


def format_comparison(
    baseline: PerformanceReport,
    improved: PerformanceReport,
    names: tuple[str, str] = ("ADRC", "IADRC"),
) -> str:
    """Plain-text two-column comparison table plus a machine-readable
    key=value block."""
    rows = comparison_rows(baseline, improved)
    head = f"{'index':<16}{names[0]:>16}{names[1]:>16}{'reduction %':>14}"
    lines = [head, "-" * len(head)]
    for label, a, b, red in rows:
        lines.append(f"{label:<16}{a:>16.7g}{b:>16.7g}{red:>14.4g}")
    lines.append("")
    lines.append("# key=value block")
    for (name, base_v), (_, imp_v) in zip(baseline.rows(), improved.rows()):
        lines.append(f"{names[0].lower()}.{name}={base_v!r}")
        lines.append(f"{names[1].lower()}.{name}={imp_v!r}")
        lines.append(
            f"delta_pct.{name}={reduction_percent(base_v, imp_v)!r}"
        )
    return "\n".join(lines) + "\n"
