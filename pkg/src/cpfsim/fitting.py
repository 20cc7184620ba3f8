"""Log-log slope fitting and measurement windows."""

from __future__ import annotations

import math

NOISE_FLOOR = 1e-12
SATURATION = 0.5


def fit_loglog_slope(points) -> tuple[float, float, float]:
    """Least-squares line through (log x, log y); natural logarithms.

    Returns (slope, intercept, r_squared). Needs at least four strictly
    positive points.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 4:
        raise ValueError(f"need at least 4 points, got {len(pts)}")
    if any(x <= 0 or y <= 0 for x, y in pts):
        raise ValueError("all coordinates must be positive for a log-log fit")
    lx = [math.log(x) for x, _ in pts]
    ly = [math.log(y) for _, y in pts]
    n = len(pts)
    mx = sum(lx) / n
    my = sum(ly) / n
    sxx = sum((x - mx) ** 2 for x in lx)
    sxy = sum((x - mx) * (y - my) for x, y in zip(lx, ly))
    slope = sxy / sxx
    intercept = my - slope * mx
    ss_res = sum((y - (intercept + slope * x)) ** 2 for x, y in zip(lx, ly))
    ss_tot = sum((y - my) ** 2 for y in ly)
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return slope, intercept, r2


def slope_window(points, floor: float = NOISE_FLOOR, cap: float = SATURATION):
    """Drop points below the numeric noise floor or above saturation.

    The default floor matches float64 evaluation; measurements taken with the
    high-precision backend pass the floor matching their working precision.
    """
    return [(x, y) for x, y in points if floor < y < cap]


def windowed_slope(points, floor: float = NOISE_FLOOR, cap: float = SATURATION) -> float:
    kept = slope_window(points, floor, cap)
    return fit_loglog_slope(kept)[0]
