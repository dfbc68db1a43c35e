"""Joint confidence regions for (mu, P) from the log-scale moment estimates.

The region at confidence level ``1 - delta`` is the sublevel set

    S(mu, P) <= -2 ln(delta)

of the statistic built from the two decorrelated scores of
:func:`nbregion.estimation.standardize`:

    S(mu, P) = d1^2 / var_log_mu + (d2 - a * d1)^2 / var_resid

with ``d1 = ln(mu_hat) - ln(mu)`` and ``d2 = ln(P_hat + 1) - ln(P + 1)``,
all variances evaluated at the candidate point.  The statistic extends
smoothly to under-dispersed candidates; its domain is
``mu > 0, P > -1, mu + P > 0``, so regions may cross into ``P <= 0``
(sub-Poisson territory) and the boundary ``mu + P = 0`` acts as a barrier
where S diverges.

Everything here is deterministic: the same problem and grid always produce
identical arrays and identical rendered bytes.
"""

from __future__ import annotations

import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._contours import isolines
from ._validation import check_unit_open
from .distribution import NbParams
from .errors import DomainInvalid, EmptyGrid, GridTooCoarse
from .estimation import asymptotic_moments

__all__ = [
    "RegionProblem",
    "GridSpec",
    "RegionSplit",
    "ContourGrid",
    "critical_value",
    "region_statistic",
    "contains",
    "default_grid",
    "contour_grid",
    "render",
]

DEFAULT_LEVELS = (0.5, 0.8, 0.95)

#: Environment variable capping the number of worker threads used to fill
#: contour grids; unset or "1" means serial evaluation.
THREADS_ENV_VAR = "NB_REGION_THREADS"


@dataclass(frozen=True)
class RegionProblem:
    """Observed log-scale estimates, sample size and requested levels.

    Levels are confidence levels in (0, 1); they are deduplicated and stored
    sorted ascending.
    """

    log_mu_hat: float
    log_p1_hat: float
    n: int
    levels: tuple[float, ...] = DEFAULT_LEVELS

    def __post_init__(self):
        if not (math.isfinite(self.log_mu_hat) and math.isfinite(self.log_p1_hat)):
            raise ValueError("log-scale estimates must be finite")
        if self.n < 2:
            raise ValueError(f"n must be at least 2, got {self.n}")
        levels = tuple(sorted({check_unit_open(v, "level") for v in self.levels}))
        if not levels:
            raise ValueError("at least one confidence level is required")
        object.__setattr__(self, "levels", levels)


@dataclass(frozen=True)
class GridSpec:
    """Rectangular evaluation window with inclusive bounds and point counts."""

    mu_min: float
    mu_max: float
    p_min: float
    p_max: float
    mu_steps: int = 256
    p_steps: int = 256

    def __post_init__(self):
        for name in ("mu_min", "mu_max", "p_min", "p_max"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.mu_min <= 0:
            raise ValueError(f"mu_min must be positive, got {self.mu_min}")
        if self.p_min <= -1:
            raise ValueError(f"p_min must exceed -1, got {self.p_min}")
        if not self.mu_min < self.mu_max:
            raise ValueError("mu_min must be smaller than mu_max")
        if not self.p_min < self.p_max:
            raise ValueError("p_min must be smaller than p_max")
        if self.mu_steps < 2 or self.p_steps < 2:
            raise GridTooCoarse("each grid axis needs at least 2 points")


@dataclass(frozen=True)
class RegionSplit:
    """Area of a region split at P = 0: the Poisson side (P <= 0) and the rest."""

    poisson_part: float
    nb_part: float


@dataclass
class ContourGrid:
    """Evaluated statistic plus per-level masks, boundaries and area split.

    ``stat`` is NaN outside the statistic's domain; ``masks[level]`` flags
    grid points inside the region; ``boundaries[level]`` holds polylines in
    (mu, P) coordinates (closed loops repeat their first vertex); and
    ``split[level]`` reports the region's grid-cell area on either side of
    P = 0.
    """

    problem: RegionProblem
    spec: GridSpec
    mus: np.ndarray
    ps: np.ndarray
    stat: np.ndarray
    valid: np.ndarray
    masks: dict[float, np.ndarray] = field(default_factory=dict)
    boundaries: dict[float, list[np.ndarray]] = field(default_factory=dict)
    split: dict[float, RegionSplit] = field(default_factory=dict)


def critical_value(delta: float) -> float:
    """Threshold -2 ln(delta) for the region statistic at tail mass ``delta``.

    Matches the chi-square(2 dof) upper quantile: the two standardized
    scores are asymptotically independent standard normals.
    """
    return -2.0 * math.log(check_unit_open(delta, "delta"))


def _statistic_values(problem: RegionProblem, mu, p):
    """Region statistic; works elementwise on floats or arrays."""
    d1 = problem.log_mu_hat - np.log(mu)
    d2 = problem.log_p1_hat - np.log1p(p) - (p / (1.0 + p)) * d1
    v1 = (1.0 + p) / (problem.n * mu)
    vr = 2.0 * (mu + p) / (problem.n * mu)
    return d1 * d1 / v1 + d2 * d2 / vr


def region_statistic(problem: RegionProblem, candidate: tuple[float, float]) -> float:
    """Evaluate the statistic at a single candidate ``(mu, p)``.

    Raises :class:`DomainInvalid` outside ``mu > 0, p > -1, mu + p > 0``.
    """
    mu, p = (float(v) for v in candidate)
    if not (math.isfinite(mu) and math.isfinite(p)):
        raise DomainInvalid(f"candidate ({mu}, {p}) must be finite")
    if mu <= 0 or p <= -1 or mu + p <= 0:
        raise DomainInvalid(
            f"candidate ({mu}, {p}) outside the domain mu > 0, p > -1, mu + p > 0"
        )
    return float(_statistic_values(problem, mu, p))


def contains(problem: RegionProblem, candidate: tuple[float, float], delta: float) -> bool:
    """Whether ``candidate`` lies in the confidence region with tail mass ``delta``."""
    return region_statistic(problem, candidate) <= critical_value(delta)


def default_grid(
    problem: RegionProblem,
    guess: NbParams,
    k: float = 4.0,
    mu_steps: int = 256,
    p_steps: int = 256,
) -> GridSpec:
    """Window of +-k asymptotic standard deviations around the estimates.

    The bounds are set on the log scale and mapped back, which keeps
    ``mu_min > 0`` and ``p_min > -1`` automatically.  ``guess`` supplies the
    parameter point at which the asymptotic moments are evaluated, normally
    the fitted parameters with a negative dispersion clamped to 0.
    """
    if not (math.isfinite(k) and k > 0):
        raise ValueError(f"k must be positive and finite, got {k}")
    am = asymptotic_moments(guess, problem.n)
    half1 = k * math.sqrt(am.var_log_mu)
    half2 = k * math.sqrt(am.var_log_p1)
    return GridSpec(
        mu_min=math.exp(problem.log_mu_hat - half1),
        mu_max=math.exp(problem.log_mu_hat + half1),
        p_min=math.exp(problem.log_p1_hat - half2) - 1.0,
        p_max=math.exp(problem.log_p1_hat + half2) - 1.0,
        mu_steps=mu_steps,
        p_steps=p_steps,
    )


def _thread_count() -> int:
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None or not raw.strip():
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(
            f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}"
        ) from None
    if value < 1:
        raise ValueError(f"{THREADS_ENV_VAR} must be a positive integer, got {value}")
    return value


def _fill_stat(problem: RegionProblem, mus, ps, valid) -> np.ndarray:
    stat = np.full((mus.size, ps.size), np.nan)

    def fill(lo: int, hi: int) -> None:
        with np.errstate(divide="ignore", invalid="ignore"):
            block = _statistic_values(problem, mus[lo:hi, None], ps[None, :])
        stat[lo:hi] = np.where(valid[lo:hi], block, np.nan)

    workers = min(_thread_count(), mus.size)
    if workers == 1:
        fill(0, mus.size)
    else:
        bounds = np.linspace(0, mus.size, workers + 1).astype(int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for fut in [
                pool.submit(fill, lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])
            ]:
                fut.result()
    return stat


def contour_grid(problem: RegionProblem, spec: GridSpec) -> ContourGrid:
    """Evaluate the statistic on ``spec`` and extract per-level regions.

    Grid points with ``mu + p <= 0`` are masked (NaN statistic, never inside
    any region).  Boundaries come from marching squares with linear
    interpolation, so each polyline vertex sits where the interpolated
    statistic equals the level's critical value.
    """
    mus = np.linspace(spec.mu_min, spec.mu_max, spec.mu_steps)
    ps = np.linspace(spec.p_min, spec.p_max, spec.p_steps)
    valid = (mus[:, None] + ps[None, :]) > 0.0
    stat = _fill_stat(problem, mus, ps, valid)

    dmu = (spec.mu_max - spec.mu_min) / (spec.mu_steps - 1)
    dp = (spec.p_max - spec.p_min) / (spec.p_steps - 1)
    cell_area = dmu * dp
    grid = ContourGrid(problem=problem, spec=spec, mus=mus, ps=ps, stat=stat, valid=valid)

    on_poisson_side = ps[None, :] <= 0.0
    for level in problem.levels:
        c0 = critical_value(1.0 - level)
        with np.errstate(invalid="ignore"):
            mask = valid & (stat <= c0)
        grid.masks[level] = mask
        lines = []
        for line in isolines(stat, valid, c0):
            lines.append(
                np.column_stack(
                    [spec.mu_min + line[:, 0] * dmu, spec.p_min + line[:, 1] * dp]
                )
            )
        grid.boundaries[level] = lines
        grid.split[level] = RegionSplit(
            poisson_part=cell_area * int(np.count_nonzero(mask & on_poisson_side)),
            nb_part=cell_area * int(np.count_nonzero(mask & ~on_poisson_side)),
        )
    return grid


def render(grid: ContourGrid, fmt: str = "csv") -> bytes:
    """Serialize a grid as ``csv`` (statistic table) or ``svg`` (region plot).

    Raises :class:`EmptyGrid` when every grid point is outside the domain.
    """
    if not np.any(grid.valid):
        raise EmptyGrid("no valid grid point to render")
    fmt = fmt.lower()
    if fmt == "csv":
        return _render_csv(grid)
    if fmt == "svg":
        return _render_svg(grid)
    raise ValueError(f"unknown render format {fmt!r}; expected 'csv' or 'svg'")


def _render_csv(grid: ContourGrid) -> bytes:
    """One ``mu,p,stat`` row per valid grid point, 9 significant digits, LF."""
    buf = io.StringIO()
    buf.write("mu,p,stat\n")
    for i, mu in enumerate(grid.mus):
        row = grid.stat[i]
        ok = grid.valid[i]
        for j, p in enumerate(grid.ps):
            if ok[j]:
                buf.write(f"{mu:.9g},{p:.9g},{row[j]:.9g}\n")
    return buf.getvalue().encode("ascii")


_SVG_W, _SVG_H = 640, 480
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 62, 18, 18, 46
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _render_svg(grid: ContourGrid) -> bytes:
    spec = grid.spec
    x0, x1 = _MARGIN_L, _SVG_W - _MARGIN_R
    y0, y1 = _SVG_H - _MARGIN_B, _MARGIN_T

    def sx(mu):
        return x0 + (mu - spec.mu_min) / (spec.mu_max - spec.mu_min) * (x1 - x0)

    def sy(p):
        return y0 + (p - spec.p_min) / (spec.p_max - spec.p_min) * (y1 - y0)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" height="{_SVG_H}" '
        f'viewBox="0 0 {_SVG_W} {_SVG_H}">',
        f'<rect x="0" y="0" width="{_SVG_W}" height="{_SVG_H}" fill="white"/>',
    ]
    # Shade the sub-Poisson band P <= 0 when the window reaches it.
    if spec.p_min < 0:
        band_top = sy(min(0.0, spec.p_max))
        out.append(
            f'<rect data-role="poisson-band" x="{x0:.2f}" y="{band_top:.2f}" '
            f'width="{x1 - x0:.2f}" height="{y0 - band_top:.2f}" fill="#f0f0f0"/>'
        )
    if spec.p_min < 0 < spec.p_max:
        y_axis = sy(0.0)
        out.append(
            f'<line data-role="mu-axis" x1="{x0:.2f}" y1="{y_axis:.2f}" '
            f'x2="{x1:.2f}" y2="{y_axis:.2f}" stroke="black" stroke-width="1" '
            'stroke-dasharray="4 3"/>'
        )
    for idx, level in enumerate(grid.problem.levels):
        color = _PALETTE[idx % len(_PALETTE)]
        for line in grid.boundaries[level]:
            closed = len(line) > 1 and bool(np.all(line[0] == line[-1]))
            pts = line[:-1] if closed else line
            d = "M" + "L".join(f"{sx(mu):.2f},{sy(p):.2f}" for mu, p in pts)
            if closed:
                d += "Z"
            out.append(
                f'<path data-level="{level:g}" d="{d}" fill="none" '
                f'stroke="{color}" stroke-width="1.5"/>'
            )
    out.append(
        f'<rect x="{x0:.2f}" y="{y1:.2f}" width="{x1 - x0:.2f}" '
        f'height="{y0 - y1:.2f}" fill="none" stroke="black" stroke-width="1"/>'
    )
    for mu in np.linspace(spec.mu_min, spec.mu_max, 5):
        out.append(
            f'<text x="{sx(mu):.2f}" y="{y0 + 16:.2f}" font-size="11" '
            f'text-anchor="middle" font-family="sans-serif">{mu:.4g}</text>'
        )
    for p in np.linspace(spec.p_min, spec.p_max, 5):
        out.append(
            f'<text x="{x0 - 6:.2f}" y="{sy(p) + 4:.2f}" font-size="11" '
            f'text-anchor="end" font-family="sans-serif">{p:.4g}</text>'
        )
    out.append(
        f'<text x="{(x0 + x1) / 2:.2f}" y="{_SVG_H - 12}" font-size="12" '
        'text-anchor="middle" font-family="sans-serif">mu</text>'
    )
    out.append(
        f'<text x="14" y="{(y0 + y1) / 2:.2f}" font-size="12" text-anchor="middle" '
        f'font-family="sans-serif" transform="rotate(-90 14 {(y0 + y1) / 2:.2f})">P</text>'
    )
    for idx, level in enumerate(grid.problem.levels):
        color = _PALETTE[idx % len(_PALETTE)]
        ly = y1 + 14 + 16 * idx
        out.append(
            f'<line x1="{x1 - 80:.2f}" y1="{ly}" x2="{x1 - 56:.2f}" y2="{ly}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        out.append(
            f'<text x="{x1 - 50:.2f}" y="{ly + 4}" font-size="11" '
            f'font-family="sans-serif">{100 * level:g}%</text>'
        )
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")
