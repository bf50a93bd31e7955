"""Deterministic SVG rendering of bootstrap gain distributions, plus plain-text tables.

Each signal gets a row of horizontal density strips, one per decision ground,
colored by the ground's role.  Strips are kernel-smoothed histograms
(Silverman bandwidth) with a median tick; a point-mass sample renders as the
tick alone.  Rendering is a pure function of the plot spec: same spec, same
bytes.  The mark type is a presentation choice, not a reproduction of any
particular figure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .bootstrap import BootstrapResult, StatResult
from .errors import ReportError

# Fixed palette keyed by ground role, for cross-run comparability.
PALETTE = {
    "human": "#d95f02",
    "ai": "#1b9e77",
    "human_ai": "#7570b3",
    "other": "#666666",
    "none": "#4d4d4d",
}

MIN_AXIS_SPAN = 0.05
DENSITY_POINTS = 121


@dataclass(frozen=True)
class Strip:
    ground_label: str
    role: str
    samples: tuple[float, ...]

    @property
    def median(self) -> float:
        return float(np.quantile(np.array(self.samples), 0.5, method="linear"))


@dataclass(frozen=True)
class PlotGroup:
    label: str  # signal name (or gain label)
    strips: tuple[Strip, ...]


@dataclass(frozen=True)
class PlotSpec:
    groups: tuple[PlotGroup, ...]
    axis: tuple[float, float]
    width: int = 900
    strip_height: int = 16
    group_gap: int = 10

    def __post_init__(self):
        if self.axis[0] >= self.axis[1]:
            raise ReportError(f"axis range {self.axis} must have lo < hi")
        if not self.groups or any(not g.strips for g in self.groups):
            raise ReportError("every plot group needs at least one strip")

    @property
    def height(self) -> int:
        rows = sum(len(g.strips) for g in self.groups)
        return 50 + rows * (self.strip_height + 4) + len(self.groups) * self.group_gap + 30


def _nice_step(span: float) -> float:
    raw = span / 5.0
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if mult * mag >= raw:
            return mult * mag
    return 10.0 * mag


def _nice_axis(lo: float, hi: float) -> tuple[float, float]:
    if hi - lo < MIN_AXIS_SPAN:
        hi = lo + MIN_AXIS_SPAN
    step = _nice_step(hi - lo)
    nlo = math.floor(lo / step) * step
    nhi = math.ceil(hi / step) * step
    if nhi <= nlo:
        nhi = nlo + step
    return nlo, nhi


def _stat_label(stat: StatResult) -> str:
    if stat.signal is not None:
        return stat.signal
    return ",".join(stat.v1) if stat.v1 else "none"


def _ground_key(stat: StatResult) -> str:
    return ",".join(stat.ground) if stat.ground else "none"


def build_plot_spec(results: Sequence[BootstrapResult], axis: tuple[float, float] | None = None) -> PlotSpec:
    """Group bootstrap statistics into per-signal strips across all results.

    Signals are ordered by descending median under the human-role ground (the
    first ground if none is human-role); all results must cover the same
    signal labels.  The axis always expands to contain every sample.
    """
    if not results:
        raise ReportError("no results to plot")
    per_label: dict[str, list[Strip]] = {}
    label_sets = []
    for res in results:
        labels = set()
        for stat in res.statistics:
            label = _stat_label(stat)
            labels.add(label)
            per_label.setdefault(label, []).append(
                Strip(ground_label=_ground_key(stat), role=stat.ground_role, samples=stat.samples)
            )
        label_sets.append(labels)
    if any(ls != label_sets[0] for ls in label_sets[1:]):
        raise ReportError("results do not share the same signal set")

    def order_median(strips: list[Strip]) -> float:
        for strip in strips:
            if strip.role == "human":
                return strip.median
        return strips[0].median

    ordered = sorted(per_label, key=lambda lb: (-order_median(per_label[lb]), lb))
    groups = tuple(PlotGroup(label=lb, strips=tuple(per_label[lb])) for lb in ordered)

    all_samples = [s for g in groups for st in g.strips for s in st.samples]
    lo = min(0.0, min(all_samples))
    hi = max(all_samples)
    if axis is not None:
        lo = min(lo, float(axis[0]))
        hi = max(hi, float(axis[1]))
    return PlotSpec(groups=groups, axis=_nice_axis(lo, hi))


def _density(samples: np.ndarray, grid: np.ndarray) -> np.ndarray | None:
    """Gaussian-kernel density on the grid; None for a point mass."""
    n = len(samples)
    sd = float(np.std(samples, ddof=1)) if n > 1 else 0.0
    if sd == 0.0:
        return None
    q75, q25 = np.quantile(samples, [0.75, 0.25], method="linear")
    iqr = float(q75 - q25)
    spread = min(sd, iqr / 1.34) if iqr > 0 else sd
    bw = 0.9 * spread * n ** (-1.0 / 5.0)
    z = (grid[:, None] - samples[None, :]) / bw
    dens = np.exp(-0.5 * z * z).sum(axis=1) / (n * bw * math.sqrt(2 * math.pi))
    return dens


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def render_svg(spec: PlotSpec) -> bytes:
    """Render the spec as SVG 1.1 with no external font dependencies."""
    left, right, top = 190, 30, 40
    plot_w = spec.width - left - right
    lo, hi = spec.axis

    def sx(v: float) -> float:
        return left + (v - lo) / (hi - lo) * plot_w

    out = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{spec.width}" '
        f'height="{spec.height}" viewBox="0 0 {spec.width} {spec.height}">'
    )
    out.append(f'<rect x="0" y="0" width="{spec.width}" height="{spec.height}" fill="#ffffff"/>')
    out.append(
        f'<text x="{left}" y="20" font-family="sans-serif" font-size="13" fill="#222222">'
        f"information gain (payoff units)</text>"
    )

    # legend: one entry per distinct (ground label, role), in first-seen order
    seen = []
    for g in spec.groups:
        for strip in g.strips:
            key = (strip.ground_label, strip.role)
            if key not in seen:
                seen.append(key)
    lx = left
    for ground_label, role in seen:
        color = PALETTE.get(role, PALETTE["other"])
        out.append(f'<rect x="{_fmt(lx)}" y="26" width="10" height="10" fill="{color}"/>')
        out.append(
            f'<text x="{_fmt(lx + 14)}" y="35" font-family="sans-serif" font-size="11" '
            f'fill="#222222">{escape(ground_label)}</text>'
        )
        lx += 18 + 7 * len(ground_label) + 14

    y = float(top + 10)
    grid = np.linspace(lo, hi, DENSITY_POINTS)
    for group in spec.groups:
        label_y = y + (len(group.strips) * (spec.strip_height + 4)) / 2.0 + 4
        out.append(
            f'<text x="{left - 10}" y="{_fmt(label_y)}" text-anchor="end" font-family="sans-serif" '
            f'font-size="12" fill="#222222">{escape(group.label)}</text>'
        )
        for strip in group.strips:
            color = PALETTE.get(strip.role, PALETTE["other"])
            base = y + spec.strip_height
            samples = np.array(strip.samples, dtype=np.float64)
            dens = _density(samples, grid)
            if dens is not None and dens.max() > 0:
                scale = (spec.strip_height * 0.92) / dens.max()
                pts = [f"{_fmt(sx(lo))},{_fmt(base)}"]
                for gx, gy in zip(grid, dens):
                    pts.append(f"{_fmt(sx(float(gx)))},{_fmt(base - float(gy) * scale)}")
                pts.append(f"{_fmt(sx(hi))},{_fmt(base)}")
                out.append(f'<path d="M {" L ".join(pts)} Z" fill="{color}" fill-opacity="0.55" stroke="none"/>')
            mx = sx(strip.median)
            out.append(
                f'<line x1="{_fmt(mx)}" y1="{_fmt(base - spec.strip_height)}" x2="{_fmt(mx)}" '
                f'y2="{_fmt(base)}" stroke="{color}" stroke-width="2"/>'
            )
            y += spec.strip_height + 4
        y += spec.group_gap

    # x axis with ticks
    axis_y = y + 6
    step = _nice_step(hi - lo)
    out.append(
        f'<line x1="{_fmt(sx(lo))}" y1="{_fmt(axis_y)}" x2="{_fmt(sx(hi))}" y2="{_fmt(axis_y)}" '
        f'stroke="#222222" stroke-width="1"/>'
    )
    k = math.ceil(lo / step - 1e-9)
    while k * step <= hi + 1e-9:
        tick = k * step
        tx = sx(tick)
        out.append(
            f'<line x1="{_fmt(tx)}" y1="{_fmt(axis_y)}" x2="{_fmt(tx)}" y2="{_fmt(axis_y + 5)}" '
            f'stroke="#222222" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_fmt(tx)}" y="{_fmt(axis_y + 18)}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="11" fill="#222222">{tick:g}</text>'
        )
        k += 1
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")


def summary_table(result: BootstrapResult) -> str:
    """Fixed-width text table of bootstrap statistics."""
    width = max([len("statistic")] + [len(s.name) for s in result.statistics])
    header = f'{"statistic":<{width}} {"mean":>10} {"sd":>10} {"q2.5":>10} {"q50":>10} {"q97.5":>10}'
    lines = [header, "-" * len(header)]
    for s in result.statistics:
        lines.append(
            f"{s.name:<{width}} {s.mean:>10.5f} {s.sd:>10.5f} "
            f'{s.quantiles["2.5"]:>10.5f} {s.quantiles["50"]:>10.5f} {s.quantiles["97.5"]:>10.5f}'
        )
    return "\n".join(lines)
