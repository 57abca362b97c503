"""Gantt views of one pattern interval: aligned text and standalone SVG."""

from fractions import Fraction
from xml.sax.saxutils import escape

from .canonical import SchedulePattern
from .model import TaskSystem, fmt_rat

# colour-blind friendly cycle
PALETTE = ["#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee", "#aa3377",
           "#bbbbbb", "#332288", "#88ccee", "#117733", "#999933", "#cc6677"]


def _label(system, i):
    return system.task(i).name if system is not None else f"t{i}"


def gantt_text(pattern: SchedulePattern, system: TaskSystem = None, width: int = 48) -> str:
    """One row per processor, highest first.  Each column covers
    ``L / width`` time units and shows the task occupying its midpoint
    (``.`` for idle).  Exact segment listings follow the chart."""
    L = pattern.interval_length
    sym = "123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    lines = []
    for j in range(pattern.processors, 0, -1):
        cells = []
        for c in range(width):
            mid = Fraction(2 * c + 1, 2 * width) * L
            v = pattern.value_at(j, mid)
            cells.append("." if v == 0 else sym[(v - 1) % len(sym)])
        lines.append(f"p{j:<3}|{''.join(cells)}|")
    lines.append(f"{'':4}0{'':{width - 1}}{L}")
    lines.append("")
    for j in range(pattern.processors, 0, -1):
        for seg in pattern.per_processor[j - 1]:
            lines.append(f"p{j}: {_label(system, seg.task)} on [{fmt_rat(seg.start)}, {fmt_rat(seg.end)})")
    return "\n".join(lines) + "\n"


def gantt_svg(pattern: SchedulePattern, system: TaskSystem = None,
              width: int = 640, row_height: int = 28) -> str:
    """Standalone SVG: one row per processor (p_m on top), one ``rect.bar``
    per stored segment, time axis in pattern units."""
    L = pattern.interval_length
    left, top, axis = 56, 12, 36
    plot_w = width - left - 16
    m = pattern.processors
    height = top + m * row_height + axis

    def x(t):
        return left + float(Fraction(t) / L) * plot_w

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
           '<rect x="0" y="0" width="100%" height="100%" fill="white"/>']
    for row, j in enumerate(range(m, 0, -1)):
        y = top + row * row_height
        out.append(f'<text x="{left - 8}" y="{y + row_height / 2 + 4}" text-anchor="end">p{j}</text>')
        out.append(f'<rect class="row" x="{left}" y="{y + 3}" width="{plot_w}" '
                   f'height="{row_height - 6}" fill="#f4f4f4" stroke="#cccccc"/>')
        for seg in pattern.per_processor[j - 1]:
            name = escape(_label(system, seg.task))
            colour = PALETTE[(seg.task - 1) % len(PALETTE)]
            x0, x1 = x(seg.start), x(seg.end)
            out.append(f'<rect class="bar" data-task="{seg.task}" data-processor="{j}" '
                       f'data-start="{fmt_rat(seg.start)}" data-end="{fmt_rat(seg.end)}" '
                       f'x="{x0:.3f}" y="{y + 4}" width="{x1 - x0:.3f}" height="{row_height - 8}" '
                       f'fill="{colour}" stroke="#333333"><title>{name} [{fmt_rat(seg.start)}, '
                       f'{fmt_rat(seg.end)})</title></rect>')
            if x1 - x0 > 24:
                out.append(f'<text x="{(x0 + x1) / 2:.3f}" y="{y + row_height / 2 + 4}" '
                           f'text-anchor="middle" fill="white">{name}</text>')
    ya = top + m * row_height
    out.append(f'<line x1="{left}" y1="{ya}" x2="{left + plot_w}" y2="{ya}" stroke="black"/>')
    ticks = 4 if L == 1 else min(L, 12)
    for k in range(ticks + 1):
        t = Fraction(k * L, ticks)
        out.append(f'<line x1="{x(t):.3f}" y1="{ya}" x2="{x(t):.3f}" y2="{ya + 4}" stroke="black"/>')
        out.append(f'<text x="{x(t):.3f}" y="{ya + 16}" text-anchor="middle">{fmt_rat(t)}</text>')
    out.append(f'<text x="{left + plot_w / 2}" y="{ya + 31}" text-anchor="middle">time (pattern units, L = {L})</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
