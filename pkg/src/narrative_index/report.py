"""Report emission: correlation heatmaps (SVG) and top-k series tables.

The SVG is hand-assembled with integer geometry and fixed-precision
annotations, so identical matrices render to identical bytes -- the
artifacts are diffable in CI. Styling is utilitarian: a diverging
blue/white/red scale over [-1, 1] with the coefficient printed to two
decimals in each defined cell and the diagonal left blank.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .analytics import CorrelationMatrix, DISeries, znormalize
from .errors import ConfigError, InputError
from .indexing import MonthlyIndexSeries

_CELL_W = 52
_CELL_H = 26
_LEFT = 230
_TOP = 200
_TITLE_Y = 24
_FONT = "Helvetica, Arial, sans-serif"

_NEGATIVE = (33, 102, 172)  # blue at -1
_POSITIVE = (178, 24, 43)  # red at +1
_BLANK_FILL = "#f2f2f2"


def _cell_color(value: float) -> str:
    t = min(1.0, abs(value))
    target = _POSITIVE if value >= 0 else _NEGATIVE
    r, g, b = (round(255 + (c - 255) * t) for c in target)
    return f"#{r:02x}{g:02x}{b:02x}"


def _text_color(value: float) -> str:
    return "#ffffff" if abs(value) > 0.65 else "#1a1a1a"


def _fmt_coef(value: float) -> str:
    text = f"{value:.2f}"
    return "0.00" if text == "-0.00" else text


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def heatmap_title(matrix: CorrelationMatrix) -> str:
    kind = matrix.di_kind.value.replace("_", " ")
    return f"Pearson correlation of narrative indices vs {kind} DI"


def render_heatmap(matrix: CorrelationMatrix, path: str | Path) -> None:
    """Write a self-contained SVG grid for one correlation matrix.

    Rows are front topics, columns are rear topics; defined cells carry
    their coefficient to two decimals, the diagonal and undefined cells
    stay blank.
    """
    if not matrix.topics:
        raise InputError("cannot render an empty matrix")
    n = len(matrix.topics)
    width = _LEFT + n * _CELL_W + 20
    height = _TOP + n * _CELL_H + 20

    parts: list[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    )
    parts.append(f'<rect width="{width}" height="{height}" fill="#ffffff"/>')
    parts.append(
        f'<text x="{width // 2}" y="{_TITLE_Y}" text-anchor="middle" '
        f'font-family="{_FONT}" font-size="15" font-weight="bold">'
        f"{_esc(heatmap_title(matrix))}</text>"
    )
    # Column labels (rear topics), rotated above the grid.
    for col, rear in enumerate(matrix.topics):
        x = _LEFT + col * _CELL_W + _CELL_W // 2
        y = _TOP - 8
        parts.append(
            f'<text x="{x}" y="{y}" text-anchor="start" font-family="{_FONT}" '
            f'font-size="11" transform="rotate(-55 {x} {y})">{_esc(rear)}</text>'
        )
    # Row labels (front topics).
    for row, front in enumerate(matrix.topics):
        y = _TOP + row * _CELL_H + _CELL_H // 2 + 4
        parts.append(
            f'<text x="{_LEFT - 8}" y="{y}" text-anchor="end" font-family="{_FONT}" '
            f'font-size="11">{_esc(front)}</text>'
        )
    for row, front in enumerate(matrix.topics):
        for col, rear in enumerate(matrix.topics):
            x = _LEFT + col * _CELL_W
            y = _TOP + row * _CELL_H
            value = None if front == rear else matrix.cells.get((front, rear))
            fill = _BLANK_FILL if value is None else _cell_color(value)
            parts.append(
                f'<rect x="{x}" y="{y}" width="{_CELL_W}" height="{_CELL_H}" '
                f'fill="{fill}" stroke="#ffffff" stroke-width="1"/>'
            )
            if value is not None:
                parts.append(
                    f'<text class="v" x="{x + _CELL_W // 2}" y="{y + _CELL_H // 2 + 4}" '
                    f'text-anchor="middle" font-family="{_FONT}" font-size="10" '
                    f'fill="{_text_color(value)}">{_fmt_coef(value)}</text>'
                )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class TopKTable:
    """Month-aligned, z-normalized comparison of the top-k narrative series and a DI."""

    di_kind: str
    months: list[str]
    di_values: dict[str, float]
    columns: list[tuple[tuple[str, str], dict[str, float]]]


def top_k_series(
    matrix: CorrelationMatrix,
    series: list[MonthlyIndexSeries],
    di: DISeries,
    k: int = 4,
) -> TopKTable:
    """Pick the k topic pairs with the highest coefficients and align them with the DI.

    Ties are broken by canonical topic-pair order. Every selected
    series and the DI are z-normalized over their shared months.
    """
    if k < 1:
        raise ConfigError(f"k must be at least 1, got {k}")
    defined = matrix.defined_cells()
    if len(defined) < k:
        raise InputError(f"need at least {k} defined cells, got {len(defined)}")
    canonical = {
        pair: i
        for i, pair in enumerate(
            (a, b) for a in matrix.topics for b in matrix.topics if a != b
        )
    }
    ranked = sorted(defined.items(), key=lambda item: (-item[1], canonical[item[0]]))
    selected = [pair for pair, _ in ranked[:k]]

    by_pair = {s.topic_pair: s for s in series}
    missing = [pair for pair in selected if pair not in by_pair]
    if missing:
        raise InputError(f"no index series for selected topic pairs {missing}")
    months = sorted(set(di.values) & set(by_pair[selected[0]].values))

    def restrict(values: dict[str, float]) -> dict[str, float]:
        return {m: values[m] for m in months}

    return TopKTable(
        di_kind=di.kind.value,
        months=months,
        di_values=znormalize(restrict(di.values)),
        columns=[(pair, znormalize(restrict(by_pair[pair].values))) for pair in selected],
    )


def write_topk_csv(table: TopKTable, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["month", "di"] + [f"{a}->{b}" for (a, b), _ in table.columns])
        for month in table.months:
            writer.writerow(
                [month, repr(table.di_values[month])]
                + [repr(values[month]) for _, values in table.columns]
            )
