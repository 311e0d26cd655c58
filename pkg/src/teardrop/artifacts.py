"""Deterministic tabular output: CSV (the contract), JSON, and a minimal
SVG rendering.

CSV files carry '#'-prefixed metadata lines, a header row, and 17
significant digits per float so doubles round-trip losslessly.  Repeated
runs with identical arguments must produce byte-identical files, so no
timestamps or environment data are recorded.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field


def _format_value(value):
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return f"{value:.17g}"
    return str(value)


@dataclass(eq=False)
class TableArtifact:
    columns: list
    rows: list
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        width = len(self.columns)
        for row in self.rows:
            if len(row) != width:
                raise ValueError(
                    f"ragged table: row of width {len(row)}, "
                    f"expected {width}"
                )

    def write(self, path, fmt):
        if fmt == "csv":
            self.write_csv(path)
        elif fmt == "json":
            self.write_json(path)
        elif fmt == "svg":
            self.write_svg(path)
        else:
            raise ValueError(f"unknown format {fmt!r}")

    def write_csv(self, path):
        lines = [f"# {key} = {self.metadata[key]}" for key in sorted(self.metadata)]
        lines.append(",".join(self.columns))
        for row in self.rows:
            lines.append(",".join(_format_value(v) for v in row))
        with open(path, "w", encoding="utf-8") as handle:
            handle.write("\n".join(lines) + "\n")

    def write_json(self, path):
        payload = {
            "metadata": {k: self.metadata[k] for k in sorted(self.metadata)},
            "columns": list(self.columns),
            "rows": [list(row) for row in self.rows],
        }
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2, sort_keys=True)
            handle.write("\n")

    def write_svg(self, path, width=640, height=480, margin=50):
        """Polyline rendering of the numeric columns against the first one;
        carries no acceptance weight."""
        numeric = [
            i
            for i, _ in enumerate(self.columns)
            if all(isinstance(r[i], (int, float)) and not isinstance(r[i], bool)
                   and math.isfinite(float(r[i])) for r in self.rows)
        ]
        parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
            f'height="{height}">',
            f'<rect x="{margin}" y="{margin}" width="{width - 2 * margin}" '
            f'height="{height - 2 * margin}" fill="none" stroke="black"/>',
        ]
        if len(numeric) >= 2 and self.rows:
            xi = numeric[0]
            xs = [float(r[xi]) for r in self.rows]
            ys_all = [float(r[j]) for j in numeric[1:] for r in self.rows]
            x_lo, x_hi = min(xs), max(xs)
            y_lo, y_hi = min(ys_all), max(ys_all)
            x_span = (x_hi - x_lo) or 1.0
            y_span = (y_hi - y_lo) or 1.0

            def sx(x):
                return margin + (x - x_lo) / x_span * (width - 2 * margin)

            def sy(y):
                return height - margin - (y - y_lo) / y_span * (height - 2 * margin)

            palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"]
            for k, j in enumerate(numeric[1:]):
                pts = " ".join(
                    f"{sx(float(r[xi])):.2f},{sy(float(r[j])):.2f}"
                    for r in self.rows
                )
                colour = palette[k % len(palette)]
                parts.append(
                    f'<polyline points="{pts}" fill="none" stroke="{colour}"/>'
                )
            parts.append(
                f'<text x="{margin}" y="{height - margin + 20}" '
                f'font-size="12">{self.columns[xi]}: {x_lo:.6g} .. {x_hi:.6g}'
                f"</text>"
            )
            parts.append(
                f'<text x="{margin}" y="{margin - 10}" font-size="12">'
                f"{y_lo:.6g} .. {y_hi:.6g}</text>"
            )
        parts.append("</svg>")
        with open(path, "w", encoding="utf-8") as handle:
            handle.write("\n".join(parts) + "\n")
