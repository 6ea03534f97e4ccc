"""Render femtosim figure CSVs as static plots.

Consumes exactly the CSV schemas the simulator documents per figure; the
input files are never modified and re-rendering is idempotent.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


class SchemaError(ValueError):
    """CSV columns do not match the figure's documented schema."""


# (columns, series column, y column, axis labels)
FIGURE_SCHEMAS = {
    "fig2": (("n_f", "gamma", "mean_femto_sinr_db", "ci95"),
             "gamma", "mean_femto_sinr_db",
             ("average femtocells per macrocell", "average femto user SINR (dB)")),
    "fig3": (("n_f", "gamma", "split_gain", "ci95"),
             "gamma", "split_gain",
             ("average femtocells per macrocell", "sum rate gain (split)")),
    "fig4": (("n_f", "epsilon", "handovers", "handover_fraction", "ci95"),
             "epsilon", "handovers",
             ("average femtocells per macrocell", "successful macro handovers")),
    "fig5": (("n_f", "epsilon", "served_macro_fraction", "ci95"),
             "epsilon", "served_macro_fraction",
             ("average femtocells per macrocell", "served macro user fraction")),
    "fig6": (("n_f", "class", "savings_fraction", "ci95"),
             "class", "savings_fraction",
             ("average femtocells per macrocell", "power savings fraction")),
    "fig7": (("n_f", "strategy", "served_femto_users", "ci95"),
             "strategy", "served_femto_users",
             ("average femtocells per macrocell", "served femto users")),
    "fig8": (("n_f", "strategy", "shared_gain", "ci95", "r_max"),
             "strategy", "shared_gain",
             ("average femtocells per macrocell", "sum rate gain (shared)")),
}


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    input_csv: str
    output_image: str


def _parse_float(raw: str) -> float | None:
    raw = raw.strip()
    if not raw:
        return None
    return float(raw)


def load_rows(figure_id: str, path: str) -> list[dict]:
    """Read and schema-check one figure CSV."""
    if figure_id not in FIGURE_SCHEMAS:
        raise SchemaError(f"unknown figure id {figure_id!r}")
    columns = FIGURE_SCHEMAS[figure_id][0]
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: no data (empty file)") from None
        missing = [c for c in columns if c not in header]
        extra = [c for c in header if c not in columns]
        if missing or extra:
            parts = []
            if missing:
                parts.append(f"missing columns: {', '.join(missing)}")
            if extra:
                parts.append(f"unexpected columns: {', '.join(extra)}")
            raise SchemaError(f"{path}: {'; '.join(parts)}")
        rows = []
        for raw in reader:
            row = dict(zip(header, raw))
            parsed = {"n_f": _parse_float(row["n_f"])}
            for column in columns:
                if column in ("n_f",):
                    continue
                if column in ("gamma", "epsilon", "strategy", "class"):
                    parsed[column] = row[column]
                else:
                    parsed[column] = _parse_float(row[column])
            rows.append(parsed)
    if not rows:
        raise SchemaError(f"{path}: no data (header only)")
    return rows


def render(spec: FigureSpec) -> str:
    """Render one figure CSV to a static image; returns the output path."""
    columns, series_col, y_col, (xlabel, ylabel) = FIGURE_SCHEMAS[spec.figure_id]
    rows = load_rows(spec.figure_id, spec.input_csv)

    series: dict[str, list[dict]] = {}
    for row in rows:
        series.setdefault(str(row[series_col]), []).append(row)

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for label in sorted(series, key=_series_key):
        points = sorted((r for r in series[label] if r[y_col] is not None),
                        key=lambda r: r["n_f"])
        if not points:
            continue
        xs = [r["n_f"] for r in points]
        ys = [r[y_col] for r in points]
        line, = ax.plot(xs, ys, marker="o", markersize=3,
                        label=f"{series_col}={label}")
        cis = [r.get("ci95") for r in points]
        if all(c is not None for c in cis):
            lo = [y - c for y, c in zip(ys, cis)]
            hi = [y + c for y, c in zip(ys, cis)]
            ax.fill_between(xs, lo, hi, alpha=0.2, color=line.get_color())

    if spec.figure_id == "fig8":
        bound = {}
        for row in rows:
            if row.get("r_max") is not None:
                bound[row["n_f"]] = row["r_max"]
        xs = sorted(bound)
        ax.plot(xs, [bound[x] for x in xs], linestyle="--", color="black",
                label="upper bound")

    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(spec.output_image, dpi=150)
    plt.close(fig)
    return spec.output_image


def _series_key(label: str):
    try:
        return (0, float(label))
    except ValueError:
        return (1, label)
