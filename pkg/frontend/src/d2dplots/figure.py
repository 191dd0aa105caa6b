"""Render the throughput-outage overlay figure from sweep/theory CSVs.

Consumes only the published CSV schema of the d2dcache CLI; never
recomputes model quantities. One solid (theoretical) and one dashed
(simulated) series per Zipf exponent gamma.
"""

from __future__ import annotations

import argparse
import csv
import sys
import warnings
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

EXPECTED_HEADER = [
    "gamma", "m", "n", "M", "delta", "K", "g_c", "p_out_sim", "t_min_norm",
    "t_mean_norm", "std_err_p", "std_err_t", "p_out_theory", "t_theory_norm",
    "realizations", "seed",
]

X_LABEL = "outage probability"
Y_LABEL = "normalized min per-user throughput"


class SchemaError(ValueError):
    """The input CSV does not match the published column schema."""


@dataclass(frozen=True)
class FigureSpec:
    theory_csv: str | None
    sim_csv: str | None
    output_path: str
    image_format: str = "png"
    x_label: str = X_LABEL
    y_label: str = Y_LABEL


@dataclass(frozen=True)
class Series:
    gamma: float
    kind: str  # "theory" or "sim"
    p: list[float] = field(repr=False)
    t: list[float] = field(repr=False)


def _read_rows(path: str) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: file is empty (no header row)")
        if header != EXPECTED_HEADER:
            missing = [c for c in EXPECTED_HEADER if c not in header]
            extra = [c for c in header if c not in EXPECTED_HEADER]
            raise SchemaError(
                f"{path}: header does not match the published schema; "
                f"missing columns {missing}, unexpected columns {extra}"
            )
        rows = [dict(zip(header, row)) for row in reader if row]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def _collect(rows: list[dict], p_col: str, t_col: str, kind: str, path: str) -> list[Series]:
    by_gamma: dict[float, list[tuple[float, float]]] = {}
    for i, row in enumerate(rows, 2):
        if row[p_col] == "" or row[t_col] == "":
            continue
        try:
            gamma = float(row["gamma"])
            p = float(row[p_col])
            t = float(row[t_col])
        except ValueError as exc:
            raise SchemaError(f"{path}:{i}: non-numeric value in gamma/{p_col}/{t_col}: {exc}")
        by_gamma.setdefault(gamma, []).append((p, t))
    series = []
    for gamma in sorted(by_gamma):
        pts = sorted(by_gamma[gamma])
        series.append(Series(gamma, kind, [p for p, _ in pts], [t for _, t in pts]))
    return series


def load_series(spec: FigureSpec) -> list[Series]:
    series: list[Series] = []
    if spec.theory_csv:
        rows = _read_rows(spec.theory_csv)
        series += _collect(rows, "p_out_theory", "t_theory_norm", "theory", spec.theory_csv)
    if spec.sim_csv:
        rows = _read_rows(spec.sim_csv)
        series += _collect(rows, "p_out_sim", "t_min_norm", "sim", spec.sim_csv)
    if not series:
        raise SchemaError("no plottable series found in the inputs")
    theory_gammas = {s.gamma for s in series if s.kind == "theory"}
    sim_gammas = {s.gamma for s in series if s.kind == "sim"}
    for gamma in sorted(theory_gammas ^ sim_gammas):
        warnings.warn(f"gamma={gamma} present in only one input; rendered alone")
    return series


def render_tradeoff_figure(spec: FigureSpec) -> list[Series]:
    """Write the overlay image and return the rendered series."""
    series = load_series(spec)
    gammas = sorted({s.gamma for s in series})
    cmap = plt.get_cmap("viridis")
    colors = {g: cmap(i / max(len(gammas) - 1, 1)) for i, g in enumerate(gammas)}
    fig, ax = plt.subplots(figsize=(7, 5))
    for s in series:
        style = "-" if s.kind == "theory" else "--"
        label = f"gamma={s.gamma:g} ({'theory' if s.kind == 'theory' else 'simulated'})"
        ax.plot(s.p, s.t, style, color=colors[s.gamma], label=label)
    ax.set_xlabel(spec.x_label)
    ax.set_ylabel(spec.y_label)
    ax.set_xlim(0, 1)
    ax.set_yscale("log")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(spec.output_path, format=spec.image_format)
    plt.close(fig)
    return series


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="d2dcache-plot",
        description="Overlay simulated (dashed) and theoretical (solid) tradeoff curves",
    )
    parser.add_argument("--theory", help="theory curve CSV (published schema)")
    parser.add_argument("--sim", help="simulation sweep CSV (published schema)")
    parser.add_argument("--output", "-o", required=True, help="output image path")
    parser.add_argument("--format", choices=("png", "svg"), default="png")
    args = parser.parse_args(argv)
    if not args.theory and not args.sim:
        print("error: at least one of --theory/--sim is required", file=sys.stderr)
        return 1
    spec = FigureSpec(
        theory_csv=args.theory, sim_csv=args.sim,
        output_path=args.output, image_format=args.format,
    )
    try:
        series = render_tradeoff_figure(spec)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"rendered {len(series)} series to {spec.output_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
