"""Render experiment CSVs to figures.

Two figure kinds are supported, matching the experiment runner's published
CSV schemas: 'ratio' (convergence of the filtered-rate ratio vs input SINR,
one curve per interference-to-noise setting) and 'rate-sweep' (total
achievable rate vs SNR, one curve per layer count and scheme, with the
Gaussian ISI capacity overlaid as a solid curve).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

CAPACITY_LABEL = "i.i.d. Gaussian capacity"

REQUIRED_COLUMNS = {
    "ratio": ("input_sinr_db", "sigma_z_over_w", "lmmse_rate_bits",
              "isi_rate_bits", "ratio"),
    "rate-sweep": ("snr_db", "num_layers", "scheme", "r_mlc_bits",
                   "capacity_bits"),
}


class SchemaError(ValueError):
    """The input CSV does not match the expected column schema."""


@dataclass(frozen=True)
class PlotSpec:
    input_csv: str
    kind: str
    output_path: str
    xlabel: str | None = None
    ylabel: str | None = None

    def __post_init__(self):
        if self.kind not in REQUIRED_COLUMNS:
            raise ValueError(
                f"unknown figure kind {self.kind!r}; expected one of "
                f"{sorted(REQUIRED_COLUMNS)}")


def read_table(path) -> dict[str, list[str]]:
    """Parse a result CSV (ignoring '#' metadata lines) into columns."""
    with open(path) as fh:
        rows = [r for r in csv.reader(line for line in fh
                                      if not line.startswith("#")) if r]
    if not rows:
        raise SchemaError(f"{path} holds no header row")
    header, data = rows[0], rows[1:]
    return {name: [row[i] for row in data] for i, name in enumerate(header)}


def _validate(table: dict, kind: str, path) -> None:
    for column in REQUIRED_COLUMNS[kind]:
        if column not in table:
            raise SchemaError(
                f"{path} is missing required column '{column}' for kind "
                f"'{kind}' (found: {', '.join(table) or 'none'})")
    first = REQUIRED_COLUMNS[kind][0]
    if not table[first]:
        raise SchemaError(f"{path} has no data rows")


def _floats(table: dict, column: str) -> np.ndarray:
    return np.array([float(v) for v in table[column]])


def _ratio_figure(table: dict, spec: PlotSpec):
    sinr = _floats(table, "input_sinr_db")
    ratio = _floats(table, "ratio")
    settings = table["sigma_z_over_w"]
    fig, ax = plt.subplots(figsize=(7, 5))
    for setting in dict.fromkeys(settings):  # first-seen order
        mask = np.array([s == setting for s in settings])
        order = np.argsort(sinr[mask])[::-1]
        ax.plot(sinr[mask][order], ratio[mask][order], marker="o",
                label=rf"$\sigma_z^2/\sigma_w^2 = {float(setting):g}$")
    ax.invert_xaxis()  # convergence happens toward low input SINR
    ax.axhline(1.0, color="0.6", linewidth=0.8, linestyle=":")
    ax.set_xlabel(spec.xlabel or "input SINR (dB)")
    ax.set_ylabel(spec.ylabel or "filtered rate / ISI channel rate")
    ax.legend()
    ax.grid(True, alpha=0.3)
    return fig


def _rate_sweep_figure(table: dict, spec: PlotSpec):
    snr = _floats(table, "snr_db")
    rate = _floats(table, "r_mlc_bits")
    cap = _floats(table, "capacity_bits")
    groups = list(zip(table["num_layers"], table["scheme"]))
    fig, ax = plt.subplots(figsize=(7, 5))
    for group in dict.fromkeys(groups):
        mask = np.array([g == group for g in groups])
        order = np.argsort(snr[mask])
        m, scheme = group
        ax.plot(snr[mask][order], rate[mask][order], marker="o",
                linestyle="--", label=f"M={m} ({scheme})")
    # capacity overlay, solid, one point per SNR
    cap_by_snr = dict(zip(snr, cap))
    xs = np.array(sorted(cap_by_snr))
    ax.plot(xs, [cap_by_snr[x] for x in xs], "k-", label=CAPACITY_LABEL)
    ax.set_xlabel(spec.xlabel or "SNR (dB)")
    ax.set_ylabel(spec.ylabel or "total achievable rate (bits/symbol)")
    ax.legend()
    ax.grid(True, alpha=0.3)
    return fig


def build_figure(spec: PlotSpec):
    """Validate the CSV against the kind's schema and build the figure."""
    table = read_table(spec.input_csv)
    _validate(table, spec.kind, spec.input_csv)
    if spec.kind == "ratio":
        return _ratio_figure(table, spec)
    return _rate_sweep_figure(table, spec)


def render(spec: PlotSpec) -> Path:
    """Render one figure to spec.output_path; nothing is written when the
    input fails validation."""
    fig = build_figure(spec)
    out = Path(spec.output_path)
    try:
        fig.savefig(out, bbox_inches="tight")
    finally:
        plt.close(fig)
    return out
