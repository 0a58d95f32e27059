"""Report rendering: CSV tables plus matplotlib figures for CLI runs."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

FLOOR = 1e-18  # keeps zero residuals visible on log axes


def write_residual_report(entries, tol: float, outdir, stem: str = "dilation") -> list[Path]:
    """Per-k residual table and semilog figure; returns the written paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / f"{stem}_residuals.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "max_residual", "pass"])
        for e in entries:
            writer.writerow([e["k"], f"{e['max_residual']:.17g}", int(e["pass"])])

    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ks = [e["k"] for e in entries]
    vals = [max(e["max_residual"], FLOOR) for e in entries]
    ax.semilogy(ks, vals, "o-", label="max residual")
    ax.axhline(tol, color="tab:red", ls="--", lw=1, label="tolerance")
    ax.set_xlabel("steps k")
    ax.set_ylabel("residual (Frobenius)")
    ax.set_xticks(ks)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    png_path = outdir / f"{stem}_residuals.png"
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return [csv_path, png_path]


def write_search_report(traces, outdir, stem: str = "search") -> list[Path]:
    """Per-restart convergence table and figure; returns the written paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / f"{stem}_trace.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["restart", "iteration", "residual"])
        for r, trace in enumerate(traces):
            for it, val in enumerate(trace):
                writer.writerow([r, it, f"{val:.17g}"])

    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    for r, trace in enumerate(traces):
        ax.semilogy([max(v, FLOOR) for v in trace], lw=1, label=f"restart {r}")
    ax.set_xlabel("iteration")
    ax.set_ylabel("residual (Frobenius)")
    if len(traces) <= 10:
        ax.legend(loc="best", fontsize=7)
    fig.tight_layout()
    png_path = outdir / f"{stem}_trace.png"
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return [csv_path, png_path]
