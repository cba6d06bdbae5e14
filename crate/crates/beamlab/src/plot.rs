//! Stand-alone plotting script for the CSV artifacts.

use std::path::{Path, PathBuf};

use crate::error::{HarnessError, Result};

pub const SCRIPT_NAME: &str = "plot_results.py";

const SCRIPT: &str = r#"#!/usr/bin/env python3
"""Plot beamlab CSV results found next to this script (or in the given directory)."""
import csv
import math
import sys
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

X_LABELS = {
    "beampattern": "Input SNR (dB)",
    "sinr_vs_snr": "Input SNR (dB)",
    "sinr_vs_snapshots": "Number of snapshots",
    "sinr_vs_inr": "Input INR (dB)",
}


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def plot_summary(path, out_dir):
    series = defaultdict(list)
    for row in read_rows(path):
        mean = float(row["mean_sinr_db"])
        if not math.isnan(mean):
            series[row["method"]].append((float(row["x"]), mean))
    if not series:
        return
    fig, ax = plt.subplots(figsize=(6, 4))
    for method, pts in sorted(series.items()):
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=method)
    ax.set_xlabel(X_LABELS.get(path.stem, "x"))
    ax.set_ylabel("Output SINR (dB)")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_dir / f"{path.stem}.png", dpi=150)
    plt.close(fig)

    opt = dict(series.get("optimal", []))
    if opt:
        fig, ax = plt.subplots(figsize=(6, 4))
        for method, pts in sorted(series.items()):
            if method == "optimal":
                continue
            dev = [(x, opt[x] - y) for x, y in pts if x in opt]
            ax.plot([p[0] for p in dev], [p[1] for p in dev], marker="o", label=method)
        ax.set_xlabel(X_LABELS.get(path.stem, "x"))
        ax.set_ylabel("Deviation from optimal SINR (dB)")
        ax.grid(True, alpha=0.3)
        ax.legend()
        fig.tight_layout()
        fig.savefig(out_dir / f"{path.stem}_deviation.png", dpi=150)
        plt.close(fig)


def plot_curves(path, out_dir):
    curves = defaultdict(list)
    for row in read_rows(path):
        curves[row["method"]].append((float(row["angle_deg"]), float(row["gain_db"])))
    fig, ax = plt.subplots(figsize=(7, 4))
    for method, pts in sorted(curves.items()):
        ax.plot([p[0] for p in pts], [max(p[1], -100.0) for p in pts], label=method)
    ax.set_xlim(-90, 90)
    ax.set_ylim(-100, 5)
    ax.set_xlabel("Angle (degrees)")
    ax.set_ylabel("Normalized beampattern (dB)")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_dir / f"{path.stem}.png", dpi=150)
    plt.close(fig)


def main():
    root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent
    for path in sorted(root.glob("*.csv")):
        if path.stem.endswith("_raw"):
            continue
        if path.stem.endswith("_curves"):
            plot_curves(path, root)
        else:
            plot_summary(path, root)


if __name__ == "__main__":
    main()
"#;

/// Writes the plotting script into `dir` and returns its path.
pub fn write_plot_script(dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let path = dir.join(SCRIPT_NAME);
    std::fs::write(&path, SCRIPT).map_err(|e| HarnessError::io(&path, e))?;
    Ok(path)
}
