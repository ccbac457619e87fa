"""SVG rendering for verify/simulate output directories.

QQ plots for normal-limit experiments, histograms for sup-norm samples,
and log-log convergence curves for percentile/gap ladders.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from cidlab.errors import ParameterError


def _mpl():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _load_samples(csv_path: Path) -> np.ndarray:
    with csv_path.open() as fp:
        header = fp.readline()
        if header.strip() != "value":
            raise ValueError(f"unexpected samples header in {csv_path}: {header!r}")
        return np.array([float(line) for line in fp if line.strip()])


def qq_plot_svg(samples: np.ndarray, out: Path, title: str) -> None:
    from scipy.special import ndtri

    plt = _mpl()
    xs = np.sort(samples)
    qs = ndtri((np.arange(1, xs.size + 1) - 0.5) / xs.size)
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    ax.plot(qs, xs, ".", markersize=2)
    lim = [min(qs[0], xs[0]), max(qs[-1], xs[-1])]
    ax.plot(lim, lim, "-", linewidth=1, color="tab:red")
    ax.set_xlabel("standard normal quantiles")
    ax.set_ylabel("sample quantiles")
    ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)


def histogram_svg(samples: np.ndarray, out: Path, title: str) -> None:
    plt = _mpl()
    fig, ax = plt.subplots(figsize=(5.0, 3.5))
    ax.hist(samples, bins=40, density=True, alpha=0.8)
    ax.set_title(title, fontsize=9)
    ax.set_ylabel("density")
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)


def convergence_svg(curve: dict, out: Path, title: str, ylabel: str) -> None:
    plt = _mpl()
    ns = sorted(int(k) for k in curve)
    ys = [curve[str(n)] for n in ns]
    fig, ax = plt.subplots(figsize=(5.0, 3.5))
    ax.loglog(ns, ys, "o-")
    ax.set_xlabel("n")
    ax.set_ylabel(ylabel)
    ax.set_title(title, fontsize=9)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)


_QQ_CHECKS = {"ks_normal", "ks_standardized", "ks_unconditional"}


def render_report_dir(indir: Path, svg: bool = True) -> list[Path]:
    """Render plots for every experiment found in the directory.

    Understands both `verify` output (reports.json + samples/) and
    `simulate` output (summary.json + stats.csv).
    """
    indir = Path(indir)
    ext = "svg" if svg else "png"
    written: list[Path] = []

    reports_path = indir / "reports.json"
    if not reports_path.exists() and not (indir / "stats.csv").exists():
        raise ParameterError(f"{indir} has neither reports.json nor stats.csv")
    if reports_path.exists():
        data = json.loads(reports_path.read_text())
        for suite, reports in data.get("suites", {}).items():
            for rep in reports:
                name = rep["experiment"]
                check_ids = {c["check_id"] for c in rep.get("checks", [])}
                csv_path = indir / "samples" / f"{name}.csv"
                if csv_path.exists():
                    samples = _load_samples(csv_path)
                    if check_ids & _QQ_CHECKS:
                        out = indir / f"{name}-qq.{ext}"
                        qq_plot_svg(samples, out, f"{name}: standardized sample vs normal")
                        written.append(out)
                    out = indir / f"{name}-hist.{ext}"
                    histogram_svg(samples, out, f"{name}: sample histogram")
                    written.append(out)
                diag = rep.get("diagnostics", {})
                for key, ylabel in (("pct95", "95th percentile"), ("gap", "pattern gap")):
                    if key in diag:
                        out = indir / f"{name}-{key}.{ext}"
                        convergence_svg(diag[key], out, f"{name}: {key} by n", ylabel)
                        written.append(out)

    stats_path = indir / "stats.csv"
    if stats_path.exists():
        samples = _load_samples(stats_path)
        out = indir / f"simulate-hist.{ext}"
        histogram_svg(samples, out, "simulated statistic histogram")
        written.append(out)

    return written
