"""Write an AnalysisReport to disk: text summary, data tables and SVG figures.

Every figure is drawn from the tables alone, so ``render_figures`` can be
rerun on an existing report directory.
"""

from __future__ import annotations

import csv
import logging
from pathlib import Path

import numpy as np

from .campaign import FIT_NAMES, AnalysisReport
from .stats import REPORT_FIELDS

log = logging.getLogger(__name__)

REPORT_TEXT = "report.txt"
FITS_CSV = "fits.csv"

# table name -> (columns, figure title, x label, y label)
SCATTERS = {
    "scatter_O_vs_M": ("O_vs_M", "Output complexity vs system complexity (input)", "M", "O"),
    "scatter_O_vs_M_noinput": ("O_vs_M_noinput", "Output complexity vs system complexity (no input)", "M", "O"),
    "scatter_freq_vs_M": ("freq_vs_M", "Frequency of +1 in output subsequence", "M", "freq. of +1"),
    "spread_Z_vs_M": ("Z_vs_M", "Spread of output complexity", "M", "z"),
    "spread_W_vs_M": ("W_vs_M", "Spread of the frequency of +1", "M", "w"),
    "spread_W_vs_Xprime": ("W_vs_Xprime", "Spread of the frequency of +1 vs X'", "X'", "w"),
}
# scatter table -> fit drawn over it, and whether the fit is on y^2
FIT_OVERLAYS = {
    "scatter_O_vs_M": ("fit_Y_on_X", False),
    "scatter_O_vs_M_noinput": ("fit_noinput", False),
    "spread_Z_vs_M": ("fit_Z_on_X", False),
    "spread_W_vs_M": ("fit_W2_on_X", True),
    "spread_W_vs_Xprime": ("fit_W2_on_Xprime", True),
}


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.9g}"


def write_table(path: Path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def read_table(path: Path) -> dict:
    with open(path, newline="") as fh:
        reader = csv.reader(fh, delimiter="\t")
        cols = next(reader)
        data = [[float(v) for v in row] for row in reader if row]
    arr = np.array(data, dtype=float).reshape(-1, len(cols))
    return {c: arr[:, i] for i, c in enumerate(cols)}


def report_text(report: AnalysisReport) -> str:
    lines = [f"k={report.k}"]
    for name in FIT_NAMES:
        fit = report.fits.get(name)
        if fit is None:
            reason = report.absent.get(name, "not computed")
            lines.append(f"{name}.absent={reason}")
            continue
        lines.extend(f"{name}.{k}={_fmt(v)}" for k, v in fit.as_dict().items())
        lo, hi = fit.slope_interval(0.95)
        lines.append(f"{name}.slope_ci95_lower={_fmt(lo)}")
        lines.append(f"{name}.slope_ci95_upper={_fmt(hi)}")
    if report.noinput_r is not None:
        lines.append(f"fit_noinput.pearson_r={_fmt(report.noinput_r)}")
    w2 = report.fit_W2_on_X
    if w2 is not None:
        lines.append(f"W_hat(X)=sqrt({_fmt(w2.slope)}*X{w2.intercept:+.9g})")
    w2p = report.fit_W2_on_Xprime
    if w2p is not None:
        lines.append(f"W_hat(Xprime)=sqrt({w2p.intercept:.9g}{w2p.slope:+.9g}*Xprime)")
    d = report.deciles
    if d is not None:
        lines.append(f"deciles.lowest_mean_freq={_fmt(d.means[0])}")
        lines.append(f"deciles.spread_trend_slope={_fmt(d.trend_slope)}")
        lines.append(f"deciles.spread_trend_p={_fmt(d.trend_p)}")
    e = report.entropy_table
    if e is not None:
        lines.append(f"entropy.fraction_bpc_above_H={_fmt(np.mean(e['bits_per_char'] > e['entropy']))}")
    return "\n".join(lines) + "\n"


def write_report(report: AnalysisReport, outdir, figures: bool = True) -> list[Path]:
    """Write the summary, per-figure tables and (optionally) SVGs; return the paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []

    def add(path):
        written.append(path)
        return path

    add(outdir / REPORT_TEXT).write_text(report_text(report))

    with open(add(outdir / FITS_CSV), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("fit",) + REPORT_FIELDS)
        for name in FIT_NAMES:
            fit = report.fits.get(name)
            if fit is not None:
                w.writerow([name] + [_fmt(v) for v in fit.as_dict().values()])

    for table, (key, *_rest) in SCATTERS.items():
        sample = report.samples.get(key)
        if sample is not None:
            write_table(add(outdir / f"{table}.tsv"), ("x", "y"), zip(sample.x, sample.y))

    if report.band is not None:
        b = report.band
        write_table(add(outdir / "band_O_vs_M.tsv"), ("x", "fit", "lower", "upper"),
                    zip(b["x"], b["fit"], b["lower"], b["upper"]))

    for name, hist in report.histograms.items():
        write_table(add(outdir / f"hist_residuals_{name}.tsv"), ("bin_lo", "bin_hi", "count"),
                    zip(hist.edges[:-1], hist.edges[1:], hist.counts))

    if report.deciles is not None:
        d = report.deciles
        write_table(add(outdir / "deciles_freq_vs_M.tsv"),
                    ("decile", "m_center", "mean_freq", "sd_freq", "count"),
                    zip(range(len(d.means)), d.centers, d.means, d.spreads, d.counts))

    if report.entropy_table is not None:
        e = report.entropy_table
        order = np.argsort(e["p"], kind="stable")
        write_table(add(outdir / "entropy_vs_p.tsv"), ("p", "m_ratio", "bits_per_char", "entropy"),
                    zip(*(e[c][order] for c in ("p", "m_ratio", "bits_per_char", "entropy"))))

    if figures:
        written.extend(render_figures(outdir))
    return written


def _load_fits(outdir: Path) -> dict:
    path = outdir / FITS_CSV
    if not path.exists():
        return {}
    with open(path, newline="") as fh:
        return {row["fit"]: {k: float(v) for k, v in row.items() if k != "fit"}
                for row in csv.DictReader(fh)}


def render_figures(outdir) -> list[Path]:
    """Render one SVG per data table found in ``outdir``."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    outdir = Path(outdir)
    fits = _load_fits(outdir)
    written = []
    with matplotlib.rc_context({"svg.hashsalt": "elastica", "figure.figsize": (6.4, 4.4),
                                "font.size": 10, "axes.grid": True, "grid.alpha": 0.3}):

        def save(fig, name):
            path = outdir / f"{name}.svg"
            fig.tight_layout()
            fig.savefig(path, format="svg", metadata={"Date": None})
            plt.close(fig)
            written.append(path)

        for table, (_key, title, xl, yl) in SCATTERS.items():
            path = outdir / f"{table}.tsv"
            if not path.exists():
                continue
            data = read_table(path)
            fig, ax = plt.subplots()
            ax.scatter(data["x"], data["y"], s=6, marker="x", linewidths=0.7, color="tab:blue")
            overlay = FIT_OVERLAYS.get(table)
            if overlay and overlay[0] in fits and len(data["x"]):
                f = fits[overlay[0]]
                grid = np.linspace(data["x"].min(), data["x"].max(), 200)
                line = f["intercept"] + f["slope"] * grid
                if overlay[1]:
                    line = np.sqrt(np.maximum(0.0, line))
                ax.plot(grid, line, color="tab:red", lw=1.5, label=overlay[0])
                ax.legend(loc="best", fontsize=8)
            ax.set(title=title, xlabel=xl, ylabel=yl)
            save(fig, table)

        band = outdir / "band_O_vs_M.tsv"
        scatter = outdir / "scatter_O_vs_M.tsv"
        if band.exists():
            b = read_table(band)
            fig, ax = plt.subplots()
            if scatter.exists():
                s = read_table(scatter)
                ax.scatter(s["x"], s["y"], s=5, color="0.6", label="trials")
            ax.plot(b["x"], b["fit"], color="tab:red", label="fit")
            ax.plot(b["x"], b["lower"], "k--", lw=1, label="95% band")
            ax.plot(b["x"], b["upper"], "k--", lw=1)
            ax.legend(loc="best", fontsize=8)
            ax.set(title="Regression of O on M with 95% confidence band", xlabel="M", ylabel="O")
            save(fig, "band_O_vs_M")

        for path in sorted(outdir.glob("hist_residuals_*.tsv")):
            h = read_table(path)
            fig, ax = plt.subplots()
            ax.bar(h["bin_lo"], h["count"], width=h["bin_hi"] - h["bin_lo"], align="edge",
                   edgecolor="k", linewidth=0.5)
            ax.set(title=f"Residuals: {path.stem[len('hist_residuals_'):]}",
                   xlabel="residual", ylabel="count")
            save(fig, path.stem)

        ent = outdir / "entropy_vs_p.tsv"
        if ent.exists():
            e = read_table(ent)
            fig, ax = plt.subplots()
            ax.scatter(e["p"], e["bits_per_char"], s=5, color="tab:blue", label="bits per char (from M)")
            ax.plot(e["p"], e["entropy"], color="tab:red", label="H(p)")
            ax.legend(loc="best", fontsize=8)
            ax.set(title="System description rate vs entropy", xlabel="p", ylabel="bits")
            save(fig, "entropy_vs_p")

        dec = outdir / "deciles_freq_vs_M.tsv"
        if dec.exists():
            d = read_table(dec)
            fig, ax = plt.subplots()
            ax.plot(d["m_center"], d["sd_freq"], "o-")
            ax.set(title="Spread of the frequency of +1 by M decile", xlabel="M (decile mean)",
                   ylabel="sd of freq. of +1")
            save(fig, "deciles_freq_vs_M")
    log.info("rendered %d figures in %s", len(written), outdir)
    return written

