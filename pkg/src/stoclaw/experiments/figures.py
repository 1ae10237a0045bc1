"""Figure rendering for experiment reports (Agg backend, PNG files).

Each runner hands back a list of figure descriptions; this module turns
them into log-log errorbar plots with fitted power laws, or simple series
plots, written under <out>/figures/.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def render_figures(figure_specs: list[dict], out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for spec in figure_specs:
        fig, ax = plt.subplots(figsize=(5.0, 3.6))
        points = spec.get("points", [])
        if points:
            xs = [p[0] for p in points]
            ys = [p[1] for p in points]
            errs = [p[2] if len(p) > 2 else 0.0 for p in points]
            ax.errorbar(xs, ys, yerr=errs, marker="o", linestyle="none",
                        capsize=3, label=spec.get("series_label", "measured"))
            fit = spec.get("fit")
            if fit is not None:
                slope, intercept = fit
                lo, hi = min(xs), max(xs)
                fx = [lo * (hi / lo) ** (i / 63.0) for i in range(64)] \
                    if lo > 0 else [lo, hi]
                fy = [math.exp(intercept) * v ** slope for v in fx]
                ax.plot(fx, fy, "--",
                        label=f"fit slope {slope:.3f}")
        for series in spec.get("lines", []):
            ax.plot(series["x"], series["y"], label=series.get("label"))
        hline = spec.get("hline")
        if hline is not None:
            ax.axhline(hline["y"], color="crimson", linestyle=":",
                       label=hline.get("label"))
        if spec.get("xscale", "log") == "log":
            ax.set_xscale("log")
        if spec.get("yscale", "log") == "log":
            ax.set_yscale("log")
        ax.set_xlabel(spec.get("xlabel", ""))
        ax.set_ylabel(spec.get("ylabel", ""))
        ax.set_title(spec.get("title", spec["name"]))
        ax.legend(fontsize=8)
        ax.grid(True, which="both", alpha=0.3)
        fig.tight_layout()
        path = out / f"{spec['name']}.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written
