"""Figure rendering for suite reports.

Every suite gets a relative-error bar chart; suites with a natural
field to look at also get a profile figure.  Files are written next to
the JSON/CSV artifacts.
"""

from __future__ import annotations

import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .models import LevyMeasureModel
from .spectral import Grid, build_symbol_grid, periodized_cauchy_density, \
    transition_density

__all__ = ["render_suite"]


def _bar_chart(result, path):
    names = [r.name for r in result.reports]
    errs = [max(r.rel_error, 1e-18) for r in result.reports]
    tols = [max(r.tol, 1e-18) for r in result.reports]
    colors = ["tab:blue" if r.passed else "tab:red"
              for r in result.reports]
    fig, ax = plt.subplots(figsize=(max(6, 0.6 * len(names)), 4))
    xs = np.arange(len(names))
    ax.bar(xs, errs, color=colors)
    ax.scatter(xs, tols, marker="_", color="k", s=200, label="tolerance")
    ax.set_yscale("log")
    ax.set_xticks(xs)
    ax.set_xticklabels(names, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("relative error")
    ax.set_title(f"suite: {result.suite}")
    ax.legend(loc="upper right", fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _density_figure(path):
    grid = Grid(d=1, N=1024, L=16.0)
    model = LevyMeasureModel("isotropic-stable", d=1, alpha=1.0)
    symbol = build_symbol_grid(model, grid)
    p1 = transition_density(symbol, 1.0)
    ref = periodized_cauchy_density(grid, 1.0, n_images=64)
    x = grid.axis_points()
    fig, (a, b) = plt.subplots(2, 1, figsize=(6, 5), sharex=True)
    a.plot(x, p1.values, label="spectral inversion")
    a.plot(x, ref.values, "--", label="periodized closed form")
    a.set_yscale("log")
    a.legend(fontsize=8)
    b.plot(x, np.abs(p1.values - ref.values) / ref.values)
    b.set_yscale("log")
    b.set_ylabel("relative error")
    b.set_xlabel("x")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_suite(cfg, result, out_dir: str) -> list:
    written = []
    bar = os.path.join(out_dir, f"{result.suite}-rel-errors.png")
    _bar_chart(result, bar)
    written.append(bar)
    if result.suite in ("density", "all"):
        fig = os.path.join(out_dir, "cauchy-density.png")
        _density_figure(fig)
        written.append(fig)
    return written
