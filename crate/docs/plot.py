"""Plot WPO and TCO summaries written by `dpgrid run-wpo` and `dpgrid run-tco`.

Usage: python3 docs/plot.py [OUT_DIR]   (default: out)
Writes wpo_loss.png and tco_trend.png into OUT_DIR.
"""

import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402


def read(path):
    return pd.read_csv(path, comment="#")


def plot_wpo(out):
    path = out / "wpo" / "summary.csv"
    if not path.exists():
        return
    df = read(path)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for method, g in df.groupby("method"):
        g = g.sort_values("alpha")
        ax.plot(g["alpha"], g["mean_loss"], marker="o", label=method)
        if method != "real":
            ax.fill_between(g["alpha"], g["p05"], g["p95"], alpha=0.2)
    ax.set_xlabel("adjacency alpha (p.u.)")
    ax.set_ylabel("regression loss")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "wpo_loss.png", dpi=150)


def plot_tco(out):
    path = out / "tco" / "summary.csv"
    if not path.exists():
        return
    df = read(path)
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
    for metric, ax in zip(["infeasible", "suboptimality"], axes):
        for alpha, g in df.groupby("alpha"):
            g = g.sort_values("iterations")
            ax.errorbar(
                g["iterations"],
                g[f"{metric}_mean"],
                yerr=[g[f"{metric}_mean"] - g[f"{metric}_p05"], g[f"{metric}_p95"] - g[f"{metric}_mean"]],
                marker="o",
                capsize=3,
                label=f"alpha = {alpha:g} MW",
            )
        ax.set_xticks(sorted(df["iterations"].unique()))
        ax.set_xlabel("post-processing iterations T")
        ax.set_ylabel(f"{metric} (%), mean and p05-p95")
    axes[0].legend()
    fig.tight_layout()
    fig.savefig(out / "tco_trend.png", dpi=150)


if __name__ == "__main__":
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "out")
    plot_wpo(out)
    plot_tco(out)
