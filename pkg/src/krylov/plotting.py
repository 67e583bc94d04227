"""Convergence plots for residual histories.

Figures are drawn on an Agg canvas directly, without touching pyplot state,
so rendering is safe inside the CLI and in tests.
"""

from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

STYLE = {
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
}


def plot_histories(histories, path, title=None, width=6.0):
    """Write a semilog plot of relative residual against iteration.

    Parameters
    ----------
    histories : dict
        Maps a legend label to a list of ``HistoryEntry``.
    path : str or Path
        Output file; the format follows the suffix (png, pdf, svg).
    """
    golden = (5 ** 0.5 - 1) / 2
    fig = Figure(figsize=(width, width * golden))
    FigureCanvasAgg(fig)
    ax = fig.add_subplot()
    for label, history in histories.items():
        its = [h.iteration for h in history]
        # exact zeros cannot be drawn on a log axis
        res = [h.relative_residual if h.relative_residual > 0 else float("nan") for h in history]
        ax.semilogy(its, res, marker="." if len(its) < 60 else None, lw=1.2, label=label)
    ax.set_xlabel("iteration")
    ax.set_ylabel(r"relative residual $\|r_k\| / \|b\|$")
    if title:
        ax.set_title(title, fontsize=STYLE["font.size"])
    ax.grid(True, which="both", alpha=0.3, lw=0.5)
    if histories:
        ax.legend(fontsize=STYLE["legend.fontsize"], frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    return path
