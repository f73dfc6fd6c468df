"""Optional rendering of the figure1 table (matplotlib is imported lazily)."""
from __future__ import annotations

from fractions import Fraction


def plot_figure1(rows, N: int, branch_order: int, path: str, prec: int = 30):
    """Exact points over the two branch curves A (odd n) and B (even n)."""
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:
        raise ImportError("--plot needs matplotlib (pip install 'artifact[plot]')") from exc
    from .twocut import gp_branch

    eps = Fraction(1, N)
    xs = [float(r.X) for r in rows if r.X > 0] or [1.0]
    # the ε²/X² term dominates near X = 0, so start the curves at half the first sample
    lo, hi = min(xs) / 2, max(xs)
    grid = [lo + (hi - lo) * k / 200 for k in range(201)]
    fig, ax = plt.subplots(figsize=(6, 4))
    for br, style in (("A", "-"), ("B", "--")):
        ax.plot(grid, [float(gp_branch(br, eps, g, branch_order, prec)) for g in grid],
                style, lw=1.2, label=f"branch {br}")
    odd = [r for r in rows if r.n % 2]
    even = [r for r in rows if not r.n % 2]
    ax.plot([float(r.X) for r in odd], [float(r.F_exact) for r in odd], "o", label="exact, odd n")
    ax.plot([float(r.X) for r in even], [float(r.F_exact) for r in even], "s",
            mfc="none", label="exact, even n")
    ax.set_xlabel("X = n/N")
    ax.set_ylabel("log Z_n")
    ax.set_title(f"gaussian Penner, N = {N}")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
