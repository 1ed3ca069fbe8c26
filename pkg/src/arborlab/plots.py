"""Figure rendering for the report-style CLI outputs.

Everything draws through the Agg backend and writes straight to file;
nothing here opens a window.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def save_ball_sweep_figure(reports, path) -> None:
    """Mass versus size next to the limit value, plus the gap decay.

    reports: BallMassReport list for one base tree, ascending N.
    """
    if not reports:
        raise ValueError("nothing to plot")
    ns = [r.N for r in reports]
    masses = [r.mass for r in reports]
    gaps = [r.gap for r in reports]
    lam = float(reports[0].lam)
    label = ",".join(str(c) for c in reports[0].t0_code)

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    ax1.semilogx(ns, masses, "o-", ms=3.5, label=f"mass at size N")
    ax1.axhline(lam, color="crimson", lw=1.0, ls="--",
                label=f"limit {lam:.4g}")
    ax1.set_xlabel("N")
    ax1.set_ylabel("ball mass")
    ax1.set_title(f"base [{label}]")
    ax1.legend(fontsize=8)
    pos = [(n, g) for n, g in zip(ns, gaps) if g > 0]
    if pos:
        ax2.loglog([n for n, _ in pos], [g for _, g in pos], "o-", ms=3.5)
    ax2.set_xlabel("N")
    ax2.set_ylabel("|mass - limit|")
    ax2.set_title("gap decay")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def save_asymptotics_figure(series, path) -> None:
    """Normalized coefficient ratios against their limiting constants.

    series: list of (alpha, ns, ratios, limit_or_None).
    """
    if not series:
        raise ValueError("nothing to plot")
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for alpha, ns, ratios, limit in series:
        line, = ax.semilogx(ns, ratios, "o-", ms=3,
                            label=f"alpha = {alpha:g}")
        if limit is not None:
            ax.axhline(limit, color=line.get_color(), lw=0.8, ls=":")
    ax.set_xlabel("N")
    ax.set_ylabel("Z_N N^{(3-alpha)/2} 4^{-N}")
    ax.set_title("normalized partition values")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def save_height_profile_figure(profiles, n, path) -> None:
    """Height laws at one size for several exponents.

    profiles: list of (alpha, [P(height = h) for h = 1..n]).
    """
    if not profiles:
        raise ValueError("nothing to plot")
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    hs = list(range(1, len(profiles[0][1]) + 1))
    for alpha, probs in profiles:
        ax.plot(hs, probs, "-", lw=1.2, label=f"alpha = {alpha:g}")
    ax.set_xlabel("height")
    ax.set_ylabel("probability")
    ax.set_title(f"height law at N = {n}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
