"""Figure rendering for experiment reports.

Takes rows in the experiment CSV schema (dicts keyed by the header names)
and writes three PNGs: a histogram of observed optimum/coverage ratios, the
same ratios against instance edge counts, and achieved coverage against the
exact optimum.  Rows without an oracle value appear only in the third plot's
margin count.
"""

from __future__ import annotations

import os
from fractions import Fraction

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

plt.rcParams.update({
    "figure.figsize": (6.0, 4.0),
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.axisbelow": True,
})

_ALGO_COLORS = {
    "kplus": "tab:blue",
    "kplus2": "tab:cyan",
    "kmt": "tab:red",
    "kmt-baseline": "tab:orange",
    "seq": "tab:green",
    "oracle": "tab:gray",
}


def _with_ratio(rows):
    out = []
    for r in rows:
        if r.get("ratio"):
            out.append((r, float(Fraction(r["ratio"]))))
    return out


def render_report(rows: list[dict], outdir: str) -> list[str]:
    os.makedirs(outdir, exist_ok=True)
    written = []
    rated = _with_ratio(rows)

    fig, ax = plt.subplots()
    if rated:
        ax.hist([x for _, x in rated], bins=30, color="tab:blue", edgecolor="black")
    ax.set_xlabel("optimum / coverage")
    ax.set_ylabel("instances")
    ax.set_title(f"ratio distribution ({len(rated)} audited rows)")
    fig.tight_layout()
    path = os.path.join(outdir, "ratio_hist.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots()
    by_algo: dict[str, tuple[list, list]] = {}
    for r, x in rated:
        xs, ys = by_algo.setdefault(r["algo"], ([], []))
        xs.append(int(r["m"]))
        ys.append(x)
    for algo, (xs, ys) in sorted(by_algo.items()):
        ax.scatter(xs, ys, s=12, alpha=0.5, label=algo,
                   color=_ALGO_COLORS.get(algo, "tab:purple"))
    ax.set_xlabel("edges")
    ax.set_ylabel("optimum / coverage")
    ax.set_title("ratio vs. instance size")
    if by_algo:
        ax.legend()
    fig.tight_layout()
    path = os.path.join(outdir, "ratio_vs_edges.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots()
    skipped = 0
    by_algo = {}
    for r in rows:
        if not r.get("opt"):
            skipped += 1
            continue
        xs, ys = by_algo.setdefault(r["algo"], ([], []))
        xs.append(int(r["opt"]))
        ys.append(int(r["apx"]))
    hi = 1
    for algo, (xs, ys) in sorted(by_algo.items()):
        hi = max(hi, max(xs), max(ys))
        ax.scatter(xs, ys, s=12, alpha=0.5, label=algo,
                   color=_ALGO_COLORS.get(algo, "tab:purple"))
    ax.plot([0, hi], [0, hi], "k--", linewidth=1, label="coverage = optimum")
    ax.set_xlabel("optimum coverage")
    ax.set_ylabel("achieved coverage")
    title = "achieved vs. optimal coverage"
    if skipped:
        title += f" ({skipped} rows without oracle)"
    ax.set_title(title)
    if by_algo:
        ax.legend()
    fig.tight_layout()
    path = os.path.join(outdir, "coverage_vs_opt.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    return written
