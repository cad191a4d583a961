"""Matplotlib figures rendered next to the delimited trace output.

Every figure lands as a PNG in the requested directory; file names are
fixed so scripted runs stay diffable.
"""

from __future__ import annotations

import os

from .engine import ReductionTrace
from .quines import QuineProfile


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_trace_figures(trace: ReductionTrace, directory: str) -> list[str]:
    """Node-count time series and applied-rewrite totals for one reduction."""
    plt = _plt()
    os.makedirs(directory, exist_ok=True)
    written = []

    steps = [r.step for r in trace.records]
    nodes = [r.nodes_after for r in trace.records]
    edges = [r.edges_after for r in trace.records]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(steps, nodes, label="nodes", lw=1.5)
    ax.plot(steps, edges, label="edges", lw=1.0, alpha=0.7)
    ax.set_xlabel("step")
    ax.set_ylabel("count")
    ax.set_title(f"{trace.chemistry}: size over time (seed {trace.config.seed})")
    ax.legend()
    fig.tight_layout()
    path = os.path.join(directory, "size.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    totals: dict[str, int] = {}
    for record in trace.records:
        for item in record.applied:
            name = item.split("@", 1)[0]
            totals[name] = totals.get(name, 0) + 1
    if totals:
        names = sorted(totals)
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.bar(names, [totals[n] for n in names])
        ax.set_ylabel("applications")
        ax.set_title("rewrites applied")
        ax.tick_params(axis="x", rotation=45)
        fig.tight_layout()
        path = os.path.join(directory, "rewrites.png")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written


def render_profile_figures(profile: QuineProfile, directory: str) -> list[str]:
    """Lifespan histogram and the node-count envelope across trials."""
    plt = _plt()
    os.makedirs(directory, exist_ok=True)
    written = []

    fig, ax = plt.subplots(figsize=(7, 4))
    ax.hist(profile.lifespans, bins=min(30, max(5, profile.horizon // 2)))
    ax.set_xlabel("steps until death")
    ax.set_ylabel("trials")
    ax.set_title(
        f"lifespans over {profile.trials} trials "
        f"(died {profile.outcomes['died']}, "
        f"survived {profile.outcomes['survived_horizon']}, "
        f"grew {profile.outcomes['grew_beyond_bound']})"
    )
    fig.tight_layout()
    path = os.path.join(directory, "lifespans.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    if profile.series:
        steps = [s for s, _, _, _ in profile.series]
        lows = [lo for _, lo, _, _ in profile.series]
        means = [m for _, _, m, _ in profile.series]
        highs = [hi for _, _, _, hi in profile.series]
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.fill_between(steps, lows, highs, alpha=0.25, label="min..max")
        ax.plot(steps, means, lw=1.5, label="mean")
        ax.set_xlabel("step")
        ax.set_ylabel("nodes")
        ax.set_title("node count across trials")
        ax.legend()
        fig.tight_layout()
        path = os.path.join(directory, "growth.png")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written
