"""Figure renderers for the CLI report files.

All figures use the Agg backend with pinned size and dpi so repeated
runs of the same command produce byte-identical PNG files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

__all__ = [
    "save_ratio_histogram",
    "save_flow_figure",
    "save_sweep_figure",
    "save_interp_figure",
]

_FIGSIZE = (6.4, 4.0)
_DPI = 120


def _finish(fig, path: str) -> str:
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def save_ratio_histogram(ratios, path: str, title: str) -> str:
    """Histogram of lhs/rhs ratios with the equality line marked."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.hist(ratios, bins=40, color="#4878d0", edgecolor="black", linewidth=0.3)
    ax.axvline(1.0, color="#d65f5f", linestyle="--", label="equality")
    ax.set_xlabel("lhs / rhs")
    ax.set_ylabel("instances")
    ax.set_title(title)
    ax.legend()
    return _finish(fig, path)


def save_flow_figure(trace, path: str) -> str:
    """Product integral (and, for circulant traces, the ratio and path)."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(trace.times, trace.eta, marker="o", markersize=3, label="eta")
    if trace.phi is not None:
        ax.plot(trace.times, trace.phi, marker="s", markersize=3, label="phi")
        ax.plot(trace.times, trace.xy[:, 0], linestyle="--", label="x(t)")
        ax.plot(trace.times, trace.xy[:, 1], linestyle=":", label="y(t)")
    if trace.times[0] > 0:
        ax.set_xscale("log")
    ax.set_xlabel("t")
    ax.set_title(f"column flow, p = {trace.p:g}")
    ax.legend()
    return _finish(fig, path)


def save_sweep_figure(results, lower, upper, path: str) -> str:
    """Best ratio across exponents with the proven envelopes."""
    ps = [r.p for r in results]
    best = [r.best_ratio for r in results]
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(ps, best, marker="o", markersize=3, label="best ratio")
    ax.plot(ps, lower, linestyle="--", label="lower envelope")
    ax.plot(ps, upper, linestyle=":", label="upper envelope")
    ax.set_xlabel("p")
    ax.set_ylabel("ratio")
    ax.set_title(f"sharp-constant sweep, n = {results[0].n}")
    ax.legend()
    return _finish(fig, path)


def save_interp_figure(report, path: str) -> str:
    """Midpoint estimates against the endpoint-derived bound curve."""
    ts = [pt.t for pt in report.points]
    mids = [pt.midpoint_estimate for pt in report.points]
    bounds = [pt.endpoint_bound for pt in report.points]
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(ts, mids, marker="o", markersize=3, label="midpoint estimate")
    ax.plot(ts, bounds, linestyle="--", label="endpoint bound")
    ax.set_xlabel("t")
    ax.set_ylabel("constant")
    ax.set_title("log-convexity segment check")
    ax.legend()
    return _finish(fig, path)
