"""Figure rendering for CLI reports; every function writes one PNG file."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .chain import FiniteChain, ProbVector
from .counting import CountEstimate
from .metropolis import Trace
from .mixing import MixingReport

_DPI = 150


def save_chain_figure(chain: FiniteChain, stationary: ProbVector | None, path) -> None:
    """Transition-matrix heatmap, plus stationary-mass bars when available."""
    n_panels = 2 if stationary is not None else 1
    fig, axes = plt.subplots(1, n_panels, figsize=(5 * n_panels, 4))
    axes = np.atleast_1d(axes)

    im = axes[0].imshow(chain.matrix, cmap="viridis", vmin=0.0, vmax=1.0)
    axes[0].set_xticks(range(chain.n), chain.states)
    axes[0].set_yticks(range(chain.n), chain.states)
    axes[0].set_xlabel("to")
    axes[0].set_ylabel("from")
    axes[0].set_title("transition probabilities")
    fig.colorbar(im, ax=axes[0], fraction=0.046)

    if stationary is not None:
        axes[1].bar(range(chain.n), stationary.probs, color="tab:blue")
        axes[1].set_xticks(range(chain.n), stationary.states)
        axes[1].set_ylabel("stationary mass")
        axes[1].set_title("stationary distribution")

    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_mixing_figure(report: MixingReport, path) -> None:
    """d(t) on a log scale with the fitted geometric envelope overlaid."""
    ts = np.array([t for t, _ in report.d_curve])
    ds = np.array([d for _, d in report.d_curve])
    env = report.envelope

    fig, ax = plt.subplots(figsize=(6, 4))
    positive = ds > 0
    ax.semilogy(ts[positive], ds[positive], "o-", label="d(t)")
    if not env.trivial:
        ax.semilogy(ts, env.C * env.alpha ** ts, "k--",
                    label=f"envelope {env.C:.3g} * {env.alpha:.3g}^t")
    ax.axvline(report.t_mix, color="tab:red", linestyle=":",
               label=f"t_mix = {report.t_mix}")
    ax.set_xlabel("t")
    ax.set_ylabel("distance to stationarity")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_trace_figure(trace: Trace, path) -> None:
    """Kept-sample path and histogram for the first coordinate."""
    samples = np.atleast_2d(np.asarray(trace.samples, dtype=float))
    if samples.shape[0] == 1 and len(trace) != 1:
        samples = samples.T
    first = samples[:, 0]

    fig, (ax_path, ax_hist) = plt.subplots(1, 2, figsize=(10, 4))
    ax_path.plot(first, linewidth=0.7)
    ax_path.set_xlabel("kept iteration")
    ax_path.set_ylabel("theta_1")
    ax_path.set_title(f"trace (seed {trace.seed})")

    ax_hist.hist(first, bins=min(60, max(10, len(first) // 50)),
                 color="tab:blue", density=True)
    ax_hist.set_xlabel("theta_1")
    ax_hist.set_ylabel("density")
    ax_hist.set_title("kept-sample histogram")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_posterior_figure(points: np.ndarray, weights: np.ndarray,
                          estimates: dict[str, float], path) -> None:
    """Posterior masses on the grid with the point estimates marked."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(points, weights, linewidth=1.0)
    colors = {"mle": "tab:green", "map": "tab:red", "posterior_mean": "tab:orange"}
    for name, value in estimates.items():
        if name in colors:
            ax.axvline(value, color=colors[name], linestyle="--",
                       label=f"{name} = {value:.4g}")
    ax.set_xlabel("theta")
    ax.set_ylabel("posterior mass")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_count_figure(estimate: CountEstimate, exact: int | None, path) -> None:
    """Estimate bar with its (1 +/- epsilon)-style ratio band and the exact count."""
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.bar([0], [estimate.estimate], color="tab:blue", label="estimate")
    ratio = 1.0 + estimate.epsilon
    ax.axhspan(estimate.estimate / ratio, estimate.estimate * ratio,
               color="tab:blue", alpha=0.2, label="ratio band")
    if exact is not None:
        ax.axhline(exact, color="tab:red", linestyle="--", label=f"exact = {exact}")
    ax.set_xticks([0], ["solution count"])
    ax.set_ylabel("count")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
