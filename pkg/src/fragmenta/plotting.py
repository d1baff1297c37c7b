"""Optional figures written next to the CSV output (the CSV stays the contract)."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# fixed metadata keeps PNG bytes stable across runs
_META = {"Software": None}


def _save(fig, path) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(p, dpi=120, metadata=_META)
    plt.close(fig)
    return p


def plot_gap_ratios(centers, density, refs: dict, path, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.6))
    width = centers[1] - centers[0] if len(centers) > 1 else 1.0
    ax.bar(centers, density, width=width, color="#9ecae1", edgecolor="#3182bd", lw=0.4, label="data")
    styles = {"goe": "-", "2goe": "--", "3goe": "-.", "poisson": ":"}
    for name, curve in refs.items():
        ax.plot(curve.r, curve.density, styles.get(name, "-"), lw=1.4, label=name.upper())
    ax.set_xlim(0, 1)
    ax.set_xlabel("r")
    ax.set_ylabel("P(r)")
    ax.set_title(title, fontsize=9)
    ax.legend(fontsize=8, frameon=False)
    fig.tight_layout()
    return _save(fig, path)


def plot_entropy_profile(cuts, entropies, path, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.4))
    ax.plot(cuts, entropies, "o-", ms=3)
    ax.set_xlabel("cut position")
    ax.set_ylabel("S")
    ax.set_title(title, fontsize=9)
    fig.tight_layout()
    return _save(fig, path)


def plot_bridge(t, mean, sigma, fitted_sigma: float, L: int, path) -> Path:
    t = np.asarray(t, dtype=float)
    fig, ax = plt.subplots(figsize=(5, 3.4))
    ax.fill_between(t, mean - sigma, mean + sigma, color="#fcbba1", alpha=0.6, lw=0)
    ax.plot(t, mean, color="#cb181d", label="mean depth")
    env = fitted_sigma * np.sqrt(2 * t * (L - t) / (np.pi * L))
    ax.plot(t, env, "k--", lw=1, label=f"bridge fit, sigma={fitted_sigma:.3f}")
    ax.set_xlabel("t")
    ax.set_ylabel("|X_t|")
    ax.legend(fontsize=8, frameon=False)
    fig.tight_layout()
    return _save(fig, path)


def plot_histogram(sizes: dict[int, int], path, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.4))
    xs = sorted(sizes)
    ax.bar(range(len(xs)), [sizes[x] for x in xs], color="#74c476")
    ax.set_xticks(range(len(xs)), [str(x) for x in xs], rotation=60, fontsize=7)
    ax.set_yscale("log")
    ax.set_xlabel("sector dimension")
    ax.set_ylabel("count")
    ax.set_title(title, fontsize=9)
    fig.tight_layout()
    return _save(fig, path)
