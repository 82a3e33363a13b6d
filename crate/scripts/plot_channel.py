"""Plot channel outputs from `epfkit channel`: u+ envelopes and barycentric profiles.

usage: python scripts/plot_channel.py OUT_DIR [--save FILE]
"""

import argparse
import glob
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from plot_trajectories import triangle


def read(path):
    return np.genfromtxt(path, delimiter=",", names=True)


def main():
    p = argparse.ArgumentParser()
    p.add_argument("out_dir")
    p.add_argument("--save", default=None)
    args = p.parse_args()
    out = args.out_dir

    envelopes = sorted(glob.glob(os.path.join(out, "envelope_*.csv")))
    fig, axes = plt.subplots(1, 1 + len(envelopes), figsize=(5.5 * (1 + len(envelopes)), 5))
    axes = np.atleast_1d(axes)

    base = read(os.path.join(out, "profile_baseline.csv"))
    triangle(axes[0])
    axes[0].plot(base["bary_x"], base["bary_y"], "k.", ms=3, label="baseline")
    for path in sorted(glob.glob(os.path.join(out, "profile_*_*.csv"))):
        d = read(path)
        label = os.path.basename(path)[len("profile_"):-len(".csv")]
        axes[0].plot(d["bary_x"], d["bary_y"], ".", ms=2, label=label)
    axes[0].legend(fontsize=6, loc="upper left")

    overlay = os.path.join(out, "dns_overlay.csv")
    ref = read(overlay) if os.path.exists(overlay) else None
    for ax, path in zip(axes[1:], envelopes):
        e = read(path)
        kind = os.path.basename(path)[len("envelope_"):-len(".csv")]
        ax.fill_between(e["y_plus"], e["u_min"], e["u_max"], alpha=0.3, label=f"{kind} envelope")
        ax.plot(e["y_plus"], e["baseline"], "k-", lw=1, label="baseline")
        yp = np.logspace(0, np.log10(e["y_plus"].max()), 100)
        ax.plot(yp, np.log(yp) / 0.41 + 5.2, "k:", lw=0.8, label="log law")
        if ref is not None:
            ax.plot(ref["y_plus"], ref["u_plus"], "r--", lw=1, label="reference")
        ax.set_xscale("log")
        ax.set_xlabel("y+")
        ax.set_ylabel("u+")
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(args.save or os.path.join(out, "channel.png"), dpi=150)


if __name__ == "__main__":
    main()
