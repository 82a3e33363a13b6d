"""Plot trajectory CSVs from `epfkit trajectory` in the barycentric triangle and the Lumley map.

usage: python scripts/plot_trajectories.py OUT_DIR [--save FILE]
"""

import argparse
import glob
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

CORNERS = {"1C": (1.0, 0.0), "2C": (0.0, 0.0), "3C": (0.5, np.sqrt(3.0) / 2.0)}


def read(path):
    return np.genfromtxt(path, delimiter=",", names=True)


def triangle(ax):
    pts = [CORNERS["1C"], CORNERS["2C"], CORNERS["3C"], CORNERS["1C"]]
    ax.plot(*zip(*pts), color="black", lw=1)
    for name, (x, y) in CORNERS.items():
        ax.annotate(name, (x, y), textcoords="offset points", xytext=(4, 4))
    ax.set_aspect("equal")
    ax.set_axis_off()


def invariants(l):
    l = np.asarray(l)
    pairwise = l[0] * l[1] + l[0] * l[2] + l[1] * l[2]
    return l[0] * l[1] * l[2], pairwise


def lumley(ax):
    # boundaries traced from their eigenvalue paths: both axisymmetric branches and the two-component line
    s = np.linspace(-1.0 / 3.0, 2.0 / 3.0, 300)
    t = np.linspace(0.0, 1.0, 300)
    for l in ([2 * s, -s, -s], [1.0 / 3.0 + t, 1.0 / 3.0 - t, np.full_like(t, -2.0 / 3.0)]):
        third, second = invariants(l)
        ax.plot(third, -second, color="black", lw=1)
    ax.set_xlabel("III")
    ax.set_ylabel("-II")


def main():
    p = argparse.ArgumentParser()
    p.add_argument("out_dir")
    p.add_argument("--save", default=None)
    args = p.parse_args()

    files = sorted(glob.glob(os.path.join(args.out_dir, "trajectory_*.csv")))
    if not files:
        raise SystemExit(f"no trajectory CSVs in {args.out_dir}")
    fig, (bary, aim) = plt.subplots(1, 2, figsize=(11, 5))
    triangle(bary)
    lumley(aim)
    for path in files:
        d = read(path)
        label = os.path.basename(path)[len("trajectory_"):-len(".csv")]
        line = bary.plot(d["bary_x"], d["bary_y"], marker="o", ms=3, label=label)[0]
        aim.plot(d["III"], -d["II"], marker="o", ms=3, color=line.get_color())
    bary.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    fig.savefig(args.save or os.path.join(args.out_dir, "trajectories.png"), dpi=150)


if __name__ == "__main__":
    main()
