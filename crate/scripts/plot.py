"""Plot the CSV tables written by `spincool` into an output directory.

Usage: python scripts/plot.py OUT_DIR [--save DIR]
"""

import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd


def condensate(df, ax):
    ax.plot(df["tau"], df["condensate"])
    ax.set_xscale("symlog", linthresh=df["tau"][df["tau"] > 0].min())
    ax.set_xlabel("tau")
    ax.set_ylabel("condensate")


def trajectory(df, ax):
    for ch, group in df.groupby("channel"):
        mean = group.groupby("tau")["value"].mean()
        ax.plot(mean.index, mean.values, label=ch)
    ax.set_xscale("symlog", linthresh=df["tau"][df["tau"] > 0].min())
    ax.set_xlabel("tau")
    ax.set_ylabel("mean value")
    ax.legend()


def gaps(df, ax):
    for (geometry, bc), group in df.groupby(["geometry", "bc"]):
        ax.loglog(group["L"], 1.0 / group["gap"], "o-", label=f"{geometry} ({bc})")
    ax.set_xlabel("L")
    ax.set_ylabel("1 / gap")
    ax.legend()


def deviation(df, ax):
    for ch, group in df.groupby("channel"):
        ax.semilogy(group["tau"], group["max_abs_deviation"].clip(lower=1e-18), label=ch)
    ax.set_xlabel("tau")
    ax.set_ylabel("max |deviation|")
    ax.legend()


def spectrum(df, ax):
    ax.plot(df["re"], df["im"], ".")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")


def two_spin(df, ax):
    for col in ["t_plus", "t_minus", "t_zero", "singlet"]:
        ax.plot(df["tau"], df[col], label=col)
    ax.set_xlabel("tau")
    ax.set_ylabel("population")
    ax.legend()


def phase(df, ax):
    grid = df.pivot(index="T_over_h", columns="gamma_over_kappa", values="condensate")
    x, y = np.log10(grid.columns.values), np.log10(grid.index.values)
    mesh = ax.pcolormesh(x, y, grid.values, shading="nearest")
    ax.figure.colorbar(mesh, ax=ax, label="condensate")
    ax.set_xlabel("log10 gamma/kappa")
    ax.set_ylabel("log10 T/h")


PLOTS = {
    "condensate.csv": condensate,
    "trajectory.csv": trajectory,
    "gaps.csv": gaps,
    "deviation.csv": deviation,
    "spectrum.csv": spectrum,
    "two_spin.csv": two_spin,
    "phase.csv": phase,
}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("out_dir", type=Path)
    parser.add_argument("--save", type=Path, help="directory for PNG files (default: OUT_DIR)")
    args = parser.parse_args()
    target = args.save or args.out_dir
    target.mkdir(parents=True, exist_ok=True)
    written = 0
    for name, draw in PLOTS.items():
        path = args.out_dir / name
        if not path.exists():
            continue
        fig, ax = plt.subplots(figsize=(6, 4))
        draw(pd.read_csv(path), ax)
        ax.set_title(name)
        fig.tight_layout()
        png = target / (path.stem + ".png")
        fig.savefig(png, dpi=120)
        plt.close(fig)
        print(png)
        written += 1
    if written == 0:
        parser.error(f"no known CSV tables in {args.out_dir}")


if __name__ == "__main__":
    main()
