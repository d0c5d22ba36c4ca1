#!/usr/bin/env python3
"""Render rate-fit CSVs produced by `nmg --out` as log-log decay plots.

Usage:
    python3 scripts/plot_results.py out/residual_d1.csv out/hellinger_d2.csv \
        --value-column 2 --out rates.png

Each CSV is plotted as one series: column 0 is r, --value-column selects the
quantity (default: the last column that parses as a positive float). A least
squares slope in log-log space is shown in the legend.
"""

import argparse
import csv
import math
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_series(path: pathlib.Path, value_column: int | None):
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    header, data = rows[0], rows[1:]
    if value_column is None:
        value_column = len(header) - 1
        for j in range(len(header) - 1, 0, -1):
            try:
                if all(float(row[j]) > 0.0 for row in data):
                    value_column = j
                    break
            except ValueError:
                continue
    xs = [float(row[0]) for row in data]
    ys = [float(row[value_column]) for row in data]
    return header[value_column], xs, ys


def loglog_slope(xs, ys):
    lx = [math.log(x) for x in xs]
    ly = [math.log(y) for y in ys]
    n = len(lx)
    mx, my = sum(lx) / n, sum(ly) / n
    sxx = sum((x - mx) ** 2 for x in lx)
    sxy = sum((x - mx) * (y - my) for x, y in zip(lx, ly))
    return sxy / sxx


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csvs", nargs="+", type=pathlib.Path)
    parser.add_argument("--value-column", type=int, default=None,
                        help="0-based column to plot against r (default: auto)")
    parser.add_argument("--out", type=pathlib.Path, default=pathlib.Path("rates.png"))
    args = parser.parse_args()

    fig, ax = plt.subplots(figsize=(7, 5))
    for path in args.csvs:
        label, xs, ys = read_series(path, args.value_column)
        slope = loglog_slope(xs, ys)
        ax.loglog(xs, ys, "o-", label=f"{path.stem}: {label} (slope {slope:.3f})")
    ax.set_xlabel("r")
    ax.set_ylabel("value")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
