"""CSV/JSON emitters with lossless 17-significant-digit floats."""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable, Sequence

from .montecarlo import RocCurve

ROC_HEADER = ("alpha", "pfa_hat", "pmd_hat", "trials", "seed")
CIR_HEADER = ("t_seconds", "concentration")


def fmt(value) -> str:
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    return format(float(value), ".17g")


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def json_arrays(record: dict[str, Sequence[float]]) -> str:
    """JSON object of float arrays, each number printed with 17 significant digits."""
    parts = [f'"{k}": [' + ", ".join(fmt(x) for x in v) + "]" for k, v in record.items()]
    return "{" + ", ".join(parts) + "}\n"


def roc_rows(curve: RocCurve):
    return [(p.alpha, p.pfa_hat, p.pmd_hat, curve.trials_per_point, curve.seed) for p in curve.points]


def roc_filename(tap_count: int, sigma2: float) -> str:
    return f"roc_L{tap_count}_sigma2_{fmt(sigma2)}.csv"


def write_text(path: str | Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def read_csv(path: str | Path) -> tuple[list[str], list[list[float]]]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(io.StringIO(fh.read()))
        header = next(reader)
        return header, [[float(x) for x in row] for row in reader]


CIR_PLOT_SCRIPT = '''\
"""Plot the received pulse written by `molauth gen-cir`."""
import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else {csv_name!r}
tap_count = {tap_count}
with open(path) as fh:
    rows = [tuple(map(float, r)) for r in list(csv.reader(fh))[1:]]
taps, curve = rows[:tap_count], rows[tap_count:]
plt.plot([r[0] for r in curve], [r[1] for r in curve], label="concentration")
plt.plot([r[0] for r in taps], [r[1] for r in taps], "o", label="CIR taps")
plt.xlabel("t [s]")
plt.ylabel("concentration [molecules/m^3]")
plt.legend()
plt.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
'''

ROC_PLOT_SCRIPT = '''\
"""Plot ROC curves written by `molauth roc`."""
import csv
import os

import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
files = {files!r}
for name in files:
    with open(os.path.join(here, name)) as fh:
        rows = [tuple(map(float, r)) for r in list(csv.reader(fh))[1:]]
    plt.plot([r[1] for r in rows], [r[2] for r in rows], marker="o", label=name[:-4])
plt.xscale("log")
plt.xlabel("P_fa")
plt.ylabel("P_md")
plt.grid(True, which="both", alpha=0.3)
plt.legend()
plt.savefig(os.path.join(here, "roc.png"), dpi=150)
'''
