"""Regenerates iris_like.csv, a 150x4 three-class measurement table.

Rows are drawn per class from independent normals whose means and spreads
mimic the classic flower measurements, rounded to one decimal and floored
at 0.1 so every value stays positive. Fixed seed; rerunning this script
must reproduce the checked-in file byte for byte.
"""
from pathlib import Path

import numpy as np

MEANS = [
    (5.01, 3.43, 1.46, 0.25),
    (5.94, 2.77, 4.26, 1.33),
    (6.59, 2.97, 5.55, 2.03),
]
STDS = [
    (0.35, 0.38, 0.17, 0.11),
    (0.52, 0.31, 0.47, 0.20),
    (0.64, 0.32, 0.55, 0.27),
]
PER_CLASS = 50


def main() -> None:
    rng = np.random.default_rng(42)
    out = Path(__file__).with_name("iris_like.csv")
    lines = []
    for cls in range(3):
        x = rng.normal(MEANS[cls], STDS[cls], size=(PER_CLASS, 4))
        x = np.clip(np.round(x, 1), 0.1, None)
        for row in x:
            cells = ",".join(f"{v:.1f}" for v in row)
            lines.append(f"{cells},species_{cls}")
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {out} ({len(lines)} rows)")


if __name__ == "__main__":
    main()
