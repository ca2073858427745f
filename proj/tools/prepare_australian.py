#!/usr/bin/env python3
"""Rebuild data/australian.csv (Statlog Australian Credit Approval, 690 x 14).

The only offline copies available are
  * the KEEL distribution shipped in the ``keel-ds`` wheel, whose continuous
    columns V2, V3 and V7 lost their decimal points (22.08 -> 2208.0), and
  * the first 85 rows of the libsvm-scaled copy shipped as an sklearn test
    fixture (OpenML id 292), which preserve exact values up to a linear map.

V2 is recovered exactly from its range. V3 and V7 are multiples of roughly
1/24 in [0, 28.5]; the decimal position is chosen among candidates that sit on
that grid, preferring the one closest to the column median on a log scale.
Rows covered by the scaled fixture are overwritten with exact values.

Usage: prepare_australian.py KEEL_WHEEL SKLEARN_ARFF_GZ OUT_CSV
"""
import gzip
import math
import sys
import zipfile

RANGES = {1: (13.75, 80.25), 2: (0.0, 28.0), 6: (0.0, 28.5)}
MEDIANS = {2: 2.75, 6: 1.0}
CATEGORICAL = (0, 3, 4, 5, 7, 8, 10, 11)


def candidates(digits, col):
    lo, hi = RANGES[col]
    return [digits / 10**k for k in range(4) if lo <= digits / 10**k <= hi]


def on_grid(v, tol=0.0085):
    return abs(v * 24 - round(v * 24)) / 24 <= tol


def recover(raw, col):
    digits = int(round(float(raw)))
    if col == 1:
        if digits >= 1000:
            return digits / 100
        if digits >= 100:
            return digits / 10
        return float(digits)
    cands = candidates(digits, col)
    grid = [c for c in cands if on_grid(c)] or cands
    med = MEDIANS[col]
    return min(grid, key=lambda c: abs(math.log((c + 0.04) / (med + 0.04))))


def fixture_rows(path):
    rows = []
    with gzip.open(path, "rt") as fh:
        for line in fh:
            if not line.startswith("{"):
                continue
            cells = {}
            for kv in line.strip()[1:-1].split(","):
                k, v = kv.split()
                cells[int(k)] = float(v)
            rows.append([cells.get(i, 0.0) for i in range(15)])
    return rows


def fmt(v):
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return s if s else "0"


def main():
    wheel, arff, out = sys.argv[1:4]
    with zipfile.ZipFile(wheel) as z:
        raw = z.read("keel_ds/data/balanced/raw/australian.dat").decode()
    keel = [l.strip().split(",") for l in raw.splitlines() if l and not l.startswith("@")]
    exact = fixture_rows(arff)
    with open(out, "w") as fh:
        fh.write(",".join(f"V{i}" for i in range(1, 15)) + ",class\n")
        for r, row in enumerate(keel):
            vals = []
            for c in range(14):
                if c in RANGES:
                    if r < len(exact):
                        lo, hi = RANGES[c]
                        v = lo + (exact[r][c + 1] + 1) / 2 * (hi - lo)
                    else:
                        v = recover(row[c], c)
                    vals.append(fmt(v))
                else:
                    vals.append(str(int(round(float(row[c])))))
            vals.append("+" if row[14] == "1" else "-")
            fh.write(",".join(vals) + "\n")


if __name__ == "__main__":
    main()
