"""Writers for pathloss maps, CDF curves and grayscale heatmaps.

Map CSV: header ``x,y,attenuation_db``, one row per grid cell in row-major
order from (xmin, ymin). Unreachable cells are written as ``inf`` and cells
left out of the evaluation as ``nan``.

CDF CSV: header ``attenuation_db,cdf``, one row per reachable cell, sorted.

Heatmap: plain PGM (P2), maxval 255, first image row = highest y. Finite
attenuation v maps linearly onto gray levels 1..255 over [min, max] of the
map, with the lowest attenuation brightest::

    gray = 1 + round(254 * (max - v) / (max - min))

A map whose finite values are all equal is drawn at 255. Unreachable and
excluded cells are 0.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from risesim.engine import PathlossMap
from risesim.stats import CdfCurve

PGM_MAXVAL = 255


def _fmt(v: float) -> str:
    # repr round-trips exactly and spells the sentinels inf / nan
    return repr(float(v))


def map_csv_lines(pmap: PathlossMap) -> list[str]:
    lines = ["x,y,attenuation_db"]
    for (x, y), a in zip(pmap.points, pmap.attenuation_db):
        lines.append(f"{_fmt(x)},{_fmt(y)},{_fmt(a)}")
    return lines


def write_map_csv(pmap: PathlossMap, path) -> None:
    Path(path).write_text("\n".join(map_csv_lines(pmap)) + "\n")


def cdf_csv_lines(curve: CdfCurve) -> list[str]:
    lines = ["attenuation_db,cdf"]
    lines += [f"{_fmt(v)},{_fmt(p)}" for v, p in zip(curve.values, curve.probabilities)]
    return lines


def write_cdf_csv(curve: CdfCurve, path) -> None:
    Path(path).write_text("\n".join(cdf_csv_lines(curve)) + "\n")


def gray_levels(pmap: PathlossMap) -> np.ndarray:
    """Gray image (rows, cols) with row 0 at the top, i.e. the largest y."""
    att = pmap.as_grid()
    finite = np.isfinite(att)
    out = np.zeros(att.shape, dtype=int)
    if finite.any():
        lo, hi = att[finite].min(), att[finite].max()
        if hi > lo:
            out[finite] = 1 + np.rint((PGM_MAXVAL - 1) * (hi - att[finite]) / (hi - lo)).astype(int)
        else:
            out[finite] = PGM_MAXVAL
    return out[::-1]


def pgm_text(pmap: PathlossMap) -> str:
    img = gray_levels(pmap)
    rows, cols = img.shape
    body = "\n".join(" ".join(str(g) for g in row) for row in img)
    return f"P2\n{cols} {rows}\n{PGM_MAXVAL}\n{body}\n"


def write_pgm(pmap: PathlossMap, path) -> None:
    Path(path).write_text(pgm_text(pmap))
