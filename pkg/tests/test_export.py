import csv
import math

import numpy as np
import pytest

from risesim import export, stats
from risesim.engine import PathlossMap, evaluate_region
from risesim.geometry import Region, grid_points


def _map(values, region=Region(0, 0, 3, 2, 1.0)):
    return PathlossMap(region, grid_points(region), np.array(values, dtype=float))


def test_map_csv(tmp_path, canonical):
    sc = canonical["A_corner_30m"].scene
    pmap = evaluate_region(sc, "es", shadow_only=True)
    path = tmp_path / "m.csv"
    export.write_map_csv(pmap, path)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["x", "y", "attenuation_db"]
    assert len(rows) == pmap.points.shape[0] + 1
    vals = np.array([float(r[2]) for r in rows[1:]])
    assert np.array_equal(vals, pmap.attenuation_db, equal_nan=True)


def test_map_csv_sentinels():
    lines = export.map_csv_lines(_map([1.5, math.inf, math.nan, 2, 3, 4]))
    assert lines[1] == "0.5,0.5,1.5"
    assert lines[2] == "1.5,0.5,inf"
    assert lines[3] == "2.5,0.5,nan"
    assert len(lines) == 7


def test_cdf_csv(tmp_path):
    path = tmp_path / "c.csv"
    export.write_cdf_csv(stats.cdf([3.0, 1.0, math.inf]), path)
    assert path.read_text() == "attenuation_db,cdf\n1.0,0.5\n3.0,1.0\n"


def test_pgm_mapping_and_orientation():
    # rows from ymin: [10, 20, inf] then [nan, 15, 10]
    text = export.pgm_text(_map([10, 20, math.inf, math.nan, 15, 10]))
    lines = text.splitlines()
    assert lines[:3] == ["P2", "3 2", "255"]
    # top image row is the largest y
    assert lines[3].split() == ["0", str(1 + round(254 * 5 / 10)), "255"]
    assert lines[4].split() == ["255", "1", "0"]


def test_pgm_constant_and_empty():
    assert export.gray_levels(_map([7.0] * 6)).tolist() == [[255] * 3] * 2
    assert export.gray_levels(_map([math.inf] * 6)).tolist() == [[0] * 3] * 2


def test_pgm_file(tmp_path):
    path = tmp_path / "h.pgm"
    export.write_pgm(_map([1, 2, 3, 4, 5, 6]), path)
    tokens = path.read_text().split()
    assert tokens[:4] == ["P2", "3", "2", "255"]
    assert len(tokens) == 4 + 6
    assert all(0 <= int(t) <= 255 for t in tokens[4:])


@pytest.mark.parametrize("res", [0.5, 1.0, 2.0])
def test_row_count_matches_grid(res):
    region = Region(0, 0, 7, 3, res)
    pmap = _map(np.zeros(region.shape[0] * region.shape[1]), region)
    assert len(export.map_csv_lines(pmap)) == region.shape[0] * region.shape[1] + 1
