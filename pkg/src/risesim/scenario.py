"""Scenario files: a versioned JSON document describing one scene.

Angles are stored in degrees and converted to radians on load. The parsed
document is kept next to the scene so that writing a loaded file back out
reproduces it exactly.

Canonical scenes are hand-built approximations of two deployment layouts,
a shadow region behind a building corner and one behind a wall. They are
not surveyed coordinates.
"""

from __future__ import annotations

import copy
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union

import numpy as np

from risesim.dee import DEFAULT_AREA, EFFICIENCY_5G5, DeeConfig
from risesim.geometry import Building, Point2, Region, StructureKind, StructurePose, inside_any
from risesim.panel import AntennaGains, Carrier, PanelConfig
from risesim.scene import Scene, Structure, shadowed

SCHEMA_VERSION = 1
CANONICAL_SCENES = ("A_corner_30m", "A_corner_50m", "B_wall")
SCENE_TYPES = ("corner", "wall", "custom")
BEAM_MODES = ("dynamic", "fixed")
BEAM_STRATEGIES = ("centroid", "search")


class ScenarioError(ValueError):
    """Problem in a scenario document, tagged with the offending field path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


@dataclass(frozen=True)
class Options:
    beam_mode: str = "dynamic"
    beam_strategy: str = "centroid"
    shadow_only: bool = True


@dataclass(frozen=True)
class ScenarioFile:
    name: str
    scene: Scene
    options: Options
    scene_type: str = "custom"
    description: str = ""
    document: dict = field(default_factory=dict, compare=False, repr=False)

    def to_dict(self) -> dict:
        return copy.deepcopy(self.document)

    def dumps(self) -> str:
        return dumps_document(self.document)


_NUM_LIST = re.compile(r"\[\s*(-?[\d.eE+-]+),\s*(-?[\d.eE+-]+)\s*\]")


def dumps_document(doc: dict) -> str:
    """Indented JSON with [x, y] pairs kept on one line."""
    return _NUM_LIST.sub(r"[\1, \2]", json.dumps(doc, indent=2)) + "\n"


# -- parsing helpers ------------------------------------------------------


def _join(path: str, key: Union[str, int]) -> str:
    if isinstance(key, int):
        return f"{path}[{key}]"
    return f"{path}.{key}" if path else key


def _check_keys(obj: dict, path: str, required: tuple, optional: tuple = ()):
    if not isinstance(obj, dict):
        raise ScenarioError(path, f"expected an object, got {type(obj).__name__}")
    for k in required:
        if k not in obj:
            raise ScenarioError(_join(path, k), "missing required field")
    extra = sorted(set(obj) - set(required) - set(optional))
    if extra:
        raise ScenarioError(_join(path, extra[0]), "unknown field")


def _number(obj: dict, key: str, path: str, default=None) -> float:
    p = _join(path, key)
    v = obj.get(key, default)
    if v is None:
        raise ScenarioError(p, "missing required field")
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ScenarioError(p, f"expected a number, got {v!r}")
    v = float(v)
    if not math.isfinite(v):
        raise ScenarioError(p, f"must be finite, got {v}")
    return v


def _integer(obj: dict, key: str, path: str, default=None) -> int:
    p = _join(path, key)
    v = obj.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ScenarioError(p, f"expected an integer, got {v!r}")
    return v


def _choice(obj: dict, key: str, path: str, choices: tuple, default=None) -> str:
    v = obj.get(key, default)
    if v not in choices:
        raise ScenarioError(_join(path, key), f"expected one of {list(choices)}, got {v!r}")
    return v


def _point(v, path: str) -> Point2:
    if not isinstance(v, list) or len(v) != 2 or any(isinstance(c, bool) or not isinstance(c, (int, float)) for c in v):
        raise ScenarioError(path, f"expected [x, y], got {v!r}")
    try:
        return Point2(float(v[0]), float(v[1]))
    except ValueError as e:
        raise ScenarioError(path, str(e)) from None


def _build(path: str, fn, *args, **kw):
    """Call a constructor, re-raising its validation error under ``path``."""
    try:
        return fn(*args, **kw)
    except ValueError as e:
        raise ScenarioError(path, str(e)) from None


def _parse_panel(obj: dict, path: str) -> PanelConfig:
    _check_keys(obj, path, ("rows", "cols"), ("d_x_m", "d_y_m", "gamma", "amplitude", "gain", "alpha", "quantization"))
    q = obj.get("quantization", 4)
    if q == "continuous":
        levels = None
    else:
        levels = _integer(obj, "quantization", path, 4)
    kw = dict(
        rows=_integer(obj, "rows", path),
        cols=_integer(obj, "cols", path),
        d_x=_number(obj, "d_x_m", path, 0.01),
        d_y=_number(obj, "d_y_m", path, 0.01),
        gamma=_number(obj, "gamma", path, 1.0),
        amplitude=_number(obj, "amplitude", path, 1.0),
        gain=_number(obj, "gain", path, 1.0),
        alpha=_number(obj, "alpha", path, 3.0),
        quantization_levels=levels,
    )
    # validate field by field so the error names the exact key
    names = {"d_x": "d_x_m", "d_y": "d_y_m", "quantization_levels": "quantization"}
    for k in ("rows", "cols", "d_x", "d_y", "gamma", "amplitude", "gain", "alpha", "quantization_levels"):
        try:
            PanelConfig(**{**_PANEL_OK, k: kw[k]})
        except ValueError as e:
            raise ScenarioError(_join(path, names.get(k, k)), str(e)) from None
    return PanelConfig(**kw)


_PANEL_OK = dict(rows=1, cols=1)


def _parse_dee(obj: dict, path: str) -> DeeConfig:
    _check_keys(
        obj, path, ("boresight_azimuth_deg",), ("efficiency", "area_m2", "incident_exponent", "scattered_exponent")
    )
    eff = _number(obj, "efficiency", path, EFFICIENCY_5G5)
    area = _number(obj, "area_m2", path, DEFAULT_AREA)
    if not 0 < eff <= 1:
        raise ScenarioError(_join(path, "efficiency"), f"must lie in (0, 1], got {eff}")
    if area < 0:
        raise ScenarioError(_join(path, "area_m2"), f"must be >= 0, got {area}")
    for k in ("incident_exponent", "scattered_exponent"):
        if _number(obj, k, path, 0.0) < 0:
            raise ScenarioError(_join(path, k), "must be >= 0")
    return DeeConfig.from_area(
        area,
        eff,
        boresight_azimuth=math.radians(_number(obj, "boresight_azimuth_deg", path)),
        incident_exponent=_number(obj, "incident_exponent", path, 2.0),
        scattered_exponent=_number(obj, "scattered_exponent", path, 3.0),
    )


def _parse_structure(obj: dict, path: str) -> tuple[str, Structure]:
    _check_keys(obj, path, ("name", "kind", "position", "normal_azimuth_deg"), ("panel", "dee"))
    name = obj["name"]
    if not isinstance(name, str) or not name:
        raise ScenarioError(_join(path, "name"), f"expected a non-empty string, got {name!r}")
    kinds = tuple(k.value for k in StructureKind)
    kind = StructureKind(_choice(obj, "kind", path, kinds))
    pose = StructurePose(
        _point(obj["position"], _join(path, "position")),
        math.radians(_number(obj, "normal_azimuth_deg", path)),
        kind,
    )
    if kind is StructureKind.EDGE_DEE:
        if "panel" in obj or "dee" not in obj:
            raise ScenarioError(_join(path, "dee"), "an edge_dee structure needs a 'dee' block and no 'panel'")
        config = _parse_dee(obj["dee"], _join(path, "dee"))
    else:
        if "dee" in obj or "panel" not in obj:
            raise ScenarioError(_join(path, "panel"), f"a {kind.value} structure needs a 'panel' block and no 'dee'")
        config = _parse_panel(obj["panel"], _join(path, "panel"))
    return name, Structure(pose, config)


def _parse_building(obj: dict, path: str) -> Building:
    _check_keys(obj, path, ("vertices",), ("name",))
    verts = obj["vertices"]
    if not isinstance(verts, list):
        raise ScenarioError(_join(path, "vertices"), "expected a list of [x, y] points")
    pts = [_point(v, _join(_join(path, "vertices"), i)) for i, v in enumerate(verts)]
    return _build(_join(path, "vertices"), Building, tuple(pts))


def parse_scenario(doc: Any) -> ScenarioFile:
    """Validate a decoded scenario document and build its scene."""
    _check_keys(
        doc,
        "",
        ("schema_version", "bs", "buildings", "structures", "region"),
        ("name", "description", "scene_type", "carrier", "ue", "options"),
    )
    version = doc["schema_version"]
    if version != SCHEMA_VERSION:
        raise ScenarioError("schema_version", f"unsupported version {version!r}; this reader handles {SCHEMA_VERSION}")
    name = doc.get("name", "")
    description = doc.get("description", "")
    for key, v in (("name", name), ("description", description)):
        if not isinstance(v, str):
            raise ScenarioError(key, f"expected a string, got {v!r}")
    scene_type = _choice(doc, "scene_type", "", SCENE_TYPES, "custom")

    carrier_doc = doc.get("carrier", {})
    _check_keys(carrier_doc, "carrier", (), ("frequency_hz",))
    carrier = _build("carrier.frequency_hz", Carrier, _number(carrier_doc, "frequency_hz", "carrier", 5.5e9))

    bs = doc["bs"]
    _check_keys(bs, "bs", ("position",), ("gain_dbi",))
    ue = doc.get("ue", {})
    _check_keys(ue, "ue", (), ("gain_dbi",))
    gains = AntennaGains.from_dbi(_number(bs, "gain_dbi", "bs", 0.0), _number(ue, "gain_dbi", "ue", 0.0))
    bs_pos = _point(bs["position"], "bs.position")

    if not isinstance(doc["buildings"], list):
        raise ScenarioError("buildings", "expected a list")
    buildings = tuple(_parse_building(b, f"buildings[{i}]") for i, b in enumerate(doc["buildings"]))

    if not isinstance(doc["structures"], list):
        raise ScenarioError("structures", "expected a list")
    structures: dict[str, Structure] = {}
    for i, s in enumerate(doc["structures"]):
        sname, st = _parse_structure(s, f"structures[{i}]")
        if sname in structures:
            raise ScenarioError(f"structures[{i}].name", f"duplicate structure name {sname!r}")
        p = st.pose.position
        if inside_any((p.x, p.y), buildings):
            raise ScenarioError(f"structures[{i}].position", "lies strictly inside a building")
        structures[sname] = st

    r = doc["region"]
    _check_keys(r, "region", ("xmin", "ymin", "xmax", "ymax", "resolution_m"))
    region = _build(
        "region",
        Region,
        *(_number(r, k, "region") for k in ("xmin", "ymin", "xmax", "ymax", "resolution_m")),
    )

    o = doc.get("options", {})
    _check_keys(o, "options", (), ("beam_mode", "beam_strategy", "shadow_only"))
    shadow_only = o.get("shadow_only", True)
    if not isinstance(shadow_only, bool):
        raise ScenarioError("options.shadow_only", f"expected true or false, got {shadow_only!r}")
    options = Options(
        beam_mode=_choice(o, "beam_mode", "options", BEAM_MODES, "dynamic"),
        beam_strategy=_choice(o, "beam_strategy", "options", BEAM_STRATEGIES, "centroid"),
        shadow_only=shadow_only,
    )

    if inside_any((bs_pos.x, bs_pos.y), buildings):
        raise ScenarioError("bs.position", "lies strictly inside a building")
    scene = _build("", Scene, buildings, bs_pos, structures, region, carrier, gains)
    return ScenarioFile(name, scene, options, scene_type, description, copy.deepcopy(doc))


def loads(text: str) -> ScenarioFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError("", f"not valid JSON (line {e.lineno}, column {e.colno}): {e.msg}") from None
    return parse_scenario(doc)


def load_scenario(path) -> ScenarioFile:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ScenarioError("", f"cannot read {path}: {e.strerror}") from None
    return loads(text)


def save_scenario(scenario: ScenarioFile, path) -> None:
    Path(path).write_text(scenario.dumps())


# -- canonical scenes -----------------------------------------------------

_SS_PANEL = {"rows": 16, "cols": 16, "d_x_m": 0.01, "d_y_m": 0.01, "gamma": 1.0, "alpha": 3.0, "quantization": 4}
_PANELS = {
    "ss1": _SS_PANEL,
    "ss2": {**_SS_PANEL, "rows": 32, "cols": 32},
    "es": {**_SS_PANEL, "gamma": 0.5},
}


def _rect(xmin, ymin, xmax, ymax) -> list:
    return [[xmin, ymin], [xmax, ymin], [xmax, ymax], [xmin, ymax]]


def _round_deg(rad: float) -> float:
    return round(math.degrees(rad) % 360.0, 3)


def shadow_bisector(buildings, bs, edge, region: Region) -> float:
    """Azimuth halfway across the angular span of the shadowed cells seen from ``edge``."""
    probe = Scene(tuple(buildings), bs, {}, region)
    pts = probe.grid()
    pts = pts[shadowed(probe, pts) & ~inside_any(pts, probe.buildings)]
    if pts.shape[0] == 0:
        raise ValueError("region has no shadowed cell")
    az = np.arctan2(pts[:, 1] - edge[1], pts[:, 0] - edge[0])
    ref = np.angle(np.exp(1j * az).mean())
    d = np.angle(np.exp(1j * (az - ref)))
    return float(ref + 0.5 * (d.min() + d.max()))


def _layout(scene_id: str) -> dict:
    if scene_id in ("A_corner_30m", "A_corner_50m"):
        gap = 30.0 if scene_id == "A_corner_30m" else 50.0
        return dict(
            scene_type="corner",
            # obstacle with its corner at the origin; the facing building moves with the SS
            buildings=[_rect(-100.0, -100.0, 0.0, 0.0), _rect(gap, -100.0, gap + 20.0, 40.0)],
            bs=(-15.0, 0.5),
            edge=(0.0, 0.0),
            ss=((gap, 3.0), 180.0),
            region=(0.0, -30.0, 28.0, 0.0),
            description=(
                f"Shadow region behind a building corner. SS on a facing wall {gap:g} m east of the corner, "
                "ES and DEE on the corner edge. Approximate layout, not surveyed coordinates."
            ),
        )
    if scene_id == "B_wall":
        return dict(
            scene_type="wall",
            # the BS sees the SS through the 8 m gap west of the wall
            buildings=[_rect(-40.0, 0.0, 20.0, 1.0), _rect(-68.0, -40.0, -48.0, 20.0)],
            bs=(22.0, 30.0),
            edge=(20.0, 0.0),
            ss=((-48.0, -2.0), 0.0),
            region=(-38.0, -20.0, -10.0, -1.0),
            description=(
                "Shadow region directly behind a wall. SS on the facing wall of the adjacent building, "
                "ES and DEE on the far edge of the wall. Approximate layout, not surveyed coordinates."
            ),
        )
    raise ValueError(f"unknown canonical scene {scene_id!r}; expected one of {CANONICAL_SCENES}")


def canonical_document(scene_id: str) -> dict:
    lay = _layout(scene_id)
    res = 1.0
    region = Region(*lay["region"], res)
    bs, edge = lay["bs"], lay["edge"]
    buildings = [Building(tuple(Point2(*v) for v in b)) for b in lay["buildings"]]
    # ES looks into the middle of the shadow wedge; the DEE takes the BS wave
    # head on and radiates along the same bisector
    bisector = _round_deg(shadow_bisector(buildings, bs, edge, region))
    toward_edge = _round_deg(math.atan2(edge[1] - bs[1], edge[0] - bs[0]))
    ss_pos, ss_normal = lay["ss"]

    def panel(name, kind, pos, normal):
        return {
            "name": name,
            "kind": kind,
            "position": list(pos),
            "normal_azimuth_deg": normal,
            "panel": dict(_PANELS[name]),
        }

    return {
        "schema_version": SCHEMA_VERSION,
        "name": scene_id,
        "description": lay["description"],
        "scene_type": lay["scene_type"],
        "carrier": {"frequency_hz": 5.5e9},
        "bs": {"position": list(bs), "gain_dbi": 0.0},
        "ue": {"gain_dbi": 0.0},
        "buildings": [{"name": f"b{i + 1}", "vertices": b} for i, b in enumerate(lay["buildings"])],
        "structures": [
            panel("ss1", "surface_reflective", ss_pos, ss_normal),
            panel("ss2", "surface_reflective", ss_pos, ss_normal),
            panel("es", "edge_transmissive", edge, bisector),
            {
                "name": "dee",
                "kind": "edge_dee",
                "position": list(edge),
                "normal_azimuth_deg": toward_edge,
                "dee": {
                    "boresight_azimuth_deg": bisector,
                    "efficiency": EFFICIENCY_5G5,
                    "area_m2": DEFAULT_AREA,
                    "incident_exponent": 2.0,
                    "scattered_exponent": 3.0,
                },
            },
        ],
        "region": dict(zip(("xmin", "ymin", "xmax", "ymax"), lay["region"]), resolution_m=res),
        "options": {"beam_mode": "dynamic", "beam_strategy": "centroid", "shadow_only": True},
    }


def generate_canonical(scene_id: str) -> ScenarioFile:
    return parse_scenario(canonical_document(scene_id))


def data_path(scene_id: str) -> Path:
    """Location of the committed copy of a canonical scene."""
    return Path(__file__).parent / "data" / f"{scene_id}.json"


def load_canonical(scene_id: str, *, committed: bool = True) -> ScenarioFile:
    if committed and data_path(scene_id).exists():
        return load_scenario(data_path(scene_id))
    return generate_canonical(scene_id)


def structure_names(scenario: ScenarioFile) -> list[str]:
    return list(scenario.scene.structures)


def describe(scenario: ScenarioFile) -> str:
    sc = scenario.scene
    rows, cols = sc.region.shape
    return (
        f"{scenario.name or '(unnamed)'} [{scenario.scene_type}]: {len(sc.buildings)} buildings, "
        f"structures {', '.join(sc.structures)}, {cols}x{rows} cells"
    )

