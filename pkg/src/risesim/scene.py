"""Scene model: buildings, base station, deployed structures and target region."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

from risesim.dee import DeeConfig
from risesim.geometry import (
    Building,
    LinkGeometry,
    LocalAngles,
    Point2,
    Region,
    StructureKind,
    StructurePose,
    _as_point,
    grid_points,
    inside_any,
    local_angles,
    los_blocked,
    segments_blocked,
    signed_angles,
)
from risesim.panel import AntennaGains, Carrier, PanelConfig

__all__ = [
    "Building",
    "LinkGeometry",
    "LocalAngles",
    "Point2",
    "Region",
    "Scene",
    "Structure",
    "StructureKind",
    "StructurePose",
    "grid_points",
    "link_geometry",
    "local_angles",
    "los_blocked",
]


@dataclass(frozen=True)
class Structure:
    pose: StructurePose
    config: Union[PanelConfig, DeeConfig]

    def __post_init__(self):
        is_dee = self.pose.kind is StructureKind.EDGE_DEE
        if is_dee != isinstance(self.config, DeeConfig):
            raise ValueError(f"{self.pose.kind.value} structure cannot use a {type(self.config).__name__}")

    @property
    def kind(self) -> StructureKind:
        return self.pose.kind


@dataclass(frozen=True)
class Scene:
    buildings: tuple[Building, ...]
    bs_position: Point2
    structures: Mapping[str, Structure]
    region: Region
    carrier: Carrier = field(default_factory=Carrier)
    gains: AntennaGains = field(default_factory=AntennaGains)

    def __post_init__(self):
        object.__setattr__(self, "buildings", tuple(self.buildings))
        object.__setattr__(self, "bs_position", _as_point(self.bs_position))
        object.__setattr__(self, "structures", dict(self.structures))
        if inside_any((self.bs_position.x, self.bs_position.y), self.buildings):
            raise ValueError("base station lies inside a building")
        for name, s in self.structures.items():
            p = s.pose.position
            if inside_any((p.x, p.y), self.buildings):
                raise ValueError(f"structure {name!r} lies strictly inside a building")
            if p == self.bs_position:
                raise ValueError(f"structure {name!r} coincides with the base station")

    def structure(self, name: str) -> Structure:
        try:
            return self.structures[name]
        except KeyError:
            raise KeyError(f"unknown structure {name!r}; known: {sorted(self.structures)}") from None

    def grid(self) -> np.ndarray:
        return grid_points(self.region)


def _pose_of(obj) -> StructurePose:
    return obj.pose if isinstance(obj, Structure) else obj


def link_geometry(scene: Scene, pose, user) -> LinkGeometry:
    """Distances, local angles and visibility of the bs -> structure -> user path."""
    pose = _pose_of(pose)
    user = _as_point(user)
    bs = scene.bs_position
    pos = pose.position
    if user == pos or user == bs:
        raise ValueError("user coincides with the structure or the base station")
    incident = local_angles(pose, bs, facing="back" if pose.kind.fed_from_behind else "front")
    scattered = local_angles(pose, user)
    return LinkGeometry(
        d_1=bs.distance(pos),
        d_2=pos.distance(user),
        incident=incident,
        scattered=scattered,
        bs_visible=not los_blocked(bs, pos, scene),
        user_visible=not los_blocked(pos, user, scene),
        scattered_azimuth=math.atan2(user.y - pos.y, user.x - pos.x),
    )


@dataclass
class LinkArrays:
    """Link geometry for many users of one structure, as flat arrays."""

    d_1: float
    incident: LocalAngles
    bs_visible: bool
    d_2: np.ndarray
    scattered_signed: np.ndarray
    scattered_azimuth: np.ndarray
    user_visible: np.ndarray
    user_inside: np.ndarray


def link_arrays(scene: Scene, pose, users: np.ndarray) -> LinkArrays:
    pose = _pose_of(pose)
    users = np.asarray(users, dtype=float).reshape(-1, 2)
    bs = scene.bs_position
    pos = pose.position
    rel = users - (pos.x, pos.y)
    return LinkArrays(
        d_1=bs.distance(pos),
        incident=local_angles(pose, bs, facing="back" if pose.kind.fed_from_behind else "front"),
        bs_visible=not los_blocked(bs, pos, scene),
        d_2=np.hypot(rel[:, 0], rel[:, 1]),
        scattered_signed=signed_angles(pose, users),
        scattered_azimuth=np.arctan2(rel[:, 1], rel[:, 0]),
        user_visible=~segments_blocked((pos.x, pos.y), users, scene.buildings),
        user_inside=inside_any(users, scene.buildings),
    )


def shadowed(scene: Scene, users: np.ndarray) -> np.ndarray:
    """Cells whose direct path from the base station is blocked."""
    bs = scene.bs_position
    return segments_blocked((bs.x, bs.y), np.asarray(users, dtype=float).reshape(-1, 2), scene.buildings)
