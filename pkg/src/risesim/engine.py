"""Per-point and region-wide attenuation for deployed structures."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from risesim import stats
from risesim.dee import DeeConfig, dee_free_space_factor, dee_pattern, off_boresight
from risesim.geometry import LocalAngles, Region, StructureKind, local_angles
from risesim.panel import BeamSpec, array_factor, free_space_factor, incident_pattern, scattered_pattern
from risesim.scene import Scene, Structure, link_arrays, shadowed

# Fixed so that results never depend on the worker count.
CHUNK = 4096
SEARCH_STEP_DEG = 1


@dataclass(frozen=True)
class Dynamic:
    """Beam re-steered toward every user."""


@dataclass(frozen=True)
class Fixed:
    """One static beam. With ``beam=None`` it is chosen per structure by ``strategy``."""

    beam: Optional[BeamSpec] = None
    strategy: str = "centroid"

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown beam strategy {self.strategy!r}; expected one of {STRATEGIES}")


STRATEGIES = ("centroid", "search")
BeamMode = Union[Dynamic, Fixed]


def parse_mode(mode: Union[str, BeamMode], strategy: str = "centroid") -> BeamMode:
    if isinstance(mode, (Dynamic, Fixed)):
        return mode
    if mode == "dynamic":
        return Dynamic()
    if mode == "fixed":
        return Fixed(strategy=strategy)
    raise ValueError(f"beam mode must be 'dynamic' or 'fixed', got {mode!r}")


@dataclass(frozen=True)
class PathlossMap:
    """Attenuation over a region grid, row-major from (xmin, ymin).

    ``attenuation_db`` holds finite dB for reachable cells, +inf for
    unreachable ones and nan for cells left out of the evaluation (see
    ``shadow_only``).
    """

    region: Region
    points: np.ndarray
    attenuation_db: np.ndarray

    @property
    def resolution(self) -> float:
        return self.region.resolution

    @property
    def shape(self) -> tuple[int, int]:
        return self.region.shape

    @property
    def included(self) -> np.ndarray:
        return ~np.isnan(self.attenuation_db)

    @property
    def reachable(self) -> np.ndarray:
        return np.isfinite(self.attenuation_db)

    @property
    def reachable_fraction(self) -> float:
        n = int(self.included.sum())
        return float(self.reachable.sum()) / n if n else 0.0

    def as_grid(self) -> np.ndarray:
        return self.attenuation_db.reshape(self.shape)


def _signed_cos(signed: np.ndarray) -> np.ndarray:
    # same arithmetic as LocalAngles.cosines
    s = np.sin(np.abs(signed))
    return np.where(signed >= 0, s, -s)


def _geometric_reach(structure: Structure, links) -> np.ndarray:
    ok = links.user_visible & ~links.user_inside & (links.d_2 > 0)
    if not links.bs_visible or links.incident.theta >= math.pi / 2:
        return np.zeros_like(ok)
    if structure.kind is StructureKind.EDGE_DEE:
        off = off_boresight(links.scattered_azimuth, structure.config.boresight_azimuth)
        return ok & (off < math.pi / 2)
    return ok & (np.abs(links.scattered_signed) < math.pi / 2)


def _power_ratio(scene: Scene, structure: Structure, links, beam: Optional[BeamSpec]) -> np.ndarray:
    """Power ratio per user, before reachability masking."""
    lam = scene.carrier.wavelength
    cfg = structure.config
    if isinstance(cfg, DeeConfig):
        off = off_boresight(links.scattered_azimuth, cfg.boresight_azimuth)
        base = dee_free_space_factor(cfg, scene.gains, lam, links.d_1, links.d_2)
        return base * dee_pattern(links.incident, off, cfg)
    scat = (_signed_cos(links.scattered_signed), 0.0)
    desired = scat if beam is None else beam.desired.cosines
    beta = array_factor(cfg, lam, links.incident.cosines, scat, desired, best_reference=True)
    f_i = incident_pattern(links.incident.theta)
    f_s = scattered_pattern(np.abs(links.scattered_signed), cfg.alpha)
    base = free_space_factor(cfg, scene.gains, lam, links.d_1, links.d_2)
    return base * f_i * f_s * np.abs(beta) ** 2


def _attenuation(scene: Scene, structure: Structure, users: np.ndarray, beam: Optional[BeamSpec]) -> np.ndarray:
    links = link_arrays(scene, structure, users)
    ok = _geometric_reach(structure, links)
    out = np.full(users.shape[0], np.inf)
    if ok.any():
        with np.errstate(divide="ignore"):
            pl = _power_ratio(scene, structure, links, beam)[ok]
            out[ok] = np.where(pl > 0, -10.0 * np.log10(pl), np.inf)
    return out


def resolve_beam(scene: Scene, name: str, mode: BeamMode, shadow_only: bool = False) -> Optional[BeamSpec]:
    """The static beam a mode implies for one structure; None means steer per user."""
    if isinstance(mode, Dynamic) or scene.structure(name).kind is StructureKind.EDGE_DEE:
        return None
    if mode.beam is not None:
        return mode.beam
    return select_fixed_beam(scene, name, mode.strategy, shadow_only=shadow_only)


def evaluate_point(scene: Scene, structure: str, user, mode: BeamMode = Dynamic()) -> Optional[float]:
    """Attenuation in dB at ``user``, or None when the point is unreachable."""
    s = scene.structure(structure)
    beam = resolve_beam(scene, structure, parse_mode(mode), False)
    users = np.asarray(user, dtype=float).reshape(1, 2)
    v = float(_attenuation(scene, s, users, beam)[0])
    return v if math.isfinite(v) else None


def evaluate_points(scene: Scene, structure: str, users, beam: Optional[BeamSpec] = None, workers: int = 1) -> np.ndarray:
    """Attenuation at many points for an explicit beam (None = steer at each user)."""
    s = scene.structure(structure)
    users = np.asarray(users, dtype=float).reshape(-1, 2)
    chunks = [users[i : i + CHUNK] for i in range(0, users.shape[0], CHUNK)]
    if not chunks:
        return np.empty(0)
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: _attenuation(scene, s, c, beam), chunks))
    else:
        parts = [_attenuation(scene, s, c, beam) for c in chunks]
    return np.concatenate(parts)


def target_mask(scene: Scene, points: np.ndarray, shadow_only: bool) -> np.ndarray:
    if shadow_only:
        return shadowed(scene, points)
    return np.ones(points.shape[0], dtype=bool)


def evaluate_region(
    scene: Scene,
    structure: str,
    mode: BeamMode = Dynamic(),
    *,
    shadow_only: bool = False,
    workers: int = 1,
) -> PathlossMap:
    """Attenuation over every cell of the scene's region."""
    mode = parse_mode(mode)
    beam = resolve_beam(scene, structure, mode, shadow_only)
    pts = scene.grid()
    keep = target_mask(scene, pts, shadow_only)
    att = np.full(pts.shape[0], np.nan)
    att[keep] = evaluate_points(scene, structure, pts[keep], beam, workers)
    return PathlossMap(scene.region, pts, att)


def _reachable_targets(scene: Scene, name: str, shadow_only: bool) -> np.ndarray:
    s = scene.structure(name)
    pts = scene.grid()
    pts = pts[target_mask(scene, pts, shadow_only)]
    return pts[_geometric_reach(s, link_arrays(scene, s, pts))]


def _candidate_beams() -> list[BeamSpec]:
    out = []
    for deg in range(0, 90, SEARCH_STEP_DEG):
        theta = math.radians(deg)
        out.append(BeamSpec(LocalAngles(theta, 0.0)))
        if deg:
            out.append(BeamSpec(LocalAngles(theta, math.pi)))
    return out


def select_fixed_beam(scene: Scene, structure: str, strategy: str = "centroid", *, shadow_only: bool = False) -> BeamSpec:
    """Pick one static beam direction for a structure's target cells.

    ``centroid`` aims at the centroid of the reachable cells. ``search`` scans
    the front half-space on a 1 degree grid and keeps the direction with the
    lowest median attenuation (first hit wins, i.e. smaller angle, +x side).
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown beam strategy {strategy!r}; expected one of {STRATEGIES}")
    s = scene.structure(structure)
    pts = _reachable_targets(scene, structure, shadow_only)
    if pts.shape[0] == 0:
        raise ValueError(f"structure {structure!r} reaches no cell of the region")
    if strategy == "centroid":
        c = pts.mean(axis=0)
        return BeamSpec(local_angles(s.pose, (float(c[0]), float(c[1]))))
    best, best_med = None, math.inf
    for beam in _candidate_beams():
        med = stats.median(_attenuation(scene, s, pts, beam))
        if med < best_med:
            best, best_med = beam, med
    return best


@dataclass(frozen=True)
class StructureSummary:
    name: str
    kind: str
    median_db: float
    p5_db: float
    p95_db: float
    reachable_fraction: float
    cells: int
    beam_deg: Optional[float] = None  # signed fixed-beam angle from the normal


def summarize(name: str, structure: Structure, pmap: PathlossMap, beam: Optional[BeamSpec] = None) -> StructureSummary:
    if pmap.reachable.any():
        curve = stats.cdf(pmap)
        med, p5, p95 = (stats.percentile(curve, q) for q in (0.5, 0.05, 0.95))
    else:
        med = p5 = p95 = math.inf
    return StructureSummary(
        name=name,
        kind=structure.kind.value,
        median_db=med,
        p5_db=p5,
        p95_db=p95,
        reachable_fraction=pmap.reachable_fraction,
        cells=int(pmap.included.sum()),
        beam_deg=None if beam is None else math.degrees(beam.desired.signed),
    )


def compare_structures(
    scene: Scene,
    structure_names: Sequence[str],
    mode: BeamMode = Dynamic(),
    *,
    shadow_only: bool = False,
    workers: int = 1,
) -> list[StructureSummary]:
    """Median / 5th / 95th percentile attenuation and reachable fraction per structure."""
    if not structure_names:
        raise ValueError("need at least one structure to compare")
    mode = parse_mode(mode)
    rows = []
    for name in structure_names:
        beam = resolve_beam(scene, name, mode, shadow_only)
        pmap = evaluate_region(scene, name, Fixed(beam) if beam is not None else mode, shadow_only=shadow_only, workers=workers)
        rows.append(summarize(name, scene.structure(name), pmap, beam))
    return rows
