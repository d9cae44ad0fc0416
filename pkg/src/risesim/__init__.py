"""Coverage simulation for surface- and edge-mounted metasurface structures."""

from risesim.scene import (
    Building,
    LinkGeometry,
    LocalAngles,
    Point2,
    Region,
    Scene,
    Structure,
    StructureKind,
    StructurePose,
    grid_points,
    link_geometry,
    local_angles,
    los_blocked,
)
from risesim.panel import (
    AntennaGains,
    BeamSpec,
    Carrier,
    PanelConfig,
    attenuation_db,
    beamforming_gain,
    path_gain,
)
from risesim.dee import DeeConfig, dee_path_gain, dee_pattern
from risesim.engine import (
    Dynamic,
    Fixed,
    PathlossMap,
    compare_structures,
    evaluate_point,
    evaluate_region,
    select_fixed_beam,
)
from risesim.stats import CdfCurve, cdf, percentile

__version__ = "0.1.0"
