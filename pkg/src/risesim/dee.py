"""Edge-mounted diffraction enhancement structure (DEE).

The structure has no phase control; its link budget is a bistatic
radar-style product of two free-space legs scaled by an effective area and
a fixed normalised pattern. The measured pattern is not available, so a
separable cosine-power pattern stands in for it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from risesim.geometry import TWO_PI, LinkGeometry, LocalAngles
from risesim.panel import AntennaGains, Carrier

# Radiation efficiency at 5.5 GHz (peak of the 5-6 GHz band).
EFFICIENCY_5G5 = 0.62
# Footprint of a 16 x 16 panel at 1 cm pitch, so DEE and ES compare at equal size.
DEFAULT_AREA = 0.16 * 0.16


@dataclass(frozen=True)
class DeeConfig:
    effective_gain: float = EFFICIENCY_5G5 * DEFAULT_AREA  # m^2
    boresight_azimuth: float = 0.0  # global frame, radians
    incident_exponent: float = 2.0
    scattered_exponent: float = 3.0
    efficiency: float = EFFICIENCY_5G5

    def __post_init__(self):
        if not self.effective_gain >= 0:
            raise ValueError(f"effective_gain must be >= 0, got {self.effective_gain}")
        if not 0 < self.efficiency <= 1:
            raise ValueError(f"efficiency must lie in (0, 1], got {self.efficiency}")
        if self.incident_exponent < 0 or self.scattered_exponent < 0:
            raise ValueError("pattern exponents must be >= 0")
        if not math.isfinite(self.boresight_azimuth):
            raise ValueError("boresight_azimuth must be finite")

    @classmethod
    def from_area(cls, area: float, efficiency: float = EFFICIENCY_5G5, **kw) -> DeeConfig:
        """Effective gain as efficiency times physical aperture area."""
        if area < 0:
            raise ValueError("area must be >= 0")
        return cls(effective_gain=efficiency * area, efficiency=efficiency, **kw)


def _pos_cos_pow(theta, p: float):
    theta = np.asarray(theta, dtype=float)
    c = np.where(theta < math.pi / 2, np.cos(theta), 0.0)
    return np.where(c > 0, c ** p, 0.0)


def off_boresight(scattered_azimuth, boresight_azimuth: float):
    """Unsigned angle in [0, pi] between a global direction and the boresight."""
    d = np.mod(np.asarray(scattered_azimuth, dtype=float) - boresight_azimuth + math.pi, TWO_PI) - math.pi
    return np.abs(d)


def dee_pattern(incident: LocalAngles, scattered_from_boresight, config: DeeConfig):
    """Normalised pattern: cos^p of incidence times cos^q off boresight, clamped at pi/2."""
    out = _pos_cos_pow(incident.theta, config.incident_exponent) * _pos_cos_pow(
        scattered_from_boresight, config.scattered_exponent
    )
    return float(out) if np.ndim(out) == 0 else out


def dee_free_space_factor(config: DeeConfig, gains: AntennaGains, wavelength: float, d_1, d_2):
    d_1 = np.asarray(d_1, dtype=float)
    d_2 = np.asarray(d_2, dtype=float)
    num = gains.g_t * gains.g_r * config.effective_gain * wavelength ** 2
    return num / (16.0 * math.pi ** 2 * d_1 ** 2 * d_2 ** 2)


def dee_path_gain(config: DeeConfig, gains: AntennaGains, carrier: Carrier, link: LinkGeometry) -> Optional[float]:
    """Power ratio through the DEE, or None if a leg is blocked or outside the pattern."""
    if not (link.bs_visible and link.user_visible):
        return None
    theta = float(off_boresight(link.scattered_azimuth, config.boresight_azimuth))
    if link.incident.theta >= math.pi / 2 or theta >= math.pi / 2:
        return None
    f = dee_pattern(link.incident, theta, config)
    return float(dee_free_space_factor(config, gains, carrier.wavelength, link.d_1, link.d_2)) * f
