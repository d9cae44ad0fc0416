"""Reflective / transmissive metasurface panel: unit phases, array gain, path gain."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from risesim.geometry import TWO_PI, LinkGeometry, LocalAngles

SPEED_OF_LIGHT = 299_792_458.0
DEFAULT_FREQUENCY = 5.5e9


@dataclass(frozen=True)
class PanelConfig:
    """Physical description of an M x N metasurface.

    ``quantization_levels`` is the number of evenly spaced phase states per
    unit, or ``None`` for continuous phase control.
    """

    rows: int
    cols: int
    d_x: float = 0.01
    d_y: float = 0.01
    gamma: float = 1.0
    amplitude: float = 1.0
    gain: float = 1.0
    alpha: float = 3.0
    quantization_levels: Optional[int] = 4

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("rows and cols must be at least 1")
        if not (self.d_x > 0 and self.d_y > 0):
            raise ValueError("unit spacing d_x, d_y must be positive")
        if not 0 < self.gamma <= 1:
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma}")
        if not 0 < self.amplitude <= 1:
            raise ValueError(f"amplitude must lie in (0, 1], got {self.amplitude}")
        if not self.gain >= 1:
            raise ValueError(f"gain must be >= 1, got {self.gain}")
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.quantization_levels is not None and self.quantization_levels < 1:
            raise ValueError(f"quantization_levels must be >= 1, got {self.quantization_levels}")


# Standard structures. SS panels reflect; the ES panel transmits with 3 dB penetration loss.
SS_I = PanelConfig(rows=16, cols=16, gamma=1.0)
SS_II = PanelConfig(rows=32, cols=32, gamma=1.0)
ES = PanelConfig(rows=16, cols=16, gamma=0.5)


@dataclass(frozen=True)
class Carrier:
    frequency: float = DEFAULT_FREQUENCY

    def __post_init__(self):
        if not self.frequency > 0:
            raise ValueError(f"carrier frequency must be positive, got {self.frequency}")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.frequency


@dataclass(frozen=True)
class BeamSpec:
    desired: LocalAngles


@dataclass(frozen=True)
class AntennaGains:
    g_t: float = 1.0
    g_r: float = 1.0

    def __post_init__(self):
        if self.g_t < 0 or self.g_r < 0:
            raise ValueError("antenna gains must be nonnegative")

    @classmethod
    def from_dbi(cls, g_t_dbi: float = 0.0, g_r_dbi: float = 0.0) -> AntennaGains:
        return cls(10 ** (g_t_dbi / 10), 10 ** (g_r_dbi / 10))


def _clamped_cos(theta):
    theta = np.asarray(theta, dtype=float)
    return np.where(theta < math.pi / 2, np.cos(theta), 0.0)


def incident_pattern(theta_i):
    """cos^2 of the incidence angle, zero from pi/2 onward."""
    out = _clamped_cos(theta_i) ** 2
    return float(out) if out.ndim == 0 else out


def scattered_pattern(theta_s, alpha: float):
    """cos^alpha of the scattering angle, zero from pi/2 onward."""
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    c = _clamped_cos(theta_s)
    out = np.where(c > 0, c ** alpha, 0.0)
    return float(out) if out.ndim == 0 else out


def _unit_offsets(m, n, d_x: float, d_y: float):
    return (np.asarray(m, dtype=float) - 0.5) * d_x, (np.asarray(n, dtype=float) - 0.5) * d_y


def _wrap(phase):
    # np.mod maps tiny negatives to 2pi itself; keep results in [0, 2pi)
    r = np.mod(phase, TWO_PI)
    return np.where(r >= TWO_PI, 0.0, r)


def _phase(cx, cy, x, y, wavelength: float):
    # cx * x + cy * y with cy == 0 exactly in the horizontal plane
    return _wrap(TWO_PI / wavelength * (cx * x + cy * y))


def unit_incident_phase(m, n, link: LinkGeometry, carrier: Carrier, d_x: float, d_y: float):
    """Propagation phase of the incident-plus-scattered path through unit (m, n), 1-based."""
    ix, iy = link.incident.cosines
    sx, sy = link.scattered.cosines
    x, y = _unit_offsets(m, n, d_x, d_y)
    out = _phase(ix + sx, iy + sy, x, y, carrier.wavelength)
    return float(out) if out.ndim == 0 else out


def unit_excitation_phase(m, n, incident: LocalAngles, beam: BeamSpec, carrier: Carrier, d_x: float, d_y: float):
    """Phase the unit (m, n) applies to steer the incident wave toward ``beam``."""
    ix, iy = incident.cosines
    dx, dy = beam.desired.cosines
    x, y = _unit_offsets(m, n, d_x, d_y)
    out = _phase(-ix - dx, -iy - dy, x, y, carrier.wavelength)
    return float(out) if out.ndim == 0 else out


def quantize_phase(phase, levels: int):
    """Snap phases to the nearest of ``levels`` evenly spaced states on [0, 2pi).

    Ties go to the lower state index; the tie between the last state and 2pi
    therefore resolves to state 0.
    """
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")
    step = TWO_PI / levels
    r = np.mod(np.asarray(phase, dtype=float), TWO_PI)
    u = r / step - 0.5
    k = np.where(u >= levels - 1, 0.0, np.ceil(u))
    out = k * step
    return float(out) if out.ndim == 0 else out


def best_reference_excitation(exc: np.ndarray, aim: np.ndarray, levels: int) -> np.ndarray:
    """Quantised excitation ``Q(exc + c)`` with the common offset c that maximises
    ``|sum(exp(j (Q(exc + c) + aim)))|``.

    Arrays are (links, units); ``aim`` is the propagation phase toward the
    steering direction and ``exc`` the matching continuous excitation
    (``exc == -aim`` mod 2pi). Moving c across one quantisation step lifts every unit
    by one state exactly once, so visiting the units in order of their
    switching offset enumerates every distinct configuration. The winner is
    the best quantised setting of all, since each unit of an optimum must be
    the state nearest to (common phase - aim).
    """
    step = TWO_PI / levels
    u = exc / step + 0.5
    state = np.floor(u)
    switch = 1.0 - (u - state)
    order = np.argsort(switch, axis=1, kind="stable")
    terms = np.exp(1j * (state * step + aim))
    delta = np.take_along_axis(terms, order, axis=1) * (np.exp(1j * step) - 1.0)
    literal = quantize_phase(exc, levels)
    sums = np.concatenate(
        [
            np.exp(1j * (literal + aim)).sum(axis=1, keepdims=True),
            terms.sum(axis=1, keepdims=True)
            + np.concatenate([np.zeros((terms.shape[0], 1)), np.cumsum(delta[:, :-1], axis=1)], axis=1),
        ],
        axis=1,
    )
    best = np.argmax(np.abs(sums), axis=1)
    # units switched so far in the chosen sweep position
    rank = np.empty_like(order)
    np.put_along_axis(rank, order, np.arange(order.shape[1])[None, :], axis=1)
    lifted = rank < (best - 1)[:, None]
    swept = _wrap((state + lifted) * step)
    return np.where((best == 0)[:, None], literal, swept)


def array_factor(
    config: PanelConfig,
    wavelength: float,
    incident,
    scattered,
    desired,
    best_reference: bool = False,
) -> np.ndarray:
    """Normalised array gain for many links at once.

    ``incident``, ``scattered`` and ``desired`` are pairs ``(cx, cy)`` of direction
    cosines (arrays broadcasting to a common shape). Returns complex beta with
    that shape. When every vertical cosine is zero the columns of the panel
    are identical, so only one column is summed.

    With ``best_reference`` a quantised panel realises the beam as the best
    quantised configuration for the desired direction: the continuous
    excitation gets the common offset (a free choice, it does not move the
    beam) that maximises the gain toward ``desired`` before quantisation.
    """
    ix, iy = (np.asarray(c, dtype=float) for c in incident)
    sx, sy = (np.asarray(c, dtype=float) for c in scattered)
    dx, dy = (np.asarray(c, dtype=float) for c in desired)
    shape = np.broadcast_shapes(ix.shape, iy.shape, sx.shape, sy.shape, dx.shape, dy.shape)
    flat = [np.broadcast_to(v, shape).reshape(-1, 1, 1) for v in (ix, iy, sx, sy, dx, dy)]
    ix, iy, sx, sy, dx, dy = flat

    m = np.arange(1, config.rows + 1)
    planar = not (iy.any() or sy.any() or dy.any())
    n = np.ones(1) if planar else np.arange(1, config.cols + 1)
    x, y = _unit_offsets(m[:, None], n[None, :], config.d_x, config.d_y)
    units = x.size if planar else config.rows * config.cols

    def flat_phase(cx, cy):
        return np.broadcast_to(_phase(cx, cy, x, y, wavelength), (ix.shape[0],) + np.broadcast_shapes(x.shape, y.shape)).reshape(-1, units)

    phi_inc = flat_phase(ix + sx, iy + sy)
    phi_exc = flat_phase(-ix - dx, -iy - dy)
    levels = config.quantization_levels
    if levels is not None and best_reference:
        phi_exc = best_reference_excitation(phi_exc, flat_phase(ix + dx, iy + dy), levels)
    elif levels is not None:
        phi_exc = quantize_phase(phi_exc, levels)
    total = np.exp(1j * (phi_exc + phi_inc)).sum(axis=1)
    return (total / units).reshape(shape)


def beamforming_gain(config: PanelConfig, carrier: Carrier, link: LinkGeometry, beam: BeamSpec) -> complex:
    """Complex normalised gain beta of the panel for one link and beam direction."""
    beta = array_factor(config, carrier.wavelength, link.incident.cosines, link.scattered.cosines, beam.desired.cosines)
    return complex(beta)


def free_space_factor(config: PanelConfig, gains: AntennaGains, wavelength: float, d_1, d_2):
    """Everything in the panel link budget except patterns and |beta|^2."""
    mn = float(config.rows * config.cols)
    num = (
        config.gamma * gains.g_t * gains.g_r * config.gain * mn * mn
        * config.d_x * config.d_y * wavelength ** 2 * config.amplitude ** 2
    )
    d_1 = np.asarray(d_1, dtype=float)
    d_2 = np.asarray(d_2, dtype=float)
    return num / (64.0 * math.pi ** 3 * d_1 ** 2 * d_2 ** 2)


def path_gain(
    config: PanelConfig,
    gains: AntennaGains,
    carrier: Carrier,
    link: LinkGeometry,
    beam: BeamSpec,
) -> Optional[float]:
    """Received/transmitted power ratio of the panel-assisted link.

    Returns None when the link is unreachable: a blocked sub-link, or either
    end behind the aperture.
    """
    if not (link.bs_visible and link.user_visible):
        return None
    if link.incident.theta >= math.pi / 2 or link.scattered.theta >= math.pi / 2:
        return None
    f_i = incident_pattern(link.incident.theta)
    f_s = scattered_pattern(link.scattered.theta, config.alpha)
    beta = beamforming_gain(config, carrier, link, beam)
    base = float(free_space_factor(config, gains, carrier.wavelength, link.d_1, link.d_2))
    return base * f_i * f_s * abs(beta) ** 2


def attenuation_db(pl):
    """-10 log10 of a power ratio; +inf for zero."""
    pl = np.asarray(pl, dtype=float)
    with np.errstate(divide="ignore"):
        out = -10.0 * np.log10(pl)
    return float(out) if out.ndim == 0 else out


def expected_quantization_gain(levels: int) -> float:
    """Mean array gain when residual phase errors are uniform on [-pi/L, pi/L]."""
    half = math.pi / levels
    return math.sin(half) / half


def simulate_quantization_gain(levels: int, units: int = 256, trials: int = 10_000, seed: int = 0) -> float:
    """Monte Carlo mean of |mean(exp(j e))| with e ~ U[-pi/L, pi/L] per unit."""
    rng = np.random.default_rng(seed)
    half = math.pi / levels
    err = rng.uniform(-half, half, size=(trials, units))
    return float(np.abs(np.exp(1j * err).mean(axis=1)).mean())
