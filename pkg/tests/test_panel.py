import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from risesim import panel as p
from risesim.geometry import LinkGeometry, LocalAngles
from risesim.panel import ES, SS_I, SS_II, AntennaGains, BeamSpec, Carrier, PanelConfig

LAM = oracles.wavelength()
CARRIER = Carrier()
UNIT = AntennaGains()


def _link(ti=0.0, ts=0.0, d1=30.0, d2=30.0, **kw):
    return LinkGeometry(d1, d2, LocalAngles.from_signed(ti), LocalAngles.from_signed(ts), **kw)


def _beam(td):
    return BeamSpec(LocalAngles.from_signed(td))


def test_config_validation():
    for bad in (dict(gamma=1.5), dict(gamma=0.0), dict(amplitude=1.2), dict(gain=0.5), dict(alpha=-1.0),
                dict(quantization_levels=0), dict(d_x=0.0), dict(rows=0)):
        with pytest.raises(ValueError):
            PanelConfig(**{"rows": 4, "cols": 4, **bad})
    PanelConfig(4, 4, quantization_levels=None)


def test_table_presets():
    assert (SS_I.rows, SS_I.cols, SS_I.gamma) == (16, 16, 1.0)
    assert (SS_II.rows, SS_II.cols, SS_II.gamma) == (32, 32, 1.0)
    assert (ES.rows, ES.cols, ES.gamma) == (16, 16, 0.5)
    for c in (SS_I, SS_II, ES):
        assert (c.d_x, c.d_y, c.quantization_levels, c.alpha) == (0.01, 0.01, 4, 3.0)


def test_carrier():
    assert CARRIER.wavelength == pytest.approx(0.0545077, abs=1e-7)
    with pytest.raises(ValueError):
        Carrier(0.0)


def test_antenna_gains():
    g = AntennaGains.from_dbi(10, 3)
    assert g.g_t == pytest.approx(10.0) and g.g_r == pytest.approx(1.99526, rel=1e-5)
    with pytest.raises(ValueError):
        AntennaGains(-1, 1)


def test_pattern_examples():
    assert p.incident_pattern(0.0) == 1.0
    assert p.incident_pattern(math.pi / 3) == pytest.approx(0.25)
    assert p.incident_pattern(math.pi / 2 + 0.1) == 0.0
    assert p.scattered_pattern(0.0, 3) == 1.0
    assert p.scattered_pattern(math.pi / 3, 3) == pytest.approx(0.125)
    assert p.scattered_pattern(math.pi / 2, 3) == 0.0
    with pytest.raises(ValueError):
        p.scattered_pattern(0.1, -1)


def test_patterns_bounded_and_monotone():
    th = np.linspace(0, math.pi, 721)
    for f in (p.incident_pattern(th), p.scattered_pattern(th, 3.0), p.scattered_pattern(th, 0.7)):
        assert np.all((f >= 0) & (f <= 1))
        assert np.all(np.diff(f) <= 1e-15)


def test_phase_examples():
    link = _link(0.0, math.pi / 6)
    assert p.unit_incident_phase(1, 1, link, CARRIER, 0.01, 0.01) == pytest.approx(0.28817, abs=1e-5)
    exc = p.unit_excitation_phase(1, 1, LocalAngles(0.0), _beam(math.pi / 6), CARRIER, 0.01, 0.01)
    assert exc == pytest.approx(5.99501, abs=1e-5)
    assert p.unit_incident_phase(3, 7, _link(), CARRIER, 0.01, 0.01) == 0.0
    assert p.unit_excitation_phase(3, 7, LocalAngles(0.0), _beam(0.0), CARRIER, 0.01, 0.01) == 0.0


angle = st.floats(-1.5, 1.5)


@given(angle, angle, st.integers(1, 32), st.integers(1, 32))
def test_phases_match_oracle_and_cancel(ti, ts, m, n):
    link = _link(ti, ts)
    inc = p.unit_incident_phase(m, n, link, CARRIER, 0.01, 0.02)
    want = oracles.incident_phase(m, n, LAM, 0.01, 0.02, abs(ti), 0 if ti >= 0 else math.pi, abs(ts), 0 if ts >= 0 else math.pi)
    assert oracles.circ_dist(inc, want) < 1e-9
    exc = p.unit_excitation_phase(m, n, link.incident, BeamSpec(link.scattered), CARRIER, 0.01, 0.02)
    assert 0 <= inc < 2 * math.pi and 0 <= exc < 2 * math.pi
    assert oracles.circ_dist(inc + exc, 0.0) < 1e-9
    # no dependence on the vertical index in the horizontal plane
    assert p.unit_incident_phase(m, 1, link, CARRIER, 0.01, 0.02) == inc


def test_quantize_examples():
    assert p.quantize_phase(0.3, 4) == 0.0
    assert p.quantize_phase(0.8, 4) == pytest.approx(math.pi / 2)
    assert p.quantize_phase(6.0, 4) == 0.0
    # ties go to the lower state, the wrap tie to state 0
    assert p.quantize_phase(math.pi / 4, 4) == 0.0
    assert p.quantize_phase(3 * math.pi / 4, 4) == pytest.approx(math.pi / 2)
    assert p.quantize_phase(7 * math.pi / 4, 4) == 0.0
    assert p.quantize_phase(2.0, 1) == 0.0
    with pytest.raises(ValueError):
        p.quantize_phase(0.1, 0)


@given(st.floats(-20, 20), st.integers(1, 9))
def test_quantize_matches_exhaustive(phase, L):
    got = p.quantize_phase(phase, L)
    want = oracles.quantize(phase, L)
    assert oracles.circ_dist(phase, got) <= oracles.circ_dist(phase, want) + 1e-12
    assert min(abs(got - 2 * math.pi * k / L) for k in range(L)) < 1e-12


def test_beta_aligned_is_one():
    beta = p.beamforming_gain(PanelConfig(16, 16, quantization_levels=None), CARRIER, _link(0.3, -0.7), _beam(-0.7))
    assert abs(beta - 1) < 1e-12


def test_beta_cancels_for_opposite_halves():
    # two units whose total phases differ by exactly pi
    cfg = PanelConfig(2, 1, d_x=LAM / 2, quantization_levels=None)
    beta = p.beamforming_gain(cfg, CARRIER, _link(0.0, math.pi / 2), _beam(0.0))
    assert abs(beta) < 1e-12


@settings(max_examples=60, deadline=None)
@given(angle, angle, angle, st.integers(1, 6), st.integers(1, 5), st.sampled_from([None, 2, 4]))
def test_beta_matches_brute_force(ti, ts, td, M, N, L):
    cfg = PanelConfig(M, N, d_x=0.013, d_y=0.01, quantization_levels=L)
    got = p.beamforming_gain(cfg, CARRIER, _link(ti, ts), _beam(td))
    sgn = lambda a: 0.0 if a >= 0 else math.pi  # noqa: E731
    want = oracles.beta(M, N, LAM, 0.013, 0.01, abs(ti), sgn(ti), abs(ts), sgn(ts), abs(td), sgn(td), L)
    assert abs(got - want) < 1e-12
    assert abs(got) <= 1 + 1e-12


def test_array_factor_full_grid_matches_brute_force():
    # a non-zero vertical cosine takes the two-axis path
    cfg = PanelConfig(3, 4, d_x=0.01, d_y=0.015, quantization_levels=4)
    ti, pi_, ts, ps, td, pd = 0.4, 0.0, 0.9, 0.0, 0.2, math.pi
    inc = (math.sin(ti) * math.cos(pi_), 0.1)
    sc = (math.sin(ts) * math.cos(ps), -0.2)
    de = (math.sin(td) * math.cos(pd), 0.05)
    got = complex(p.array_factor(cfg, LAM, inc, sc, de))
    k = 2 * math.pi / LAM
    total = 0j
    for n in range(1, 5):
        for m in range(1, 4):
            x, y = (m - 0.5) * 0.01, (n - 0.5) * 0.015
            phi_i = (k * ((inc[0] + sc[0]) * x + (inc[1] + sc[1]) * y)) % (2 * math.pi)
            exc = oracles.quantize((k * ((-inc[0] - de[0]) * x + (-inc[1] - de[1]) * y)) % (2 * math.pi), 4)
            total += complex(math.cos(exc + phi_i), math.sin(exc + phi_i))
    assert abs(got - total / 12) < 1e-12


def test_quantized_aligned_beta_floor():
    ts = np.radians(np.linspace(0, 90, 181, endpoint=False))
    for cfg in (SS_I, SS_II, ES):
        for best in (False, True):
            beta = p.array_factor(cfg, LAM, (math.sin(0.2), 0.0), (np.sin(ts), 0.0), (np.sin(ts), 0.0), best)
            assert np.all(np.abs(beta) >= math.cos(math.pi / 4) - 1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 2 * math.pi), min_size=1, max_size=9), st.sampled_from([2, 3, 4]))
def test_best_reference_is_optimal(aim, L):
    aim_arr = np.array([aim])
    exc = np.mod(-aim_arr, 2 * math.pi)
    chosen = p.best_reference_excitation(exc, aim_arr, L)
    got = abs(np.exp(1j * (chosen + aim_arr)).sum())
    assert got == pytest.approx(oracles.best_quantized_sum(aim, L), abs=1e-12)
    literal = abs(np.exp(1j * (p.quantize_phase(exc, L) + aim_arr)).sum())
    assert got >= literal - 1e-12
    steps = chosen / (2 * math.pi / L)
    assert np.allclose(steps, np.round(steps)) and np.all((chosen >= 0) & (chosen < 2 * math.pi))


def test_best_reference_leaves_continuous_alone():
    cfg = PanelConfig(16, 16, quantization_levels=None)
    a = p.array_factor(cfg, LAM, (0.3, 0.0), (0.5, 0.0), (-0.2, 0.0), True)
    b = p.array_factor(cfg, LAM, (0.3, 0.0), (0.5, 0.0), (-0.2, 0.0), False)
    assert a == b


def test_path_gain_spot_value():
    cfg = PanelConfig(16, 16, quantization_levels=None)
    pl = p.path_gain(cfg, UNIT, CARRIER, _link(), _beam(0.0))
    want = oracles.panel_power_ratio(16, 16, 0.01, 0.01, LAM, 30, 30)
    assert pl == pytest.approx(want, rel=1e-12)
    assert pl == pytest.approx(1.213e-11, rel=1e-3)
    assert p.attenuation_db(pl) == pytest.approx(109.17, abs=0.01)


def test_path_gain_full_formula():
    cfg = PanelConfig(8, 12, d_x=0.012, d_y=0.009, gamma=0.7, amplitude=0.9, gain=2.0, alpha=2.5, quantization_levels=None)
    gains = AntennaGains(3.0, 1.5)
    pl = p.path_gain(cfg, gains, CARRIER, _link(0.4, -0.6, 17.0, 23.0), _beam(-0.6))
    want = oracles.panel_power_ratio(
        8, 12, 0.012, 0.009, LAM, 17.0, 23.0, gamma=0.7, gt=3.0, gr=1.5, G=2.0, A=0.9,
        fi=math.cos(0.4) ** 2, fs=math.cos(0.6) ** 2.5,
    )
    assert pl == pytest.approx(want, rel=1e-12)


def test_gamma_half_costs_3db():
    a = p.path_gain(PanelConfig(16, 16, gamma=1.0), UNIT, CARRIER, _link(0.2, 0.5), _beam(0.5))
    b = p.path_gain(PanelConfig(16, 16, gamma=0.5), UNIT, CARRIER, _link(0.2, 0.5), _beam(0.5))
    assert p.attenuation_db(b) - p.attenuation_db(a) == pytest.approx(10 * math.log10(2), abs=1e-9)


@pytest.mark.parametrize("k", [2, 5, 10])
def test_distance_law(k):
    base = p.path_gain(SS_I, UNIT, CARRIER, _link(0.3, 0.4, 12.0, 7.0), _beam(0.1))
    far = p.path_gain(SS_I, UNIT, CARRIER, _link(0.3, 0.4, 12.0 * k, 7.0 * k), _beam(0.1))
    assert abs(far / base * k ** 4 - 1) < 1e-9


def test_aperture_law():
    small = p.path_gain(PanelConfig(16, 16, quantization_levels=None), UNIT, CARRIER, _link(0.3, 0.4), _beam(0.4))
    big = p.path_gain(PanelConfig(32, 32, quantization_levels=None), UNIT, CARRIER, _link(0.3, 0.4), _beam(0.4))
    assert abs(big / small / 16 - 1) < 1e-12


def test_unreachable_links():
    assert p.path_gain(SS_I, UNIT, CARRIER, _link(bs_visible=False), _beam(0.0)) is None
    assert p.path_gain(SS_I, UNIT, CARRIER, _link(user_visible=False), _beam(0.0)) is None
    assert p.path_gain(SS_I, UNIT, CARRIER, _link(0.0, math.pi / 2), _beam(0.0)) is None
    with pytest.raises(ValueError):
        _link(d1=0.0)
    assert p.attenuation_db(0.0) == math.inf


def test_quantization_monte_carlo():
    assert p.expected_quantization_gain(4) == pytest.approx(0.9003163, abs=1e-7)
    assert abs(p.simulate_quantization_gain(4) - p.expected_quantization_gain(4)) < 0.01
