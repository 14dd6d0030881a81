"""
Tests for the closed-form evaluators.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from slitwave import analytic
from slitwave.analytic import SpaceSlitConfig, TimeSlitConfig, fold_phase
from slitwave.errors import BelowThresholdOrderError, DomainError, EvanescentOrderError, NoOscillationError
from slitwave.scenarios import shutter_first_maximum
from slitwave.units import Particle, derived_kinematics, from_internal
from tests.oracles import brute_force_shutter_maximum


@pytest.fixture
def slow_electron():
    return Particle.from_energy(0.3)


@pytest.fixture
def biprism_electron():
    return Particle.from_energy(50000.0)


# Configs


@pytest.mark.parametrize(
    "phi,expected",
    [(0.5, 0.5), (math.pi, math.pi), (-math.pi, math.pi), (3.0 * math.pi, math.pi), (2.0 * math.pi + 0.1, 0.1)],
)
def test_fold_phase(phi, expected):
    """Phases fold into (-pi, pi]."""
    assert fold_phase(phi) == pytest.approx(expected, abs=1e-12)


def test_config_validation():
    """Separations and delays must be positive and weights in [0, 1]."""
    with pytest.raises(ValidationError):
        SpaceSlitConfig(a=0.0)
    with pytest.raises(ValidationError):
        TimeSlitConfig(tau=-1.0)
    with pytest.raises(ValidationError):
        SpaceSlitConfig(a=100.0, alpha=1.5)
    assert SpaceSlitConfig(a=100.0, phi=3.0 * math.pi).phi == pytest.approx(math.pi)


# Space double slit


def test_space_momentum_density_extremes():
    """cos^2 momentum pattern: 1 at p = 0, 0 at p = pi hbar / a."""
    cfg = SpaceSlitConfig(a=100.0)
    p_zero = from_internal(math.pi / 100.0, "eV*fs/nm")
    values = analytic.space_slit_momentum_density(np.array([0.0, p_zero]), cfg)
    assert values[0] == pytest.approx(1.0, abs=1e-15)
    assert values[1] == pytest.approx(0.0, abs=1e-15)


def test_space_slit_maxima_angles(biprism_electron):
    """sin(theta_n) = (n + phi / 2pi) lambda_B / a; y_1 on a 1.5 m screen."""
    cfg = SpaceSlitConfig(a=1000.0)
    theta = analytic.space_slit_maxima_angles(1, cfg, biprism_electron)
    assert theta == pytest.approx(5.4847e-6, rel=1e-4)
    assert 1.5e9 * math.tan(theta) == pytest.approx(8227.0, rel=1e-3), "first secondary maximum in nm"
    assert analytic.space_slit_maxima_angles(0, cfg, biprism_electron) == 0.0


def test_space_slit_evanescent_order(slow_electron):
    """Orders with |sin(theta)| > 1 do not propagate."""
    cfg = SpaceSlitConfig(a=5.0)
    with pytest.raises(EvanescentOrderError):
        analytic.space_slit_maxima_angles(3, cfg, slow_electron)


def test_space_spacetime_density_maxima(biprism_electron):
    """The relative density is 1 on the maxima positions, and the envelope is t^-3."""
    cfg = SpaceSlitConfig(a=1000.0, phi=0.4)
    t = derived_kinematics(biprism_electron).arrival_time(1.5e9)
    y = analytic.space_slit_maxima_positions(np.arange(-3, 4), t, cfg, biprism_electron)
    density = analytic.space_slit_spacetime_density(y, t, cfg, biprism_electron)
    assert np.allclose(density.relative, 1.0, atol=1e-12)
    assert density.envelope == pytest.approx(t**-3.0)


def test_space_maxima_positions_match_small_angles(biprism_electron):
    """y_n = v0 t tan(theta_n) at small angles."""
    cfg = SpaceSlitConfig(a=1000.0)
    kin = derived_kinematics(biprism_electron)
    t = kin.arrival_time(1.5e9)
    y_1 = analytic.space_slit_maxima_positions(1, t, cfg, biprism_electron)
    assert y_1 == pytest.approx(kin.v0 * t * math.tan(analytic.space_slit_maxima_angles(1, cfg, biprism_electron)), rel=1e-6)


def test_space_slit_period_matches_maxima_times(slow_electron):
    """At fixed y the interval between successive maxima is Xi at their geometric mean."""
    cfg = SpaceSlitConfig(a=100.0)
    y = 500.0
    # maxima at a m y / t = 2 pi n
    k = float(analytic.space_slit_maxima_positions(1, 1.0, cfg, slow_electron))
    times = y / (k * np.array([5.0, 6.0]))
    mid = math.sqrt(times[0] * times[1])
    assert analytic.space_slit_period(y, mid, cfg, slow_electron) == pytest.approx(times[0] - times[1], rel=1e-12)


def test_space_slit_period_errors(slow_electron):
    """No oscillation on axis; t must be positive."""
    cfg = SpaceSlitConfig(a=100.0)
    with pytest.raises(NoOscillationError):
        analytic.space_slit_period(0.0, 100.0, cfg, slow_electron)
    with pytest.raises(DomainError):
        analytic.space_slit_period(10.0, 0.0, cfg, slow_electron)
    with pytest.raises(DomainError):
        analytic.space_slit_spacetime_density(10.0, -1.0, cfg, slow_electron)


# Shutter


def test_shutter_ratio_is_quarter_at_arrival(slow_electron):
    """C(0) = S(0) = 0 gives exactly 1/4 at t = T."""
    z = 100.0
    arrival = derived_kinematics(slow_electron).arrival_time(z)
    assert analytic.shutter_fresnel_argument(z, arrival, slow_electron) == pytest.approx(0.0, abs=1e-12)
    assert analytic.shutter_current_ratio(z, arrival, slow_electron) == pytest.approx(0.25, abs=1e-9)


def test_shutter_ratio_tends_to_one(slow_electron):
    """Far past the arrival the ratio approaches the stationary value."""
    z = 100.0
    t = 1e5
    assert analytic.shutter_fresnel_argument(z, t, slow_electron) >= 20.0
    assert analytic.shutter_current_ratio(z, t, slow_electron) == pytest.approx(1.0, abs=0.02)
    assert abs(analytic.shutter_wavefunction(z, t, slow_electron)) ** 2 == pytest.approx(1.0, abs=0.02)


def test_shutter_first_maximum_matches_brute_force():
    """The first post-arrival maximum is about 1.37."""
    u_max, ratio_max = shutter_first_maximum()
    u_ref, ratio_ref = brute_force_shutter_maximum()
    assert ratio_max == pytest.approx(1.3699, abs=1e-3)
    assert ratio_max == pytest.approx(ratio_ref, abs=1e-3)
    assert u_max == pytest.approx(u_ref, abs=1e-3)


def test_shutter_density_is_fresnel_ratio(slow_electron):
    """|psi|^2 of the erfc solution equals the Fresnel ratio at random (z, t)."""
    rng = np.random.Generator(np.random.Philox(21))
    z = rng.uniform(10.0, 2000.0, 100)
    t = rng.uniform(5.0, 20000.0, 100)
    density = np.abs(analytic.shutter_wavefunction(z, t, slow_electron)) ** 2
    ratio = analytic.shutter_current_ratio(z, t, slow_electron)
    assert np.max(np.abs(density - ratio)) <= 1e-9


def test_shutter_flux_ratio_close_to_fresnel_form(slow_electron):
    """The exact current ratio differs from the Fresnel form by O((hbar/E0 t)^1/2)."""
    z = 1000.0
    arrival = derived_kinematics(slow_electron).arrival_time(z)
    t = np.linspace(arrival, 2.0 * arrival, 101)
    difference = analytic.shutter_flux_ratio(z, t, slow_electron) - analytic.shutter_current_ratio(z, t, slow_electron)
    assert np.max(np.abs(difference)) <= 0.02


def test_shutter_wavefunction_scalar_and_array(slow_electron):
    """Scalar arguments give a complex scalar; arrays broadcast."""
    assert isinstance(analytic.shutter_wavefunction(100.0, 500.0, slow_electron), complex)
    values = analytic.shutter_wavefunction(100.0, np.array([200.0, 400.0, 800.0]), slow_electron)
    assert values.shape == (3,)
    with pytest.raises(DomainError):
        analytic.shutter_wavefunction(100.0, 0.0, slow_electron)


# Time double slit


def test_time_momentum_density_peaks(slow_electron):
    """The spectral density is 1 on the peak momenta."""
    cfg = TimeSlitConfig(tau=120.0, phi=0.3)
    p_n = analytic.time_slit_peak_momenta(np.arange(-3, 4), cfg, slow_electron)
    assert np.allclose(analytic.time_slit_momentum_density(p_n, cfg, slow_electron), 1.0, atol=1e-12)


@pytest.mark.parametrize("tau,expected", [(2.0, 2.0678), (96.0, 0.043080)])
def test_energy_peak_spacing(tau, expected):
    """delta E = h / tau."""
    assert analytic.energy_peak_spacing(TimeSlitConfig(tau=tau)) == pytest.approx(expected, rel=1e-4)


def test_energy_peak_spacing_against_quoted_values():
    """About 2 eV at tau = 2 fs and 43 meV at tau = 96 fs."""
    assert analytic.energy_peak_spacing(TimeSlitConfig(tau=2.0)) == pytest.approx(2.0, rel=0.05)
    assert analytic.energy_peak_spacing(TimeSlitConfig(tau=96.0)) == pytest.approx(0.043, rel=0.02)


def test_time_slit_peak_energies():
    """E_0 = E0, and exact spacings are at least h / tau."""
    particle = Particle.from_energy(20.0)
    cfg = TimeSlitConfig(tau=2.0)
    assert analytic.time_slit_peak_energies(0, cfg, particle) == pytest.approx(20.0, rel=1e-12)
    e_1 = analytic.time_slit_peak_energies(1, cfg, particle)
    assert e_1 == pytest.approx(22.1213, rel=1e-4)
    assert e_1 - 20.0 >= analytic.energy_peak_spacing(cfg)


def test_time_slit_below_threshold_order(slow_electron):
    """Orders with p_n <= 0 do not exist."""
    cfg = TimeSlitConfig(tau=120.0)
    with pytest.raises(BelowThresholdOrderError):
        analytic.time_slit_peak_energies(-18, cfg, slow_electron)
    analytic.time_slit_peak_energies(-17, cfg, slow_electron)


def test_time_slit_period_at_arrival(slow_electron):
    """E0 = 0.3 eV, tau = 120 fs, T = 5000 fs gives Xi of about 287 fs."""
    cfg = TimeSlitConfig(tau=120.0)
    z = derived_kinematics(slow_electron).v0 * 5000.0
    assert analytic.time_slit_period(z, 5000.0, cfg, slow_electron) == pytest.approx(287.2, rel=1e-3)


def test_time_slit_period_errors(slow_electron):
    """No oscillation at the origin; t must be positive."""
    cfg = TimeSlitConfig(tau=120.0)
    with pytest.raises(NoOscillationError):
        analytic.time_slit_period(0.0, 5000.0, cfg, slow_electron)
    with pytest.raises(DomainError):
        analytic.time_slit_period(1626.0, -5.0, cfg, slow_electron)


def test_time_slit_maxima_positions(slow_electron):
    """The zeroth maximum rides on the classical wavefront; every maximum has density 1."""
    cfg = TimeSlitConfig(tau=120.0, phi=-0.8)
    t = 5000.0
    z = analytic.time_slit_maxima_positions(np.arange(-2, 3), t, cfg, slow_electron)
    density = analytic.time_slit_spacetime_density(z, t, cfg, slow_electron)
    assert np.allclose(density.relative, 1.0, atol=1e-10)
    no_phase = analytic.time_slit_maxima_positions(0, t, TimeSlitConfig(tau=120.0), slow_electron)
    assert no_phase == pytest.approx(analytic.classical_displacement(t, slow_electron), rel=1e-12)


@pytest.mark.parametrize("t,quoted", [(350.0, 113.0), (900.0, 293.0), (5000.0, 1626.0)])
def test_classical_displacement(slow_electron, t, quoted):
    """Wavefront displacement z = v0 t for E0 = 0.3 eV."""
    assert analytic.classical_displacement(t, slow_electron) == pytest.approx(quoted, rel=0.01)


def test_classical_displacement_rejects_negative_time(slow_electron):
    with pytest.raises(DomainError):
        analytic.classical_displacement(-1.0, slow_electron)


# Complementarity


def test_fringe_visibility_endpoints():
    """V(1/2) = 1 and V(0) = V(1) = 0 exactly."""
    assert analytic.fringe_visibility(0.5) == 1.0
    assert analytic.fringe_visibility(0.0) == 0.0
    assert analytic.fringe_visibility(1.0) == 0.0


@pytest.mark.parametrize("alpha", [0.1, 0.2, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9])
def test_weighted_density_visibility(alpha):
    """Max and min of the weighted pattern reproduce V(alpha)."""
    cfg = SpaceSlitConfig(a=100.0, alpha=alpha)
    p = np.array([0.0, from_internal(math.pi / 100.0, "eV*fs/nm")])
    top, bottom = analytic.weighted_slit_momentum_density(p, cfg)
    assert (top - bottom) / (top + bottom) == pytest.approx(analytic.fringe_visibility(alpha), abs=1e-9)


def test_single_slit_is_flat():
    """alpha = 0 or 1 leaves no interference."""
    p = np.linspace(-1.0, 1.0, 501)
    for alpha in (0.0, 1.0):
        values = analytic.weighted_slit_momentum_density(p, SpaceSlitConfig(a=100.0, alpha=alpha))
        assert np.ptp(values) <= 1e-12, f"alpha = {alpha} should be flat"


@pytest.mark.parametrize("alpha", [0.0, 1.0])
def test_single_slit_spacetime_densities_are_flat(slow_electron, alpha):
    """One open slit gives a constant oscillatory factor in space and in time."""
    y = np.linspace(-50.0, 50.0, 201)[:, None]
    z = np.linspace(0.0, 650.0, 201)[:, None]
    t = np.linspace(100.0, 2000.0, 41)[None, :]
    space = analytic.space_slit_spacetime_density(y, t, SpaceSlitConfig(a=100.0, phi=0.7, alpha=alpha), slow_electron)
    time = analytic.time_slit_spacetime_density(z, t, TimeSlitConfig(tau=10.0, phi=0.7, alpha=alpha), slow_electron)
    assert np.ptp(space.relative) <= 1e-12
    assert np.ptp(time.relative) <= 1e-12
    assert np.allclose(space.relative, 1.0) and np.allclose(time.relative, 1.0)


def test_fringe_visibility_rises_and_is_symmetric():
    """V grows strictly on [0, 1/2] and V(alpha) = V(1 - alpha)."""
    alphas = np.linspace(0.0, 0.5, 501)
    rising = np.array([analytic.fringe_visibility(float(a)) for a in alphas])
    assert np.all(np.diff(rising) > 0)
    mirrored = np.array([analytic.fringe_visibility(float(1.0 - a)) for a in alphas])
    assert np.allclose(mirrored, rising, rtol=0.0, atol=1e-12)


# Phase covariance


def _shifted(cfg):
    # model_copy skips the folding validator, so the formulas see phi + 2 pi
    return cfg.model_copy(update={"phi": cfg.phi + 2.0 * math.pi})


def test_space_densities_invariant_under_full_turn(slow_electron):
    cfg = SpaceSlitConfig(a=100.0, phi=0.7, alpha=0.35)
    p = np.linspace(-1.0, 1.0, 401)
    base = analytic.weighted_slit_momentum_density(p, cfg)
    assert np.allclose(analytic.weighted_slit_momentum_density(p, _shifted(cfg)), base, rtol=0.0, atol=1e-12)
    y = np.linspace(-50.0, 50.0, 201)[:, None]
    t = np.linspace(100.0, 2000.0, 41)[None, :]
    before = analytic.space_slit_spacetime_density(y, t, cfg, slow_electron).relative
    after = analytic.space_slit_spacetime_density(y, t, _shifted(cfg), slow_electron).relative
    assert np.allclose(after, before, rtol=0.0, atol=1e-12)


def test_time_densities_invariant_under_full_turn(slow_electron):
    cfg = TimeSlitConfig(tau=10.0, phi=0.7, alpha=0.35)
    p0 = slow_electron.p0_internal
    p = from_internal(np.linspace(0.5 * p0, 1.5 * p0, 401), "eV*fs/nm")
    base = analytic.time_slit_momentum_density(p, cfg, slow_electron)
    shifted = analytic.time_slit_momentum_density(p, _shifted(cfg), slow_electron)
    assert np.allclose(shifted, base, rtol=0.0, atol=1e-12)
    z = np.linspace(0.0, 650.0, 201)[:, None]
    t = np.linspace(100.0, 2000.0, 41)[None, :]
    before = analytic.time_slit_spacetime_density(z, t, cfg, slow_electron).relative
    after = analytic.time_slit_spacetime_density(z, t, _shifted(cfg), slow_electron).relative
    assert np.allclose(after, before, rtol=0.0, atol=1e-12)


def test_validated_phase_is_folded():
    """Configs built with phi + 2 pi give the same densities as phi."""
    p = np.linspace(-1.0, 1.0, 101)
    plain = SpaceSlitConfig(a=100.0, phi=0.7)
    turned = SpaceSlitConfig(a=100.0, phi=0.7 + 2.0 * math.pi)
    assert turned.phi == pytest.approx(0.7, abs=1e-12)
    assert np.allclose(
        analytic.weighted_slit_momentum_density(p, turned),
        analytic.weighted_slit_momentum_density(p, plain),
        rtol=0.0,
        atol=1e-12,
    )


def test_fringe_visibility_domain():
    with pytest.raises(DomainError):
        analytic.fringe_visibility(1.2)
