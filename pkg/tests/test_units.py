"""
Tests for unit conversion, quantity parsing and particle kinematics.
"""

import math

import pytest
from scipy import constants

from slitwave.errors import DimensionError, ZeroMomentumError
from slitwave.units import (
    ELECTRON_MASS_EV,
    HBAR_EV_FS,
    SPEED_OF_LIGHT_NM_PER_FS,
    UNITS,
    Dimension,
    Particle,
    constants_table,
    convert,
    derived_kinematics,
    from_internal,
    parse_quantity,
    to_internal,
)


def test_pinned_constants_match_codata():
    """The pinned constants agree with scipy.constants."""
    hbar_ev_fs = constants.hbar / constants.e * 1e15
    mass_ev = constants.physical_constants["electron mass energy equivalent in MeV"][0] * 1e6
    assert HBAR_EV_FS == pytest.approx(hbar_ev_fs, rel=1e-9), "hbar should match CODATA"
    assert SPEED_OF_LIGHT_NM_PER_FS == pytest.approx(constants.c * 1e9 / 1e15, rel=1e-12), "c should match"
    assert ELECTRON_MASS_EV == pytest.approx(mass_ev, rel=1e-9), "electron rest energy should match"


def test_internal_units():
    """Internal energy and time units follow from hbar = m_e = 1 nm = 1."""
    assert UNITS.energy_ev == pytest.approx(0.0762, rel=1e-3)
    assert UNITS.time_fs == pytest.approx(8.638, rel=1e-3)
    assert to_internal(UNITS.time_fs, "fs") == pytest.approx(1.0, rel=1e-14)
    assert from_internal(1.0, "eV") == pytest.approx(UNITS.energy_ev, rel=1e-14)


def test_convert_between_units():
    """Conversions within a dimension scale by the unit ratio."""
    assert convert(1.0, "um", "nm") == pytest.approx(1000.0)
    assert convert(96.0, "fs", "ps") == pytest.approx(0.096)
    assert convert(43.0, "meV", "eV") == pytest.approx(0.043)


def test_convert_rejects_dimension_mismatch():
    """Converting a time to a length is an error."""
    with pytest.raises(DimensionError):
        convert(1.0, "fs", "nm")


@pytest.mark.parametrize(
    "text,dimension,expected",
    [
        ("0.3eV", Dimension.ENERGY, (0.3, "eV")),
        ("120fs", Dimension.TIME, (120.0, "fs")),
        ("1626 nm", Dimension.LENGTH, (1626.0, "nm")),
        ("1.5e9nm", Dimension.LENGTH, (1.5e9, "nm")),
        ("0.5", Dimension.DIMENSIONLESS, (0.5, "1")),
    ],
)
def test_parse_quantity(text, dimension, expected):
    """Suffixed quantities parse into value and unit."""
    assert parse_quantity(text, dimension) == expected


def test_parse_quantity_rejects_bare_numbers():
    """A dimensional quantity without a unit suffix is rejected."""
    with pytest.raises(DimensionError) as exc_info:
        parse_quantity("96", Dimension.TIME)
    assert "120fs" in str(exc_info.value), "Error should suggest a suffixed example"


def test_parse_quantity_rejects_wrong_dimension_and_unknown_units():
    """Mismatched or unknown units are rejected with the available units listed."""
    with pytest.raises(DimensionError):
        parse_quantity("5nm", Dimension.TIME)
    with pytest.raises(DimensionError) as exc_info:
        parse_quantity("5furlong")
    assert "Available units" in str(exc_info.value)


def test_particle_from_energy_round_trip():
    """A particle built from E0 reports the same E0."""
    particle = Particle.from_energy(0.3)
    assert particle.energy == pytest.approx(0.3, rel=1e-12)
    assert particle.mass == ELECTRON_MASS_EV


def test_particle_rejects_negative_energy():
    """Kinetic energies below zero are invalid."""
    with pytest.raises(ValueError):
        Particle.from_energy(-1.0)


def test_derived_kinematics_slow_electron():
    """0.3 eV electron: v0 and the de Broglie wavelength."""
    kin = derived_kinematics(Particle.from_energy(0.3))
    assert kin.v0 == pytest.approx(0.324852, rel=1e-5), "v0 in nm/fs"
    assert kin.lambda_b == pytest.approx(2.23914, rel=1e-4), "lambda_B in nm"
    assert kin.arrival_time(1626.0) == pytest.approx(1626.0 / kin.v0)


def test_derived_kinematics_biprism_electron():
    """50 keV electron (non-relativistic): v0 and lambda_B."""
    kin = derived_kinematics(Particle.from_energy(50000.0))
    assert kin.v0 == pytest.approx(132.62, rel=1e-4)
    assert kin.lambda_b == pytest.approx(5.4847e-3, rel=1e-4)
    assert kin.arrival_time(1.5e9) == pytest.approx(1.1311e7, rel=1e-4)


def test_derived_kinematics_zero_momentum():
    """A particle at rest has no wavelength or arrival time."""
    with pytest.raises(ZeroMomentumError):
        derived_kinematics(Particle.from_energy(0.0))


def test_wavelength_is_planck_over_momentum():
    """lambda_B = h / p0."""
    particle = Particle.from_energy(20.0)
    kin = derived_kinematics(particle)
    assert kin.lambda_b == pytest.approx(2.0 * math.pi * HBAR_EV_FS / particle.p0, rel=1e-12)


def test_constants_table_contents():
    """The provenance table carries values with units."""
    table = constants_table()
    assert table["hbar"] == {"value": HBAR_EV_FS, "unit": "eV*fs"}
    assert {"h", "c", "electron_mass", "internal_energy_unit", "internal_time_unit"} <= set(table)
