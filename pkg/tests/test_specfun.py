"""
Tests for the Faddeeva function, the complex erfc and the Fresnel integrals.
"""

import math

import numpy as np
import pytest
from scipy import special

from slitwave.errors import SpecialFunctionDomainError
from slitwave.specfun import erfc_complex, exp_y2_erfc, faddeeva, fresnel
from tests.oracles import erfc_reference, quadrature_fresnel, weideman_faddeeva


@pytest.fixture
def disk_points():
    """10^4 seeded points with |z| <= 6."""
    rng = np.random.Generator(np.random.Philox(7))
    radius = 6.0 * np.sqrt(rng.random(10_000))
    angle = rng.uniform(-math.pi, math.pi, 10_000)
    return radius * np.exp(1j * angle)


def test_faddeeva_matches_rational_approximation(disk_points):
    """w(z) agrees with the Weideman approximation in the upper half plane."""
    upper = disk_points[disk_points.imag >= 0]
    error = np.abs(faddeeva(upper) - weideman_faddeeva(upper))
    assert np.max(error) <= 1e-12, f"max |w - w_ref| = {np.max(error):.3g}"


def test_erfc_complex_matches_reference(disk_points):
    """erfc(z) agrees with the reference on the whole disk, relative to max(1, |erfc|)."""
    reference = erfc_reference(disk_points)
    error = np.abs(erfc_complex(disk_points) - reference) / np.maximum(1.0, np.abs(reference))
    assert np.max(error) <= 1e-12, f"max scaled error = {np.max(error):.3g}"


def test_erfc_complex_on_real_axis():
    """On the real axis the complex erfc reduces to the real one."""
    x = np.linspace(-5.0, 5.0, 101)
    assert np.allclose(erfc_complex(x).real, special.erfc(x), rtol=1e-12, atol=0.0)
    assert np.max(np.abs(erfc_complex(x).imag)) <= 1e-15


def test_faddeeva_reference_values():
    """w(i) = e erfc(1)."""
    assert faddeeva(1j) == pytest.approx(0.42758357615580700, abs=1e-14)
    assert faddeeva(0.0) == pytest.approx(1.0)


def test_exp_y2_erfc_large_argument():
    """exp(100) erfc(10) without overflow."""
    assert exp_y2_erfc(10.0) == pytest.approx(0.05614099274382259, rel=1e-12)
    # far along the shutter ray, where exp(z^2) alone would overflow
    z = 40.0 * np.exp(-0.25j * math.pi) * -1.0
    assert np.isfinite(exp_y2_erfc(z))


def test_scalar_in_scalar_out():
    """Scalars give Python scalars, arrays give arrays."""
    assert isinstance(faddeeva(0.5 + 0.5j), complex)
    assert isinstance(erfc_complex(0.5), complex)
    c, s = fresnel(1.0)
    assert isinstance(c, float) and isinstance(s, float)
    assert faddeeva(np.array([0.1, 0.2])).shape == (2,)


@pytest.mark.parametrize("u", [-4.3, -1.0, 0.0, 0.5, 1.0, 2.5, 5.0])
def test_fresnel_matches_quadrature(u):
    """C(u), S(u) agree with adaptive quadrature."""
    c, s = fresnel(u)
    c_ref, s_ref = quadrature_fresnel(u)
    assert abs(c - c_ref) <= 1e-10, f"C({u})"
    assert abs(s - s_ref) <= 1e-10, f"S({u})"


def test_fresnel_order_and_limits():
    """fresnel returns (C, S); both tend to 1/2."""
    c, s = fresnel(1.0)
    assert c == pytest.approx(0.7798934003768228, abs=1e-12)
    assert s == pytest.approx(0.4382591473903548, abs=1e-12)
    c, s = fresnel(1e4)
    assert c == pytest.approx(0.5, abs=1e-4)
    assert s == pytest.approx(0.5, abs=1e-4)


@pytest.mark.parametrize("bad", [float("nan"), float("inf"), complex(1.0, float("nan"))])
def test_non_finite_arguments_rejected(bad):
    """NaN and infinite arguments raise the domain error."""
    with pytest.raises(SpecialFunctionDomainError):
        faddeeva(bad)


def test_fresnel_rejects_complex():
    """Fresnel integrals are evaluated for real arguments only."""
    with pytest.raises(SpecialFunctionDomainError):
        fresnel(1.0 + 1.0j)


def test_conjugate_symmetries(disk_points):
    """w(-conj z) = conj w(z) and erfc(conj z) = conj erfc(z)."""
    w = faddeeva(disk_points)
    mirrored = faddeeva(-np.conj(disk_points))
    error = np.abs(mirrored - np.conj(w)) / np.maximum(1.0, np.abs(w))
    assert np.max(error) <= 1e-13, f"w symmetry error = {np.max(error):.3g}"
    e = erfc_complex(disk_points)
    error = np.abs(erfc_complex(np.conj(disk_points)) - np.conj(e)) / np.maximum(1.0, np.abs(e))
    assert np.max(error) <= 1e-13, f"erfc symmetry error = {np.max(error):.3g}"


def test_fresnel_integrals_are_odd():
    u = np.random.Generator(np.random.Philox(3)).uniform(-20.0, 20.0, 500)
    c, s = fresnel(u)
    c_neg, s_neg = fresnel(-u)
    assert np.array_equal(c_neg, -c)
    assert np.array_equal(s_neg, -s)


def test_scaled_erfc_matches_fresnel_form():
    """Along Y = -exp(-i pi/4) sqrt(pi/2) u the shutter amplitude has the Fresnel modulus."""
    u = np.random.Generator(np.random.Philox(5)).uniform(-10.0, 10.0, 100)
    y0 = -np.exp(-0.25j * math.pi) * math.sqrt(0.5 * math.pi) * u
    amplitude = np.abs(0.5 * exp_y2_erfc(y0))
    c, s = fresnel(u)
    fresnel_form = np.sqrt(0.5 * ((0.5 + c) ** 2 + (0.5 + s) ** 2))
    assert np.max(np.abs(amplitude - fresnel_form)) <= 1e-9
