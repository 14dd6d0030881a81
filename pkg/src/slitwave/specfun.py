"""
Special functions for the closed-form solutions.

The Faddeeva function w(z) = exp(-z^2) erfc(-iz) is the numerically stable
kernel: the shutter solution needs exp(Y0^2) erfc(Y0) along a ray where
Re(Y0^2) is unbounded, which is exactly w(i Y0). scipy's ``wofz`` switches
between series, continued-fraction and asymptotic regions internally.

All functions accept scalars or arrays; a scalar argument gives a scalar.
"""

from typing import Any, Tuple, Union

import numpy as np
from scipy import special

from .errors import SpecialFunctionDomainError

ComplexLike = Union[complex, float, np.ndarray]


def _checked(z: Any, name: str) -> np.ndarray:
    values = np.asarray(z)
    if not np.all(np.isfinite(values)):
        raise SpecialFunctionDomainError(f"{name}: argument must be finite, got {z!r}")
    return values


def _unwrap(result: np.ndarray) -> Any:
    # scalar in, scalar out
    if result.ndim == 0:
        return result.item()
    return result


def faddeeva(z: ComplexLike) -> Any:
    """w(z) = exp(-z^2) erfc(-iz).

    Raises:
        SpecialFunctionDomainError: If any component of ``z`` is NaN or infinite
    """
    values = _checked(z, "faddeeva")
    return _unwrap(special.wofz(values.astype(np.complex128)))


def exp_y2_erfc(z: ComplexLike) -> Any:
    """The scaled product exp(z^2) erfc(z), computed as w(iz) without overflow."""
    values = _checked(z, "exp_y2_erfc")
    return _unwrap(special.wofz(1j * values.astype(np.complex128)))


def erfc_complex(z: ComplexLike) -> Any:
    """Complementary error function of a complex argument, erfc(z) = exp(-z^2) w(iz)."""
    values = _checked(z, "erfc_complex").astype(np.complex128)
    return _unwrap(np.exp(-values * values) * special.wofz(1j * values))


def fresnel(u: Any) -> Tuple[Any, Any]:
    """Fresnel integrals C(u) and S(u) with the pi*s^2/2 kernel.

    Note the order: scipy returns (S, C); this returns (C, S).
    """
    values = _checked(u, "fresnel")
    if np.iscomplexobj(values):
        raise SpecialFunctionDomainError(f"fresnel: argument must be real, got {u!r}")
    s, c = special.fresnel(values.astype(np.float64))
    return _unwrap(np.asarray(c)), _unwrap(np.asarray(s))
