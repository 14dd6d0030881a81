"""
Closed-form evaluators for the space double-slit, the shutter (diffraction in
time), the time double-slit and the weighted-slit complementarity setups.

Densities are relative: the delta-function initial states are not
normalizable, so every pattern is scaled to a global maximum of 1. The
t^-3 spreading envelope of the spacetime densities is returned separately.

Conventions: the second slit (at -a/2) carries the factor exp(-i*phi) and
the weight (1 - alpha); the first slit carries alpha. Arguments are in eV,
fs, nm (momenta in eV*fs/nm, phases in radians); internally hbar = 1.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .errors import BelowThresholdOrderError, DomainError, EvanescentOrderError, NoOscillationError
from .specfun import exp_y2_erfc, fresnel
from .units import Particle, derived_kinematics, from_internal, to_internal

logger = logging.getLogger(__name__)


def fold_phase(phi: float) -> float:
    """Fold a phase into (-pi, pi]."""
    return math.pi - (math.pi - phi) % (2.0 * math.pi)


class _SlitConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    phi: float = Field(default=0.0, json_schema_extra={"unit": "rad"})
    alpha: float = Field(default=0.5, ge=0.0, le=1.0, json_schema_extra={"unit": "1"})

    @field_validator("phi")
    @classmethod
    def _fold(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("phase must be finite")
        return fold_phase(value)


class SpaceSlitConfig(_SlitConfig):
    """Two point slits separated by ``a`` (nm) across the beam."""
    type: Literal["space_slit"] = "space_slit"
    a: float = Field(gt=0.0, json_schema_extra={"unit": "nm"})


class TimeSlitConfig(_SlitConfig):
    """Two pulses launched ``tau`` (fs) apart along the beam."""
    type: Literal["time_slit"] = "time_slit"
    tau: float = Field(gt=0.0, json_schema_extra={"unit": "fs"})

    def separation(self, particle: Particle) -> float:
        """Equivalent spatial separation a = (p0/m) tau, in nm."""
        return derived_kinematics(particle).v0 * self.tau


@dataclass(frozen=True)
class SpacetimeDensity:
    """Oscillatory factor (relative density in [0, 1]) and the t^-3 envelope (fs^-3)."""
    relative: Any
    envelope: Any


def _weighted(alpha: float, half_phase: Any) -> Any:
    # |alpha + (1 - alpha) exp(i*2x)|^2, equal to cos^2(x) at alpha = 1/2
    return (2.0 * alpha - 1.0) ** 2 + 4.0 * alpha * (1.0 - alpha) * np.cos(half_phase) ** 2


def _require_positive_time(t: Any, operation: str) -> None:
    if np.any(np.asarray(t) <= 0):
        raise DomainError(f"{operation}: t must be > 0 (the free kernel is singular at t = 0), got {t}")


# Space double-slit


def weighted_slit_momentum_density(p: Any, cfg: SpaceSlitConfig) -> Any:
    """(2a-1)^2 + 4a(1-a) cos^2[(p*a/hbar - phi)/2], already peak-normalized."""
    phase = to_internal(p, "eV*fs/nm") * to_internal(cfg.a, "nm") - cfg.phi
    return _weighted(cfg.alpha, phase / 2.0)


def space_slit_momentum_density(p_y: Any, cfg: SpaceSlitConfig) -> Any:
    """Transverse momentum density cos^2[((p_y a/hbar) - phi)/2], alpha-weighted."""
    return weighted_slit_momentum_density(p_y, cfg)


def space_slit_maxima_angles(n: int, cfg: SpaceSlitConfig, particle: Particle) -> float:
    """Angle (rad) of the n-th maximum: sin(theta_n) = (n + phi/2pi) lambda_B / a.

    Raises:
        EvanescentOrderError: If the order does not propagate (|sin| > 1)
    """
    lambda_b = derived_kinematics(particle).lambda_b
    sine = (n + cfg.phi / (2.0 * math.pi)) * lambda_b / cfg.a
    if abs(sine) > 1.0:
        raise EvanescentOrderError(
            f"evanescent-order: order {n} needs sin(theta) = {sine:.6g} for lambda_B/a = {lambda_b / cfg.a:.6g}"
        )
    return math.asin(sine)


def space_slit_spacetime_density(y: Any, t: Any, cfg: SpaceSlitConfig, particle: Particle) -> SpacetimeDensity:
    """Density on the screen coordinate y at time t.

    The oscillatory factor is cos^2[(a m y / 2 hbar t) - phi/2]; the phase sign
    follows from the exp(-i phi) slit at -a/2 and agrees with space_slit_maxima_positions.
    """
    _require_positive_time(t, "space_slit_spacetime_density")
    t_int = to_internal(t, "fs")
    phase = to_internal(cfg.a, "nm") * particle.mass_internal * to_internal(y, "nm") / (2.0 * t_int)
    relative = _weighted(cfg.alpha, phase - cfg.phi / 2.0)
    return SpacetimeDensity(relative=relative, envelope=np.asarray(t, dtype=float) ** -3.0)


def space_slit_period(y: Any, t: Any, cfg: SpaceSlitConfig, particle: Particle) -> Any:
    """Transient period Xi(t) = (2 pi hbar / a m y) t^2 in fs.

    Raises:
        NoOscillationError: On the axis (y = 0)
        DomainError: If t <= 0
    """
    if np.any(np.asarray(y) == 0):
        raise NoOscillationError("no oscillation on axis: the space double-slit density is constant at y = 0")
    _require_positive_time(t, "space_slit_period")
    t_int = to_internal(t, "fs")
    period = 2.0 * math.pi * t_int**2 / (to_internal(cfg.a, "nm") * particle.mass_internal * np.abs(to_internal(y, "nm")))
    return from_internal(period, "fs")


def space_slit_maxima_positions(orders: Any, t: float, cfg: SpaceSlitConfig, particle: Particle) -> Any:
    """Screen positions (nm) of the fringe maxima at time t: y_n = (2 pi n + phi) hbar t / (a m)."""
    _require_positive_time(t, "space_slit_maxima_positions")
    n = np.asarray(orders, dtype=float)
    y = (2.0 * math.pi * n + cfg.phi) * to_internal(t, "fs") / (to_internal(cfg.a, "nm") * particle.mass_internal)
    return from_internal(y, "nm")


# Shutter (diffraction in time)


def _shutter_y0(z: Any, t: Any, particle: Particle) -> Any:
    t_int = to_internal(np.asarray(t, dtype=float), "fs")
    m = particle.mass_internal
    v0 = particle.p0_internal / m
    return np.exp(-0.25j * math.pi) * np.sqrt(m / (2.0 * t_int)) * (to_internal(z, "nm") - v0 * t_int)


def shutter_wavefunction(z: Any, t: Any, particle: Particle) -> Any:
    """One-dimensional shutter solution, relative to the unit stationary plane wave.

    psi = 1/2 exp(i m z^2 / 2 hbar t) exp(Y0^2) erfc(Y0), with
    Y0 = exp(-i pi/4) (2 hbar t / m)^(-1/2) (z - v0 t).
    """
    _require_positive_time(t, "shutter_wavefunction")
    t_int = to_internal(np.asarray(t, dtype=float), "fs")
    z_int = to_internal(np.asarray(z, dtype=float), "nm")
    quadratic = np.exp(1j * particle.mass_internal * z_int**2 / (2.0 * t_int))
    result = 0.5 * quadratic * exp_y2_erfc(_shutter_y0(z, t, particle))
    return result.item() if np.ndim(result) == 0 else result


def shutter_fresnel_argument(z: Any, t: Any, particle: Particle) -> Any:
    """u = (m / pi hbar t)^(1/2) (v0 t - z)."""
    _require_positive_time(t, "shutter_fresnel_argument")
    t_int = to_internal(np.asarray(t, dtype=float), "fs")
    m = particle.mass_internal
    v0 = particle.p0_internal / m
    return np.sqrt(m / (math.pi * t_int)) * (v0 * t_int - to_internal(z, "nm"))


def shutter_current_ratio(z: Any, t: Any, particle: Particle) -> Any:
    """Transient-to-stationary ratio 1/2 [(1/2 + C(u))^2 + (1/2 + S(u))^2]."""
    u = shutter_fresnel_argument(z, t, particle)
    c, s = fresnel(u)
    return 0.5 * ((0.5 + c) ** 2 + (0.5 + s) ** 2)


def shutter_flux_ratio(z: Any, t: Any, particle: Particle) -> Any:
    """Exact probability-current ratio j/j0 of the shutter solution.

    j/j0 = |psi|^2 + Im(conj(F) dF/dz) / (4 p0), F = erfc(Y0). The correction
    to the Fresnel form decays like (hbar / E0 t)^(1/2).
    """
    _require_positive_time(t, "shutter_flux_ratio")
    t_int = to_internal(np.asarray(t, dtype=float), "fs")
    m = particle.mass_internal
    w = exp_y2_erfc(_shutter_y0(z, t, particle))
    slope = np.exp(-0.25j * math.pi) * np.sqrt(m / (2.0 * t_int))
    # |exp(-Y0^2)| = 1 on this ray, so conj(F) F' = -(2/sqrt(pi)) slope conj(w)
    cross = -(2.0 / math.sqrt(math.pi)) * slope * np.conj(w)
    return 0.25 * np.abs(w) ** 2 + np.imag(cross) / (4.0 * particle.p0_internal)


# Time double-slit


def time_slit_momentum_density(p_z: Any, cfg: TimeSlitConfig, particle: Particle) -> Any:
    """cos^2[((p_z - p0)(p0 tau / m) / hbar - phi)/2], alpha-weighted."""
    a_int = particle.p0_internal * to_internal(cfg.tau, "fs") / particle.mass_internal
    phase = (to_internal(p_z, "eV*fs/nm") - particle.p0_internal) * a_int - cfg.phi
    return _weighted(cfg.alpha, phase / 2.0)


def time_slit_peak_momenta(n: Any, cfg: TimeSlitConfig, particle: Particle) -> Any:
    """Momenta (eV*fs/nm) of the spectral peaks: p_n = p0 + (m hbar / p0 tau)(2 pi n + phi)."""
    derived_kinematics(particle)
    m = particle.mass_internal
    p0 = particle.p0_internal
    order = 2.0 * math.pi * np.asarray(n, dtype=float) + cfg.phi
    return from_internal(p0 + m * order / (p0 * to_internal(cfg.tau, "fs")), "eV*fs/nm")


def time_slit_peak_energies(n: int, cfg: TimeSlitConfig, particle: Particle) -> float:
    """Energy (eV) of the n-th spectral peak.

    E_n = E0 + (hbar/tau)(2 pi n + phi) + (hbar^2 / 4 E0 tau^2)(2 pi n + phi)^2

    Raises:
        BelowThresholdOrderError: If p_n <= 0
    """
    p_n = time_slit_peak_momenta(n, cfg, particle)
    if p_n <= 0:
        raise BelowThresholdOrderError(f"below-threshold order: order {n} gives p_n = {p_n:.6g} eV*fs/nm <= 0")
    tau = to_internal(cfg.tau, "fs")
    e0 = to_internal(particle.energy, "eV")
    order = 2.0 * math.pi * n + cfg.phi
    return float(from_internal(e0 + order / tau + order**2 / (4.0 * e0 * tau**2), "eV"))


def energy_peak_spacing(cfg: TimeSlitConfig) -> float:
    """Leading-order spacing h/tau (eV) of the energy fringes; exact spacings are >= this."""
    return float(from_internal(2.0 * math.pi / to_internal(cfg.tau, "fs"), "eV"))


def time_slit_spacetime_density(z: Any, t: Any, cfg: TimeSlitConfig, particle: Particle) -> SpacetimeDensity:
    """Density along the beam: cos^2[(p0 tau / 2 m hbar)(p0 - m z / t) + phi/2] and t^-3."""
    _require_positive_time(t, "time_slit_spacetime_density")
    m = particle.mass_internal
    p0 = particle.p0_internal
    tau = to_internal(cfg.tau, "fs")
    t_int = to_internal(np.asarray(t, dtype=float), "fs")
    phase = (p0 * tau / (2.0 * m)) * (p0 - m * to_internal(z, "nm") / t_int) + cfg.phi / 2.0
    return SpacetimeDensity(relative=_weighted(cfg.alpha, phase), envelope=np.asarray(t, dtype=float) ** -3.0)


def time_slit_period(z: Any, t: Any, cfg: TimeSlitConfig, particle: Particle) -> Any:
    """Transient period Xi(t) = (pi hbar / E0 tau)(p0 / m z) t^2 in fs.

    At the classical arrival time T_z = m z / p0 this is (pi hbar / E0 tau) T_z.

    Raises:
        NoOscillationError: At the origin (z = 0)
        DomainError: If t <= 0
    """
    if np.any(np.asarray(z) == 0):
        raise NoOscillationError("time_slit_period: z must be nonzero")
    _require_positive_time(t, "time_slit_period")
    derived_kinematics(particle)
    m = particle.mass_internal
    p0 = particle.p0_internal
    e0 = p0**2 / (2.0 * m)
    tau = to_internal(cfg.tau, "fs")
    t_int = to_internal(np.asarray(t, dtype=float), "fs")
    period = (math.pi / (e0 * tau)) * (p0 / (m * np.abs(to_internal(z, "nm")))) * t_int**2
    return from_internal(period, "fs")


def time_slit_maxima_positions(orders: Any, t: float, cfg: TimeSlitConfig, particle: Particle) -> Any:
    """Positions (nm) of the density maxima at fixed t: z_n = v0 t - (2 pi n - phi) hbar t / (p0 tau)."""
    _require_positive_time(t, "time_slit_maxima_positions")
    derived_kinematics(particle)
    m = particle.mass_internal
    p0 = particle.p0_internal
    t_int = to_internal(t, "fs")
    n = np.asarray(orders, dtype=float)
    z = p0 * t_int / m - (2.0 * math.pi * n - cfg.phi) * t_int / (p0 * to_internal(cfg.tau, "fs"))
    return from_internal(z, "nm")


def classical_displacement(t: Any, particle: Particle) -> Any:
    """z = v0 t = (2 E0 / m)^(1/2) t in nm."""
    if np.any(np.asarray(t) < 0):
        raise DomainError(f"classical_displacement: t must be >= 0, got {t}")
    v0 = particle.p0_internal / particle.mass_internal
    return from_internal(v0 * to_internal(t, "fs"), "nm")


# Complementarity


def fringe_visibility(alpha: float) -> float:
    """V = 4 alpha (1 - alpha) / (1 + (2 alpha - 1)^2)."""
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"fringe_visibility: alpha must lie in [0, 1], got {alpha}")
    return 4.0 * alpha * (1.0 - alpha) / (1.0 + (2.0 * alpha - 1.0) ** 2)
