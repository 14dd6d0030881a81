"""
Spectral free-particle propagator on a periodic 1-D grid.

The free Hamiltonian is diagonal in momentum space, so a state is evolved to
any time in a single step: forward FFT, multiply by exp(-i p^2 t / 2 m hbar),
inverse FFT. The only errors are discretization and wrap-around, which the
grid sizing rule in ``Grid1D.for_state`` keeps below the double-precision
floor.

Initial states replace each delta function of the closed-form setups by a
narrow Gaussian (|psi|^2 standard deviation sigma) and the shutter's step by
an erfc edge of width sigma. Slit one sits at +a/2 with weight alpha, slit two
at -a/2 with weight (1 - alpha) exp(-i phi).
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy import special

from .analytic import fold_phase
from .errors import DomainError, FeaturelessSeriesError, GeometryError, MomentumWindowError, UnderResolvedError
from .series import Series, locate_peaks
from .units import Particle, derived_kinematics, from_internal, to_internal

logger = logging.getLogger(__name__)

# Gaussian tails are considered negligible beyond this many widths
TAIL_WIDTHS = 6.0
PROBE_CHUNK_ELEMENTS = 4_000_000


class InitialStateKind(str, Enum):
    """Initial-state families of the closed-form setups."""
    SPACE_DOUBLE_SLIT = "space_double_slit"
    SHUTTER = "shutter"
    TIME_DOUBLE_SLIT = "time_double_slit"
    WEIGHTED_DOUBLE_SLIT = "weighted_double_slit"


class InitialStateSpec(BaseModel):
    """Regularized initial state.

    Lengths in nm, tau in fs. ``a`` is required for the transverse double
    slits, ``tau`` for the time double slit, ``train_length`` and
    ``far_sigma`` for the shutter (see ``InitialStateSpec.shutter``).
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: InitialStateKind
    particle: Particle
    sigma: float = Field(gt=0.0, json_schema_extra={"unit": "nm"})
    a: Optional[float] = Field(default=None, gt=0.0, json_schema_extra={"unit": "nm"})
    tau: Optional[float] = Field(default=None, gt=0.0, json_schema_extra={"unit": "fs"})
    phi: float = Field(default=0.0, json_schema_extra={"unit": "rad"})
    alpha: float = Field(default=0.5, ge=0.0, le=1.0)
    train_length: Optional[float] = Field(default=None, gt=0.0, json_schema_extra={"unit": "nm"})
    far_sigma: Optional[float] = Field(default=None, gt=0.0, json_schema_extra={"unit": "nm"})

    @field_validator("phi")
    @classmethod
    def _fold(cls, value: float) -> float:
        return fold_phase(value)

    @model_validator(mode="after")
    def _check_geometry(self) -> "InitialStateSpec":
        if self.kind == InitialStateKind.SHUTTER:
            if self.train_length is None or self.far_sigma is None:
                raise ValueError("shutter states need train_length and far_sigma (use InitialStateSpec.shutter)")
            return self
        if self.kind == InitialStateKind.TIME_DOUBLE_SLIT and self.tau is None:
            raise ValueError("time_double_slit needs tau")
        if self.kind != InitialStateKind.TIME_DOUBLE_SLIT and self.a is None:
            raise ValueError(f"{self.kind.value} needs the slit separation a")
        separation = self.separation()
        if self.sigma >= separation / 4.0:
            raise ValueError(f"sigma = {self.sigma} nm must be < a/4 = {separation / 4.0} nm so the slits do not overlap")
        return self

    @classmethod
    def shutter(cls, particle: Particle, t_max: float, sigma: Optional[float] = None) -> "InitialStateSpec":
        """Smoothed-step wave train long enough that its far edge stays away from z >= 0 until ``t_max`` (fs)."""
        kin = derived_kinematics(particle)
        far_sigma = 20.0 * kin.lambda_b
        return cls(
            kind=InitialStateKind.SHUTTER,
            particle=particle,
            sigma=sigma if sigma is not None else kin.lambda_b / 10.0,
            train_length=kin.v0 * t_max + 10.0 * far_sigma,
            far_sigma=far_sigma,
        )

    @property
    def is_transverse(self) -> bool:
        return self.kind in (InitialStateKind.SPACE_DOUBLE_SLIT, InitialStateKind.WEIGHTED_DOUBLE_SLIT)

    @property
    def coordinate(self) -> str:
        return "y" if self.is_transverse else "z"

    def carrier(self) -> float:
        """Central momentum (internal units) carried along the grid axis."""
        return 0.0 if self.is_transverse else self.particle.p0_internal

    def separation(self) -> float:
        """Distance between the two slits or pulses in nm (0 for the shutter)."""
        if self.kind == InitialStateKind.SHUTTER:
            return 0.0
        if self.kind == InitialStateKind.TIME_DOUBLE_SLIT:
            return derived_kinematics(self.particle).v0 * float(self.tau)
        return float(self.a)

    def support(self) -> Tuple[float, float]:
        """Interval (nm) that must lie on the grid, tails included."""
        if self.kind == InitialStateKind.SHUTTER:
            return (
                -float(self.train_length) - TAIL_WIDTHS * float(self.far_sigma),
                TAIL_WIDTHS * self.sigma,
            )
        half = self.separation() / 2.0
        return -half - TAIL_WIDTHS * self.sigma, half + TAIL_WIDTHS * self.sigma

    def momentum_reach(self) -> float:
        """Largest momentum (internal units) with non-negligible amplitude."""
        return abs(self.carrier()) + TAIL_WIDTHS / self.sigma


@dataclass(frozen=True)
class Grid1D:
    """Periodic grid x_j = x_min + j * spacing, j = 0 .. n_points - 1 (nm)."""
    n_points: int
    x_min: float
    x_max: float

    def __post_init__(self) -> None:
        n = self.n_points
        if n < 2 or n & (n - 1):
            raise ValueError(f"n_points must be a power of two >= 2, got {n}")
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)) or self.x_max <= self.x_min:
            raise ValueError(f"Grid extent must be finite with x_max > x_min, got [{self.x_min}, {self.x_max}]")

    @property
    def extent(self) -> float:
        return self.x_max - self.x_min

    @property
    def spacing(self) -> float:
        return self.extent / self.n_points

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.spacing * np.arange(self.n_points)

    @property
    def wavenumbers(self) -> np.ndarray:
        """FFT-ordered momenta in internal units (hbar = 1, so p = k)."""
        return 2.0 * math.pi * np.fft.fftfreq(self.n_points, d=self.spacing)

    @property
    def momentum_limit(self) -> float:
        """Nyquist momentum pi * hbar / spacing (internal units)."""
        return math.pi / self.spacing

    @classmethod
    def for_state(
        cls,
        spec: InitialStateSpec,
        t_max: float,
        observe: Sequence[float] = (),
        spacing: Optional[float] = None,
    ) -> "Grid1D":
        """Grid that holds ``spec`` without aliasing or wrap-around up to ``t_max`` (fs).

        The spacing resolves lambda_B/16, the momentum reach and sigma/2; each
        side of the initial support (and of the ``observe`` positions) is padded
        by the distance the fastest retained component travels in ``t_max`` plus
        8 sigma. ``spacing`` overrides the resolution rule.
        """
        reach = spec.momentum_reach()
        if spacing is None:
            limits = [math.pi / reach, spec.sigma / 2.0]
            if not spec.is_transverse:
                limits.append(derived_kinematics(spec.particle).lambda_b / 16.0)
            spacing = min(limits)

        widest = max(spec.sigma, spec.far_sigma or 0.0)
        padding = reach * to_internal(t_max, "fs") / spec.particle.mass_internal + 8.0 * widest
        lo, hi = spec.support()
        if len(observe):
            lo = min(lo, float(np.min(observe)))
            hi = max(hi, float(np.max(observe)))
        lo -= padding
        hi += padding

        n_points = 1 << max(1, math.ceil(math.log2((hi - lo) / spacing)))
        slack = n_points * spacing - (hi - lo)
        x_min = lo - slack / 2.0
        grid = cls(n_points=n_points, x_min=x_min, x_max=x_min + n_points * spacing)
        logger.debug(f"Grid for {spec.kind.value}: {n_points} points, spacing {spacing:.4g} nm, extent {grid.extent:.4g} nm")
        return grid


@dataclass(frozen=True)
class ComplexField:
    """Wavefunction samples on a grid plus the metadata the checks need.

    ``time`` is the elapsed evolution time in fs; ``carrier`` and ``sigma``
    describe the momentum content; ``reference_density`` is the plateau
    density of a shutter train.
    """
    grid: Grid1D
    amplitudes: np.ndarray
    sigma: Optional[float] = None
    carrier: float = 0.0
    reference_density: Optional[float] = None
    time: float = 0.0
    coordinate: str = "z"
    norm: float = field(init=False)

    def __post_init__(self) -> None:
        amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if amplitudes.shape != (self.grid.n_points,):
            raise ValueError(f"Field needs {self.grid.n_points} amplitudes, got shape {amplitudes.shape}")
        norm = float(np.sum(np.abs(amplitudes) ** 2) * self.grid.spacing)
        if not math.isfinite(norm):
            raise ValueError("Field norm is not finite")
        object.__setattr__(self, "amplitudes", amplitudes)
        object.__setattr__(self, "norm", norm)

    def replace(self, amplitudes: np.ndarray, **changes: Any) -> "ComplexField":
        """Copy with new amplitudes and optionally changed metadata."""
        values = {
            "sigma": self.sigma,
            "carrier": self.carrier,
            "reference_density": self.reference_density,
            "time": self.time,
            "coordinate": self.coordinate,
        }
        values.update(changes)
        return ComplexField(grid=self.grid, amplitudes=amplitudes, **values)

    def normalize(self) -> "ComplexField":
        if self.norm == 0.0:
            raise ValueError("Cannot normalize a zero field")
        scale = 1.0 / math.sqrt(self.norm)
        reference = None if self.reference_density is None else self.reference_density * scale**2
        return self.replace(self.amplitudes * scale, reference_density=reference)

    @staticmethod
    def superpose(fields: Sequence["ComplexField"]) -> "ComplexField":
        """Sum of fields on the same grid; metadata from the first."""
        if not fields:
            raise ValueError("superpose needs at least one field")
        total = np.sum([f.amplitudes for f in fields], axis=0)
        return fields[0].replace(total)


@dataclass(frozen=True)
class ProbeResult:
    """Field values (and optionally dpsi/dz in 1/nm) with shape (n_times, n_positions)."""
    times: np.ndarray
    positions: np.ndarray
    values: np.ndarray
    gradient: Optional[np.ndarray] = None


@dataclass(frozen=True)
class ComparisonResult:
    """Peak position discrepancy (abscissa units) and RMS of the peak-normalized difference."""
    peak_position_error: float
    normalized_rms: float


def _gaussian(x: np.ndarray, center: float, sigma: float) -> np.ndarray:
    # |psi|^2 has standard deviation sigma
    return np.exp(-((x - center) ** 2) / (4.0 * sigma**2))


def _check_fits(spec: InitialStateSpec, grid: Grid1D) -> None:
    # relative slack absorbs the rounding of extent / n_points
    if spec.sigma < 2.0 * grid.spacing * (1.0 - 1e-9):
        raise UnderResolvedError(
            f"under-resolved: sigma = {spec.sigma:.4g} nm needs a grid spacing <= {spec.sigma / 2.0:.4g} nm, "
            f"grid has {grid.spacing:.4g} nm"
        )
    lo, hi = spec.support()
    if lo < grid.x_min or hi > grid.x_max:
        raise GeometryError(
            f"{spec.kind.value} needs [{lo:.6g}, {hi:.6g}] nm on the grid (peaks plus {TAIL_WIDTHS:g} sigma), "
            f"grid covers [{grid.x_min:.6g}, {grid.x_max:.6g}] nm"
        )


def make_initial_components(spec: InitialStateSpec, grid: Grid1D) -> List[ComplexField]:
    """The weighted slit (or pulse) fields whose sum is ``make_initial_state``.

    All components share one normalization constant, so their sum has norm 1.
    The shutter has a single component.

    Raises:
        UnderResolvedError: If sigma < 2 * spacing
        GeometryError: If the state (to 6 sigma) does not fit on the grid
    """
    _check_fits(spec, grid)
    x = grid.x
    carrier = spec.carrier()
    phase = np.exp(1j * carrier * x)
    meta = {"sigma": spec.sigma, "carrier": carrier, "coordinate": spec.coordinate}

    if spec.kind == InitialStateKind.SHUTTER:
        near = 0.5 * special.erfc(x / (math.sqrt(2.0) * spec.sigma))
        far = 0.5 * special.erfc(-(x + float(spec.train_length)) / (math.sqrt(2.0) * float(spec.far_sigma)))
        raw = ComplexField(grid=grid, amplitudes=near * far * phase, reference_density=1.0, **meta)
        return [raw.normalize()]

    half = spec.separation() / 2.0
    first = spec.alpha * _gaussian(x, half, spec.sigma) * phase
    second = (1.0 - spec.alpha) * np.exp(-1j * spec.phi) * _gaussian(x, -half, spec.sigma) * phase
    total = float(np.sum(np.abs(first + second) ** 2) * grid.spacing)
    scale = 1.0 / math.sqrt(total)
    return [ComplexField(grid=grid, amplitudes=first * scale, **meta), ComplexField(grid=grid, amplitudes=second * scale, **meta)]


def make_initial_state(spec: InitialStateSpec, grid: Grid1D) -> ComplexField:
    """Normalized regularized initial state for ``spec`` on ``grid``."""
    return ComplexField.superpose(make_initial_components(spec, grid))


def _check_momentum_window(field_: ComplexField) -> None:
    grid = field_.grid
    if field_.sigma is not None:
        reach = abs(field_.carrier) + TAIL_WIDTHS / field_.sigma
        if reach > grid.momentum_limit:
            raise MomentumWindowError(
                f"momentum window: the state reaches |p| = {from_internal(reach, 'eV*fs/nm'):.4g} eV*fs/nm "
                f"but the grid resolves only {from_internal(grid.momentum_limit, 'eV*fs/nm'):.4g} eV*fs/nm; "
                f"refine the spacing below {math.pi / reach:.4g} nm"
            )
        return
    # no metadata: fall back to the power in the outer tenth of the spectrum
    power = np.abs(np.fft.fft(field_.amplitudes)) ** 2
    outer = np.abs(grid.wavenumbers) > 0.9 * grid.momentum_limit
    total = float(np.sum(power))
    if total > 0 and float(np.sum(power[outer])) > 1e-20 * total:
        raise MomentumWindowError("momentum window: the spectrum is not negligible at the Nyquist momentum")


def _kinetic_phase(grid: Grid1D, t_fs: Any, particle: Particle) -> np.ndarray:
    k = grid.wavenumbers
    return np.exp(-0.5j * np.multiply.outer(to_internal(np.asarray(t_fs, dtype=float), "fs"), k**2) / particle.mass_internal)


def evolve_free(field_: ComplexField, t: float, particle: Particle) -> ComplexField:
    """Evolve by ``t`` fs under the free Hamiltonian in one spectral step.

    Raises:
        DomainError: If t < 0
        MomentumWindowError: If the grid cannot represent the state's spectrum
    """
    if t < 0:
        raise DomainError(f"evolve_free: t must be >= 0, got {t} fs")
    _check_momentum_window(field_)
    if t == 0:
        return field_
    spectrum = np.fft.fft(field_.amplitudes)
    evolved = np.fft.ifft(spectrum * _kinetic_phase(field_.grid, t, particle))
    return field_.replace(evolved, time=field_.time + t)


def density(field_: ComplexField) -> Series:
    """|psi|^2 on the grid (1/nm)."""
    return Series(field_.grid.x, np.abs(field_.amplitudes) ** 2, field_.coordinate, "nm", "density", "1/nm")


def spectrum(field_: ComplexField) -> Tuple[np.ndarray, np.ndarray]:
    """Momentum amplitudes phi(p) sorted by p (eV*fs/nm), normalized so that sum |phi|^2 dp = norm."""
    grid = field_.grid
    phi = np.fft.fft(field_.amplitudes) * np.exp(-1j * grid.wavenumbers * grid.x_min) * grid.spacing / math.sqrt(2.0 * math.pi)
    order = np.argsort(grid.wavenumbers)
    p = from_internal(grid.wavenumbers[order], "eV*fs/nm")
    # density per internal momentum unit -> per eV*fs/nm
    return p, phi[order] * math.sqrt(to_internal(1.0, "eV*fs/nm"))


def momentum_density(field_: ComplexField) -> Series:
    """|phi(p)|^2 on the FFT momentum grid."""
    p, phi = spectrum(field_)
    return Series(p, np.abs(phi) ** 2, f"p_{field_.coordinate}", "eV*fs/nm", "momentum density", "nm/(eV*fs)")


def probe(
    field_: ComplexField,
    positions: Any,
    times: Any,
    particle: Particle,
    gradient: bool = False,
) -> ProbeResult:
    """Evaluate the field evolved by each of ``times`` (fs) at arbitrary ``positions`` (nm).

    The spectrum is summed directly at the requested points, so a detector
    time series costs one FFT instead of one evolution per sample. Modes
    below 1e-14 of the largest amplitude are dropped.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    positions = np.atleast_1d(np.asarray(positions, dtype=float))
    if np.any(times < 0):
        raise DomainError("probe: times must be >= 0")
    _check_momentum_window(field_)
    grid = field_.grid

    coefficients = np.fft.fft(field_.amplitudes) / grid.n_points
    keep = np.abs(coefficients) > 1e-14 * np.max(np.abs(coefficients))
    k = grid.wavenumbers[keep]
    coefficients = coefficients[keep]
    basis = np.exp(1j * np.multiply.outer(k, positions - grid.x_min))

    values = np.empty((times.size, positions.size), dtype=np.complex128)
    slopes = np.empty_like(values) if gradient else None
    chunk = max(1, PROBE_CHUNK_ELEMENTS // max(1, k.size))
    mass = particle.mass_internal
    for start in range(0, times.size, chunk):
        t_int = to_internal(times[start:start + chunk], "fs")
        weights = coefficients * np.exp(-0.5j * np.multiply.outer(t_int, k**2) / mass)
        values[start:start + chunk] = weights @ basis
        if slopes is not None:
            slopes[start:start + chunk] = (weights * (1j * k)) @ basis
    return ProbeResult(times=times, positions=positions, values=values, gradient=slopes)


def probability_current(field_: ComplexField, particle: Particle) -> Series:
    """j = (hbar/m) Im(conj(psi) dpsi/dz) by spectral differentiation (1/fs)."""
    grid = field_.grid
    slope = np.fft.ifft(1j * grid.wavenumbers * np.fft.fft(field_.amplitudes))
    current = np.imag(np.conj(field_.amplitudes) * slope) / particle.mass_internal
    return Series(grid.x, from_internal(current, "nm/fs"), field_.coordinate, "nm", "current", "1/fs")


def fringe_factor(components: Sequence[Union[ComplexField, np.ndarray]], floor: float = 1e-12) -> np.ndarray:
    """|sum psi_j|^2 / (sum |psi_j|)^2: the density with the coherent envelope divided out.

    Points where the envelope falls below ``floor`` times its maximum are NaN.
    """
    arrays = [c.amplitudes if isinstance(c, ComplexField) else np.asarray(c) for c in components]
    coherent = np.abs(np.sum(arrays, axis=0)) ** 2
    envelope = np.sum([np.abs(a) for a in arrays], axis=0) ** 2
    top = float(np.max(envelope)) if envelope.size else 0.0
    valid = envelope > floor * top
    ratio = np.full(envelope.shape, np.nan)
    np.divide(coherent, envelope, out=ratio, where=valid)
    return ratio


def compare_to_analytic(
    numeric: Series,
    analytic: Series,
    require_peaks: bool = True,
    min_prominence: float = 0.1,
) -> ComparisonResult:
    """Peak-position and RMS discrepancy between a numeric and an analytic pattern.

    Both are peak-normalized; the numeric series is interpolated onto the
    analytic abscissa when they differ. Non-finite numeric samples (outside
    the envelope) are ignored.

    Raises:
        FeaturelessSeriesError: If ``require_peaks`` and either series has no peaks
    """
    y_num = np.asarray(numeric.y, dtype=float)
    if len(numeric.x) != len(analytic.x) or not np.allclose(numeric.x, analytic.x):
        y_num = np.interp(analytic.x, numeric.x, y_num)
    y_ana = np.asarray(analytic.y, dtype=float)
    mask = np.isfinite(y_num) & np.isfinite(y_ana)
    if not mask.any():
        raise FeaturelessSeriesError("featureless: no overlapping finite samples to compare")
    y_num = y_num / np.max(y_num[mask])
    y_ana = y_ana / np.max(y_ana[mask])
    rms = float(np.sqrt(np.mean((y_num[mask] - y_ana[mask]) ** 2)))

    x = analytic.x
    peaks_num = locate_peaks(x, np.where(mask, y_num, np.nan), min_prominence)
    peaks_ana = locate_peaks(x, np.where(mask, y_ana, np.nan), min_prominence)
    if peaks_num.size == 0 or peaks_ana.size == 0:
        if require_peaks:
            raise FeaturelessSeriesError(
                f"featureless: {peaks_num.size} numeric and {peaks_ana.size} analytic peaks in '{analytic.y_label}'"
            )
        return ComparisonResult(peak_position_error=0.0, normalized_rms=rms)
    nearest = np.min(np.abs(np.subtract.outer(peaks_ana, peaks_num)), axis=1)
    return ComparisonResult(peak_position_error=float(np.max(nearest)), normalized_rms=rms)
