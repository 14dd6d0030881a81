"""
Named, reproducible parameter bundles and the analysis helpers that turn
their output into quoted numbers.

A ``ScenarioSpec`` fixes a particle, a slit configuration, what to observe
and (optionally) how to run the numeric oracle. ``run_scenario`` evaluates
the closed form on the observation window and, when requested, the spectral
propagator on the same abscissa, so the two series can be compared column by
column.
"""

import logging
import math
import typing
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Type, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from pydantic.fields import FieldInfo
from scipy import integrate, optimize, stats

from . import analytic
from .analytic import SpaceSlitConfig, TimeSlitConfig
from .errors import (
    DimensionError,
    GeometryError,
    InsufficientOscillationsError,
    InvalidOverrideError,
    MomentumWindowError,
    SamplingError,
    ScenarioError,
    UnderResolvedError,
)
from .propagator import (
    Grid1D,
    InitialStateKind,
    InitialStateSpec,
    evolve_free,
    fringe_factor,
    make_initial_components,
    make_initial_state,
    probe,
    spectrum,
)
from .series import Series, locate_peaks, tool_version
from .specfun import fresnel
from .units import (
    ELECTRON_MASS_EV,
    UNITS,
    Particle,
    constants_table,
    convert,
    derived_kinematics,
    from_internal,
    parse_quantity,
    to_internal,
)

logger = logging.getLogger(__name__)


class ExperimentKind(str, Enum):
    """Experiment families."""
    SHUTTER = "shutter"
    SPACE_SLIT = "space_slit"
    TIME_SLIT = "time_slit"
    WEIGHTED_SLIT = "weighted_slit"


class ObservableKind(str, Enum):
    """What a scenario samples, and along which abscissa."""
    SHUTTER_RATIO = "shutter_ratio"  # current ratio vs t at fixed z
    TIME_TRANSIENT = "time_transient"  # time-slit density vs t at fixed z
    SPACE_TRANSIENT = "space_transient"  # space-slit density vs t at fixed y
    SPACE_PROFILE = "space_profile"  # space-slit density vs y at fixed t
    ENERGY_SPECTRUM = "energy_spectrum"  # time-slit spectrum vs E
    MOMENTUM_SPECTRUM = "momentum_spectrum"  # transverse spectrum vs p_y
    DISPLACEMENT = "displacement"  # z = v0 t
    VISIBILITY = "visibility"  # V vs alpha


class TimeUnit(str, Enum):
    FS = "fs"
    ARRIVAL = "arrival"


_OBSERVABLES_BY_KIND: Dict[ExperimentKind, Tuple[ObservableKind, ...]] = {
    ExperimentKind.SHUTTER: (ObservableKind.SHUTTER_RATIO,),
    ExperimentKind.TIME_SLIT: (
        ObservableKind.TIME_TRANSIENT,
        ObservableKind.ENERGY_SPECTRUM,
        ObservableKind.DISPLACEMENT,
    ),
    ExperimentKind.SPACE_SLIT: (
        ObservableKind.SPACE_TRANSIENT,
        ObservableKind.SPACE_PROFILE,
        ObservableKind.MOMENTUM_SPECTRUM,
        ObservableKind.VISIBILITY,
    ),
    ExperimentKind.WEIGHTED_SLIT: (
        ObservableKind.SPACE_TRANSIENT,
        ObservableKind.SPACE_PROFILE,
        ObservableKind.MOMENTUM_SPECTRUM,
        ObservableKind.VISIBILITY,
    ),
}

_TIME_RANGES = (
    ObservableKind.SHUTTER_RATIO,
    ObservableKind.TIME_TRANSIENT,
    ObservableKind.SPACE_TRANSIENT,
    ObservableKind.DISPLACEMENT,
)


class ParticleSpec(BaseModel):
    """Particle as written in scenario files: kinetic energy and rest energy in eV."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    energy: float = Field(ge=0.0, json_schema_extra={"unit": "eV"})
    mass: float = Field(default=ELECTRON_MASS_EV, gt=0.0, json_schema_extra={"unit": "eV/c^2"})

    def to_particle(self) -> Particle:
        return Particle.from_energy(self.energy, self.mass)


class Observation(BaseModel):
    """Sampling window of a scenario.

    ``start``/``stop`` are in fs (or in arrival times when ``time_unit`` is
    "arrival") for time ranges, nm for profiles, eV for energy spectra,
    eV*fs/nm for momentum spectra and plain numbers for alpha sweeps.
    ``distance`` is the source-detector distance along the beam that defines
    the arrival time T = distance / v0; it defaults to ``position`` for beam
    observables. ``order`` puts a space-slit detector on the n-th secondary
    maximum y_n = distance * tan(theta_n).
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    observable: ObservableKind
    start: float
    stop: float
    samples: int = Field(default=1001, ge=3)
    time_unit: TimeUnit = TimeUnit.FS
    position: Optional[float] = Field(default=None, json_schema_extra={"unit": "nm"})
    time: Optional[float] = Field(default=None, gt=0.0)
    distance: Optional[float] = Field(default=None, gt=0.0, json_schema_extra={"unit": "nm"})
    order: Optional[int] = None

    @model_validator(mode="after")
    def _check_window(self) -> "Observation":
        if not self.stop > self.start:
            raise ValueError(f"observation window needs stop > start, got [{self.start}, {self.stop}]")
        if self.observable in _TIME_RANGES and self.start <= 0:
            raise ValueError(f"time ranges must be strictly positive, got start = {self.start}")
        if self.observable in (ObservableKind.SHUTTER_RATIO, ObservableKind.TIME_TRANSIENT) and self.position is None:
            raise ValueError(f"{self.observable.value} needs a detector position")
        if self.observable == ObservableKind.SPACE_TRANSIENT and self.position is None and self.order is None:
            raise ValueError("space_transient needs a detector position or an order")
        if self.observable == ObservableKind.SPACE_PROFILE and self.time is None:
            raise ValueError("space_profile needs a fixed time")
        if self.order is not None and self.distance is None:
            raise ValueError("placing the detector on an order needs the distance")
        return self

    def arrival_distance(self) -> Optional[float]:
        return self.distance if self.distance is not None else self.position


class NumericSettings(BaseModel):
    """Oracle run settings; unset values follow the default regularization and grid rules."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    sigma: Optional[float] = Field(default=None, gt=0.0, json_schema_extra={"unit": "nm"})
    spacing: Optional[float] = Field(default=None, gt=0.0, json_schema_extra={"unit": "nm"})


class EventSettings(BaseModel):
    """Single-event accumulation drawn from the analytic pattern."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    n_events: int = Field(gt=0)
    seed: int = Field(default=0, ge=0)
    bins: int = Field(default=100, ge=1)


class ScenarioSpec(BaseModel):
    """A named, reproducible experiment."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = Field(pattern=r"^[a-z][a-z0-9_]*$")
    description: str = ""
    kind: ExperimentKind
    particle: ParticleSpec
    config: Optional[Union[SpaceSlitConfig, TimeSlitConfig]] = Field(default=None, discriminator="type")
    observation: Observation
    numeric: Optional[NumericSettings] = None
    events: Optional[EventSettings] = None

    @model_validator(mode="after")
    def _check_consistency(self) -> "ScenarioSpec":
        expected = {
            ExperimentKind.SHUTTER: type(None),
            ExperimentKind.TIME_SLIT: TimeSlitConfig,
            ExperimentKind.SPACE_SLIT: SpaceSlitConfig,
            ExperimentKind.WEIGHTED_SLIT: SpaceSlitConfig,
        }[self.kind]
        if not isinstance(self.config, expected):
            raise ValueError(f"{self.kind.value} scenarios need config of type {expected.__name__}")
        allowed = _OBSERVABLES_BY_KIND[self.kind]
        if self.observation.observable not in allowed:
            raise ValueError(
                f"Observable '{self.observation.observable.value}' does not apply to {self.kind.value}. "
                f"Available observables: {', '.join(o.value for o in allowed)}"
            )
        return self


@dataclass(frozen=True)
class EventHistogram:
    """Counts of sampled events over equal bins."""
    edges: np.ndarray
    counts: np.ndarray
    total: int

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    @property
    def width(self) -> float:
        return float(self.edges[1] - self.edges[0])


@dataclass(frozen=True)
class ScenarioResult:
    analytic: Series
    numeric: Optional[Series]
    metadata: Dict[str, Any]
    events: Optional[EventHistogram] = None


@dataclass(frozen=True)
class PeakCount:
    count: int
    positions: List[float]
    spacings: List[float]


@dataclass(frozen=True)
class OscillationPeriods:
    """Midline crossings and the half-period intervals between them.

    ``midpoints`` are geometric means of consecutive crossings (arithmetic
    when the abscissa is not positive), the natural abscissa for Xi ~ t^2.
    """
    crossings: np.ndarray
    intervals: np.ndarray
    midpoints: np.ndarray
    midline: float = field(default=0.0)


# Analysis helpers


def count_peaks(series: Series, min_prominence: float = 0.1) -> PeakCount:
    """Local maxima with prominence >= ``min_prominence`` * max, counted over [x0, x_end).

    A maximum on the first sample counts; one on the last sample belongs to
    the next window.

    Raises:
        ValueError: If the series has fewer than 3 points
    """
    if len(series) < 3:
        raise ValueError(f"count_peaks needs at least 3 points, got {len(series)}")
    positions = locate_peaks(series.x, series.y, min_prominence, include_start=True)
    return PeakCount(
        count=int(positions.size),
        positions=[float(p) for p in positions],
        spacings=[float(d) for d in np.diff(positions)],
    )


def extract_oscillation_periods(series: Series) -> OscillationPeriods:
    """Successive half-period intervals from crossings of the midline (max + min)/2.

    Raises:
        InsufficientOscillationsError: If there are fewer than 4 crossings
    """
    x = series.x
    y = np.asarray(series.y, dtype=float)
    finite = np.isfinite(y)
    if finite.sum() < 2:
        raise InsufficientOscillationsError(f"insufficient oscillations: '{series.y_label}' has no finite samples")
    x, y = x[finite], y[finite]
    midline = 0.5 * (float(np.max(y)) + float(np.min(y)))
    offset = y - midline
    sign_change = np.nonzero(np.signbit(offset[:-1]) != np.signbit(offset[1:]))[0]
    # linear interpolation of each crossing
    lo, hi = offset[sign_change], offset[sign_change + 1]
    with np.errstate(invalid="ignore", divide="ignore"):
        fraction = np.where(hi != lo, lo / (lo - hi), 0.0)
    crossings = x[sign_change] + fraction * (x[sign_change + 1] - x[sign_change])
    if crossings.size < 4:
        raise InsufficientOscillationsError(
            f"insufficient oscillations: {crossings.size} midline crossings in '{series.y_label}', need at least 4"
        )
    if np.all(crossings > 0):
        midpoints = np.sqrt(crossings[:-1] * crossings[1:])
    else:
        midpoints = 0.5 * (crossings[:-1] + crossings[1:])
    return OscillationPeriods(crossings=crossings, intervals=np.diff(crossings), midpoints=midpoints, midline=midline)


def fit_period_growth(periods: OscillationPeriods) -> Tuple[float, float]:
    """Least-squares power law interval = prefactor * t^exponent.

    The full period is Xi(t) = 2 * prefactor * t^exponent.
    """
    slope, intercept = np.polyfit(np.log(periods.midpoints), np.log(periods.intervals), 1)
    return float(slope), float(math.exp(intercept))


def _density_cdf(density: Series) -> Tuple[np.ndarray, np.ndarray, float]:
    y = np.real(np.asarray(density.y))
    if not np.all(np.isfinite(y)):
        raise SamplingError(f"sampling: density '{density.y_label}' has non-finite values")
    if np.any(y < 0):
        raise SamplingError(f"sampling: density '{density.y_label}' has negative values")
    cdf = integrate.cumulative_trapezoid(y, density.x, initial=0.0)
    total = float(cdf[-1])
    if total <= 0.0:
        raise SamplingError(f"sampling: density '{density.y_label}' is zero everywhere")
    return density.x, cdf, total


def accumulate_events(density: Series, n_events: int, seed: int, bins: int = 100) -> EventHistogram:
    """Draw ``n_events`` independent arrivals from a density by inverse-CDF sampling.

    The generator is Philox (counter-based), so a seed reproduces the same
    events on every platform.

    Raises:
        SamplingError: If the density is negative, non-finite or all zero, or n_events <= 0
    """
    if n_events <= 0:
        raise SamplingError(f"sampling: n_events must be > 0, got {n_events}")
    x, cdf, total = _density_cdf(density)
    rng = np.random.Generator(np.random.Philox(seed))
    samples = np.interp(rng.random(n_events) * total, cdf, x)
    counts, edges = np.histogram(samples, bins=bins, range=(float(x[0]), float(x[-1])))
    return EventHistogram(edges=edges, counts=counts, total=int(n_events))


def expected_bin_counts(histogram: EventHistogram, density: Series) -> np.ndarray:
    """Expected counts per bin from the same trapezoid CDF used for sampling."""
    x, cdf, total = _density_cdf(density)
    at_edges = np.interp(histogram.edges, x, cdf)
    return histogram.total * np.diff(at_edges) / total


def histogram_l1_distance(histogram: EventHistogram, density: Series) -> float:
    """L1 distance between the normalized histogram and the bin probabilities."""
    expected = expected_bin_counts(histogram, density) / histogram.total
    return float(np.sum(np.abs(histogram.counts / histogram.total - expected)))


def chi_square_test(histogram: EventHistogram, density: Series, min_expected: float = 5.0) -> Tuple[float, float]:
    """Pearson goodness of fit of the histogram against the density.

    Bins expecting fewer than ``min_expected`` events are pooled into one.

    Returns:
        Tuple of (statistic, p-value)
    """
    expected = expected_bin_counts(histogram, density)
    observed = histogram.counts.astype(float)
    rich = expected >= min_expected
    if not rich.all():
        pooled_expected = float(expected[~rich].sum())
        pooled_observed = float(observed[~rich].sum())
        expected, observed = expected[rich], observed[rich]
        if pooled_expected > 0:
            expected = np.append(expected, pooled_expected)
            observed = np.append(observed, pooled_observed)
    expected = expected * observed.sum() / expected.sum()
    statistic, p_value = stats.chisquare(observed, expected)
    return float(statistic), float(p_value)


def shutter_first_maximum() -> Tuple[float, float]:
    """Fresnel argument and value of the first post-arrival maximum of the shutter ratio."""

    def negative_ratio(u: float) -> float:
        c, s = fresnel(u)
        return -0.5 * ((0.5 + c) ** 2 + (0.5 + s) ** 2)

    found = optimize.minimize_scalar(negative_ratio, bounds=(0.5, 1.8), method="bounded", options={"xatol": 1e-12})
    return float(found.x), float(-found.fun)


# Overrides


def _model_of(annotation: Any) -> Optional[Type[BaseModel]]:
    if isinstance(annotation, type) and issubclass(annotation, BaseModel):
        return annotation
    for arg in typing.get_args(annotation):
        found = _model_of(arg)
        if found is not None:
            return found
    return None


def _parse_override_value(raw: str, info: FieldInfo, item: str) -> Any:
    extra = info.json_schema_extra if isinstance(info.json_schema_extra, dict) else {}
    unit = extra.get("unit")
    if unit is not None:
        dimension = UNITS.dimension_of(str(unit))
        try:
            value, given = parse_quantity(raw, dimension)
        except DimensionError as exc:
            raise InvalidOverrideError(f"Override '{item}': {exc}") from exc
        return convert(value, given, str(unit))
    if raw.lower() in ("none", "null"):
        return None
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            continue
    return raw


def apply_overrides(spec: ScenarioSpec, overrides: Sequence[str]) -> ScenarioSpec:
    """Apply dotted-path ``path=value`` overrides such as ``config.tau=96fs``.

    Dimensional fields need a unit suffix and are converted to the field's
    canonical unit.

    Raises:
        InvalidOverrideError: On malformed items, unknown fields, bad units or
            a result that fails validation
    """
    data = spec.model_dump(mode="json")
    for item in overrides:
        path, sep, raw = item.partition("=")
        if not sep or not path.strip():
            raise InvalidOverrideError(f"Override '{item}' is not of the form path=value")
        keys = path.strip().split(".")
        model: Type[BaseModel] = type(spec)
        node = data
        current: Any = spec
        for depth, key in enumerate(keys):
            fields = model.model_fields
            if key not in fields:
                raise InvalidOverrideError(
                    f"Unknown field '{key}' in override '{item}'. Available fields: {', '.join(sorted(fields))}"
                )
            if depth == len(keys) - 1:
                node[key] = _parse_override_value(raw.strip(), fields[key], item)
                break
            child = getattr(current, key, None) if current is not None else None
            sub_model = type(child) if isinstance(child, BaseModel) else _model_of(fields[key].annotation)
            if sub_model is None:
                raise InvalidOverrideError(f"Field '{key}' in override '{item}' has no sub-fields")
            if node.get(key) is None:
                node[key] = {}
            node, model, current = node[key], sub_model, child
    try:
        return ScenarioSpec.model_validate(data)
    except ValidationError as exc:
        raise InvalidOverrideError(f"Overrides rejected for scenario '{spec.name}': {exc}") from exc


# Scenario evaluation


@dataclass
class _Context:
    spec: ScenarioSpec
    particle: Particle
    summary: Dict[str, Any] = field(default_factory=dict)

    @property
    def observation(self) -> Observation:
        return self.spec.observation

    def abscissa(self) -> np.ndarray:
        obs = self.observation
        return np.linspace(obs.start, obs.stop, obs.samples)

    def arrival_time(self) -> Optional[float]:
        distance = self.observation.arrival_distance()
        if distance is None:
            return None
        return derived_kinematics(self.particle).arrival_time(abs(distance))

    def times(self) -> Tuple[np.ndarray, np.ndarray, str, str]:
        """Sample times in fs plus the abscissa as reported (values, label, unit)."""
        x = self.abscissa()
        if self.observation.time_unit == TimeUnit.ARRIVAL:
            arrival = self.arrival_time()
            if arrival is None:
                raise ScenarioError(f"scenario '{self.spec.name}': arrival time units need a distance")
            return x * arrival, x, "t/T", "1"
        return x, x, "t", "fs"

    def fixed_time(self) -> float:
        t = float(self.observation.time)
        if self.observation.time_unit == TimeUnit.ARRIVAL:
            arrival = self.arrival_time()
            if arrival is None:
                raise ScenarioError(f"scenario '{self.spec.name}': arrival time units need a distance")
            return t * arrival
        return t

    def numeric_sigma(self, state_kind: InitialStateKind, separation: float) -> float:
        numeric = self.spec.numeric
        if numeric is not None and numeric.sigma is not None:
            return numeric.sigma
        if state_kind == InitialStateKind.SHUTTER:
            return derived_kinematics(self.particle).lambda_b / 10.0
        return separation / 20.0

    def spacing(self) -> Optional[float]:
        return self.spec.numeric.spacing if self.spec.numeric is not None else None


def _slit_state(ctx: _Context) -> InitialStateSpec:
    cfg = ctx.spec.config
    if isinstance(cfg, TimeSlitConfig):
        separation = cfg.separation(ctx.particle)
        kind = InitialStateKind.TIME_DOUBLE_SLIT
        return InitialStateSpec(
            kind=kind,
            particle=ctx.particle,
            sigma=ctx.numeric_sigma(kind, separation),
            tau=cfg.tau,
            phi=cfg.phi,
            alpha=cfg.alpha,
        )
    assert isinstance(cfg, SpaceSlitConfig)
    kind = (
        InitialStateKind.WEIGHTED_DOUBLE_SLIT
        if ctx.spec.kind == ExperimentKind.WEIGHTED_SLIT
        else InitialStateKind.SPACE_DOUBLE_SLIT
    )
    return InitialStateSpec(
        kind=kind,
        particle=ctx.particle,
        sigma=ctx.numeric_sigma(kind, cfg.a),
        a=cfg.a,
        phi=cfg.phi,
        alpha=cfg.alpha,
    )


def _transient_fringes(ctx: _Context, state: InitialStateSpec, position: float, t: np.ndarray) -> np.ndarray:
    grid = Grid1D.for_state(state, float(t[-1]), observe=[position], spacing=ctx.spacing())
    components = make_initial_components(state, grid)
    probes = [probe(c, position, t, ctx.particle).values[:, 0] for c in components]
    return fringe_factor(probes)


def _spectral_fringes(ctx: _Context, state: InitialStateSpec, p: np.ndarray) -> np.ndarray:
    # zero padding to 32 separations each side gives ~64 samples per fringe
    reach = 32.0 * state.separation()
    grid = Grid1D.for_state(state, 0.0, observe=[-reach, reach], spacing=ctx.spacing())
    components = make_initial_components(state, grid)
    spectra = [spectrum(c) for c in components]
    momenta = spectra[0][0]
    factor = fringe_factor([s[1] for s in spectra])
    return np.interp(p, momenta, factor)


def _periods_summary(ctx: _Context, series: Series) -> None:
    try:
        periods = extract_oscillation_periods(series)
    except InsufficientOscillationsError:
        return
    exponent, prefactor = fit_period_growth(periods)
    ctx.summary["crossings"] = int(periods.crossings.size)
    ctx.summary["first_half_period_fs"] = float(periods.intervals[0])
    ctx.summary["fitted_exponent"] = exponent
    ctx.summary["fitted_half_period_prefactor"] = prefactor


def _run_shutter_ratio(ctx: _Context) -> Tuple[Series, Optional[Series]]:
    z = float(ctx.observation.position)
    t, x, x_label, x_unit = ctx.times()
    arrival = ctx.arrival_time()
    ratio = analytic.shutter_current_ratio(z, t, ctx.particle)
    u_max, ratio_max = shutter_first_maximum()
    ctx.summary.update(
        arrival_time_fs=arrival,
        ratio_at_arrival=float(analytic.shutter_current_ratio(z, arrival, ctx.particle)),
        first_maximum_fresnel_argument=u_max,
        first_maximum_ratio=ratio_max,
    )
    series = Series(x, ratio, x_label, x_unit, "ratio", "1")
    if ctx.spec.numeric is None:
        return series, None

    state = InitialStateSpec.shutter(ctx.particle, float(t[-1]), sigma=ctx.spec.numeric.sigma)
    grid = Grid1D.for_state(state, float(t[-1]), observe=[z], spacing=ctx.spacing())
    field_ = make_initial_state(state, grid)
    sampled = probe(field_, z, t, ctx.particle, gradient=True)
    current = np.imag(np.conj(sampled.values) * sampled.gradient)[:, 0] / ctx.particle.mass_internal
    stationary = float(field_.reference_density) * ctx.particle.p0_internal / ctx.particle.mass_internal
    return series, series.with_y(current / stationary, "ratio_numeric")


def _run_time_transient(ctx: _Context) -> Tuple[Series, Optional[Series]]:
    cfg = ctx.spec.config
    assert isinstance(cfg, TimeSlitConfig)
    z = float(ctx.observation.position)
    t, x, x_label, x_unit = ctx.times()
    relative = analytic.time_slit_spacetime_density(z, t, cfg, ctx.particle).relative
    series = Series(x, relative, x_label, x_unit, "relative_density", "1")
    arrival = ctx.arrival_time()
    ctx.summary["arrival_time_fs"] = arrival
    ctx.summary["period_at_arrival_fs"] = float(analytic.time_slit_period(z, arrival, cfg, ctx.particle))
    _periods_summary(ctx, Series(t, relative, "t", "fs", "relative_density"))
    if ctx.spec.numeric is None:
        return series, None
    fringes = _transient_fringes(ctx, _slit_state(ctx), z, t)
    return series, series.with_y(fringes, "relative_density_numeric")


def _space_detector(ctx: _Context) -> float:
    obs = ctx.observation
    cfg = ctx.spec.config
    assert isinstance(cfg, SpaceSlitConfig)
    if obs.order is not None:
        theta = analytic.space_slit_maxima_angles(obs.order, cfg, ctx.particle)
        return float(obs.distance) * math.tan(theta)
    return float(obs.position)


def _run_space_transient(ctx: _Context) -> Tuple[Series, Optional[Series]]:
    cfg = ctx.spec.config
    assert isinstance(cfg, SpaceSlitConfig)
    y = _space_detector(ctx)
    t, x, x_label, x_unit = ctx.times()
    relative = analytic.space_slit_spacetime_density(y, t, cfg, ctx.particle).relative
    series = Series(x, relative, x_label, x_unit, "relative_density", "1")
    ctx.summary["detector_position_nm"] = y
    arrival = ctx.arrival_time()
    if arrival is not None and y != 0:
        ctx.summary["arrival_time_fs"] = arrival
        ctx.summary["period_at_arrival_fs"] = float(analytic.space_slit_period(y, arrival, cfg, ctx.particle))
    _periods_summary(ctx, Series(t, relative, "t", "fs", "relative_density"))
    if ctx.spec.numeric is None:
        return series, None
    fringes = _transient_fringes(ctx, _slit_state(ctx), y, t)
    return series, series.with_y(fringes, "relative_density_numeric")


def _run_space_profile(ctx: _Context) -> Tuple[Series, Optional[Series]]:
    cfg = ctx.spec.config
    assert isinstance(cfg, SpaceSlitConfig)
    y = ctx.abscissa()
    t = ctx.fixed_time()
    relative = analytic.space_slit_spacetime_density(y, t, cfg, ctx.particle).relative
    series = Series(y, relative, "y", "nm", "relative_density", "1")
    ctx.summary["time_fs"] = t
    orders = np.arange(-3, 4)
    ctx.summary["maxima_positions_nm"] = [float(v) for v in analytic.space_slit_maxima_positions(orders, t, cfg, ctx.particle)]
    if ctx.spec.numeric is None:
        return series, None
    state = _slit_state(ctx)
    grid = Grid1D.for_state(state, t, observe=[float(y[0]), float(y[-1])], spacing=ctx.spacing())
    components = [evolve_free(c, t, ctx.particle) for c in make_initial_components(state, grid)]
    factor = fringe_factor(components)
    return series, series.with_y(np.interp(y, grid.x, factor), "relative_density_numeric")


def _run_energy_spectrum(ctx: _Context) -> Tuple[Series, Optional[Series]]:
    cfg = ctx.spec.config
    assert isinstance(cfg, TimeSlitConfig)
    energies = ctx.abscissa()
    if energies[0] < 0:
        raise ScenarioError(f"scenario '{ctx.spec.name}': energies must be >= 0")
    p_internal = np.sqrt(2.0 * ctx.particle.mass_internal * to_internal(energies, "eV"))
    p = from_internal(p_internal, "eV*fs/nm")
    relative = analytic.time_slit_momentum_density(p, cfg, ctx.particle)
    series = Series(energies, relative, "E", "eV", "relative_density", "1")
    peaks = count_peaks(series)
    ctx.summary.update(
        energy_peak_spacing_ev=analytic.energy_peak_spacing(cfg),
        peak_count=peaks.count,
        peak_energies_ev=peaks.positions,
        mean_peak_spacing_ev=float(np.mean(peaks.spacings)) if peaks.spacings else None,
    )
    if ctx.spec.numeric is None:
        return series, None
    return series, series.with_y(_spectral_fringes(ctx, _slit_state(ctx), p), "relative_density_numeric")


def _run_momentum_spectrum(ctx: _Context) -> Tuple[Series, Optional[Series]]:
    cfg = ctx.spec.config
    assert isinstance(cfg, SpaceSlitConfig)
    p = ctx.abscissa()
    relative = analytic.weighted_slit_momentum_density(p, cfg)
    series = Series(p, relative, "p_y", "eV*fs/nm", "relative_density", "1")
    ctx.summary["visibility"] = analytic.fringe_visibility(cfg.alpha)
    if ctx.spec.numeric is None:
        return series, None
    return series, series.with_y(_spectral_fringes(ctx, _slit_state(ctx), p), "relative_density_numeric")


def _run_displacement(ctx: _Context) -> Tuple[Series, Optional[Series]]:
    t, x, x_label, x_unit = ctx.times()
    z = analytic.classical_displacement(t, ctx.particle)
    series = Series(x, z, x_label, x_unit, "z", "nm")
    ctx.summary["v0_nm_per_fs"] = derived_kinematics(ctx.particle).v0
    if ctx.spec.numeric is None:
        return series, None
    # centroid of the regularized pulse pair moves rigidly at v0
    state = _slit_state(ctx)
    grid = Grid1D.for_state(state, float(t[-1]), spacing=ctx.spacing())
    initial = make_initial_state(state, grid)
    centroids = []
    for time in t:
        evolved = evolve_free(initial, float(time), ctx.particle)
        weights = np.abs(evolved.amplitudes) ** 2
        centroids.append(float(np.sum(grid.x * weights) / np.sum(weights)))
    return series, series.with_y(np.asarray(centroids), "z_numeric")


def _run_visibility(ctx: _Context) -> Tuple[Series, Optional[Series]]:
    cfg = ctx.spec.config
    assert isinstance(cfg, SpaceSlitConfig)
    alphas = ctx.abscissa()
    if alphas[0] < 0 or alphas[-1] > 1:
        raise ScenarioError(f"scenario '{ctx.spec.name}': alpha sweep must stay within [0, 1]")
    series = Series(alphas, np.array([analytic.fringe_visibility(a) for a in alphas]), "alpha", "1", "visibility", "1")
    if ctx.spec.numeric is None:
        return series, None
    measured = []
    for alpha in alphas:
        state = _slit_state(ctx).model_copy(update={"alpha": float(alpha)})
        reach = 32.0 * state.separation()
        grid = Grid1D.for_state(state, 0.0, observe=[-reach, reach], spacing=ctx.spacing())
        factor = fringe_factor([spectrum(c)[1] for c in make_initial_components(state, grid)])
        top, bottom = np.nanmax(factor), np.nanmin(factor)
        measured.append((top - bottom) / (top + bottom))
    return series, series.with_y(np.asarray(measured), "visibility_numeric")


_RUNNERS: Dict[ObservableKind, Callable[[_Context], Tuple[Series, Optional[Series]]]] = {
    ObservableKind.SHUTTER_RATIO: _run_shutter_ratio,
    ObservableKind.TIME_TRANSIENT: _run_time_transient,
    ObservableKind.SPACE_TRANSIENT: _run_space_transient,
    ObservableKind.SPACE_PROFILE: _run_space_profile,
    ObservableKind.ENERGY_SPECTRUM: _run_energy_spectrum,
    ObservableKind.MOMENTUM_SPECTRUM: _run_momentum_spectrum,
    ObservableKind.DISPLACEMENT: _run_displacement,
    ObservableKind.VISIBILITY: _run_visibility,
}


def _resolved_parameters(particle: Particle) -> Dict[str, Any]:
    resolved: Dict[str, Any] = {"p0_ev_fs_per_nm": particle.p0, "energy_ev": particle.energy}
    if particle.p0 > 0:
        kin = derived_kinematics(particle)
        resolved.update(v0_nm_per_fs=kin.v0, lambda_b_nm=kin.lambda_b)
    return resolved


def run_scenario(spec: ScenarioSpec) -> ScenarioResult:
    """Evaluate a scenario: the analytic series, the optional numeric oracle and provenance.

    Raises:
        GeometryError, UnderResolvedError, MomentumWindowError: From the
            propagator, with the scenario name prefixed
    """
    particle = spec.particle.to_particle()
    ctx = _Context(spec=spec, particle=particle)
    logger.debug(f"Running scenario '{spec.name}' ({spec.observation.observable.value}, numeric={spec.numeric is not None})")
    try:
        analytic_series, numeric_series = _RUNNERS[spec.observation.observable](ctx)
    except (GeometryError, UnderResolvedError, MomentumWindowError) as exc:
        raise type(exc)(f"scenario '{spec.name}': {exc}") from exc

    events = None
    if spec.events is not None:
        events = accumulate_events(analytic_series, spec.events.n_events, spec.events.seed, spec.events.bins)
        statistic, p_value = chi_square_test(events, analytic_series)
        ctx.summary.update(
            events=spec.events.n_events,
            event_chi_square=statistic,
            event_p_value=p_value,
            event_l1_distance=histogram_l1_distance(events, analytic_series),
            event_bin_edges=[float(v) for v in events.edges],
            event_counts=[int(v) for v in events.counts],
        )

    metadata = {
        "tool": f"slitwave {tool_version()}",
        "scenario": spec.model_dump(mode="json"),
        "resolved": _resolved_parameters(particle),
        "constants": constants_table(),
        "seed": spec.events.seed if spec.events is not None else None,
        "summary": ctx.summary,
    }
    return ScenarioResult(analytic=analytic_series, numeric=numeric_series, metadata=metadata, events=events)
