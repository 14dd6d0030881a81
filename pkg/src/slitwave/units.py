"""
Physical constants, unit conversions and particle kinematics.

User-facing quantities are expressed in eV, fs and nm. Internally every
formula works in a single system with hbar = 1, electron mass = 1 and a
length unit of 1 nm; the derived energy unit is hbar^2/(m_e nm^2) (about
0.0762 eV) and the time unit is hbar over that energy (about 8.64 fs).
Conversion happens only at the API boundary through ``to_internal`` and
``from_internal``.

Constants are pinned to CODATA values with ten significant digits so that
golden outputs stay bit-stable across scipy releases.
"""

import logging
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .errors import DimensionError, ZeroMomentumError

logger = logging.getLogger(__name__)


# Pinned constants (CODATA 2018; h, c and e are exact in SI)
HBAR_EV_FS = 0.6582119569
PLANCK_EV_FS = 2.0 * math.pi * HBAR_EV_FS
SPEED_OF_LIGHT_NM_PER_FS = 299.792458
ELECTRON_MASS_EV = 510998.9500


class Dimension(Enum):
    """Dimensions this package needs; not a general units library."""
    ENERGY = "energy"
    TIME = "time"
    LENGTH = "length"
    MOMENTUM = "momentum"
    ACTION = "action"
    MASS = "mass"
    VELOCITY = "velocity"
    DIMENSIONLESS = "dimensionless"


@dataclass(frozen=True)
class UnitSystem:
    """The internal unit system and the table of boundary units.

    Every entry in ``units`` maps a unit name to its dimension and to the
    size of one such unit expressed in internal units.
    """
    hbar: float = 1.0
    electron_mass: float = 1.0
    length_nm: float = 1.0
    energy_ev: float = field(init=False)
    time_fs: float = field(init=False)
    momentum_ev_fs_per_nm: float = field(init=False)
    velocity_nm_per_fs: float = field(init=False)
    c: float = field(init=False)
    units: Dict[str, Tuple[Dimension, float]] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        mass_ev_fs2_per_nm2 = ELECTRON_MASS_EV / SPEED_OF_LIGHT_NM_PER_FS**2
        energy_ev = HBAR_EV_FS**2 / (mass_ev_fs2_per_nm2 * self.length_nm**2)
        time_fs = HBAR_EV_FS / energy_ev
        momentum = HBAR_EV_FS / self.length_nm
        velocity = self.length_nm / time_fs
        # frozen dataclass: derived fields are set once here
        object.__setattr__(self, "energy_ev", energy_ev)
        object.__setattr__(self, "time_fs", time_fs)
        object.__setattr__(self, "momentum_ev_fs_per_nm", momentum)
        object.__setattr__(self, "velocity_nm_per_fs", velocity)
        object.__setattr__(self, "c", SPEED_OF_LIGHT_NM_PER_FS / velocity)

        length = 1.0 / self.length_nm
        units: Dict[str, Tuple[Dimension, float]] = {
            "meV": (Dimension.ENERGY, 1e-3 / energy_ev),
            "eV": (Dimension.ENERGY, 1.0 / energy_ev),
            "keV": (Dimension.ENERGY, 1e3 / energy_ev),
            "MeV": (Dimension.ENERGY, 1e6 / energy_ev),
            "as": (Dimension.TIME, 1e-3 / time_fs),
            "fs": (Dimension.TIME, 1.0 / time_fs),
            "ps": (Dimension.TIME, 1e3 / time_fs),
            "ns": (Dimension.TIME, 1e6 / time_fs),
            "s": (Dimension.TIME, 1e15 / time_fs),
            "pm": (Dimension.LENGTH, 1e-3 * length),
            "nm": (Dimension.LENGTH, length),
            "um": (Dimension.LENGTH, 1e3 * length),
            "μm": (Dimension.LENGTH, 1e3 * length),
            "mm": (Dimension.LENGTH, 1e6 * length),
            "m": (Dimension.LENGTH, 1e9 * length),
            "eV*fs/nm": (Dimension.MOMENTUM, 1.0 / momentum),
            "eV*fs": (Dimension.ACTION, self.hbar / HBAR_EV_FS),
            "nm/fs": (Dimension.VELOCITY, 1.0 / velocity),
            "eV/c^2": (Dimension.MASS, self.electron_mass / ELECTRON_MASS_EV),
            "rad": (Dimension.DIMENSIONLESS, 1.0),
            "1": (Dimension.DIMENSIONLESS, 1.0),
        }
        object.__setattr__(self, "units", units)

    def lookup(self, unit: str) -> Tuple[Dimension, float]:
        """Return (dimension, size in internal units) for a unit name."""
        try:
            return self.units[unit]
        except KeyError:
            raise DimensionError(
                f"Unknown unit '{unit}'. Available units: {', '.join(sorted(self.units))}"
            ) from None

    def dimension_of(self, unit: str) -> Dimension:
        """Return the dimension of a unit name."""
        return self.lookup(unit)[0]


UNITS = UnitSystem()


def to_internal(value: Any, unit: str) -> Any:
    """Convert a value (scalar or array) given in ``unit`` to internal units."""
    return value * UNITS.lookup(unit)[1]


def from_internal(value: Any, unit: str) -> Any:
    """Convert an internal value (scalar or array) to ``unit``."""
    return value / UNITS.lookup(unit)[1]


def convert(value: Any, from_unit: str, to_unit: str) -> Any:
    """Convert between two units of the same dimension.

    Args:
        value: Scalar or array in ``from_unit``
        from_unit: Source unit name (e.g. "eV")
        to_unit: Target unit name (e.g. "meV")

    Returns:
        The value expressed in ``to_unit``

    Raises:
        DimensionError: If either unit is unknown or the dimensions differ
    """
    source_dim, source_size = UNITS.lookup(from_unit)
    target_dim, target_size = UNITS.lookup(to_unit)
    if source_dim != target_dim:
        raise DimensionError(
            f"Cannot convert {source_dim.value} ('{from_unit}') to {target_dim.value} ('{to_unit}')"
        )
    return value * source_size / target_size


_QUANTITY_RE = re.compile(
    r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*([A-Za-zμ][A-Za-zμ0-9*/^]*)?\s*$"
)


def parse_quantity(text: str, dimension: Optional[Dimension] = None) -> Tuple[float, str]:
    """Parse a suffixed quantity such as ``0.3eV``, ``120fs`` or ``1626 nm``.

    Bare numbers are accepted only for dimensionless quantities.

    Args:
        text: The quantity as typed by the user
        dimension: Expected dimension, or None to accept any known unit

    Returns:
        Tuple of (value, unit name)

    Raises:
        DimensionError: On malformed input, unknown units, bare numbers for
            dimensional quantities, or a dimension mismatch
    """
    match = _QUANTITY_RE.match(text)
    if not match:
        raise DimensionError(f"Cannot parse quantity '{text}'")
    value = float(match.group(1))
    unit = match.group(2)

    if unit is None:
        if dimension in (None, Dimension.DIMENSIONLESS):
            return value, "1"
        raise DimensionError(
            f"Bare number '{text}' is not accepted for a {dimension.value}; "
            f"add a unit suffix (e.g. {_example_unit(dimension)})"
        )

    found = UNITS.dimension_of(unit)
    if dimension is not None and found != dimension:
        raise DimensionError(
            f"Quantity '{text}' is a {found.value}, expected a {dimension.value}"
        )
    return value, unit


def _example_unit(dimension: Dimension) -> str:
    examples = {
        Dimension.ENERGY: "0.3eV",
        Dimension.TIME: "120fs",
        Dimension.LENGTH: "1626nm",
        Dimension.MOMENTUM: "1.8eV*fs/nm",
        Dimension.MASS: "510998.95eV/c^2",
    }
    return examples.get(dimension, "1.0")


def constants_table() -> Dict[str, Dict[str, Any]]:
    """The pinned constants as embedded in every output's provenance."""
    return {
        "hbar": {"value": HBAR_EV_FS, "unit": "eV*fs"},
        "h": {"value": PLANCK_EV_FS, "unit": "eV*fs"},
        "c": {"value": SPEED_OF_LIGHT_NM_PER_FS, "unit": "nm/fs"},
        "electron_mass": {"value": ELECTRON_MASS_EV, "unit": "eV/c^2"},
        "internal_energy_unit": {"value": UNITS.energy_ev, "unit": "eV"},
        "internal_time_unit": {"value": UNITS.time_fs, "unit": "fs"},
    }


class Particle(BaseModel):
    """A free particle: mass (mc^2 in eV) and central momentum (eV*fs/nm).

    Only the momentum is stored; the kinetic energy E0 = p0^2/2m is derived.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    mass: float = Field(default=ELECTRON_MASS_EV, gt=0.0, json_schema_extra={"unit": "eV/c^2"})
    p0: float = Field(ge=0.0, json_schema_extra={"unit": "eV*fs/nm"})

    @field_validator("mass", "p0")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("must be finite")
        return value

    @classmethod
    def from_energy(cls, energy: float, mass: float = ELECTRON_MASS_EV) -> "Particle":
        """Build a particle from its kinetic energy in eV."""
        if energy < 0:
            raise ValueError(f"Kinetic energy must be >= 0, got {energy} eV")
        mass_int = to_internal(mass, "eV/c^2")
        p0_int = math.sqrt(2.0 * mass_int * to_internal(energy, "eV"))
        return cls(mass=mass, p0=from_internal(p0_int, "eV*fs/nm"))

    @property
    def mass_internal(self) -> float:
        return to_internal(self.mass, "eV/c^2")

    @property
    def p0_internal(self) -> float:
        return to_internal(self.p0, "eV*fs/nm")

    @property
    def energy(self) -> float:
        """Kinetic energy E0 = p0^2/2m in eV."""
        return from_internal(self.p0_internal**2 / (2.0 * self.mass_internal), "eV")


@dataclass(frozen=True)
class Kinematics:
    """Derived kinematics of a particle: v0 (nm/fs), de Broglie wavelength (nm), E0 (eV)."""
    v0: float
    lambda_b: float
    energy: float

    def arrival_time(self, z: float) -> float:
        """Classical arrival time m*Z/p0 (fs) at distance ``z`` (nm)."""
        return z / self.v0


def derived_kinematics(particle: Particle) -> Kinematics:
    """Velocity, de Broglie wavelength and energy of a particle.

    Raises:
        ZeroMomentumError: If p0 = 0 (wavelength and arrival time undefined)
    """
    p0 = particle.p0_internal
    if p0 == 0.0:
        raise ZeroMomentumError(
            "zero-momentum: de Broglie wavelength and arrival time are undefined for p0 = 0"
        )
    v0 = p0 / particle.mass_internal
    lambda_b = 2.0 * math.pi * UNITS.hbar / p0
    return Kinematics(
        v0=from_internal(v0, "nm/fs"),
        lambda_b=from_internal(lambda_b, "nm"),
        energy=particle.energy,
    )
