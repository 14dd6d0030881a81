"""
Data series and the output records written by the CLI.

CSV layout::

    # tool: "slitwave 0.1"
    # scenario: {...}
    t/T[1],ratio[1]
    0.20000000000000001,0.0034...

Every provenance line is ``# key: <json>``; the header row names each column
as ``name[unit]``; numbers are printed with 17 significant digits so that a
parsed file reproduces the in-memory values bit for bit.
"""

import csv
import io
import json
import re
from dataclasses import dataclass, field
from importlib.metadata import PackageNotFoundError, version
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.signal import find_peaks

_HEADER_RE = re.compile(r"^(?P<name>.+)\[(?P<unit>[^\[\]]*)\]$")


def tool_version() -> str:
    """Installed distribution version, recorded in every output's provenance."""
    try:
        return version("slitwave")
    except PackageNotFoundError:
        # running from a source checkout
        return "0.1"


@dataclass(frozen=True)
class Series:
    """A sampled curve y(x) with labels and units."""
    x: np.ndarray
    y: np.ndarray
    x_label: str
    x_unit: str
    y_label: str
    y_unit: str = "1"

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y)
        if x.ndim != 1 or y.shape != x.shape:
            raise ValueError(f"Series '{self.y_label}' needs 1-D x and y of equal length, got {x.shape} and {y.shape}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return len(self.x)

    def with_y(self, y: Any, label: Optional[str] = None) -> "Series":
        """Same abscissa, new ordinate."""
        return Series(self.x, np.asarray(y), self.x_label, self.x_unit, label or self.y_label, self.y_unit)

    def peak_normalized(self) -> "Series":
        """Scaled so that max(y) = 1; an all-zero series is returned unchanged."""
        peak = float(np.max(np.abs(self.y))) if len(self.y) else 0.0
        if peak == 0.0:
            return self
        return self.with_y(self.y / peak)


def _format(value: Any) -> str:
    return format(float(value), ".17g")


@dataclass
class OutputRecord:
    """Columns plus the provenance needed to regenerate them."""
    header: List[str]
    rows: np.ndarray
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim == 1:
            rows = rows.reshape(-1, len(self.header))
        if rows.shape[1] != len(self.header):
            raise ValueError(f"Record has {len(self.header)} columns in the header but rows of width {rows.shape[1]}")
        self.rows = rows

    @property
    def columns(self) -> Dict[str, np.ndarray]:
        """Column name (without unit) -> values."""
        return {split_header(name)[0]: self.rows[:, i] for i, name in enumerate(self.header)}

    @classmethod
    def from_series(cls, series: List[Series], provenance: Dict[str, Any]) -> "OutputRecord":
        """Build a record from series sharing one abscissa."""
        if not series:
            raise ValueError("OutputRecord needs at least one series")
        first = series[0]
        for other in series[1:]:
            if len(other.x) != len(first.x) or not np.array_equal(other.x, first.x):
                raise ValueError(f"Series '{other.y_label}' does not share the abscissa of '{first.y_label}'")
        header = [f"{first.x_label}[{first.x_unit}]"] + [f"{s.y_label}[{s.y_unit}]" for s in series]
        rows = np.column_stack([first.x] + [np.real(s.y) for s in series])
        return cls(header=header, rows=rows, provenance=provenance)

    @classmethod
    def from_result(cls, result: Any) -> "OutputRecord":
        """Build a record from a ``ScenarioResult``."""
        series = [result.analytic]
        if result.numeric is not None:
            series.append(result.numeric)
        return cls.from_series(series, dict(result.metadata))

    def to_csv(self) -> str:
        buffer = io.StringIO()
        for key, value in self.provenance.items():
            buffer.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.header)
        for row in self.rows:
            writer.writerow([_format(v) for v in row])
        return buffer.getvalue()

    def to_json(self) -> str:
        payload = {
            "meta": self.provenance,
            "series": {name: [float(v) for v in self.rows[:, i]] for i, name in enumerate(self.header)},
        }
        return json.dumps(payload, indent=2)

    @classmethod
    def read_csv(cls, text: str) -> "OutputRecord":
        """Parse text written by ``to_csv``.

        Raises:
            ValueError: If the header row is missing or a provenance line is malformed
        """
        provenance: Dict[str, Any] = {}
        body: List[str] = []
        for line in text.splitlines():
            if line.startswith("#"):
                key, sep, value = line[1:].strip().partition(":")
                if not sep:
                    raise ValueError(f"Malformed provenance line: {line!r}")
                provenance[key.strip()] = json.loads(value)
            elif line.strip():
                body.append(line)
        if not body:
            raise ValueError("CSV has no header row")
        reader = csv.reader(body)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader]
        return cls(header=header, rows=np.array(rows, dtype=float).reshape(-1, len(header)), provenance=provenance)

    @classmethod
    def read_json(cls, text: str) -> "OutputRecord":
        payload = json.loads(text)
        header = list(payload["series"].keys())
        rows = np.column_stack([np.asarray(payload["series"][h], dtype=float) for h in header])
        return cls(header=header, rows=rows, provenance=payload.get("meta", {}))


def _start_peak(x: np.ndarray, values: np.ndarray, threshold: float) -> Optional[float]:
    # a maximum whose parabola vertex rounds to the first sample
    left, mid, right = values[0], values[1], values[2]
    curvature = left - 2.0 * mid + right
    if left < mid or curvature >= 0:
        return None
    offset = 0.5 * (3.0 * left - 4.0 * mid + right) / curvature
    if abs(offset) > 0.5:
        return None
    higher = np.nonzero(values > left)[0]
    stop = int(higher[0]) if higher.size else values.size
    if left - float(np.min(values[:stop])) < threshold:
        return None
    return float(x[0] + max(offset, 0.0) * (x[1] - x[0]))


def locate_peaks(x: np.ndarray, y: np.ndarray, min_prominence: float, include_start: bool = False) -> np.ndarray:
    """Positions of the local maxima of y(x), refined by a three-point parabola.

    Args:
        x: Uniformly or smoothly spaced abscissa
        y: Ordinate; non-finite samples are replaced by the smallest finite value
        min_prominence: Required prominence as a fraction of max(y)
        include_start: Also report a maximum sitting on the first sample, so
            that peaks are counted over the half-open window [x[0], x[-1])

    Returns:
        Sorted array of peak positions (possibly empty)
    """
    values = np.asarray(y, dtype=float)
    finite = np.isfinite(values)
    if values.size < 3 or not finite.any():
        return np.empty(0)
    top = float(np.max(values[finite]))
    if top <= 0.0:
        return np.empty(0)
    values = np.where(finite, values, np.min(values[finite]))
    indices, _ = find_peaks(values, prominence=min_prominence * top)
    positions = []
    if include_start:
        start = _start_peak(x, values, min_prominence * top)
        if start is not None:
            positions.append(start)
    for i in indices:
        left, mid, right = values[i - 1], values[i], values[i + 1]
        curvature = left - 2.0 * mid + right
        offset = 0.5 * (left - right) / curvature if curvature < 0 else 0.0
        # offset is in samples; map it through the local spacing
        step = x[i + 1] - x[i] if offset >= 0 else x[i] - x[i - 1]
        positions.append(x[i] + offset * step)
    return np.asarray(positions, dtype=float)


def split_header(column: str) -> Tuple[str, str]:
    """``"t[fs]"`` -> ``("t", "fs")``; a column without brackets has unit ``""``."""
    match = _HEADER_RE.match(column)
    if not match:
        return column, ""
    return match.group("name"), match.group("unit")
