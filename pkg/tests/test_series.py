"""
Tests for data series, output records and peak location.
"""

import json

import numpy as np
import pytest

from slitwave.series import OutputRecord, Series, locate_peaks, split_header, tool_version


@pytest.fixture
def record():
    x = np.linspace(0.2, 3.0, 15)
    ratio = Series(x, np.sin(x) ** 2 / 3.0, "t/T", "1", "ratio")
    numeric = ratio.with_y(ratio.y * (1.0 + 1e-3), "ratio_numeric")
    provenance = {"tool": f"slitwave {tool_version()}", "scenario": {"name": "demo", "numbers": [0.1, 1e-17]}}
    return OutputRecord.from_series([ratio, numeric], provenance)


def test_series_shape_validation():
    """x and y must be 1-D and of equal length."""
    with pytest.raises(ValueError):
        Series(np.arange(3.0), np.arange(4.0), "x", "nm", "y")


def test_peak_normalized():
    """peak_normalized scales to max 1 and leaves a zero series alone."""
    series = Series(np.arange(3.0), np.array([0.5, 2.0, 1.0]), "x", "nm", "y")
    assert np.allclose(series.peak_normalized().y, [0.25, 1.0, 0.5])
    zero = series.with_y(np.zeros(3))
    assert zero.peak_normalized() is zero


def test_record_header_and_columns(record):
    """Columns are named name[unit] and keyed by name."""
    assert record.header == ["t/T[1]", "ratio[1]", "ratio_numeric[1]"]
    assert set(record.columns) == {"t/T", "ratio", "ratio_numeric"}


def test_record_rejects_different_abscissae():
    """Series in one record must share their abscissa."""
    a = Series(np.arange(3.0), np.zeros(3), "x", "nm", "a")
    b = Series(np.arange(3.0) + 1.0, np.zeros(3), "x", "nm", "b")
    with pytest.raises(ValueError):
        OutputRecord.from_series([a, b], {})


def test_csv_layout(record):
    """Provenance lines come first, then the header row and full-precision numbers."""
    lines = record.to_csv().splitlines()
    assert lines[0].startswith("# tool: ")
    assert lines[1].startswith("# scenario: ")
    assert lines[2] == "t/T[1],ratio[1],ratio_numeric[1]"
    assert len(lines) == 3 + 15
    first_value = lines[3].split(",")[0]
    assert float(first_value) == 0.2


def test_csv_round_trip_is_exact(record):
    """Parsing an emitted CSV recovers every value and the provenance."""
    parsed = OutputRecord.read_csv(record.to_csv())
    assert parsed.header == record.header
    assert np.array_equal(parsed.rows, record.rows), "17 significant digits should round-trip exactly"
    assert parsed.provenance == record.provenance


def test_json_round_trip(record):
    """JSON output has meta and series keys and parses back."""
    payload = json.loads(record.to_json())
    assert set(payload) == {"meta", "series"}
    assert list(payload["series"]) == record.header
    parsed = OutputRecord.read_json(record.to_json())
    assert np.array_equal(parsed.rows, record.rows)


def test_read_csv_errors():
    """Missing header rows and malformed provenance lines are rejected."""
    with pytest.raises(ValueError):
        OutputRecord.read_csv("# tool: \"x\"\n")
    with pytest.raises(ValueError):
        OutputRecord.read_csv("# no separator here\nx[1]\n1\n")


def test_locate_peaks_refines_between_samples():
    """Parabolic refinement places cos^2 maxima between the samples."""
    x = np.linspace(0.0, 10.0, 401)
    y = np.cos(np.pi * (x - 0.013)) ** 2
    peaks = locate_peaks(x, y, 0.1)
    expected = np.arange(1, 10) + 0.013
    assert peaks.size == expected.size
    assert np.max(np.abs(peaks - expected)) < 1e-3


def test_locate_peaks_start_sample():
    """A maximum on the first sample is reported only on request."""
    x = np.linspace(0.0, 7.0, 2001)
    y = np.cos(np.pi * x) ** 2
    assert locate_peaks(x, y, 0.1).size == 6
    with_start = locate_peaks(x, y, 0.1, include_start=True)
    assert with_start.size == 7
    assert with_start[0] == pytest.approx(0.0, abs=1e-3)
    falling = np.cos(np.pi * (x + 0.3)) ** 2
    assert locate_peaks(x, falling, 0.1, include_start=True).size == 7


def test_locate_peaks_ignores_non_finite_and_flat():
    """NaN samples are tolerated; a flat or empty series has no peaks."""
    x = np.linspace(0.0, 4.0, 201)
    y = np.cos(np.pi * x) ** 2
    y[:20] = np.nan
    assert locate_peaks(x, y, 0.1).size == 3
    assert locate_peaks(x, np.ones_like(x), 0.1).size == 0
    assert locate_peaks(x, np.full_like(x, np.nan), 0.1).size == 0


@pytest.mark.parametrize(
    "column,expected",
    [("t[fs]", ("t", "fs")), ("p_y[eV*fs/nm]", ("p_y", "eV*fs/nm")), ("plain", ("plain", ""))],
)
def test_split_header(column, expected):
    assert split_header(column) == expected
