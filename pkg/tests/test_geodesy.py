import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from geoeval.geodesy import (
    EARTH_RADIUS_KM,
    MAX_DISTANCE_KM,
    MAX_ERROR_KM,
    Coordinate,
    great_circle_distance,
)

coordinates = st.builds(
    Coordinate,
    st.floats(min_value=-90, max_value=90, allow_nan=False),
    st.floats(min_value=-180, max_value=180, allow_nan=False),
)


def test_london_paris():
    # Frozen from an independent spherical-law-of-cosines calculation.
    d = great_circle_distance(Coordinate(51.5074, -0.1278), Coordinate(48.8566, 2.3522))
    assert d == pytest.approx(343.5565, abs=0.05)
    assert d == pytest.approx(343.6, rel=0.005)


def test_identity_is_zero():
    assert great_circle_distance(Coordinate(10, 20), Coordinate(10, 20)) == 0.0


def test_antipodal_on_equator():
    d = great_circle_distance(Coordinate(0, 0), Coordinate(0, 180))
    assert d == pytest.approx(math.pi * EARTH_RADIUS_KM, rel=1e-12)
    assert d == pytest.approx(20015, abs=1.0)
    assert d <= MAX_ERROR_KM


@pytest.mark.parametrize(
    "lat,lon",
    [(91, 0), (-90.01, 0), (0, 180.5), (0, -181), (float("nan"), 0), (0, float("inf"))],
)
def test_invalid_coordinates_rejected(lat, lon):
    with pytest.raises(ValueError):
        Coordinate(lat, lon)


def test_out_of_range_longitude_not_wrapped():
    with pytest.raises(ValueError):
        Coordinate(0, 360)


@given(a=coordinates, b=coordinates)
def test_symmetry_exact(a, b):
    assert great_circle_distance(a, b) == great_circle_distance(b, a)


@given(a=coordinates)
def test_self_distance_zero(a):
    assert great_circle_distance(a, a) == 0.0


@given(a=coordinates, b=coordinates)
def test_bound(a, b):
    assert 0.0 <= great_circle_distance(a, b) <= MAX_DISTANCE_KM + 1e-9


@given(a=coordinates, b=coordinates, c=coordinates)
def test_triangle_inequality(a, b, c):
    assert great_circle_distance(a, c) <= (
        great_circle_distance(a, b) + great_circle_distance(b, c) + 1e-6
    )
