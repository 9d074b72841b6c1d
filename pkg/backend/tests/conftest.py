import pytest

from app.core.holo_complex import ComplexFamily
from app.core.matrix_series import MapFamily
from app.core.scalar_series import LaurentSeries


def series(coeffs, valuation=0, order=None, center="0"):
    return LaurentSeries.build(coeffs, valuation, order, center)


def poly_family(coeffs, center="0", shape=None):
    """Exact polynomial family from coefficient matrices of sigma^0, sigma^1, ..."""
    return MapFamily.build(coeffs, 0, None, center, shape)


@pytest.fixture
def e1():
    """0 -> C --sigma--> C -> 0 at the origin."""
    return ComplexFamily.create([1, 1], [poly_family([[["0"]], [["1"]]])])


@pytest.fixture
def sigma_squared():
    return ComplexFamily.create([1, 1], [poly_family([[["0"]], [["0"]], [["1"]]])])


@pytest.fixture
def jordan():
    """P_0 = [[sigma, 1], [0, sigma]]."""
    return ComplexFamily.create([2, 2], [poly_family([[["0", "1"], ["0", "0"]], [["1", "0"], ["0", "1"]]])])


@pytest.fixture
def invertible():
    return ComplexFamily.create([1, 1], [poly_family([[["1"]]])])


@pytest.fixture
def e1_problem():
    return {
        "version": "germcoh/1",
        "complex": {
            "dims": [1, 1],
            "maps": [{"coeffs": [[["0"]], [["1"]]]}],
        },
    }


@pytest.fixture
def jordan_problem():
    return {
        "version": "germcoh/1",
        "complex": {
            "dims": [2, 2],
            "maps": [{"coeffs": [[["0", "1"], ["0", "0"]], [["1", "0"], ["0", "1"]]]}],
        },
    }


@pytest.fixture
def broken_problem():
    """Three-term complex with P_1 P_0 = sigma at exponent 1."""
    return {
        "version": "germcoh/1",
        "complex": {
            "dims": [1, 1, 1],
            "maps": [{"coeffs": [[["0"]], [["1"]]]}, {"coeffs": [[["1"]]]}],
        },
    }


@pytest.fixture
def strip_problem():
    """A_0(sigma) = diag(sigma, sigma - 1/4) with sections at 0 and 1/4."""
    return {
        "version": "germcoh/1",
        "strip": {
            "indicial": {
                "bP": [[["0", "0"], ["0", "-1/4"]]],
                "Lambda": [[["1", "0"], ["0", "1"]]],
                "gamma": "1/2",
            },
            "points": ["0", "1/4"],
            "u": [{"sigma0": "0", "coeffs": [["1", "0"]]}, {"sigma0": "1/4", "coeffs": [["0", "1"]]}],
            "v": [{"sigma0": "0", "coeffs": [["1", "0"]]}, {"sigma0": "1/4", "coeffs": [["0", "1"]]}],
        },
    }


@pytest.fixture
def ibc_problem():
    return {
        "version": "germcoh/1",
        "ibc": {
            "maps": [[["0", "1"], ["0", "0"]]],
            "base": [[["1"], ["0"]], [["1"], ["0"]]],
            "samples": 20,
        },
    }
