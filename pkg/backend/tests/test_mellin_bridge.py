from fractions import Fraction

import mpmath
import numpy as np
import pytest

from app.core import linalg
from app.core.errors import NotClosedError, OutsideStripError
from app.core.holo_complex import IndicialInput
from app.core.mellin_bridge import (
    LogSection,
    StripConfig,
    mellin_factor,
    mellin_inverse,
    mellin_singular,
    model_operator,
    sigma_star,
    strip_pairing,
    theta_diagram,
    theta_iso,
)
from app.core.scalar_series import I_UNIT, ONE, ZERO, ExactScalar, as_scalar


def indicial(bP, Lam, gamma="1/2"):
    return IndicialInput([linalg.to_matrix(bP)], [linalg.to_matrix(Lam)], Fraction(gamma))


def to_complex(s):
    return complex(float(s.re), float(s.im))


@pytest.mark.parametrize("k", range(5))
def test_singular_part_matches_numerical_transform(k):
    # integral over (0, 1) of x^{-i sigma} log^k x dx/x, convergent for Im sigma > 0
    sigma = mpmath.mpc(mpmath.mpf(1) / 3, 2)
    value = mpmath.quad(lambda x: mpmath.power(x, -1j * sigma - 1) * mpmath.log(x) ** k, [0, 1])
    expected = to_complex(mellin_factor(k)) / complex(sigma) ** (k + 1)
    assert abs(complex(value) - expected) < 1e-10


def test_mellin_factors():
    assert mellin_factor(0) == I_UNIT
    assert mellin_factor(1) == ONE
    assert mellin_factor(2) == -2 * I_UNIT
    assert mellin_factor(3) == as_scalar(-6)


def test_mellin_singular_of_simple_sections():
    u = LogSection.from_lists("1/3", [["1"], ["2"]])
    p = mellin_singular(u)
    assert p.center == as_scalar("1/3")
    assert p.coeffs[0][0, 0] == I_UNIT
    assert p.coeffs[1][0, 0] == 2


def test_zero_section_has_no_singular_part():
    u = LogSection.from_lists(0, [["0", "0"]])
    assert u.is_zero and u.log_degree == -1
    assert mellin_singular(u).is_zero


def test_mellin_inverse_recovers_the_section():
    u = LogSection.from_lists("1/2*i", [["1", "i"], ["0", "3"], ["-2", "0"]])
    back = mellin_inverse(mellin_singular(u))
    assert back.exponent == u.exponent
    assert len(back.coeffs) == 3
    assert all(linalg.equal(a, b) for a, b in zip(back.coeffs, u.coeffs))


def test_theta_iso_shifts_by_i_per_degree():
    u = LogSection.from_lists("1/4", [["1"]])
    assert theta_iso(u, 0, 0).center == as_scalar("1/4")
    assert theta_iso(u, 0, 1).center == as_scalar("1/4") - I_UNIT
    assert theta_iso(u, 2, 1).center == as_scalar("1/4") + I_UNIT


def test_model_operator_on_log_section():
    u = LogSection.from_lists(0, [["0"], ["1"]])
    out = model_operator(linalg.to_matrix([["0"]]), linalg.to_matrix([["1"]]), u)
    assert out.exponent == I_UNIT
    assert out.coeffs[0][0, 0] == -I_UNIT
    assert out.log_degree == 0


@pytest.mark.parametrize(
    "bP, coeffs",
    [
        ([["0"]], [["0"], ["1"]]),
        ([["1"]], [["2"], ["3"]]),
        ([["1/2"]], [["i"], ["0"], ["1"]]),
    ],
)
def test_theta_intertwines_model_operator(bP, coeffs):
    inp = indicial(bP, [["1"]])
    assert theta_diagram(inp, 0, LogSection.from_lists(0, coeffs))


def test_sigma_star():
    assert sigma_star("1/3+1/5*i", "1/2") == as_scalar("1/3-1/5*i")
    assert sigma_star("3/10+9/10*i", 1) == as_scalar("3/10+1/10*i")
    s = as_scalar("2/7-1/3*i")
    assert sigma_star(sigma_star(s, "3/4"), "3/4") == s


def test_strip_membership():
    cfg = StripConfig(Fraction(1, 2), [ZERO, as_scalar("1/4*i")])
    cfg.validate()
    assert not cfg.contains(as_scalar("1/2*i"))
    assert not cfg.contains(as_scalar("-1/2*i"))
    with pytest.raises(OutsideStripError):
        StripConfig(Fraction(1, 2), [I_UNIT]).validate()


def test_strip_pairing_of_e1_model():
    inp = indicial([["0"]], [["1"]])
    cfg = StripConfig(Fraction(1, 2), [ZERO])
    u = LogSection.from_lists(0, [["1"]])
    report = strip_pairing(inp, cfg, [u], [u])
    assert report.total == I_UNIT
    assert report.matched == [[0, 0]]


def test_unmatched_points_contribute_nothing():
    inp = indicial([["0", "0"], ["0", "-1/4"]], [["1", "0"], ["0", "1"]])
    cfg = StripConfig(Fraction(1, 2), [ZERO, as_scalar("1/4")])
    u = LogSection.from_lists(0, [["1", "0"]])
    v = LogSection.from_lists("1/4", [["0", "1"]])
    report = strip_pairing(inp, cfg, [u], [v])
    assert report.total == ZERO
    assert report.matched == []


def test_strip_pairing_sums_over_points():
    inp = indicial([["0", "0"], ["0", "-1/4"]], [["1", "0"], ["0", "1"]])
    cfg = StripConfig(Fraction(1, 2), [ZERO, as_scalar("1/4")])
    sections = [LogSection.from_lists(0, [["1", "0"]]), LogSection.from_lists("1/4", [["0", "1"]])]
    report = strip_pairing(inp, cfg, sections, sections)
    assert report.total == 2 * I_UNIT
    assert linalg.equal(report.matrix, linalg.to_matrix([["i", "0"], ["0", "i"]]))
    assert report.matched == [[0, 0], [1, 1]]
    assert report.to_dict()["total"] == str(2 * I_UNIT)


def test_strip_pairing_rejects_open_data():
    inp = indicial([["0"]], [["1"]])
    cfg = StripConfig(Fraction(1, 2), [ZERO])
    closed = LogSection.from_lists(0, [["1"]])
    with pytest.raises(NotClosedError):
        strip_pairing(inp, cfg, [LogSection.from_lists(0, [["0"], ["1"]])], [closed])


def test_strip_pairing_needs_configured_points():
    inp = indicial([["0"]], [["1"]])
    cfg = StripConfig(Fraction(1, 2), [ZERO])
    u = LogSection.from_lists("1/4", [["1"]])
    with pytest.raises(OutsideStripError):
        strip_pairing(inp, cfg, [u], [])


STRIP_POINTS = [
    ("1", "1/3+3/4*i"),
    ("1", "-2+1/2*i"),
    ("1", "5/2+1/10*i"),
    ("1", "9/10*i"),
    ("3/4", "1/2*i"),
    ("3/4", "1-1/5*i"),
    ("3/4", "3"),
    ("3/4", "-1/2+2/3*i"),
    ("1/3", "0"),
    ("1/3", "-1/2*i"),
    ("1/3", "1/4+1/5*i"),
    ("1/3", "-3-1/3*i"),
    ("2/3", "1/2+1/2*i"),
    ("2/3", "-1/4*i"),
    ("2/3", "2"),
    ("0", "-1/2*i"),
    ("0", "1-9/10*i"),
    ("0", "-1/7-1/3*i"),
    ("3/2", "i"),
    ("3/2", "1/3+5/4*i"),
]


@pytest.mark.parametrize("gamma, point", STRIP_POINTS)
def test_strip_pairing_of_shifted_scalar_model(gamma, point):
    sigma0 = as_scalar(point)
    inp = indicial([[-sigma0]], [["1"]], gamma)
    cfg = StripConfig(Fraction(gamma), [sigma0])
    partner = sigma_star(sigma0, gamma)
    assert cfg.contains(partner)
    u = LogSection.from_lists(sigma0, [["1"]])
    v = LogSection.from_lists(partner, [["1"]])
    report = strip_pairing(inp, cfg, [u], [v])
    assert report.total == I_UNIT
    assert report.matched == [[0, 0]]


JORDAN_STRIP_POINTS = [("1", "1/3+3/4*i"), ("3/4", "1/2*i"), ("1/3", "-1/2*i"), ("0", "2-1/4*i")]


@pytest.mark.parametrize("gamma, point", JORDAN_STRIP_POINTS)
def test_strip_pairing_with_log_sections(gamma, point):
    # A(sigma) = (sigma - sigma0) I + N with N nilpotent; its kernel holds one log x section
    sigma0 = as_scalar(point)
    inp = indicial([[-sigma0, "1"], ["0", -sigma0]], [["1", "0"], ["0", "1"]], gamma)
    cfg = StripConfig(Fraction(gamma), [sigma0])
    partner = sigma_star(sigma0, gamma)
    with_log = LogSection.from_lists(sigma0, [["0", "i"], ["1", "0"]])
    plain = LogSection.from_lists(sigma0, [["-i", "0"]])
    assert with_log.log_degree == 1
    adjoint_log = LogSection.from_lists(partner, [["i", "0"], ["0", "1"]])
    adjoint_plain = LogSection.from_lists(partner, [["0", "-i"]])
    report = strip_pairing(inp, cfg, [with_log, plain], [adjoint_log, adjoint_plain])
    assert linalg.equal(report.matrix, linalg.to_matrix([["0", "-i"], ["-i", "0"]]))
    assert report.total == -2 * I_UNIT
    assert report.matched == [[0, 0], [0, 1], [1, 0], [1, 1]]


@pytest.mark.parametrize("gamma", ["1", "3/4", "1/3", "0"])
def test_strip_pairing_sums_over_shifted_points(gamma):
    lower = Fraction(gamma) - 1
    first = ExactScalar(Fraction(1, 5), lower + Fraction(1, 4))
    second = ExactScalar(Fraction(-1), lower + Fraction(2, 3))
    inp = indicial([[-first, "0"], ["0", -second]], [["1", "0"], ["0", "1"]], gamma)
    cfg = StripConfig(Fraction(gamma), [first, second])
    us = [LogSection.from_lists(first, [["1", "0"]]), LogSection.from_lists(second, [["0", "1"]])]
    vs = [
        LogSection.from_lists(sigma_star(first, gamma), [["1", "0"]]),
        LogSection.from_lists(sigma_star(second, gamma), [["0", "1"]]),
    ]
    report = strip_pairing(inp, cfg, us, vs)
    assert report.total == 2 * I_UNIT
    assert report.matched == [[0, 0], [1, 1]]
    unmatched = strip_pairing(inp, cfg, us[:1], vs[1:])
    assert unmatched.total == ZERO and unmatched.matched == []


@pytest.mark.parametrize("seed", range(100))
def test_sigma_star_is_a_reflection(seed):
    rng = np.random.default_rng(seed)
    gamma = Fraction(int(rng.integers(-4, 9)), int(rng.integers(1, 5)))
    s = ExactScalar(
        Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, 7))),
        Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, 7))),
    )
    image = sigma_star(s, gamma)
    assert sigma_star(image, gamma) == s
    assert image.re == s.re
    assert (image.im + s.im) / 2 == gamma - Fraction(1, 2)
    cfg = StripConfig(gamma)
    assert cfg.contains(image) == cfg.contains(s)
