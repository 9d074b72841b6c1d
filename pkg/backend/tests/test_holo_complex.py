from fractions import Fraction

import numpy as np
import pytest

from app.core import linalg
from app.core.errors import CenterMismatchError, DimensionMismatchError, IdentityViolationError
from app.core.germ_cohom import stabilized_cohomology
from app.core.holo_complex import (
    ComplexFamily,
    GaugeProfile,
    IndicialInput,
    adjoint_complex,
    adjoint_map,
    build_indicial,
    check_indicial_input,
    derivative_pair,
    generate_gauge_complex,
    laplacian_family,
    translate_complex,
    validate_complex,
)
from app.core.matrix_series import MapFamily, families_agree, map_mul
from app.core.scalar_series import I_UNIT, ExactScalar, as_scalar


def fam(coeffs, center="0"):
    return MapFamily.build([linalg.to_matrix(c) for c in coeffs], 0, None, center)


def test_two_term_complex_is_valid(e1):
    assert validate_complex(e1) == {"valid": True, "failures": []}


def test_composition_violation_is_located():
    C = ComplexFamily.create([1, 1, 1], [fam([[["0"]], [["1"]]]), fam([[["1"]]])])
    report = validate_complex(C)
    assert not report["valid"]
    assert report["failures"] == [{"q": 0, "exponent": 1, "entry": [0, 0]}]


def test_create_rejects_bad_shapes_and_centers():
    with pytest.raises(DimensionMismatchError):
        ComplexFamily.create([1, 2], [fam([[["1"]]])])
    with pytest.raises(CenterMismatchError):
        ComplexFamily.create([1, 1, 1], [fam([[["1"]]]), fam([[["0"]]], center="1")])
    with pytest.raises(DimensionMismatchError):
        ComplexFamily.create([1, 1], [fam([[["1"]]])], grams=[linalg.to_matrix([["-1"]]), None])


def test_laplacian_of_e1(e1):
    box = laplacian_family(e1, 0)
    assert families_agree(box, fam([[["0"]], [["0"]], [["1"]]]))


def test_laplacian_of_zero_complex():
    C = ComplexFamily.create([2, 2], [MapFamily.zero(2, 2)])
    assert laplacian_family(C, 0).is_zero
    assert laplacian_family(C, 1).is_zero


def test_laplacian_of_jordan(jordan):
    box = laplacian_family(jordan, 0)
    expected = fam([[["0", "0"], ["0", "1"]], [["0", "1"], ["1", "0"]], [["1", "0"], ["0", "1"]]])
    assert families_agree(box, expected)


def test_laplacian_at_complex_center_is_centered_there():
    C = ComplexFamily.create([1, 1], [fam([[["0"]], [["1"]]], center="i")])
    box = laplacian_family(C, 0)
    assert box.center == I_UNIT
    assert families_agree(box, fam([[["0"]], [["0"]], [["1"]]], center="i"))


def test_adjoint_complex(e1, jordan):
    adj = adjoint_complex(jordan)
    assert families_agree(adj.maps[0], fam([[["0", "0"], ["1", "0"]], [["1", "0"], ["0", "1"]]]))
    assert families_agree(adjoint_map(e1, 0), e1.maps[0])
    twice = adjoint_complex(adjoint_complex(jordan))
    assert all(families_agree(a, b) for a, b in zip(twice.maps, jordan.maps))


def test_translate_complex(e1):
    assert translate_complex(e1, 0) is e1
    C = ComplexFamily.create([1, 1], [fam([[["0"]], [["1"]]], center="i")])
    moved = translate_complex(C, "i")
    assert moved.center == 0
    # P_0(sigma + i) = sigma at the origin
    assert families_agree(moved.maps[0], fam([[["0"]], [["1"]]]))
    J = ComplexFamily.create([2, 2], [fam([[["0", "1"], ["0", "0"]], [["1", "0"], ["0", "1"]]], center="1")])
    back = translate_complex(translate_complex(J, "1/2"), "-1/2")
    assert back.center == J.center and families_agree(back.maps[0], J.maps[0])


def test_derivative_pair_anticommutes():
    P0 = fam([[["0"], ["0"]], [["1"], ["0"]], [["0"], ["1"]]])
    P1 = fam([[["0", "0"]], [["0", "-1"]], [["1", "0"]]])
    C = ComplexFamily.create([1, 2, 1], [P0, P1])
    assert validate_complex(C)["valid"]
    T, S = derivative_pair(C)
    assert (P1 @ T[0] + T[1] @ P0).is_zero
    assert (T[1] @ T[0] + P1 @ S[0] + S[1] @ P0).is_zero


def _indicial(bP, Lam, gamma="1/2", anchor=0):
    return IndicialInput(
        [linalg.to_matrix(b) for b in bP], [linalg.to_matrix(l) for l in Lam], Fraction(gamma), anchor
    )


def test_indicial_constant_complex_ignores_gamma():
    for gamma in ("1/2", "1", "3/4"):
        C = build_indicial(_indicial([[["1"]]], [[["0"]]], gamma))
        assert C.maps[0].degree == 0
        assert C.maps[0].coeff(0)[0, 0] == 1


def test_indicial_reduces_to_e1_model():
    C = build_indicial(_indicial([[["0"]]], [[["1"]]]))
    assert families_agree(C.maps[0], fam([[["0"]], [["1"]]]))


def test_indicial_with_invertible_constant_term():
    C = build_indicial(_indicial([[["1"]]], [[["1"]]]))
    assert C.maps[0].coeff(0)[0, 0] == 1
    assert C.maps[0].coeff(1)[0, 0] == 1


def test_indicial_shift_between_degrees():
    # A_1(sigma + i) A_0(sigma) = 0 coefficientwise; bP_1 = 1 breaks it at exponent 1
    inp = _indicial([[["0"]], [["0"]]], [[["1"]], [["0"]]])
    assert check_indicial_input(inp) == []
    C = build_indicial(inp, center="0")
    assert C.maps[1].is_zero
    bad = _indicial([[["0"]], [["1"]]], [[["1"]], [["0"]]])
    problems = check_indicial_input(bad)
    assert problems[0]["q"] == 0 and problems[0]["exponent"] == 1
    with pytest.raises(IdentityViolationError):
        build_indicial(bad)


def test_gauge_single_block_trivial_gauge_is_e1():
    C, truth = generate_gauge_complex(0, GaugeProfile([1, 1], [(0, 1)], trivial_gauge=True))
    assert families_agree(C.maps[0], fam([[["0"]], [["1"]]]))
    assert truth["dims"] == [1, 0]


def test_gauge_without_blocks_has_zero_cohomology():
    C, truth = generate_gauge_complex(3, GaugeProfile([2, 3, 1]))
    assert truth["dims"] == [0, 0, 0]
    assert truth["pads"] == [2, 1]
    assert validate_complex(C)["valid"]


def test_gauge_blocks_add_up():
    C, truth = generate_gauge_complex(7, GaugeProfile([3, 3], [(0, 1), (0, 2)], center=as_scalar("1+i")))
    assert truth["dims"] == [3, 0]
    assert C.center == ExactScalar(1, 1)
    assert validate_complex(C)["valid"]


def test_gauge_profile_must_be_feasible():
    with pytest.raises(DimensionMismatchError):
        generate_gauge_complex(0, GaugeProfile([1, 2], []))


def random_gram(rng, n):
    B = linalg.zeros(n, n)
    for i in range(n):
        for j in range(n):
            B[i, j] = ExactScalar(Fraction(int(rng.integers(-2, 3))), Fraction(int(rng.integers(-2, 3))))
    return linalg.add(linalg.matmul(linalg.conj_transpose(B), B), linalg.identity(n))


PROFILES = [
    GaugeProfile([1, 2, 1], [(0, 1), (1, 2)], gauge_degree=1),
    GaugeProfile([2, 3, 1], [(0, 1), (1, 2)], gauge_degree=1, center=as_scalar("1/2*i")),
    GaugeProfile([1, 2, 1], [(1, 2)], center=as_scalar("-1+i")),
    GaugeProfile([1, 3, 3, 1], [(0, 1), (1, 1), (2, 1)], gauge_degree=1, center=as_scalar("1")),
]


@pytest.mark.parametrize("profile", PROFILES)
@pytest.mark.parametrize("seed", range(3))
def test_laplacian_commutes_with_the_maps(profile, seed):
    C, _ = generate_gauge_complex(seed, profile)
    if seed:
        rng = np.random.default_rng(seed)
        C = ComplexFamily.create(C.dims, C.maps, C.center, [random_gram(rng, n) for n in C.dims])
    for q in range(C.length):
        lhs = map_mul(C.maps[q], laplacian_family(C, q))
        rhs = map_mul(laplacian_family(C, q + 1), C.maps[q])
        assert (lhs - rhs).is_zero


@pytest.mark.parametrize("profile", PROFILES)
@pytest.mark.parametrize("theta", ["1", "1/2-i", "-2*i"])
def test_cohomology_is_translation_invariant(profile, theta):
    C, truth = generate_gauge_complex(5, profile)
    moved = translate_complex(C, theta)
    assert moved.center == C.center - as_scalar(theta)
    dims = [stabilized_cohomology(moved, q).dim for q in range(C.length + 1)]
    assert dims == [stabilized_cohomology(C, q).dim for q in range(C.length + 1)]
    assert dims == truth["dims"]


@pytest.mark.parametrize("profile", PROFILES)
@pytest.mark.parametrize("seed", range(3))
def test_cohomology_is_gauge_invariant(profile, seed):
    C, truth = generate_gauge_complex(seed, profile)
    bare = GaugeProfile(profile.dims, profile.blocks, center=profile.center, trivial_gauge=True)
    plain, _ = generate_gauge_complex(seed, bare)
    dims = [stabilized_cohomology(C, q).dim for q in range(C.length + 1)]
    assert dims == [stabilized_cohomology(plain, q).dim for q in range(C.length + 1)]
    assert dims == truth["dims"]
