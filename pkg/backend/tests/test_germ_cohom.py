from fractions import Fraction

import numpy as np
import pytest

from app.core import linalg
from app.core.errors import NotClosedError
from app.core.germ_cohom import (
    PrincipalPart,
    apply_family,
    cohomology_at,
    constant_complex_exact,
    derivative_secondary,
    germ_map_matrix,
    green_pole_order,
    induced_degree1_map,
    representative_normalize,
    smith_oracle_dims,
    spectrum_scan,
    stabilized_cohomology,
)
from app.core.holo_complex import ComplexFamily, GaugeProfile, generate_gauge_complex
from app.core.matrix_series import MapFamily, map_mul
from app.core.scalar_series import ExactScalar, as_scalar


def fam(coeffs, center="0"):
    return MapFamily.build([linalg.to_matrix(c) for c in coeffs], 0, None, center)


def test_toeplitz_matrix_of_sigma():
    A = germ_map_matrix(fam([[["0"]], [["1"]]]), 2, 2)
    assert linalg.equal(A, linalg.to_matrix([["0", "1"], ["0", "0"]]))


def test_toeplitz_matrix_of_identity():
    A = germ_map_matrix(MapFamily.identity(2), 3, 3)
    assert linalg.equal(A, linalg.identity(6))


def test_toeplitz_matrix_of_jordan_at_depth_one():
    A = germ_map_matrix(fam([[["0", "1"], ["0", "0"]], [["1", "0"], ["0", "1"]]]), 1, 1)
    assert linalg.equal(A, linalg.to_matrix([["0", "1"], ["0", "0"]]))


def test_e1_cohomology(e1):
    basis = cohomology_at(e1, 0, 2)
    assert basis.dim == 1
    rep = basis.reps[0]
    assert rep.pole_order == 1
    assert rep.coeffs[0][0, 0] == 1
    assert cohomology_at(e1, 1, 2).dim == 0


def test_zero_maps_make_everything_a_class():
    C = ComplexFamily.create([2, 2, 2], [MapFamily.zero(2, 2), MapFamily.zero(2, 2)])
    for q in range(3):
        assert cohomology_at(C, q, 3).dim == 6


def test_jordan_cohomology(jordan):
    assert cohomology_at(jordan, 0, 2).dim == 2
    assert cohomology_at(jordan, 0, 4).dim == 2
    assert smith_oracle_dims(jordan.maps[0]) == [2, 0]


def test_green_pole_orders(e1, jordan, invertible):
    assert green_pole_order(e1, 0) == 2
    assert green_pole_order(invertible, 0) == 0
    assert green_pole_order(jordan, 0) == 4


def test_stabilized_cohomology(e1, invertible):
    basis = stabilized_cohomology(e1, 0)
    assert basis.dim == 1 and basis.depth == 2
    assert cohomology_at(e1, 0, 3).dim == 1
    for N in (1, 2, 3):
        assert cohomology_at(invertible, 0, N).dim == 0
    assert stabilized_cohomology(invertible, 1).dim == 0


def test_generated_complex_matches_ground_truth():
    C, truth = generate_gauge_complex(11, GaugeProfile([2, 3, 1], [(0, 2), (1, 1)], gauge_degree=1))
    assert [stabilized_cohomology(C, q).dim for q in range(3)] == truth["dims"]


def test_normalize_minimal_representative(e1):
    u = PrincipalPart.from_lists([["3"]], 1)
    result = representative_normalize(e1, 0, u)
    assert result.rep.pole_order == 1
    assert result.rep.coeffs[0][0, 0] == 3


def test_normalize_exact_class_to_zero():
    # P_0 = 1, P_1 = 0: every degree-1 singular part is exact
    C = ComplexFamily.create([1, 1, 1], [fam([[["1"]]]), MapFamily.zero(1, 1)])
    w = PrincipalPart.from_lists([["2"], ["5"]], 1)
    u = apply_family(C.maps[0], w)
    result = representative_normalize(C, 1, u)
    assert result.rep.is_zero
    moved = apply_family(C.maps[0], result.witness)
    assert (moved - (result.rep - u)).is_zero


def test_normalize_zero(e1):
    result = representative_normalize(e1, 0, PrincipalPart.zero(1, 1))
    assert result.rep.is_zero


def test_normalize_rejects_non_cycles(e1):
    with pytest.raises(NotClosedError):
        representative_normalize(e1, 0, PrincipalPart.from_lists([["0"], ["1"]], 1))


def test_spectrum_of_e1(e1):
    scan = spectrum_scan(e1, 0)
    assert scan.spectrum == [ExactScalar()]
    assert scan.candidates[0]["dim"] == 1


def test_spectrum_of_invertible_complex(invertible):
    scan = spectrum_scan(invertible, 0)
    assert scan.spectrum == []
    assert scan.candidates == []


def test_spectrum_follows_translation():
    C = ComplexFamily.create([1, 1], [fam([[["-1-i"]], [["1"]]])])
    scan = spectrum_scan(C, 0)
    assert scan.spectrum == [as_scalar("1+i")]


def test_spectrum_with_given_candidates(e1):
    scan = spectrum_scan(e1, 0, candidates=["0", "1"])
    assert [c["dim"] for c in scan.candidates] == [1, 0]
    assert scan.candidates[0]["sources"] == ["given"]


def test_constant_complex_exactness(e1, invertible):
    assert not constant_complex_exact(e1, 0)
    assert constant_complex_exact(invertible, 0)


def test_zero_family_induces_zero_map(e1):
    induced = induced_degree1_map(e1, [MapFamily.zero(1, 1)])
    assert induced.matrices[0].shape == (0, 1)


def test_zero_complex_induces_the_germ_map_itself():
    C = ComplexFamily.create([1, 1], [MapFamily.zero(1, 1)])
    T = fam([[["0"]], [["1"]]])
    induced = induced_degree1_map(C, [T], depth=2)
    assert [b.dim for b in induced.bases] == [2, 2]
    M = induced.matrices[0]
    assert linalg.rank(M) == 1
    assert linalg.is_zero(linalg.matmul(M, M))


def test_derivative_secondary_squares_to_zero():
    P0 = fam([[["0"], ["0"]], [["1"], ["0"]], [["0"], ["1"]]])
    P1 = fam([[["0", "0"]], [["0", "-1"]], [["1", "0"]]])
    C = ComplexFamily.create([1, 2, 1], [P0, P1])
    induced = derivative_secondary(C, depth=4)
    assert induced.squares_to_zero
    assert len(induced.matrices) == 2


def random_scalar(rng):
    re = Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 3)))
    return ExactScalar(re, Fraction(int(rng.integers(-2, 3))))


def random_matrix(rng, rows, cols):
    M = linalg.zeros(rows, cols)
    for i in range(rows):
        for j in range(cols):
            M[i, j] = random_scalar(rng)
    return M


@pytest.mark.parametrize("seed", range(30))
def test_toeplitz_matrix_matches_series_product(seed):
    rng = np.random.default_rng(seed)
    rows, cols = int(rng.integers(1, 4)), int(rng.integers(1, 4))
    center = random_scalar(rng)
    mats = [random_matrix(rng, rows, cols) for _ in range(int(rng.integers(1, 5)))]
    P = MapFamily.build(mats, 0, None, center, (rows, cols))
    n_in, n_out = int(rng.integers(1, 5)), int(rng.integers(1, 5))
    u = PrincipalPart(center, cols, tuple(random_matrix(rng, cols, 1) for _ in range(n_in)))
    image = linalg.matmul(germ_map_matrix(P, n_in, n_out), u.to_vector(n_in))
    product = PrincipalPart.from_family(map_mul(P, u.as_family()), n_out)
    assert linalg.equal(image, product.to_vector(n_out))
    assert linalg.equal(germ_map_matrix(P, n_in, n_in), germ_map_matrix(P, n_in, n_in + n_out)[: rows * n_in, :])


EXACT_PADS = [[1], [2], [3], [1, 1], [2, 1], [1, 2], [2, 2], [1, 1, 1], [2, 1, 1], [1, 2, 1], [1, 0, 1], [3, 1]]


@pytest.mark.parametrize("pads", EXACT_PADS)
@pytest.mark.parametrize("gauge_degree", [0, 2])
def test_constant_exact_complexes_have_no_germ_cohomology(pads, gauge_degree):
    dims = [a + b for a, b in zip([0] + pads, pads + [0])]
    profile = GaugeProfile(dims, [], gauge_degree=gauge_degree, center=as_scalar("1/2-i"))
    C, truth = generate_gauge_complex(len(pads) * 10 + gauge_degree, profile)
    assert truth["dims"] == [0] * len(dims)
    for q in range(C.length + 1):
        assert constant_complex_exact(C, q)
        assert green_pole_order(C, q) == 0
        assert stabilized_cohomology(C, q).dim == 0
    if gauge_degree == 0:
        assert all(P.degree <= 0 for P in C.maps)


SECONDARY_PROFILES = [
    GaugeProfile([1, 2, 1], [(0, 1), (1, 1)], gauge_degree=1),
    GaugeProfile([1, 2, 1], [(1, 2)], gauge_degree=1),
    GaugeProfile([2, 3, 1], [(0, 1), (1, 2)], gauge_degree=1),
    GaugeProfile([1, 3, 3, 1], [(0, 1), (1, 1), (2, 1)], gauge_degree=1),
    GaugeProfile([2, 2], [(0, 1)], center=as_scalar("i")),
]


@pytest.mark.parametrize("profile", SECONDARY_PROFILES)
@pytest.mark.parametrize("seed", range(2))
def test_derivative_secondary_on_generated_complexes(profile, seed):
    C, truth = generate_gauge_complex(seed, profile)
    induced = derivative_secondary(C)
    assert induced.squares_to_zero
    assert [b.dim for b in induced.bases] == truth["dims"]
    for q, M in enumerate(induced.matrices):
        assert M.shape == (truth["dims"][q + 1], truth["dims"][q])


def test_scan_reports_a_failed_expansion_per_point():
    truncated = MapFamily.build([linalg.to_matrix([["0"]]), linalg.to_matrix([["1"]])], 0, 3, "0")
    C = ComplexFamily.create([1, 1], [truncated])
    scan = spectrum_scan(C, 0, candidates=["1", "2"])
    assert [c["dim"] for c in scan.candidates] == [None, None]
    assert all("exact polynomial" in c["error"] for c in scan.candidates)
    assert scan.spectrum == []
