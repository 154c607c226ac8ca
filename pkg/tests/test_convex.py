import itertools
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from strategies import bodies, body_pairs, points
from svbsde.convex import (
    ConvexBody,
    DimensionError,
    body_norm,
    contains,
    direction_grid,
    directed_hausdorff,
    geometric_difference,
    hausdorff_distance,
    hukuhara_difference,
    is_translate,
    minkowski_sum,
    point_distance,
    scale,
    support,
    translate,
    weighted_minkowski_average,
)
from svbsde.oracles import hausdorff_by_grid

TRIANGLE = ConvexBody([[0, 0], [1, 0], [0, 1]])


def square(side, center=(0.0, 0.0)):
    return ConvexBody.box(center, [side / 2, side / 2])


# --- support -------------------------------------------------------------


def test_support_interval_right_endpoint():
    assert support(ConvexBody.interval(-2, 3), [1.0]) == 3


def test_support_square_axis():
    assert support(square(2), [1.0, 0.0]) == 1


def test_support_triangle_diagonal():
    w = np.array([1.0, 1.0]) / math.sqrt(2)
    expected = max(float(w @ v) for v in [[0, 0], [1, 0], [0, 1]])
    assert support(TRIANGLE, w) == pytest.approx(expected, abs=1e-15)
    assert expected == pytest.approx(1 / math.sqrt(2))


def test_support_stack_of_directions():
    w = direction_grid(2, 8)
    assert support(square(2), w).shape == (8,)


# --- minkowski sum -------------------------------------------------------


def test_minkowski_intervals():
    assert minkowski_sum(ConvexBody.interval(0, 1), ConvexBody.interval(2, 5)) == ConvexBody.interval(2, 6)


def test_minkowski_squares_homothety():
    assert minkowski_sum(square(2), square(2)) == square(4)


def test_minkowski_triangle_segment_vertex_sums():
    seg = ConvexBody([[0, 0], [1, 0]])
    sums = [np.add(p, q) for p in TRIANGLE.vertices for q in seg.vertices]
    expected = ConvexBody(np.array(sums))
    got = minkowski_sum(TRIANGLE, seg)
    assert got == expected
    assert got.n_vertices == 4


def test_minkowski_dimension_mismatch():
    with pytest.raises(DimensionError):
        minkowski_sum(TRIANGLE, ConvexBody.interval(0, 1))


@given(body_pairs())
def test_minkowski_matches_hull_of_vertex_sums(pair):
    a, b = pair
    brute = ConvexBody(np.array([p + q for p, q in itertools.product(a.vertices, b.vertices)]))
    assert hausdorff_distance(minkowski_sum(a, b), brute) <= 1e-9


@given(body_pairs())
def test_support_is_additive(pair):
    a, b = pair
    w = direction_grid(a.dim, 64)
    np.testing.assert_allclose(support(a + b, w), support(a, w) + support(b, w), atol=1e-9)


@given(body_pairs(3))
def test_minkowski_commutative_associative(triple):
    a, b, c = triple
    assert hausdorff_distance(a + b, b + a) <= 1e-9
    assert hausdorff_distance((a + b) + c, a + (b + c)) <= 1e-9


def test_minkowski_sum_of_sum_with_rounded_vertical_edge():
    # b + c has a vertical edge whose top vertex lands at x = -8.9e-16
    b = ConvexBody([[0, 0], [4.132812, 0]])
    c = ConvexBody([[0, -2], [1.929688, 0], [0, 4]])
    a = ConvexBody.zero(2)
    assert hausdorff_distance((a + b) + c, a + (b + c)) <= 1e-12
    assert hausdorff_distance((b + c) + b, b + (c + b)) <= 1e-12


def test_minkowski_three_dimensional_cubes():
    a = ConvexBody.box([0, 0, 0], [1, 1, 1])
    b = ConvexBody.box([1, 0, 0], [0.5, 0.5, 0.5])
    assert minkowski_sum(a, b) == ConvexBody.box([1, 0, 0], [1.5, 1.5, 1.5])


# --- scale ---------------------------------------------------------------


def test_scale_identity():
    assert scale(1.0, TRIANGLE) == TRIANGLE


def test_scale_reflection():
    assert scale(-1.0, ConvexBody.interval(0, 1)) == ConvexBody.interval(-1, 0)


def test_scale_half_square():
    assert scale(0.5, square(2)) == square(1)


@given(bodies(2), st.floats(-3, 3))
def test_scale_support_identity(a, alpha):
    w = direction_grid(2, 32)
    expected = np.where(alpha >= 0, alpha * support(a, w), -alpha * support(a, -w))
    np.testing.assert_allclose(support(scale(alpha, a), w), expected, atol=1e-9)


# --- hausdorff distance / norm -------------------------------------------


def test_hausdorff_intervals():
    assert hausdorff_distance(ConvexBody.interval(0, 1), ConvexBody.interval(2, 5)) == 4


def test_hausdorff_self():
    assert hausdorff_distance(TRIANGLE, TRIANGLE) == 0


def test_hausdorff_nested_squares():
    # farthest vertex (2, 2) of the big square to the corner (1, 1)
    assert hausdorff_distance(square(2), square(4)) == pytest.approx(math.sqrt(2), abs=1e-12)


@given(body_pairs())
def test_hausdorff_matches_support_grid(pair):
    # the grid misses the maximizing direction by at most pi/720, and support
    # functions are Lipschitz in the direction with constant ||A||
    a, b = pair
    h, g = hausdorff_distance(a, b), hausdorff_by_grid(a, b)
    slop = (body_norm(a) + body_norm(b)) * 2 * math.sin(math.pi / 1440)
    assert g - 1e-9 <= h <= g + slop + 1e-9


@given(body_pairs(3))
def test_hausdorff_metric_axioms(triple):
    a, b, c = triple
    hab = hausdorff_distance(a, b)
    assert hab == pytest.approx(hausdorff_distance(b, a), abs=1e-12)
    assert hab <= hausdorff_distance(a, c) + hausdorff_distance(c, b) + 1e-9


@given(body_pairs())
def test_directed_hausdorff_is_max_point_distance(pair):
    a, b = pair
    brute = max(point_distance(v, b) for v in a.vertices)
    assert directed_hausdorff(a, b) == pytest.approx(brute, abs=1e-12)


def test_norm_examples():
    assert body_norm(ConvexBody.interval(-2, 3)) == 3
    assert body_norm(ConvexBody.zero(2)) == 0
    assert body_norm(TRIANGLE) == pytest.approx(max(np.linalg.norm(v) for v in TRIANGLE.vertices))
    assert body_norm(TRIANGLE) == 1


@given(bodies())
def test_norm_is_distance_to_origin_set(a):
    assert body_norm(a) == pytest.approx(hausdorff_distance(a, ConvexBody.zero(a.dim)), abs=1e-12)


# --- geometric and Hukuhara differences ----------------------------------


def test_geometric_difference_intervals():
    assert geometric_difference(ConvexBody.interval(2, 6), ConvexBody.interval(2, 5)) == ConvexBody.interval(0, 1)
    assert geometric_difference(ConvexBody.interval(0, 1), ConvexBody.interval(0, 2)) is None


def test_geometric_difference_squares():
    assert geometric_difference(square(4), square(2)) == square(2)


def test_geometric_difference_can_be_empty_in_plane():
    assert geometric_difference(square(1), square(2)) is None


@given(body_pairs())
def test_erosion_plus_subtrahend_is_inside(pair):
    a, b = pair
    e = geometric_difference(a, b)
    assume(e is not None)
    assert contains(a, e + b, slack=1e-9 * max(1.0, body_norm(a)))


def test_hukuhara_examples():
    assert hukuhara_difference(ConvexBody.interval(2, 6), ConvexBody.interval(2, 5)) == ConvexBody.interval(0, 1)
    assert hukuhara_difference(TRIANGLE, TRIANGLE) == ConvexBody.zero(2)


def test_hukuhara_rotated_triangle_does_not_exist():
    rotated = ConvexBody(TRIANGLE.vertices @ np.array([[0.0, 1.0], [-1.0, 0.0]]))
    assert hukuhara_difference(TRIANGLE, rotated) is None


def test_hukuhara_fails_on_reconstruction_when_erosion_exists():
    small = scale(0.5, TRIANGLE)
    e = geometric_difference(square(2), small)
    assert e is not None
    assert hausdorff_distance(e + small, square(2)) > 0.1
    assert hukuhara_difference(square(2), small) is None


def test_hukuhara_segment_from_square():
    seg = ConvexBody([[0, 0], [1, 0]])
    sq = square(1, (0.5, 0.5))
    assert hukuhara_difference(sq, seg) == ConvexBody([[0, 0], [0, 1]])


@given(body_pairs())
def test_hukuhara_cancels_sum(pair):
    b, c = pair
    d = hukuhara_difference(b + c, b)
    assert d is not None
    assert hausdorff_distance(d, c) <= 1e-8


@given(body_pairs())
def test_hukuhara_norm_equals_distance(pair):
    b, c = pair
    a = b + c
    assert body_norm(hukuhara_difference(a, b)) == pytest.approx(hausdorff_distance(a, b), abs=1e-8)


@given(bodies(2), points(1, 1, 1).map(lambda p: float(p[0, 0])), st.floats(0, 1))
def test_hukuhara_homothetic(a, shift, s):
    b = translate(scale(s, a), [shift, -shift])
    d = hukuhara_difference(a, b)
    assert d is not None
    assert hausdorff_distance(d, translate(scale(1 - s, a), [-shift, shift])) <= 1e-8


# --- averages ------------------------------------------------------------


def test_weighted_average_intervals():
    got = weighted_minkowski_average([ConvexBody.interval(0, 2), ConvexBody.interval(4, 6)], [0.5, 0.5])
    assert got == ConvexBody.interval(2, 4)


def test_weighted_average_single_body():
    assert weighted_minkowski_average([TRIANGLE], [1.0]) == TRIANGLE


def test_weighted_average_square_and_point():
    got = weighted_minkowski_average([square(4), ConvexBody.point([8, 8])], [0.25, 0.75])
    assert got == square(1, (6, 6))


def test_weighted_average_rejects_bad_weights():
    with pytest.raises(ValueError):
        weighted_minkowski_average([TRIANGLE, TRIANGLE], [0.7, 0.7])


# --- representation ------------------------------------------------------


@given(bodies())
def test_canonical_form_is_idempotent(a):
    again = ConvexBody(a.vertices)
    np.testing.assert_array_equal(again.vertices, a.vertices)


@given(points(2))
def test_vertex_order_does_not_matter(p):
    a = ConvexBody(p)
    b = ConvexBody(p[::-1])
    np.testing.assert_array_equal(a.vertices, b.vertices)


@given(bodies())
def test_dict_round_trip(a):
    b = ConvexBody.from_dict(a.to_dict())
    np.testing.assert_array_equal(a.vertices, b.vertices)


def test_degenerate_hulls():
    assert ConvexBody([[0, 0], [1, 1], [2, 2]]).n_vertices == 2
    assert ConvexBody([[3, 3], [3, 3]]).is_singleton
    assert ConvexBody.interval(2, 2).affine_dim() == 0


def test_from_dict_requires_fields():
    with pytest.raises((KeyError, ValueError)):
        ConvexBody.from_dict({"dim": 1})


@given(bodies(2), st.floats(0, 6.3))
def test_translate_detection(a, angle):
    shifted = translate(a, [math.cos(angle), math.sin(angle)])
    assert is_translate(a, shifted)
