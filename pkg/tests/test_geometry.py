import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from doseline import (
    Box,
    DegenerateSegmentError,
    EmptyQuadratureError,
    HalfBall,
    PreconditionError,
    QuadratureGrid,
    Segment,
    build_grid,
    distance_to_domain,
    sample_segment,
)
from doseline.geometry import segments_disjoint

from conftest import PAPER_BOX

HALF_BALL_VOLUME = 2.0 / 3.0 * np.pi


def test_half_ball_membership():
    hb = HalfBall(1.0)
    pts = np.array([[0, 0, -0.5], [0, 0, 0.5], [0, 0, 0.0], [0.9, 0, -0.5], [0, 0, -0.999]])
    assert hb.contains(pts).tolist() == [True, False, False, False, True]


def test_paper_grid_weights(paper_grid):
    assert paper_grid.size <= 40 * 40 * 20
    np.testing.assert_allclose(paper_grid.weights, 0.05**3, rtol=1e-14)
    assert np.all(HalfBall(1.0).contains(paper_grid.nodes))


def test_full_box_grid():
    box = Box((0, 0, 0), (1, 2, 3))
    g = build_grid(box, box.bounding_box, (2, 2, 2))
    assert g.size == 8
    assert g.weights.sum() == pytest.approx(6.0, rel=1e-14)


def test_half_ball_volume(paper_grid):
    assert abs(paper_grid.weights.sum() - HALF_BALL_VOLUME) < 0.02 * HALF_BALL_VOLUME


def test_volume_converges_under_refinement():
    errors = [
        abs(build_grid(HalfBall(1.0), PAPER_BOX, (n, n, n // 2)).weights.sum() - HALF_BALL_VOLUME)
        for n in (20, 40, 80)
    ]
    assert errors[0] > errors[1] > errors[2]


def test_weights_bounded_by_box(small_grid):
    assert small_grid.weights.sum() <= np.prod(np.diff(PAPER_BOX, axis=0))


def test_empty_grid_raises():
    tiny = HalfBall(0.01)
    with pytest.raises(EmptyQuadratureError, match="empty quadrature"):
        build_grid(tiny, PAPER_BOX, (2, 2, 2))


@pytest.mark.parametrize("res", [(0, 1, 1), (1, -1, 1)])
def test_bad_resolution(res):
    with pytest.raises(PreconditionError):
        build_grid(HalfBall(1.0), PAPER_BOX, res)


def test_degenerate_bounding_box():
    with pytest.raises(PreconditionError):
        build_grid(HalfBall(1.0), [[0, 0, 0], [1, 1, 0]], (2, 2, 2))


def test_sample_measurement_segment(gamma):
    s = sample_segment(gamma, 20)
    np.testing.assert_allclose(s.points[:, 2], 0.805 + 0.01 * np.arange(20), atol=1e-15)
    np.testing.assert_allclose(s.points[:, :2], 0.0)
    np.testing.assert_allclose(s.line_weights, 0.01, rtol=1e-12)


def test_sample_single_point():
    s = sample_segment(Segment((0, 0, 0), (0, 0, 1)), 1)
    np.testing.assert_array_equal(s.points, [[0, 0, 0.5]])
    assert s.line_weights.tolist() == [1.0]


def test_sample_zero_count():
    with pytest.raises(PreconditionError):
        sample_segment(Segment((0, 0, 0), (0, 0, 1)), 0)


def test_degenerate_segment():
    with pytest.raises(DegenerateSegmentError, match="degenerate segment"):
        Segment((1, 2, 3), (1, 2, 3))


vec = st.tuples(*[st.floats(-10, 10, allow_nan=False)] * 3)


@given(vec, vec, st.integers(1, 50))
def test_sampling_invariants(a, b, count):
    if np.linalg.norm(np.subtract(a, b)) < 1e-3:
        return
    seg = Segment(a, b)
    s = sample_segment(seg, count)
    assert abs(s.line_weights.sum() - seg.length) <= 1e-10 * seg.length
    assert np.all(seg.distance(s.points) < 1e-12 * seg.length + 1e-15)
    # strictly interior: no sample coincides with an endpoint
    for end in (seg.a, seg.b):
        assert np.min(np.linalg.norm(s.points - np.asarray(end), axis=1)) > 0.25 * seg.length / count


def test_distance_far_point(paper_grid):
    assert distance_to_domain([0, 0, 2.0], paper_grid) >= 1.0


def test_distance_at_node(paper_grid):
    assert distance_to_domain(paper_grid.nodes[123], paper_grid) == 0.0


def test_distance_matches_brute_force(paper_grid):
    x = np.array([0.0, 0.0, 0.8])
    brute = np.min(np.linalg.norm(paper_grid.nodes - x, axis=1))
    assert distance_to_domain(x, paper_grid) == pytest.approx(brute, rel=1e-14)
    diag = np.linalg.norm(paper_grid.cell_size)
    assert abs(brute - (0.8 + 0.025)) <= diag


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=6, max_size=6))
def test_distance_is_lipschitz(small_grid, xy):
    x, y = np.array(xy[:3]), np.array(xy[3:])
    dx = distance_to_domain(x, small_grid)
    dy = distance_to_domain(y, small_grid)
    assert abs(dx - dy) <= np.linalg.norm(x - y) + 1e-12


def test_batch_distance(small_grid):
    pts = np.array([[0, 0, 1.0], [0, 0, 2.0]])
    d = distance_to_domain(pts, small_grid)
    assert d.shape == (2,)
    assert d[0] < d[1]


def test_from_nodes_rejects_bad_weights():
    with pytest.raises(ValueError):
        QuadratureGrid.from_nodes([[0, 0, 0]], [0.0])


def test_segments_disjoint():
    a = Segment((0, 0, 0.8), (0, 0, 1.0))
    assert segments_disjoint(a, Segment((0, 0, 0.1), (0, 0, 0.3)))
    assert not segments_disjoint(a, Segment((0, 0, 0.1), (0, 0, 1.0)))
    assert not segments_disjoint(a, Segment((0, 0, 0.9), (1, 0, 0.9)))
    assert segments_disjoint(a, Segment((1, 0, 0.9), (2, 0, 0.9)))
