import numpy as np
import pytest

from ribaucour import discrete as dc
from ribaucour import incidence as inc
from ribaucour import lorentz as lz
from ribaucour.errors import (
    AmbiguousIdenticalCircles,
    CoincidentPoints,
    CurveMeetsSphere,
    InconsistentCube,
    InitialNotOnSphere,
    NetMeetsSphere,
    NotCospherical,
    OrderMismatch,
)
from support import (
    circle_sphere_second,
    complex_cross_ratio,
    concircular_gap,
    point_on,
    random_curve,
    random_far_sphere,
    random_net,
    sphere_distance,
    unit_vector,
)

UNIT = inc.sphere_from_center_radius([0, 0, 0], 1.0)


def circle2(m=8):
    u = np.linspace(0, 2 * np.pi, m, endpoint=False)
    return np.c_[2 * np.cos(u), 2 * np.sin(u), np.zeros(m)]


def test_curve_rejects_repeated_vertices():
    with pytest.raises(CoincidentPoints):
        dc.DiscreteCurve([[0, 0, 0], [0, 0, 0], [1, 0, 0]])
    with pytest.raises(ValueError):
        dc.DiscreteCurve([[0, 0, 0]])


def test_radius_two_circle_onto_unit_sphere():
    x = circle2()
    y = dc.curve_transform_to_sphere(x, UNIT, [1.0, 0, 0])
    assert np.array_equal(y[0], [1, 0, 0])
    for k in range(len(x)):
        assert sphere_distance(y[k], np.zeros(3), 1.0) < 1e-12
    for k in range(len(x) - 1):
        assert concircular_gap(x[k], x[k + 1], y[k + 1], y[k]) < 1e-12
    assert dc.pair_validate(x, y).passed


def test_two_point_curve_matches_parametric_oracle():
    x = np.array([[2.0, 0, 0], [0, 2.0, 0]])
    y = dc.curve_transform_to_sphere(x, UNIT, [1.0, 0, 0])
    expected = circle_sphere_second(x[0], x[1], [1.0, 0, 0], np.zeros(3), 1.0)
    assert np.allclose(y[1], expected, atol=1e-12)


def test_every_step_matches_parametric_oracle(rng):
    for _ in range(10):
        x = random_curve(rng, 10)
        c, r = random_far_sphere(rng)
        y = dc.curve_transform_to_sphere(x, inc.sphere_from_center_radius(c, r), point_on(rng, c, r))
        for k in range(len(x) - 1):
            expected = circle_sphere_second(x[k], x[k + 1], y[k], c, r)
            assert np.linalg.norm(y[k + 1] - expected) < 1e-8 * max(1, np.linalg.norm(expected))


def test_transform_errors():
    x = np.array([[2.0, 0, 0], [1.0, 0, 0], [0, 2.0, 0]])
    with pytest.raises(CurveMeetsSphere) as err:
        dc.curve_transform_to_sphere(x, UNIT, [0, 1.0, 0])
    assert err.value.index == 1
    with pytest.raises(InitialNotOnSphere):
        dc.curve_transform_to_sphere(circle2(), UNIT, [0.5, 0, 0])


def test_pair_validate_cross_ratios_match_oracle(rng):
    x = random_curve(rng, 8)
    c, r = random_far_sphere(rng)
    y = dc.curve_transform_to_sphere(x, inc.sphere_from_center_radius(c, r), point_on(rng, c, r))
    rep = dc.pair_validate(x, y)
    assert rep.passed and rep.failing_edges == []
    for k in range(len(x) - 1):
        expected = complex_cross_ratio(x[k], x[k + 1], y[k + 1], y[k]).real
        assert rep.cross_ratios[k] == pytest.approx(expected, rel=1e-7)


def test_pair_validate_detects_perturbation(rng):
    x = random_curve(rng, 8)
    y = x + 0.1 * rng.normal(size=x.shape)
    rep = dc.pair_validate(x, y)
    assert not rep.passed and rep.failing_edges
    with pytest.raises(CoincidentPoints):
        dc.pair_validate(x, x)
    with pytest.raises(ValueError):
        dc.pair_validate(x, y[:-1])


def test_common_transform_on_unit_sphere(rng):
    a = np.array([unit_vector(rng) for _ in range(10)])
    b = np.array([unit_vector(rng) for _ in range(10)])
    z = dc.common_transform(a, b, UNIT, unit_vector(rng))
    assert dc.pair_validate(a, z).passed and dc.pair_validate(b, z).passed
    assert np.allclose(np.linalg.norm(z.points, axis=1), 1.0)


def test_common_transform_errors(rng):
    a = np.array([unit_vector(rng) for _ in range(5)])
    with pytest.raises(AmbiguousIdenticalCircles) as err:
        dc.common_transform(a, a, UNIT, unit_vector(rng))
    assert err.value.index == 0
    with pytest.raises(NotCospherical):
        dc.common_transform(a, 2.0 * a, UNIT, unit_vector(rng))


def test_interpolation_chain(rng):
    x0, x1 = random_curve(rng, 12), random_curve(rng, 12) + [0.3, 0, 0]
    s = inc.sphere_from_center_radius([0, 0, 0], 4.0)
    initials = [point_on(rng, np.zeros(3), 4.0) for _ in range(3)]
    chain = dc.interpolate_chain(x0, x1, s, initials)
    assert np.array_equal(chain.x0.points, x0) and np.array_equal(chain.x1.points, x1)
    assert all(dc.pair_validate(a, b).passed for a, b in chain.links())


def test_interpolation_errors_carry_stage(rng):
    x0 = random_curve(rng, 12)
    x1 = random_curve(rng, 12)
    x1[4] = [4.0, 0, 0]
    s = inc.sphere_from_center_radius([0, 0, 0], 4.0)
    initials = [point_on(rng, np.zeros(3), 4.0) for _ in range(3)]
    with pytest.raises(CurveMeetsSphere) as err:
        dc.interpolate_chain(x0, x1, s, initials)
    assert err.value.stage == 2
    with pytest.raises(ValueError):
        dc.interpolate_chain(x0, x1[:10], s, initials)


def _cube(points=None):
    corners = {f"{i}{j}{k}": np.array([i, j, k], dtype=float)
               for i in (0, 1) for j in (0, 1) for k in (0, 1)}
    corners.pop("111")
    return corners


def test_miguel_unit_cube():
    assert np.allclose(dc.miguel_eighth(_cube()), [1, 1, 1])


def test_miguel_is_moebius_equivariant(rng):
    for _ in range(5):
        q = lz.random_lorentz(3, rng, scale=0.3)
        corners = {k: lz.transform_points(q, v) for k, v in _cube().items()}
        expected = lz.transform_points(q, np.ones(3))
        assert np.linalg.norm(dc.miguel_eighth(corners) - expected) < 1e-8 * max(1, np.linalg.norm(expected))


def test_miguel_rejects_perturbed_corner():
    corners = _cube()
    corners["110"] = corners["110"] + [0.05, 0, 0.02]
    with pytest.raises(InconsistentCube):
        dc.miguel_eighth(corners)


def test_planar_lattice_net():
    i, j = np.meshgrid(np.arange(5.0), np.arange(5.0), indexing="ij")
    grid = np.stack([i, j, np.full_like(i, 3.0)], axis=-1)
    out = dc.net_transform_to_sphere(grid, UNIT, [0, 0, 1.0])
    assert np.allclose(np.linalg.norm(out.points, axis=2), 1.0)
    assert np.all(dc.quad_residuals(out.points) < 1e-9)
    assert np.all(dc.cell_cosphericity(grid, out) < 1e-9)
    for a in range(4):
        for b in range(4):
            cell = np.concatenate([grid[a:a + 2, b:b + 2].reshape(-1, 3),
                                   out.points[a:a + 2, b:b + 2].reshape(-1, 3)])
            assert inc.cospherical(cell, 2)


def test_random_net_routes_agree(rng):
    grid = random_net(rng)
    out = dc.net_transform_to_sphere(grid, UNIT, unit_vector(rng))
    assert np.max(out.route_mismatch) < 1e-9 * max(1, np.abs(out.points).max())


def test_net_errors():
    i, j = np.meshgrid(np.arange(3.0), np.arange(3.0), indexing="ij")
    grid = np.stack([i, j, np.zeros_like(i)], axis=-1)
    with pytest.raises(NetMeetsSphere):
        dc.net_transform_to_sphere(grid, UNIT, [0, 0, 1.0])
    bad = grid.copy()
    bad[1, 1, 2] = 0.3
    with pytest.raises(ValueError):
        dc.CircularNet(bad)


def test_initial_square_example():
    e1 = inc.plane_from_normal_offset([1.0, 0, 0], 0.0)
    e2 = inc.plane_from_normal_offset([0, 1.0, 0], 0.0)
    sq = dc.initial_square([1.0, 1, 1], e1, e2, [0, 0, 2.0], aux=[1.0, 0, 2])
    assert abs(sq.y10[0]) < 1e-12 and abs(sq.y01[1]) < 1e-12
    assert concircular_gap(sq.y00, sq.y10, sq.y11, sq.y01) < 1e-12
    assert concircular_gap([1.0, 1, 1], [0, 0, 2.0], [1.0, 0, 2], sq.y10) < 1e-12
    with pytest.raises(InitialNotOnSphere):
        dc.initial_square([1.0, 1, 1], e1, e2, [1.0, 0, 0])
    tilted = inc.plane_from_normal_offset([0.6, 0.8, 0], 0.0)
    with pytest.raises(ValueError):
        dc.initial_square([1.0, 1, 1], e1, tilted, [0, 0, 2.0])


def _planes(rng):
    a, b = rng.uniform(2.0, 3.0, size=2)
    e1 = inc.plane_from_normal_offset([1.0, 0, 0], a)
    e2 = inc.plane_from_normal_offset([0, 1.0, 0], -b)
    return e1, e2, np.array([a, -b, rng.uniform(-1, 1)])


def test_double_reduction_is_order_independent(rng):
    x = random_curve(rng, 15)
    e1, e2, y11 = _planes(rng)
    sq = dc.initial_square(x[0], e1, e2, y11)
    red = dc.double_reduction_curve(x, e1, e2, sq)
    assert red.order_check < 1e-7
    for p in red.curve.points:
        assert inc.point_on_sphere(p, e1) and inc.point_on_sphere(p, e2)


def test_double_reduction_misaligned_square_fails(rng):
    x = random_curve(rng, 15)
    e1, e2, y11 = _planes(rng)
    sq = dc.initial_square(x[0], e1, e2, y11)
    moved = dc.InitialSquare(sq.y00, sq.y10 + [0, 0.2, 0.1], sq.y01, sq.y11)
    with pytest.raises(OrderMismatch):
        dc.double_reduction_curve(x, e1, e2, moved)
    loose = dc.double_reduction_curve(x, e1, e2, moved, strict=False)
    assert loose.order_check > 1e-3
    shifted = dc.InitialSquare(sq.y00 + 1.0, sq.y10, sq.y01, sq.y11)
    with pytest.raises(ValueError):
        dc.double_reduction_curve(x, e1, e2, shifted)


def test_initial_square_default_aux_falls_back():
    e1 = inc.plane_from_normal_offset([1.0, 0, 0], 0.0)
    e2 = inc.plane_from_normal_offset([0, 1.0, 0], 0.0)
    x0, y11 = np.array([1.0, 2.0, 1.0]), np.array([0, 0, 1.0])
    # the first default circle is the horizontal one through the z axis
    with pytest.raises(CoincidentPoints):
        dc.initial_square(x0, e1, e2, y11, aux=dc.default_aux(x0, y11))
    sq = dc.initial_square(x0, e1, e2, y11)
    assert np.linalg.norm(sq.y10 - sq.y01) > 1.0
    assert abs(sq.y10[0]) < 1e-12 and abs(sq.y01[1]) < 1e-12
    assert concircular_gap(sq.y00, sq.y10, sq.y11, sq.y01) < 1e-12
