"""Discrete curves and circular nets and their Ribaucour transforms.

Two discrete curves form a Ribaucour pair when the endpoints of
corresponding edges are concircular.  All constructions here are
iterated circle/sphere intersections; see :mod:`ribaucour.incidence`.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import incidence as inc
from . import lorentz as lz
from .errors import (
    CoincidentPoints,
    CurveMeetsSphere,
    GeometryError,
    InconsistentCube,
    InitialNotOnSphere,
    MiguelMismatch,
    NetMeetsSphere,
    NotCospherical,
    OrderMismatch,
)
from .lorentz import DEFAULT_TOL


def _frozen(arr):
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DiscreteCurve:
    """A polygon ``points[k]`` in R^n with distinct consecutive vertices.

    ``tangent_steps`` lists the edges on which a transform degenerated to a
    tangency (the vertex was repeated); it is bookkeeping, not geometry.
    """

    points: np.ndarray
    tangent_steps: tuple = field(default=())
    tol: float = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or len(pts) < 2:
            raise ValueError("a discrete curve needs at least two points of equal dimension")
        lz.lift(pts)  # validates finiteness and dimension
        gaps = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        scale = max(1.0, float(np.abs(pts).max()))
        bad = np.flatnonzero(gaps <= self.tol * scale)
        if bad.size and not set(bad.tolist()) <= set(self.tangent_steps):
            raise CoincidentPoints("consecutive curve points coincide", index=int(bad[0]))
        object.__setattr__(self, "points", _frozen(pts))
        object.__setattr__(self, "tangent_steps", tuple(int(i) for i in self.tangent_steps))

    def __len__(self):
        return len(self.points)

    def __getitem__(self, k):
        return self.points[k]

    @property
    def ambient_dim(self):
        return self.points.shape[1]

    def __eq__(self, other):
        if not isinstance(other, DiscreteCurve):
            return NotImplemented
        return np.array_equal(self.points, other.points)


@dataclass(frozen=True, eq=False)
class CircularNet:
    """A grid ``points[i, j]`` in R^n whose elementary quads are concircular.

    ``route_mismatch`` is filled by :func:`net_transform_to_sphere` with the
    distance between the two propagation routes at every vertex.
    """

    points: np.ndarray
    tol: float = field(default=DEFAULT_TOL, repr=False)
    route_mismatch: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 3 or pts.shape[0] < 2 or pts.shape[1] < 2:
            raise ValueError("a net needs an (n1, n2, n) array with n1, n2 >= 2")
        lz.lift(pts)
        res = quad_residuals(pts)
        bad = np.argwhere(res > self.tol)
        if bad.size:
            i, j = bad[0]
            raise ValueError(f"quad ({i}, {j}) is not circular (residual {res[i, j]:.3g})")
        object.__setattr__(self, "points", _frozen(pts))
        if self.route_mismatch is not None:
            object.__setattr__(self, "route_mismatch", _frozen(self.route_mismatch))

    @property
    def shape(self):
        return self.points.shape[:2]

    @property
    def ambient_dim(self):
        return self.points.shape[2]


def quad_residuals(points):
    """Concircularity residual of every elementary quad of a grid."""
    n1, n2 = points.shape[:2]
    res = np.empty((n1 - 1, n2 - 1))
    for i in range(n1 - 1):
        for j in range(n2 - 1):
            res[i, j] = inc.concircularity_residual(
                points[i, j], points[i + 1, j], points[i + 1, j + 1], points[i, j + 1])
    return res


@dataclass(frozen=True)
class InitialSquare:
    """Initial points ``y_eps`` for a double reduction onto ``e1`` and ``e2``."""

    y00: np.ndarray
    y10: np.ndarray
    y01: np.ndarray
    y11: np.ndarray

    def as_array(self):
        return np.array([self.y00, self.y10, self.y11, self.y01])


class PairReport(NamedTuple):
    residuals: np.ndarray
    cross_ratios: np.ndarray
    passed: bool
    tol: float

    @property
    def failing_edges(self):
        return np.flatnonzero(self.residuals > self.tol).tolist()


class Chain(NamedTuple):
    x0: DiscreteCurve
    x0_hat: DiscreteCurve
    y: DiscreteCurve
    x1_hat: DiscreteCurve
    x1: DiscreteCurve

    def links(self):
        return list(zip(self[:-1], self[1:]))


class DoubleReduction(NamedTuple):
    curve: DiscreteCurve
    order_check: float
    other_order: DiscreteCurve


def _as_curve(x):
    return x if isinstance(x, DiscreteCurve) else DiscreteCurve(x)


def pair_validate(x, y, tol=DEFAULT_TOL):
    """Check that two curves form a discrete Ribaucour pair.

    Returns per-edge concircularity residuals and cross ratios (NaN where
    an edge quad is degenerate or not circular).
    """
    x, y = _as_curve(x), _as_curve(y)
    if len(x) != len(y) or x.ambient_dim != y.ambient_dim:
        raise ValueError(f"curve shapes differ: {x.points.shape} vs {y.points.shape}")
    for k in range(len(x)):
        if np.linalg.norm(x[k] - y[k]) <= tol * inc.length_scale(x[k], y[k]):
            raise CoincidentPoints("corresponding points coincide", index=k)
    m = len(x) - 1
    res = np.empty(m)
    cr = np.full(m, np.nan)
    for k in range(m):
        quad = (x[k], x[k + 1], y[k + 1], y[k])
        res[k] = inc.concircularity_residual(*quad)
        if res[k] <= tol:
            try:
                cr[k] = inc.edge_cross_ratio(*quad, tol=tol)
            except GeometryError:
                pass
    return PairReport(res, cr, bool(np.all(res <= tol)), tol)


def _check_off_sphere(points, e, tol, error):
    for idx in np.ndindex(points.shape[:-1]):
        if inc.point_on_sphere(points[idx], e, tol):
            index = idx[0] if len(idx) == 1 else idx
            raise error("point lies on the target sphere", index=index)


def _step(a, b, known, e, tol, index):
    try:
        circle = inc.circle_through(a, b, known, tol)
        return inc.second_intersection(circle, e, known, tol)
    except GeometryError as err:
        if err.index is None:
            err.index = index
        raise


def curve_transform_to_sphere(x, e, initial, tol=DEFAULT_TOL):
    """Ribaucour transform of a discrete curve onto a hypersphere ``e``.

    Each new vertex is the second intersection of ``e`` with the circle
    through the edge endpoints and the previous new vertex.
    """
    x = _as_curve(x)
    e = inc.as_sphere(e)
    initial = np.asarray(initial, dtype=float)
    _check_off_sphere(x.points, e, tol, CurveMeetsSphere)
    if not inc.point_on_sphere(initial, e, tol):
        raise InitialNotOnSphere("initial point is not on the sphere")
    out = [initial.copy()]
    tangent = []
    for k in range(len(x) - 1):
        p, touch = _step(x[k], x[k + 1], out[-1], e, tol, k)
        if touch:
            tangent.append(k)
        out.append(p)
    return DiscreteCurve(np.array(out), tangent_steps=tuple(tangent), tol=tol)


def common_transform(a, b, s, initial, tol=DEFAULT_TOL):
    """Common Ribaucour transform of two curves on one 2-sphere ``s``.

    New vertices are second intersections of the circumcircles of
    corresponding edges through the previous new vertex.
    """
    a, b = _as_curve(a), _as_curve(b)
    s = inc.as_sphere(s)
    if len(a) != len(b):
        raise ValueError(f"curve lengths differ: {len(a)} vs {len(b)}")
    initial = np.asarray(initial, dtype=float)
    for name, pts in (("first curve", a.points), ("second curve", b.points),
                      ("initial point", initial[None])):
        for k, p in enumerate(pts):
            if not inc.point_on_sphere(p, s, tol):
                raise NotCospherical(f"{name} leaves the sphere", index=k)
    out = [initial.copy()]
    tangent = []
    for k in range(len(a) - 1):
        z = out[-1]
        try:
            ca = inc.circle_through(a[k], a[k + 1], z, tol)
            cb = inc.circle_through(b[k], b[k + 1], z, tol)
            p, touch = inc.circle_circle_second(ca, cb, z, tol)
        except GeometryError as err:
            if err.index is None:
                err.index = k
            raise
        if touch:
            tangent.append(k)
        out.append(p)
    return DiscreteCurve(np.array(out), tangent_steps=tuple(tangent), tol=tol)


def interpolate_chain(x0, x1, s, initials, tol=DEFAULT_TOL):
    """Three Ribaucour transforms joining ``x0`` to ``x1`` through the sphere ``s``.

    ``initials`` are the initial points of ``x0_hat``, ``y`` and ``x1_hat``
    in that order, all on ``s``.  Stages are numbered 1 (``x0 -> s``),
    2 (``x1 -> s``) and 3 (the common transform); a failure carries its
    stage in ``err.stage``.
    """
    x0, x1 = _as_curve(x0), _as_curve(x1)
    if len(x0) != len(x1):
        raise ValueError(f"curve lengths differ: {len(x0)} vs {len(x1)}")
    i0, iy, i1 = (np.asarray(p, dtype=float) for p in initials)
    stages = (
        (1, lambda: curve_transform_to_sphere(x0, s, i0, tol)),
        (2, lambda: curve_transform_to_sphere(x1, s, i1, tol)),
    )
    hats = []
    for stage, run in stages:
        try:
            hats.append(run())
        except GeometryError as err:
            err.stage = stage
            raise
    try:
        y = common_transform(hats[0], hats[1], s, iy, tol)
    except GeometryError as err:
        err.stage = 3
        raise
    return Chain(x0, hats[0], y, hats[1], x1)


_CUBE_FACES = {
    "x": ("100", "110", "101"),
    "y": ("010", "110", "011"),
    "z": ("001", "101", "011"),
}


def _corner_key(key):
    if isinstance(key, str):
        return key
    return "".join(str(int(c)) for c in key)


def miguel_eighth(corners, tol=DEFAULT_TOL):
    """Eighth vertex of a combinatorial cube with circular faces.

    ``corners`` maps the labels ``"000"`` .. ``"110"`` (or 0/1 tuples) to
    points; the vertex ``"111"`` is returned.
    """
    pts = {_corner_key(k): np.asarray(v, dtype=float) for k, v in corners.items()}
    missing = {"000", "100", "010", "001", "110", "101", "011"} - set(pts)
    if missing:
        raise ValueError(f"missing cube corners: {sorted(missing)}")
    for face in (("000", "100", "110", "010"), ("000", "100", "101", "001"),
                 ("000", "010", "011", "001")):
        r = inc.concircularity_residual(*(pts[c] for c in face))
        if r > tol:
            raise InconsistentCube(f"face {face} is not circular", residual=r)
    try:
        cx = inc.circle_through(*(pts[c] for c in _CUBE_FACES["x"]), tol=tol)
        cy = inc.circle_through(*(pts[c] for c in _CUBE_FACES["y"]), tol=tol)
        p, _ = inc.circle_circle_second(cx, cy, pts["110"], tol)
    except NotCospherical as err:
        raise InconsistentCube(f"cube is not cospherical: {err}") from err
    r = inc.concircularity_residual(*(pts[c] for c in _CUBE_FACES["z"]), p)
    if r > tol:
        raise InconsistentCube("third face does not close", residual=r)
    return p


def net_transform_to_sphere(net, e, initial, tol=DEFAULT_TOL):
    """Ribaucour transform of a circular net onto a hypersphere ``e``.

    Row 0 and column 0 are propagated like curves; every interior vertex is
    computed along both incoming edges and the routes must agree (Miguel's
    theorem).  The returned vertex is the one reached along the second
    index; the route distances are stored in ``route_mismatch``.
    """
    if not isinstance(net, CircularNet):
        net = CircularNet(net, tol=tol)
    e = inc.as_sphere(e)
    x = net.points
    _check_off_sphere(x, e, tol, NetMeetsSphere)
    initial = np.asarray(initial, dtype=float)
    if not inc.point_on_sphere(initial, e, tol):
        raise InitialNotOnSphere("initial point is not on the sphere")
    n1, n2 = net.shape
    out = np.empty_like(x)
    mismatch = np.zeros((n1, n2))
    out[0, 0] = initial
    for j in range(1, n2):
        out[0, j] = _step(x[0, j - 1], x[0, j], out[0, j - 1], e, tol, (0, j)).point
    for i in range(1, n1):
        out[i, 0] = _step(x[i - 1, 0], x[i, 0], out[i - 1, 0], e, tol, (i, 0)).point
    for i in range(1, n1):
        for j in range(1, n2):
            pa = _step(x[i, j - 1], x[i, j], out[i, j - 1], e, tol, (i, j)).point
            pb = _step(x[i - 1, j], x[i, j], out[i - 1, j], e, tol, (i, j)).point
            gap = float(np.linalg.norm(pa - pb))
            mismatch[i, j] = gap
            if gap > tol * inc.length_scale(pa, pb):
                raise MiguelMismatch("propagation routes disagree", index=(i, j), residual=gap)
            out[i, j] = pa
    return CircularNet(out, tol=tol, route_mismatch=mismatch)


def cell_cosphericity(x, y):
    """Cosphericity residual of corresponding quads of two nets (8 points each)."""
    xp = x.points if isinstance(x, CircularNet) else np.asarray(x)
    yp = y.points if isinstance(y, CircularNet) else np.asarray(y)
    n1, n2 = xp.shape[:2]
    res = np.empty((n1 - 1, n2 - 1))
    for i in range(n1 - 1):
        for j in range(n2 - 1):
            cell = np.concatenate([xp[i:i + 2, j:j + 2].reshape(-1, xp.shape[2]),
                                   yp[i:i + 2, j:j + 2].reshape(-1, yp.shape[2])])
            res[i, j] = inc.cosphericity_residual(cell, 2)
    return res


def default_aux(x0, y11, rank=0):
    """Midpoint of ``x0`` and ``y11`` pushed along the axis where they differ least.

    ``rank`` selects the axis with the ``rank``-th smallest difference instead.
    """
    x0 = np.asarray(x0, dtype=float)
    y11 = np.asarray(y11, dtype=float)
    diff = y11 - x0
    axis = int(np.argsort(np.abs(diff), kind="stable")[rank])
    aux = 0.5 * (x0 + y11)
    aux[axis] += 0.5 * np.linalg.norm(diff)
    return aux


def _square_on(x0, e1, e2, y11, aux, tol):
    circle = inc.circle_through(x0, y11, aux, tol)
    h10 = inc.second_intersection(circle, e1, y11, tol)
    h01 = inc.second_intersection(circle, e2, y11, tol)
    # a usable square needs y10 off e2 and y01 off e1, which also rules out tangency
    if (h10.tangent or h01.tangent or inc.point_on_sphere(h10.point, e2, tol)
            or inc.point_on_sphere(h01.point, e1, tol)):
        raise CoincidentPoints("initial square degenerates on this circle")
    return InitialSquare(x0.copy(), h10.point, h01.point, y11.copy())


def initial_square(x0, e1, e2, y11, aux=None, tol=DEFAULT_TOL):
    """Concircular initial points for a double reduction onto ``e1`` and ``e2``.

    ``aux`` picks the circle through ``x0`` and ``y11``.  By default it is
    :func:`default_aux`, moving on to the next axis whenever the circle
    meets ``e1`` and ``e2`` in the same second point.
    """
    e1, e2 = inc.as_sphere(e1), inc.as_sphere(e2)
    if abs(lz.inner(e1, e2)) > tol:
        raise ValueError("the two hyperspheres must intersect orthogonally")
    y11 = np.asarray(y11, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    if not (inc.point_on_sphere(y11, e1, tol) and inc.point_on_sphere(y11, e2, tol)):
        raise InitialNotOnSphere("y11 must lie on both hyperspheres")
    if aux is not None:
        return _square_on(x0, e1, e2, y11, np.asarray(aux, dtype=float), tol)
    for rank in range(len(x0)):
        try:
            return _square_on(x0, e1, e2, y11, default_aux(x0, y11, rank), tol)
        except CoincidentPoints:
            if rank == len(x0) - 1:
                raise


def double_reduction_curve(x, e1, e2, square, tol=DEFAULT_TOL, strict=True):
    """Discrete Ribaucour coordinates of a curve: two reductions, both orders.

    Route ``ij`` goes to ``e1`` first (initial ``y10``) and then to ``e2``;
    route ``ji`` the other way round.  Both end on the circle
    ``<e1, e2>^perp`` and ``order_check`` is their largest pointwise gap.
    With ``strict`` an :class:`OrderMismatch` is raised when it exceeds the
    tolerance.
    """
    x = _as_curve(x)
    if np.linalg.norm(np.asarray(square.y00) - x[0]) > tol * inc.length_scale(x[0]):
        raise ValueError("initial square does not start at the first curve point")
    routes = []
    for name, (first, y_first), (second, _) in (
            ("ij", (e1, square.y10), (e2, None)), ("ji", (e2, square.y01), (e1, None))):
        try:
            xi = curve_transform_to_sphere(x, first, y_first, tol)
            routes.append(curve_transform_to_sphere(xi, second, square.y11, tol))
        except GeometryError as err:
            err.stage = name
            raise
    a, b = routes
    gap = float(np.max(np.linalg.norm(a.points - b.points, axis=1)))
    scale = max(1.0, float(np.abs(a.points).max()))
    if strict and gap > tol * scale:
        raise OrderMismatch("reduction depends on the order of transformations", residual=gap)
    return DoubleReduction(a, gap, b)
