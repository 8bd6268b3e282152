"""Spheres, circles and their intersections in the light-cone model.

A hypersphere (or hyperplane) is a unit spacelike vector ``s``; a point
``p`` lies on it iff ``(s, lift(p)) = 0``.  Circles are 3-dimensional
subspaces of signature (2, 1) spanned by the lifts of any three of their
points.  Lines are circles through infinity and get no special treatment
except where Euclidean output has to be produced.
"""

from typing import NamedTuple

import numpy as np
from scipy.linalg import null_space

from . import lorentz as lz
from .errors import (
    AmbiguousIdenticalCircles,
    CoincidentPoints,
    InputNotIncident,
    NoIntersection,
    NotConcircular,
    NotCospherical,
    PointAtInfinity,
)
from .lorentz import DEFAULT_TOL, SphereSubspace


class Sphere(NamedTuple):
    center: np.ndarray
    radius: float
    orientation: int


class Plane(NamedTuple):
    normal: np.ndarray
    offset: float


class Intersection(NamedTuple):
    point: np.ndarray
    tangent: bool


def _points(*ps):
    arr = np.array([np.asarray(p, dtype=float) for p in ps])
    if arr.ndim != 2:
        raise ValueError("points must share one ambient dimension")
    return arr


def length_scale(*ps):
    """Characteristic length for absolute incidence thresholds: ``max(1, |p|)``."""
    return max(1.0, max(float(np.linalg.norm(p)) for p in ps))


def sphere_from_center_radius(center, radius):
    center = np.asarray(center, dtype=float)
    if not np.isfinite(radius) or radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    return lz.vector(1.0, center, 0.5 * (center @ center - radius * radius)) / radius


def plane_from_normal_offset(normal, offset):
    """Plane ``{x : (normal, x) = offset}`` as the vector ``normal + offset q``."""
    normal = np.asarray(normal, dtype=float)
    if abs(np.linalg.norm(normal) - 1.0) > 1e-9:
        raise ValueError(f"plane normal must be a unit vector, got {normal}")
    return lz.vector(0.0, normal, float(offset))


def as_sphere(s, tol=DEFAULT_TOL):
    """Validate a unit spacelike vector."""
    s = lz.as_vector(s)
    if s.ndim != 1 or abs(lz.inner(s, s) - 1.0) > tol * max(1.0, s @ s):
        raise ValueError("sphere vector must be unit spacelike")
    return s


def decode_sphere(s, tol=DEFAULT_TOL):
    """Euclidean description of a sphere vector.

    Returns :class:`Sphere` (center, radius, orientation sign) or
    :class:`Plane` (unit normal, offset).  Inverse of the two constructors.
    """
    s = as_sphere(s, tol)
    o = s[0]
    if abs(o) <= tol * np.linalg.norm(s):
        return Plane(s[1:-1].copy(), float(s[-1]))
    return Sphere(s[1:-1] / o, float(1.0 / abs(o)), 1 if o > 0 else -1)


def sphere_residual(p, s):
    """``|(s, lift(p))|``, approximately the distance from ``p`` to the sphere."""
    return float(abs(lz.inner(s, lz.lift(p))))


def point_on_sphere(p, s, tol=DEFAULT_TOL):
    return sphere_residual(p, s) <= tol * length_scale(p)


def surface_normal(s, p):
    """Oriented unit normal of the sphere ``s`` at its point ``p``.

    The Euclidean part of ``s + (s, q) lift(p)``; for a sphere encoded as
    ``t + k lift(x)`` (``t`` the plane lift of ``n`` at ``x``) this gives
    back ``n`` at ``x``.  Spheres from :func:`sphere_from_center_radius`
    get the inward normal, planes the constant normal.
    """
    s = np.asarray(s, float)
    p = np.asarray(p, float)
    nrm = s[..., 1:-1] - s[..., :1] * p
    return nrm / np.linalg.norm(nrm, axis=-1, keepdims=True)


def _check_distinct(pts, tol):
    scale = length_scale(*pts)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if np.linalg.norm(pts[i] - pts[j]) <= tol * scale:
                raise CoincidentPoints(f"points {i} and {j} coincide")


def circle_through(p1, p2, p3, tol=DEFAULT_TOL):
    """The circle (or line) through three distinct points."""
    pts = _points(p1, p2, p3)
    _check_distinct(pts, tol)
    return SphereSubspace(lz.lift(pts), tol)


def concircularity_residual(p1, p2, p3, p4):
    return lz.rank_residual(lz.lift(_points(p1, p2, p3, p4)), 3)


def concircular(p1, p2, p3, p4, tol=DEFAULT_TOL):
    lifts = lz.lift(_points(p1, p2, p3, p4))
    rank, pos, neg = lz.gram_signature(lifts, tol)
    return rank < 3 or (rank == 3 and (pos, neg) == (2, 1))


def cospherical(points, d, tol=DEFAULT_TOL):
    """True iff the points lie on a common ``d``-sphere (or ``d``-plane)."""
    lifts = lz.lift(np.asarray(points, dtype=float))
    rank, pos, neg = lz.gram_signature(lifts, tol)
    return rank < d + 2 or (rank == d + 2 and (pos, neg) == (d + 1, 1))


def cosphericity_residual(points, d):
    return lz.rank_residual(lz.lift(np.asarray(points, dtype=float)), d + 2)


def _second_null(wb, xi, tol):
    """Second null line of the plane spanned by the orthonormal rows ``wb``.

    ``xi`` is a null vector known to lie in the plane.  Returns the other
    null vector, or ``None`` when the plane is degenerate (tangency).
    """
    xi = xi / np.linalg.norm(xi)
    c = wb @ xi
    w = c[1] * wb[0] - c[0] * wb[1]
    a = lz.inner(w, xi)
    b = lz.inner(w, w)
    if abs(a) <= tol * max(abs(a), abs(b)):
        if b < 0:
            # unreachable for a null xi inside the plane, kept as a guard
            raise NoIntersection("intersection plane is not Lorentzian")
        return None
    return w - b / (2.0 * a) * xi


def second_intersection(circle, s, known, tol=DEFAULT_TOL):
    """Second intersection point of a circle with a hypersphere.

    ``known`` must lie on both.  Returns ``Intersection(point, tangent)``;
    when the circle touches the sphere at ``known`` the point is ``known``
    itself and ``tangent`` is set.
    """
    known = np.asarray(known, dtype=float)
    s = np.asarray(s, dtype=float)
    xi = lz.lift(known)
    if not point_on_sphere(known, s, tol):
        raise InputNotIncident("known point is not on the sphere")
    if not circle.contains(xi, tol):
        raise InputNotIncident("known point is not on the circle")
    frame = circle.frame
    row = frame @ lz.metric(len(known)) @ s
    if np.linalg.norm(row) <= tol * np.linalg.norm(s):
        raise InputNotIncident("circle lies on the sphere")
    coeff = null_space(row[None, :])
    wb = coeff.T @ frame
    rank, pos, neg = lz.gram_signature(wb, tol)
    if neg == 0 and rank == 2:
        raise NoIntersection("circle misses the sphere")
    v = _second_null(wb, xi, tol)
    if v is None:
        return Intersection(known.copy(), True)
    rows = np.vstack([lz.orthogonal_complement(frame, tol=tol).frame, s])
    return Intersection(_refine(lz.unlift(v, tol), rows), False)


def _refine(p, rows):
    # one Newton step on (row, lift p) = 0 in Euclidean coordinates; unlifting
    # a far point loses accuracy like |p|^3 while this residual grows like |p|^2
    res = lz.inner(rows, lz.lift(p))
    jac = rows[:, 1:-1] - rows[:, :1] * p
    q = p + np.linalg.lstsq(jac, -res, rcond=None)[0]
    if np.linalg.norm(lz.inner(rows, lz.lift(q))) < np.linalg.norm(res):
        return q
    return p


def circle_circle_second(ca, cb, common, tol=DEFAULT_TOL):
    """Second intersection point of two cospherical circles through ``common``."""
    common = np.asarray(common, dtype=float)
    xi = lz.lift(common)
    if not (ca.contains(xi, tol) and cb.contains(xi, tol)):
        raise InputNotIncident("common point is not on both circles")
    sv = np.linalg.svd(np.vstack([ca.frame, cb.frame]), compute_uv=False)
    rank = int(np.sum(sv > tol * sv[0]))
    if rank <= 3:
        raise AmbiguousIdenticalCircles("the two circles coincide")
    if rank > 4:
        raise NotCospherical("circles do not lie on a common 2-sphere")
    resid = ca.frame - (ca.frame @ cb.frame.T) @ cb.frame
    u, _, _ = np.linalg.svd(resid)
    wb = u[:, 1:].T @ ca.frame
    v = _second_null(wb, xi, tol)
    if v is None:
        return Intersection(common.copy(), True)
    return Intersection(lz.unlift(v, tol), False)


def _plane_coordinates(pts):
    centered = pts - pts.mean(axis=0)
    _, _, vt = np.linalg.svd(centered)
    return centered @ vt[0] + 1j * (centered @ vt[1])


def edge_cross_ratio(p1, p2, p3, p4, tol=DEFAULT_TOL):
    """Real cross ratio ``(p1-p2)(p3-p4) / ((p2-p3)(p4-p1))`` of concircular points.

    The magnitude comes from inner products of lifts (Moebius invariant);
    the sign is negative iff the pairs (p1, p3) and (p2, p4) separate each
    other on the circle.
    """
    pts = _points(p1, p2, p3, p4)
    _check_distinct(pts, tol)
    if not concircular(*pts, tol=tol):
        raise NotConcircular("points are not concircular")
    xi = lz.lift(pts)
    num = lz.inner(xi[0], xi[1]) * lz.inner(xi[2], xi[3])
    den = lz.inner(xi[1], xi[2]) * lz.inner(xi[3], xi[0])
    mag = np.sqrt(abs(num / den))
    z = _plane_coordinates(pts)
    cr = (z[0] - z[1]) * (z[2] - z[3]) / ((z[1] - z[2]) * (z[3] - z[0]))
    return float(-mag if cr.real < 0 else mag)


def _circumcircle(a, m, b):
    """Center, radius and in-plane basis of the circle through three points."""
    u = a - m
    v = b - m
    uu, vv, uv = u @ u, v @ v, u @ v
    det = uu * vv - uv * uv
    alpha = vv * (uu - uv) / (2.0 * det)
    beta = uu * (vv - uv) / (2.0 * det)
    center = m + alpha * u + beta * v
    return center, float(np.linalg.norm(a - center))


def sample_circle_arc(circle, start, end, k, reverse=False, tol=DEFAULT_TOL):
    """``k`` points along an arc of ``circle`` from ``start`` to ``end``.

    Of the two arcs, the default is the one whose midpoint lies closer to
    the chord midpoint, i.e. the shorter arc, and for a line the finite
    segment.  ``reverse`` selects the complementary arc.  Samples are
    equally spaced in angle (in length for segments); the endpoints are
    copied exactly.
    """
    if k < 2:
        raise ValueError("need at least two arc samples")
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    _check_distinct(np.array([start, end]), tol)
    a, b = lz.lift(start), lz.lift(end)
    for p in (a, b):
        if not circle.contains(p, tol):
            raise InputNotIncident("arc endpoint is not on the circle")
    frame = circle.frame
    g = lz.metric(len(start))
    coeff = null_space(np.vstack([frame @ g @ a, frame @ g @ b]))
    f = coeff[:, 0] @ frame
    f = f / np.sqrt(lz.inner(f, f))
    chord = float(np.linalg.norm(end - start))
    mid_chord = 0.5 * (start + end)
    mids = []
    for sign in (1.0, -1.0):
        try:
            mid = lz.unlift(a + b + sign * chord * f, tol)
            mids.append((float(np.linalg.norm(mid - mid_chord)), mid))
        except PointAtInfinity:
            mids.append((np.inf, None))
    pick = 0 if mids[0][0] <= mids[1][0] else 1
    if reverse:
        pick = 1 - pick
    mid = mids[pick][1]
    if mid is None:
        raise PointAtInfinity("selected arc passes through infinity")

    t = np.linspace(0.0, 1.0, k)
    pts = np.empty((k, len(start)))
    if np.linalg.norm(mid - mid_chord) <= tol * length_scale(start, end):
        pts[:] = start + t[:, None] * (end - start)
    else:
        center, radius = _circumcircle(start, mid, end)
        e1 = (start - center) / radius
        w = (mid - center) / radius
        e2 = w - (w @ e1) * e1
        e2 /= np.linalg.norm(e2)
        half = np.arctan2(w @ e2, w @ e1)
        angles = 2.0 * half * t
        pts[:] = center + radius * (np.cos(angles)[:, None] * e1 + np.sin(angles)[:, None] * e2)
    pts[0] = start
    pts[-1] = end
    return pts


def random_point(spheres, rng, tol=DEFAULT_TOL):
    """Random point on the intersection of the given hyperspheres.

    Draws a null vector of the complement as a timelike unit vector plus a
    random unit vector of its spacelike part.  Raises
    :class:`NoIntersection` when the spheres have no common point.
    """
    frame = lz.orthogonal_complement(np.atleast_2d(spheres), tol=tol).frame
    lam, u = np.linalg.eigh(lz.gram(frame))
    cut = tol * np.max(np.abs(lam))
    if np.sum(lam < -cut) != 1 or np.sum(np.abs(lam) <= cut):
        raise NoIntersection("the spheres have no common circle or point set")
    time = (u[:, 0] @ frame) / np.sqrt(-lam[0])
    space = (u[:, 1:] * (1.0 / np.sqrt(lam[1:]))).T @ frame
    while True:
        d = rng.normal(size=len(space))
        d /= np.linalg.norm(d)
        try:
            return lz.unlift(time + d @ space, tol)
        except PointAtInfinity:
            continue
