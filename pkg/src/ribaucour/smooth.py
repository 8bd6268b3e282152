"""Sampled smooth curves: parallel normals, sphere congruences, reductions.

A smooth curve is handled through its samples together with a unit normal
field.  Normals enter the light-cone model through their plane lift
``t = n + (n, x) q``.  Everything except :func:`transport_normal` is
per-sample algebra.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import lorentz as lz
from .errors import (
    CoincidentPoints,
    CurveMeetsSphere,
    GeometryError,
    InputNotIncident,
    NonParallelFrame,
    RankDeficient,
    ZeroDenominator,
)
from .lorentz import DEFAULT_TOL


def _end_tangent(p0, p1, p2):
    # tangent at p0 of the circle through p0, p1, p2 (the chord when collinear)
    a, b = p1 - p0, p2 - p0
    aa, bb, ab = a @ a, b @ b, a @ b
    det = aa * bb - ab * ab
    if det <= 1e-24 * aa * bb:
        return a
    alpha = bb * (aa - ab) / (2.0 * det)
    beta = aa * (bb - ab) / (2.0 * det)
    radial = alpha * a + beta * b
    return a - (a @ radial) / (radial @ radial) * radial


def unit_tangents(points):
    """Unit tangents: centered differences inside, three-point circle fits at the ends.

    The end rule is second order like the centered one and exact on circles.
    """
    points = np.asarray(points, dtype=float)
    d = np.empty_like(points)
    if len(points) < 3:
        d[:] = points[-1] - points[0]
    else:
        d[1:-1] = points[2:] - points[:-2]
        d[0] = _end_tangent(points[0], points[1], points[2])
        d[-1] = -_end_tangent(points[-1], points[-2], points[-3])
    norms = np.linalg.norm(d, axis=1)
    if np.any(norms == 0.0):
        raise CoincidentPoints("vanishing tangent", index=int(np.argmin(norms)))
    return d / norms[:, None]


def _rotate_step(n, t0, t1):
    # minimal rotation taking t0 to t1, applied to n (n must be orthogonal to t0)
    c = t0 @ t1
    if c <= -1.0 + 1e-12:
        raise CoincidentPoints("tangent reverses between samples")
    m = n - (n @ t1) / (1.0 + c) * (t0 + t1)
    return m / np.linalg.norm(m)


@dataclass(frozen=True, eq=False)
class FramedCurve:
    """Samples of a curve with a unit normal field.

    ``ortho_tol`` bounds ``|n_k . T_k|`` against the discrete unit tangent;
    ``None`` skips the check (for fields that are normal only up to the
    sampling error, like induced normals of a transformed curve).
    """

    points: np.ndarray
    normals: np.ndarray
    ortho_tol: float = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        nrm = np.array(self.normals, dtype=float)
        if pts.ndim != 2 or pts.shape != nrm.shape or len(pts) < 2:
            raise ValueError("points and normals must be matching (m, n) arrays, m >= 2")
        lz.lift(pts)
        if np.any(np.abs(np.linalg.norm(nrm, axis=1) - 1.0) > 1e-9):
            raise ValueError("normals must be unit vectors")
        if self.ortho_tol is not None:
            dots = np.abs(np.sum(nrm * unit_tangents(pts), axis=1))
            if dots.max() > self.ortho_tol:
                raise ValueError(f"normal {int(dots.argmax())} is not orthogonal to the tangent")
        pts.setflags(write=False)
        nrm.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "normals", nrm)

    def __len__(self):
        return len(self.points)

    @property
    def ambient_dim(self):
        return self.points.shape[1]

    def plane_lifts(self):
        return plane_lift(self.normals, self.points)


@dataclass(frozen=True, eq=False)
class SphereCongruence:
    """One sphere vector per sample, each touching the source curve."""

    spheres: np.ndarray

    def __post_init__(self):
        s = lz.as_vector(np.array(self.spheres, dtype=float))
        s.setflags(write=False)
        object.__setattr__(self, "spheres", s)

    def __len__(self):
        return len(self.spheres)

    def __getitem__(self, k):
        return self.spheres[k]

    def contact_residuals(self, points):
        return np.abs(lz.inner(self.spheres, lz.lift(points)))


class Reduction(NamedTuple):
    points: np.ndarray
    spheres: SphereCongruence


def plane_lift(nrm, x):
    """Lift ``n + (n, x) q`` of the normal ``n`` at ``x`` (broadcasts)."""
    nrm = np.asarray(nrm, dtype=float)
    x = np.asarray(x, dtype=float)
    zeros = np.zeros(nrm.shape[:-1] + (1,))
    offset = np.sum(nrm * x, axis=-1, keepdims=True)
    return np.concatenate([zeros, nrm, offset], axis=-1)


def initial_normal(points, direction):
    """Project ``direction`` onto the normal space at the first sample."""
    t0 = unit_tangents(points)[0]
    d = np.asarray(direction, dtype=float)
    d = d - (d @ t0) * t0
    norm = np.linalg.norm(d)
    if norm == 0.0:
        raise ValueError("direction is tangent to the curve")
    return d / norm


def transport_normal(points, n0, tol=DEFAULT_TOL):
    """Discrete parallel transport of the unit normal ``n0`` along the samples.

    Each step rotates the normal by the minimal rotation carrying one unit
    tangent to the next; this keeps ``|n| = 1`` and ``n_k . T_k = 0`` and
    converges to the parallel field at second order.
    """
    points = np.asarray(points, dtype=float)
    tangents = unit_tangents(points)
    n0 = np.asarray(n0, dtype=float)
    if abs(np.linalg.norm(n0) - 1.0) > tol:
        raise ValueError("initial normal must be a unit vector")
    if abs(n0 @ tangents[0]) > tol:
        raise ValueError("initial normal is not orthogonal to the initial tangent")
    normals = np.empty_like(points)
    normals[0] = n0
    for k in range(len(points) - 1):
        normals[k + 1] = _rotate_step(normals[k], tangents[k], tangents[k + 1])
    return FramedCurve(points, normals, ortho_tol=max(tol, 1e-12))


def parallel_residual(fc):
    """Largest deviation of a frame from one transport step to the next."""
    tangents = unit_tangents(fc.points)
    n = fc.normals
    worst = 0.0
    for k in range(len(n) - 1):
        worst = max(worst, float(np.linalg.norm(
            n[k + 1] - _rotate_step(n[k], tangents[k], tangents[k + 1]))))
    return worst


def enveloped_sphere(x_pt, nrm, xhat_pt, tol=DEFAULT_TOL):
    """Sphere touching ``x_pt`` with normal ``nrm`` and passing through ``xhat_pt``."""
    x_pt = np.asarray(x_pt, dtype=float)
    xhat_pt = np.asarray(xhat_pt, dtype=float)
    if np.linalg.norm(x_pt - xhat_pt) <= tol * max(1.0, np.linalg.norm(x_pt)):
        raise CoincidentPoints("contact point and second point coincide")
    t = plane_lift(nrm, x_pt)
    xi, xih = lz.lift(x_pt), lz.lift(xhat_pt)
    return t - lz.inner(xih, t) / lz.inner(xih, xi) * xi


def induced_normal(s, xhat_pt, tol=DEFAULT_TOL):
    """Plane lift of the normal that the sphere ``s`` induces at its point ``xhat_pt``."""
    s = np.asarray(s, dtype=float)
    xih = lz.lift(xhat_pt)
    if abs(lz.inner(s, xih)) > tol * max(1.0, np.linalg.norm(xhat_pt)):
        raise InputNotIncident("point is not on the sphere")
    return s - s[0] * xih


def spherical_reduction(xi, t, e):
    """Touching point ``s - e`` of ``e`` with the sphere ``t + k xi`` tangent to both.

    ``k = (1 - (e, t)) / (e, xi)``; broadcasts over samples.  Returns the
    null vector of the new point and the touching spheres.
    """
    k = (1.0 - lz.inner(e, t)) / lz.inner(e, xi)
    s = t + np.asarray(k)[..., None] * xi
    return s - e, s


def _check_disjoint(points, e, tol):
    # the sampled curve meets e at a sample or between two samples of opposite side
    side = lz.inner(e, lz.lift(points))
    scale = np.maximum(1.0, np.linalg.norm(points, axis=1))
    hits = np.flatnonzero(np.abs(side) <= tol * scale)
    if hits.size:
        raise CurveMeetsSphere("curve meets the target sphere", index=int(hits[0]))
    flips = np.flatnonzero(np.sign(side[1:]) != np.sign(side[:-1]))
    if flips.size:
        raise CurveMeetsSphere("curve crosses the target sphere", index=int(flips[0]))


def reduce_smooth(fc, e, tol=DEFAULT_TOL, frame_tol=1e-8):
    """Ribaucour transform of a framed curve into the hypersphere ``e``.

    The frame must be parallel (checked against one transport step with
    ``frame_tol``).  Returns the new sample points and the enveloped
    sphere congruence.
    """
    e = np.asarray(e, dtype=float)
    xi = lz.lift(fc.points)
    _check_disjoint(fc.points, e, tol)
    resid = parallel_residual(fc)
    if resid > frame_tol:
        raise NonParallelFrame("normal field is not parallel", residual=resid)
    xih, s = spherical_reduction(xi, fc.plane_lifts(), e)
    return Reduction(lz.unlift(xih, tol), SphereCongruence(s))


def _check_den(den, terms, tol, what):
    if abs(den) <= tol * max(sum(abs(t) for t in terms), 1e-300):
        raise ZeroDenominator(f"{what} vanishes")


def permij_closed_form(xi, ti, tj, ei, ej, tol=DEFAULT_TOL):
    """Closed form of the double reduction into ``<e_i, e_j>^perp``.

    ``(t_j - e_j) + A (t_i - e_i) + B xi`` with the coefficients of the
    Bianchi permutability computation; symmetric in i and j up to scale.
    """
    ai = 1.0 - lz.inner(ei, ti)
    aj = 1.0 - lz.inner(ej, tj)
    cij = lz.inner(ei, tj)
    cji = lz.inner(ej, ti)
    eps_i = lz.inner(ei, xi)
    eps_j = lz.inner(ej, xi)
    d_ij = ai * eps_j + cji * eps_i
    d_ji = aj * eps_i + cij * eps_j
    _check_den(d_ij, (ai * eps_j, cji * eps_i), tol, "denominator (i, j)")
    _check_den(d_ji, (aj * eps_i, cij * eps_j), tol, "denominator (j, i)")
    b = ai * aj - cij * cji
    return (tj - ej) + d_ji / d_ij * (ti - ei) + b / d_ij * xi


def bquad_system(xi, ts, es):
    """The k x (k+1) system ``(xi_hat, e_i) = 0`` for the reduction coefficients."""
    ts = np.atleast_2d(ts)
    es = np.atleast_2d(es)
    k = len(es)
    mat = np.empty((k, k + 1))
    mat[:, 0] = lz.inner(es, xi)
    mat[:, 1:] = lz.inner(es[:, None, :], (ts - es)[None, :, :])
    return mat


def bquad_nullspace(xi, ts, es, tol=DEFAULT_TOL):
    """Coefficients ``(a_0, a_1..a_k)`` of ``a_0 xi + sum a_i (t_i - e_i)`` orthogonal to all ``e_i``.

    Gauge: ``a_0 = 1`` when ``a_0`` is not negligible, otherwise a unit
    vector whose first nonzero entry is positive.
    """
    es = np.atleast_2d(es)
    g = lz.gram(es)
    if not np.allclose(g, np.eye(len(es)), atol=1e-8):
        raise ValueError("target hyperspheres must be orthonormal")
    mat = bquad_system(xi, ts, es)
    _, sv, vt = np.linalg.svd(mat)
    k = len(es)
    if sv[-1] <= tol * sv[0] or np.sum(sv > tol * sv[0]) < k:
        raise RankDeficient("reduction equations are dependent")
    a = vt[k]
    if abs(a[0]) > tol * np.linalg.norm(a):
        return a / a[0]
    lead = np.flatnonzero(np.abs(a) > tol)[0]
    return a * np.sign(a[lead])


def bquad_point(xi, ts, es, coeffs):
    ts = np.atleast_2d(ts)
    es = np.atleast_2d(es)
    return coeffs[0] * np.asarray(xi) + coeffs[1:] @ (ts - es)


def coords_smooth(points, n1_0, n2_0, e1, e2, tol=DEFAULT_TOL):
    """Ribaucour coordinates of a sampled space curve on the circle ``<e1, e2>^perp``.

    Both normals are transported in parallel and the double reduction is
    solved per sample.  Returns the image samples.
    """
    if abs(lz.inner(e1, e2)) > tol:
        raise ValueError("target hyperspheres must intersect orthogonally")
    f1 = transport_normal(points, n1_0, tol)
    f2 = transport_normal(points, n2_0, tol)
    if abs(np.asarray(n1_0) @ np.asarray(n2_0)) > tol:
        raise ValueError("initial normals must be orthonormal")
    xi = lz.lift(f1.points)
    t1, t2 = f1.plane_lifts(), f2.plane_lifts()
    es = np.array([e1, e2], dtype=float)
    _check_disjoint(f1.points, e1, tol)
    _check_disjoint(f1.points, e2, tol)
    out = np.empty_like(f1.points)
    for k in range(len(out)):
        try:
            a = bquad_nullspace(xi[k], [t1[k], t2[k]], es, tol)
            out[k] = lz.unlift(bquad_point(xi[k], [t1[k], t2[k]], es, a), tol)
        except GeometryError as err:
            err.index = k
            raise
    return out


def iterated_reduction(points, normals1, normals2, e1, e2, tol=DEFAULT_TOL):
    """Reduce into ``e1`` and then into ``e2``, carrying the second normal along.

    The second normal field is moved to the intermediate curve by the
    enveloped spheres; returns the null vectors of the final points.
    """
    points = np.asarray(points, dtype=float)
    xi = lz.lift(points)
    xi1, _ = spherical_reduction(xi, plane_lift(normals1, points), np.asarray(e1))
    x1 = lz.unlift(xi1, tol)
    out = np.empty_like(xi)
    for k in range(len(points)):
        s2 = enveloped_sphere(points[k], normals2[k], x1[k], tol)
        t12 = induced_normal(s2, x1[k], tol)
        out[k], _ = spherical_reduction(lz.lift(x1[k]), t12, np.asarray(e2))
    return out
