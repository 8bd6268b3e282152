"""Channel-surface strips spanned by Ribaucour pairs of sampled curves.

For each sample ``u`` the sphere ``s(u)`` touching both curves meets its
neighbour in a characteristic circle through ``x(u)`` and ``xhat(u)``; an
arc of that circle is one column of the strip.  Gluing strips along their
shared curves with induced normals gives a C^1 surface.
"""

from dataclasses import dataclass, field

import numpy as np

from . import incidence as inc
from . import lorentz as lz
from . import smooth as sm
from .discrete import DiscreteCurve, pair_validate
from .errors import (
    BoundaryMismatch,
    DegenerateDerivative,
    DegenerateSignature,
    GeometryError,
    NonRibaucourInput,
)
from .lorentz import DEFAULT_TOL


@dataclass(frozen=True, eq=False)
class QuadStrip:
    """A ``(k_arc, k_u)`` grid of points with one sphere per column.

    Row 0 is the source curve, row ``k_arc - 1`` its partner.  ``normals``
    holds the unit normal of the column sphere at each vertex.
    """

    points: np.ndarray
    spheres: np.ndarray
    normals: np.ndarray
    reversed: bool = field(default=False)

    def __post_init__(self):
        for name in ("points", "spheres", "normals"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def shape(self):
        return self.points.shape[:2]

    def vertex_residuals(self):
        """``|(s_u, lift(p))|`` for every vertex against its column sphere."""
        return np.abs(lz.inner(self.spheres[None, :, :], lz.lift(self.points)))

    def faces(self):
        """Quad faces as 0-based vertex indices into ``points.reshape(-1, 3)``."""
        rows, cols = self.shape
        idx = np.arange(rows * cols).reshape(rows, cols)
        return np.stack([idx[:-1, :-1], idx[:-1, 1:], idx[1:, 1:], idx[1:, :-1]],
                        axis=-1).reshape(-1, 4)


def characteristic_circle(s, s_prime, contact=None, tol=DEFAULT_TOL):
    """The circle ``<s, s'>^perp`` where neighbouring spheres of a family meet.

    ``s'`` is first made orthogonal to ``s``; with ``contact = (x, xhat)``
    it is also made orthogonal to both lifts, so the circle passes exactly
    through the two contact points.
    """
    s = np.asarray(s, dtype=float)
    d = np.asarray(s_prime, dtype=float)
    d = d - lz.inner(d, s) / lz.inner(s, s) * s
    if contact is not None:
        xi, xih = lz.lift(contact[0]), lz.lift(contact[1])
        pair = lz.inner(xi, xih)
        d = d - lz.inner(d, xih) / pair * xi - lz.inner(d, xi) / pair * xih
    if np.linalg.norm(d) <= tol * np.linalg.norm(s):
        raise DegenerateDerivative("sphere family is locally constant")
    if lz.inner(d, d) <= tol * (d @ d):
        raise DegenerateSignature("sphere and its derivative do not span a spacelike plane")
    circle = lz.orthogonal_complement([s, d], tol=tol)
    if circle.signature != (len(s) - 3, 1):
        raise DegenerateSignature(f"characteristic subspace has signature {circle.signature}")
    return circle


def _derivative(vs):
    order = 2 if len(vs) > 2 else 1
    return np.gradient(vs, axis=0, edge_order=order)


def channel_strip(fc, xhat, k_arc, reverse=False, tol=DEFAULT_TOL, pair_tol=None):
    """Strip of the channel surface enveloped by the spheres touching ``fc`` and ``xhat``.

    ``fc`` is the framed source curve and ``xhat`` its sampled partner; the
    pair must pass edge-quad concircularity within ``pair_tol`` (defaults to
    ``tol``).  Each column is an arc of ``k_arc`` points.
    """
    xhat = np.asarray(xhat, dtype=float)
    if xhat.shape != fc.points.shape:
        raise ValueError(f"curve shapes differ: {fc.points.shape} vs {xhat.shape}")
    report = pair_validate(DiscreteCurve(fc.points), DiscreteCurve(xhat), pair_tol or tol)
    if not report.passed:
        bad = report.failing_edges
        raise NonRibaucourInput("curves are not a Ribaucour pair",
                                index=int(bad[0]), residual=float(report.residuals.max()))
    m = len(fc)
    spheres = np.array([sm.enveloped_sphere(fc.points[k], fc.normals[k], xhat[k], tol)
                        for k in range(m)])
    derivs = _derivative(spheres)
    pts = np.empty((k_arc, m, fc.ambient_dim))
    for k in range(m):
        try:
            circle = characteristic_circle(spheres[k], derivs[k], (fc.points[k], xhat[k]), tol)
            pts[:, k] = inc.sample_circle_arc(circle, fc.points[k], xhat[k], k_arc, reverse, tol)
        except GeometryError as err:
            err.index = k
            raise
    normals = inc.surface_normal(spheres[None, :, :], pts)
    normals[0] = fc.normals
    return QuadStrip(pts, spheres, normals, reverse)


def induced_frame(strip, tol=DEFAULT_TOL):
    """The far boundary curve of a strip with the normals its spheres induce."""
    far = strip.points[-1]
    nrm = np.array([sm.induced_normal(strip.spheres[k], far[k], tol)[1:-1]
                    for k in range(len(far))])
    return sm.FramedCurve(far, nrm, ortho_tol=None)


def smooth_seminet(curves, n0, k_arc=9, reverse=False, tol=DEFAULT_TOL, pair_tol=None):
    """Channel strips between consecutive curves of a semi-discrete net.

    The first curve gets the parallel field with initial normal ``n0``;
    every later curve carries the normals induced by the previous strip.
    Returns the strips and, per seam, the normals seen from both sides.
    """
    if len(curves) < 2:
        raise ValueError("need at least two curves")
    fc = sm.transport_normal(curves[0], n0, tol)
    strips, seams = [], []
    for k in range(len(curves) - 1):
        try:
            if k > 0:
                fc = induced_frame(strips[-1], tol)
                if not np.array_equal(fc.points, np.asarray(curves[k], dtype=float)):
                    raise BoundaryMismatch("strip boundary differs from the net curve")
            strip = channel_strip(fc, curves[k + 1], k_arc, reverse, tol, pair_tol)
        except GeometryError as err:
            err.stage = k
            raise
        if strips:
            seams.append((strips[-1].normals[-1], strip.normals[0]))
        strips.append(strip)
    return strips, seams


def seam_continuity(a, b):
    """Largest angle (radians) between the normals of two strips along their shared row."""
    if a.points.shape[1:] != b.points.shape[1:] or not np.array_equal(a.points[-1], b.points[0]):
        raise BoundaryMismatch("strips do not share a boundary row")
    na, nb = a.normals[-1], b.normals[0]
    cos = np.sum(na * nb, axis=-1)
    sin = np.linalg.norm(nb - cos[:, None] * na, axis=-1)
    return float(np.max(np.arctan2(sin, cos)))
