"""Random instance generators and Euclidean oracles shared by the tests.

The oracles use plain Euclidean geometry (circumcenters, complex
coordinates, trigonometric parametrizations) and none of the library's
light-cone machinery, so they check it independently.
"""

import numpy as np

from ribaucour import discrete as dc
from ribaucour import incidence as inc

# Minkowski metric in the (o, e1..en, q) layout, written out independently
def minkowski(n):
    g = np.zeros((n + 2, n + 2))
    g[1:-1, 1:-1] = np.eye(n)
    g[0, -1] = g[-1, 0] = -1.0
    return g


def random_curve(rng, m, dim=3, radius=1.5):
    """Polygon with ``m`` vertices inside the ball of the given radius."""
    steps = rng.normal(size=(m, dim))
    steps /= np.linalg.norm(steps, axis=1)[:, None]
    pts = np.cumsum(steps, axis=0)
    pts -= pts.mean(axis=0)
    return pts * (radius / np.linalg.norm(pts, axis=1).max())


def unit_vector(rng, dim=3):
    v = rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_far_sphere(rng, dist=(4.0, 6.0), radius=(1.0, 2.0), dim=3):
    """Center and radius of a sphere well away from the ball of radius 1.5."""
    c = unit_vector(rng, dim) * rng.uniform(*dist)
    return c, rng.uniform(*radius)


def point_on(rng, center, radius):
    return np.asarray(center) + radius * unit_vector(rng, len(center))


def sphere_distance(p, center, radius):
    return abs(np.linalg.norm(np.asarray(p) - center) - radius)


def circumcircle(p1, p2, p3):
    """Center, radius and unit plane normal of the circle through three points in R^3."""
    p1, p2, p3 = (np.asarray(p, dtype=float) for p in (p1, p2, p3))
    a, b = p1 - p3, p2 - p3
    axb = np.cross(a, b)
    center = p3 + np.cross(a @ a * b - b @ b * a, axb) / (2.0 * axb @ axb)
    return center, np.linalg.norm(p1 - center), axb / np.linalg.norm(axb)


def circle_distance(p, center, radius, normal):
    """Euclidean distance from ``p`` to a circle in R^3."""
    d = np.asarray(p) - center
    h = d @ normal
    inplane = d - h * normal
    return np.hypot(h, np.linalg.norm(inplane) - radius)


def concircular_gap(p1, p2, p3, p4):
    """Distance of the fourth point from the circle through the first three."""
    pts = [np.pad(np.asarray(p, float), (0, 3 - len(p))) for p in (p1, p2, p3, p4)]
    c, r, n = circumcircle(*pts[:3])
    return circle_distance(pts[3], c, r, n)


def complex_cross_ratio(p1, p2, p3, p4):
    """``(p1-p2)(p3-p4) / ((p2-p3)(p4-p1))`` in complex coordinates of the common plane."""
    pts = np.array([np.pad(np.asarray(p, float), (0, 3 - len(p))) for p in (p1, p2, p3, p4)])
    c, _, n = circumcircle(*pts[:3])
    u = pts[0] - c
    u /= np.linalg.norm(u)
    v = np.cross(n, u)
    z = (pts - c) @ u + 1j * ((pts - c) @ v)
    return (z[0] - z[1]) * (z[2] - z[3]) / ((z[1] - z[2]) * (z[3] - z[0]))


def circle_sphere_second(p1, p2, known, center, radius):
    """Second intersection of the circle through ``p1, p2, known`` with a sphere.

    Parametrizes the circle by angle from ``known`` and solves
    ``A cos t + B sin t = C``; ``t = 0`` is the known root.
    """
    c, r, n = circumcircle(p1, p2, known)
    u = (np.asarray(known) - c) / r
    v = np.cross(n, u)
    w = c - np.asarray(center)
    # |w + r(cos t u + sin t v)|^2 = R^2
    a_coef = 2.0 * r * (w @ u)
    b_coef = 2.0 * r * (w @ v)
    rest = radius ** 2 - w @ w - r * r
    # roots of a cos t + b sin t = rest; the known root is t = 0
    phi = np.arctan2(b_coef, a_coef)
    t = 2.0 * phi  # reflection of t = 0 about phi
    assert abs(a_coef - rest) < 1e-8 * max(1.0, abs(rest))
    return c + r * (np.cos(t) * u + np.sin(t) * v)


def random_net(rng, rows=6, cols=6, jitter=0.2):
    """A circular net whose rows are successive transforms onto nested spheres."""
    row = random_curve(rng, cols)
    row = row / np.linalg.norm(row, axis=1)[:, None] * rng.uniform(1.5, 2.5, size=(cols, 1))
    out = [row]
    for i in range(1, rows):
        radius = 3.0 + 0.7 * (i - 1)
        center = jitter * rng.uniform(-1, 1, size=3) / np.sqrt(3)
        s = inc.sphere_from_center_radius(center, radius)
        out.append(dc.curve_transform_to_sphere(out[-1], s, point_on(rng, center, radius)).points)
    return np.array(out)


def orthogonal_sphere_pair(rng, n=3):
    """Two unit spacelike vectors with ``(e1, e2) = 0``, both genuine spheres."""
    g = minkowski(n)
    while True:
        c1 = rng.normal(size=n) * 2
        r1 = rng.uniform(0.5, 2.0)
        e1 = inc.sphere_from_center_radius(c1, r1)
        # sphere orthogonal to e1: |c1 - c2|^2 = r1^2 + r2^2
        r2 = rng.uniform(0.5, 2.0)
        c2 = c1 + unit_vector(rng, n) * np.hypot(r1, r2)
        e2 = inc.sphere_from_center_radius(c2, r2)
        if abs(e1 @ g @ e2) < 1e-12:
            return e1, e2


def orthonormal_normals(rng, dim=3):
    q, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    return q[:, 0], q[:, 1]


def helix(m, turns=1.0):
    u = np.linspace(0.0, 2.0 * np.pi * turns, m)
    return np.c_[np.cos(u), np.sin(u), u / 4.0]


def seminet_curves(m=128):
    """Four sampled curves, each a discrete Ribaucour transform of the last.

    The half-turn helix is carried onto three unit spheres; each initial
    point is the smooth transform's first sample so the sequences stay smooth.
    """
    from ribaucour import discrete as dc
    from ribaucour import incidence as inc
    from ribaucour import smooth as sm

    curve = helix(m, 0.5)
    fc = sm.transport_normal(curve, sm.initial_normal(curve, [0, 0, 1.0]))
    curves, frame = [curve], fc
    for c in ([3.0, 0, 0.5], [0, 3.0, 0.5], [-3.0, 0, 0.5]):
        e = inc.sphere_from_center_radius(c, 1.0)
        red = sm.reduce_smooth(frame, e, frame_tol=np.inf)
        y = dc.curve_transform_to_sphere(curves[-1], e, red.points[0]).points
        nrm = np.array([sm.induced_normal(red.spheres[k], red.points[k])[1:-1] for k in range(m)])
        frame = sm.FramedCurve(red.points, nrm, ortho_tol=None)
        curves.append(y)
    return curves, fc.normals[0]
