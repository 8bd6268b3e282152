"""Minkowski linear algebra of R^{n+1,1} for the light-cone model.

Vectors are float arrays of length n + 2 laid out in the basis
``(o, e_1, ..., e_n, q)``, where ``o`` and ``q`` are isotropic with
``(o, q) = -1`` and the ``e_i`` are an orthonormal basis of R^n.  A point
``x`` of R^n lifts to the null vector ``o + x + |x|^2/2 q``; hyperspheres
and planes are unit spacelike vectors (see :mod:`ribaucour.incidence`).

All functions are pure and accept either single vectors or stacks of them
(leading axes broadcast).
"""

import numpy as np
from scipy.linalg import expm, null_space

from .errors import DegenerateSignature, PointAtInfinity

DEFAULT_TOL = 1e-9
MIN_DIM, MAX_DIM = 2, 6


def metric(n):
    """Gram matrix of the basis ``(o, e_1..e_n, q)``."""
    g = np.eye(n + 2)
    g[0, 0] = g[-1, -1] = 0.0
    g[0, -1] = g[-1, 0] = -1.0
    return g


def _check_finite(a, what="vector"):
    if not np.all(np.isfinite(a)):
        raise ValueError(f"non-finite {what}: {a!r}")
    return a


def _check_dim(n):
    if not MIN_DIM <= n <= MAX_DIM:
        raise ValueError(f"ambient dimension {n} outside supported range "
                         f"{MIN_DIM}..{MAX_DIM}")


def as_vector(v):
    """Validate and return ``v`` as a float Lorentz vector (or stack)."""
    v = _check_finite(np.asarray(v, dtype=float))
    if v.ndim == 0:
        raise ValueError("expected a vector, got a scalar")
    _check_dim(v.shape[-1] - 2)
    return v


def vector(o_coeff, euclid, q_coeff):
    """Assemble ``o_coeff*o + euclid + q_coeff*q``."""
    return as_vector(np.concatenate([[o_coeff], np.asarray(euclid, float), [q_coeff]]))


def origin(n):
    v = np.zeros(n + 2)
    v[0] = 1.0
    return v


def infinity(n):
    v = np.zeros(n + 2)
    v[-1] = 1.0
    return v


def unit(i, n):
    """The basis vector e_i, 1-based like the ambient coordinates."""
    if not 1 <= i <= n:
        raise ValueError(f"no basis vector e_{i} in dimension {n}")
    v = np.zeros(n + 2)
    v[i] = 1.0
    return v


def inner(v, w):
    """Minkowski inner product, broadcasting over leading axes."""
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    if v.shape[-1] != w.shape[-1]:
        raise ValueError(f"dimension mismatch: {v.shape[-1]} vs {w.shape[-1]}")
    euclid = np.sum(v[..., 1:-1] * w[..., 1:-1], axis=-1)
    return euclid - v[..., 0] * w[..., -1] - v[..., -1] * w[..., 0]


def gram(vs):
    vs = np.atleast_2d(np.asarray(vs, dtype=float))
    return vs @ metric(vs.shape[-1] - 2) @ vs.T


def lift(x):
    """Euclidean lift ``x -> o + x + |x|^2/2 q``; works on stacks of points."""
    x = _check_finite(np.asarray(x, dtype=float), "point")
    if x.ndim == 0:
        raise ValueError("expected a point, got a scalar")
    _check_dim(x.shape[-1])
    ones = np.ones(x.shape[:-1] + (1,))
    half = 0.5 * np.sum(x * x, axis=-1, keepdims=True)
    return np.concatenate([ones, x, half], axis=-1)


def unlift(v, tol=DEFAULT_TOL):
    """Euclidean point represented by a null vector.

    Rescales to ``(v, q) = -1`` and returns the Euclidean part.  Raises
    :class:`PointAtInfinity` for vectors on the line spanned by ``q``.
    """
    v = as_vector(v)
    o = v[..., 0]
    if np.any(np.abs(o) <= tol * np.linalg.norm(v, axis=-1)):
        raise PointAtInfinity("null vector represents the point at infinity")
    return v[..., 1:-1] / o[..., None]


def normalize(v, tol=DEFAULT_TOL):
    """Gauge-fix a vector: ``(v, q) = -1`` when possible, else leading coefficient 1."""
    v = as_vector(v)
    scale = np.linalg.norm(v)
    if abs(v[0]) > tol * scale:
        return v / v[0]
    lead = np.flatnonzero(np.abs(v) > tol * scale)
    if lead.size == 0:
        raise ValueError("cannot normalize the zero vector")
    return v / v[lead[0]]


def projective_angle(v, w):
    """Euclidean angle between the lines spanned by ``v`` and ``w`` (in [0, pi/2])."""
    v = np.asarray(v, float) / np.linalg.norm(v)
    w = np.asarray(w, float) / np.linalg.norm(w)
    c = abs(v @ w)
    s = np.linalg.norm(w - (v @ w) * v)
    return float(np.arctan2(s, c))


def relative_spectrum(vs):
    """Absolute Gram eigenvalues, descending, divided by the largest one."""
    lam = np.sort(np.abs(np.linalg.eigvalsh(gram(vs))))[::-1]
    top = lam[0]
    return lam / top if top > 0 else lam


def rank_residual(vs, rank):
    """How far the Gram of ``vs`` is from having rank at most ``rank``.

    The ``rank + 1``-st largest absolute eigenvalue relative to the largest;
    zero when there are no more than ``rank`` vectors.
    """
    eig = relative_spectrum(vs)
    return float(eig[rank]) if rank < eig.size else 0.0


def gram_signature(vs, tol=DEFAULT_TOL):
    """``(rank, pos, neg)`` of the Gram matrix of ``vs``.

    Eigenvalues with ``|lambda| <= tol * max|lambda|`` count as zero.
    """
    lam = np.linalg.eigvalsh(gram(vs))
    cut = tol * np.max(np.abs(lam)) if lam.size else 0.0
    pos = int(np.sum(lam > cut))
    neg = int(np.sum(lam < -cut))
    return pos + neg, pos, neg


def _euclid_rank(vs, tol):
    if len(vs) == 0:
        return 0
    sv = np.linalg.svd(vs, compute_uv=False)
    return int(np.sum(sv > tol * sv[0])) if sv[0] > 0 else 0


class SphereSubspace:
    """A linear subspace of R^{n+1,1}, spanned by the rows of ``basis``.

    Subspaces of signature ``(k-1, 1)`` represent (k-2)-spheres: circles for
    k = 3, 2-spheres for k = 4, and so on.  ``frame`` is a Euclidean
    orthonormal basis of the same span, used for all numerical work.
    Instances are immutable.
    """

    __slots__ = ("basis", "frame", "gram", "rank", "signature")

    def __init__(self, basis, tol=DEFAULT_TOL):
        basis = as_vector(np.atleast_2d(np.asarray(basis, dtype=float)))
        if _euclid_rank(basis, tol) != len(basis):
            raise ValueError("subspace basis is linearly dependent")
        q, _ = np.linalg.qr(basis.T)
        frame = q.T
        g = gram(basis)
        rank, pos, neg = gram_signature(basis, tol)
        for arr in (basis, frame, g):
            arr.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "frame", frame)
        object.__setattr__(self, "gram", g)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "signature", (pos, neg))

    def __setattr__(self, name, value):
        raise AttributeError("SphereSubspace is immutable")

    def __repr__(self):
        return f"SphereSubspace(dim={self.dim}, signature={self.signature})"

    @property
    def dim(self):
        return self.basis.shape[0]

    @property
    def ambient_dim(self):
        return self.basis.shape[1] - 2

    @property
    def nondegenerate(self):
        return self.rank == self.dim

    @property
    def is_sphere(self):
        """True for signature ``(k-1, 1)``, i.e. a genuine (k-2)-sphere."""
        return self.nondegenerate and self.signature[1] == 1

    def project(self, v):
        return (np.asarray(v, float) @ self.frame.T) @ self.frame

    def residual(self, v):
        """Relative Euclidean distance of ``v`` from the subspace."""
        v = np.asarray(v, float)
        return float(np.linalg.norm(v - self.project(v)) / np.linalg.norm(v))

    def contains(self, v, tol=DEFAULT_TOL):
        return self.residual(v) <= tol

    def same_span(self, other, tol=DEFAULT_TOL):
        if self.dim != other.dim:
            return False
        return all(self.contains(row, tol) for row in other.frame)


def span(vs, tol=DEFAULT_TOL):
    return SphereSubspace(vs, tol)


def orthogonal_complement(vs, n=None, tol=DEFAULT_TOL):
    """Metric orthogonal complement of the span of ``vs``.

    ``n`` (the ambient dimension) is only needed when ``vs`` is empty.
    """
    if isinstance(vs, SphereSubspace):
        vs = vs.basis
    vs = np.asarray(vs, dtype=float)
    if vs.size == 0:
        if n is None:
            raise ValueError("ambient dimension required for an empty span")
        _check_dim(n)
        return SphereSubspace(np.eye(n + 2), tol)
    vs = as_vector(np.atleast_2d(vs))
    if _euclid_rank(vs, tol) != len(vs):
        raise ValueError("spanning set is linearly dependent")
    comp = null_space(vs @ metric(vs.shape[-1] - 2), rcond=tol)
    return SphereSubspace(comp.T, tol)


def null_directions_2d(w, tol=DEFAULT_TOL):
    """The two null lines of a 2-dimensional subspace of signature (1, 1).

    Returns gauge-normalized representatives.  Raises
    :class:`DegenerateSignature` for spacelike or degenerate planes.
    """
    basis = w.basis if isinstance(w, SphereSubspace) else np.atleast_2d(as_vector(w))
    if basis.shape[0] != 2:
        raise ValueError(f"expected a 2-dimensional subspace, got {basis.shape[0]}")
    lam, u = np.linalg.eigh(gram(basis))
    cut = tol * np.max(np.abs(lam))
    if not (lam[0] < -cut and lam[1] > cut):
        raise DegenerateSignature(f"plane has Gram eigenvalues {lam}, not signature (1,1)")
    neg = (u[:, 0] @ basis) / np.sqrt(-lam[0])
    pos = (u[:, 1] @ basis) / np.sqrt(lam[1])
    return normalize(pos + neg, tol), normalize(pos - neg, tol)


def random_lorentz(n, rng, scale=0.5):
    """A random element of the identity component of O(n+1, 1).

    Exponential of a random Lie algebra element ``A = G K`` with ``K``
    antisymmetric, so ``A^T G + G A = 0``.  ``scale`` bounds the generator
    entries; moderate values keep finite points away from infinity.
    """
    g = metric(n)
    k = rng.normal(scale=scale, size=(n + 2, n + 2))
    k = k - k.T
    return expm(g @ k)


def is_lorentz(mat, tol=1e-10):
    g = metric(mat.shape[0] - 2)
    return np.allclose(mat.T @ g @ mat, g, atol=tol * max(1.0, np.abs(mat).max() ** 2))


def transform_points(mat, points, tol=DEFAULT_TOL):
    """Apply a Lorentz transformation to Euclidean points via their lifts."""
    return unlift(lift(points) @ mat.T, tol)
