"""Figures for command reports, rendered off-screen to image files."""

import numpy as np
from matplotlib.figure import Figure

FIGSIZE = (6.0, 4.5)
DPI = 120


def _axes(fig, dim):
    if dim == 3:
        ax = fig.add_subplot(projection="3d")
        ax.set_box_aspect((1, 1, 1))
    else:
        ax = fig.add_subplot()
        ax.set_aspect("equal", adjustable="datalim")
    return ax


def _save(fig, path):
    # PNG metadata is pinned so reruns produce identical bytes
    fig.savefig(path, dpi=DPI, metadata={"Software": None})


def _plot_polyline(ax, pts, **kw):
    pts = np.asarray(pts)
    if pts.shape[-1] >= 3:
        return ax.plot(pts[:, 0], pts[:, 1], pts[:, 2], **kw)
    return ax.plot(pts[:, 0], pts[:, 1], **kw)


def plot_curves(path, curves, labels=None, title=None):
    """Polylines of 2D or 3D curves (higher dimensions show the first three axes)."""
    curves = [np.asarray(c, dtype=float) for c in curves]
    dim = min(3, curves[0].shape[1])
    fig = Figure(figsize=FIGSIZE)
    ax = _axes(fig, dim)
    labels = labels or [f"curve {i}" for i in range(len(curves))]
    for pts, label in zip(curves, labels):
        _plot_polyline(ax, pts[:, :dim], marker=".", ms=3, lw=1, label=label)
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    _save(fig, path)


def plot_net(path, points, title=None):
    """Both families of parameter lines of a net."""
    points = np.asarray(points, dtype=float)
    dim = min(3, points.shape[2])
    fig = Figure(figsize=FIGSIZE)
    ax = _axes(fig, dim)
    for i in range(points.shape[0]):
        _plot_polyline(ax, points[i, :, :dim], color="C0", lw=1)
    for j in range(points.shape[1]):
        _plot_polyline(ax, points[:, j, :dim], color="C1", lw=1)
    if title:
        ax.set_title(title)
    _save(fig, path)


def plot_strips(path, strips, title=None):
    """Wireframes of channel strips, one color per strip."""
    fig = Figure(figsize=FIGSIZE)
    ax = _axes(fig, 3)
    for k, strip in enumerate(strips):
        p = strip.points
        ax.plot_wireframe(p[..., 0], p[..., 1], p[..., 2], color=f"C{k % 10}", lw=0.5,
                          rcount=p.shape[0], ccount=min(p.shape[1], 64))
    if title:
        ax.set_title(title)
    _save(fig, path)


def plot_residuals(path, series, floor=1e-18, title=None):
    """Residual sequences on a log scale, one line per named series."""
    fig = Figure(figsize=FIGSIZE)
    ax = fig.add_subplot()
    for name, values in series.items():
        values = np.asarray(values, dtype=float).ravel()
        ax.semilogy(np.arange(len(values)), np.maximum(np.abs(values), floor),
                    marker=".", lw=1, label=name)
    ax.set_xlabel("index")
    ax.set_ylabel("residual")
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    _save(fig, path)
