"""Command-line front end.

Every command reads JSON geometry, writes its result atomically and emits
a JSON report (to ``--report`` or stdout).  Exit status is 0 on success,
2 when the geometry is degenerate or fails validation, 1 for bad input.
"""

import argparse
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import channel as ch
from . import discrete as dc
from . import incidence as inc
from . import io
from . import lorentz as lz
from . import smooth as sm
from .errors import GeometryError
from .lorentz import DEFAULT_TOL

EXIT_OK, EXIT_INPUT, EXIT_GEOMETRY = 0, 1, 2


@dataclass
class JobConfig:
    command: str
    input: str = None
    output: str = None
    target: str = None
    sphere: str = None
    sphere2: str = None
    initial: list = field(default_factory=list)
    aux: str = None
    normal: str = None
    normal2: str = None
    order: str = "both"
    reverse: bool = False
    tol: float = DEFAULT_TOL
    seed: int = 0
    arc_samples: int = 9
    report: str = None
    figure: str = None

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.arc_samples < 2:
            raise ValueError("arc samples must be at least 2")

    @property
    def rng(self):
        return np.random.default_rng(self.seed)


class ValidationFailed(Exception):
    """A validate command found violated conditions; carries the report."""

    def __init__(self, report):
        super().__init__("validation failed")
        self.report = report


def _need(cfg, name):
    value = getattr(cfg, name)
    if value is None:
        raise ValueError(f"{cfg.command} needs --{name.replace('_', '-')}")
    return value


def _initials(cfg, count, spheres, rng, dim):
    pts = [io.parse_point(p, dim) for p in cfg.initial]
    if len(pts) > count:
        raise ValueError(f"{cfg.command} takes at most {count} --initial points")
    while len(pts) < count:
        pts.append(inc.random_point(spheres, rng, cfg.tol))
    return pts


def _residuals(points, s):
    pts = np.asarray(points)
    return np.abs(lz.inner(s, lz.lift(pts)))


def _pair_report(x, y, tol):
    rep = dc.pair_validate(x, y, tol)
    return {"passed": rep.passed, "residuals": rep.residuals,
            "cross_ratios": rep.cross_ratios, "failing_edges": rep.failing_edges}


def cmd_transform(cfg):
    kind, data = io.read_geometry(_need(cfg, "input"))
    e = io.load_sphere(_need(cfg, "sphere"))
    rng = cfg.rng
    report = {"input_kind": kind}
    if kind == "framed_curve":
        if cfg.initial:
            raise ValueError("a framed curve is reduced without an initial point")
        pts, nrm = data
        fc = sm.FramedCurve(pts, nrm, ortho_tol=None)
        red = sm.reduce_smooth(fc, e, cfg.tol)
        induced = np.array([sm.induced_normal(red.spheres[k], red.points[k], cfg.tol)[1:-1]
                            for k in range(len(pts))])
        io.write_json(_need(cfg, "output"), io.curve_doc(red.points, induced))
        report.update(sphere_residuals=_residuals(red.points, e),
                      contact_residuals=red.spheres.contact_residuals(pts),
                      pair_residuals=dc.pair_validate(pts, red.points, cfg.tol).residuals)
        figure = ("curves", [pts, red.points], ["input", "transform"])
    elif kind == "curve":
        (initial,) = _initials(cfg, 1, [e], rng, data.shape[1])
        out = dc.curve_transform_to_sphere(data, e, initial, cfg.tol)
        io.write_json(_need(cfg, "output"), io.curve_doc(out.points))
        report.update(initial=initial, sphere_residuals=_residuals(out.points, e),
                      tangent_steps=list(out.tangent_steps),
                      pair=_pair_report(data, out, cfg.tol))
        figure = ("curves", [data, out.points], ["input", "transform"])
    elif kind == "net":
        return cmd_reduce_net(cfg, data, e)
    else:
        raise ValueError(f"transform does not accept {kind} input")
    return report, figure


def cmd_reduce_net(cfg, grid=None, e=None):
    if grid is None:
        kind, grid = io.read_geometry(_need(cfg, "input"))
        if kind != "net":
            raise ValueError(f"reduce-net needs a net, got {kind}")
        e = io.load_sphere(_need(cfg, "sphere"))
    net = dc.CircularNet(grid, tol=cfg.tol)
    (initial,) = _initials(cfg, 1, [e], cfg.rng, net.ambient_dim)
    out = dc.net_transform_to_sphere(net, e, initial, cfg.tol)
    io.write_json(_need(cfg, "output"), io.net_doc(out.points))
    report = {"input_kind": "net", "initial": initial,
              "sphere_residuals": _residuals(out.points, e),
              "route_mismatch": out.route_mismatch,
              "quad_residuals": dc.quad_residuals(out.points),
              "cell_cosphericity": dc.cell_cosphericity(net, out)}
    return report, ("net", out.points)


def cmd_interpolate(cfg):
    kind0, x0 = io.read_geometry(_need(cfg, "input"))
    kind1, x1 = io.read_geometry(_need(cfg, "target"))
    if kind0 != "curve" or kind1 != "curve":
        raise ValueError("interpolate needs two curves")
    s = io.load_sphere(_need(cfg, "sphere"))
    initials = _initials(cfg, 3, [s], cfg.rng, x0.shape[1])
    chain = dc.interpolate_chain(x0, x1, s, initials, cfg.tol)
    labels = ["x0", "x0_hat", "y", "x1_hat", "x1"]
    io.write_json(_need(cfg, "output"), io.chain_doc([c.points for c in chain], labels))
    links = [_pair_report(a, b, cfg.tol) for a, b in chain.links()]
    report = {"initials": initials, "links": links,
              "sphere_residuals": [_residuals(c.points, s) for c in chain[1:4]]}
    return report, ("curves", [c.points for c in chain], labels)


def cmd_coords(cfg):
    kind, data = io.read_geometry(_need(cfg, "input"))
    e1 = io.load_sphere(_need(cfg, "sphere"))
    e2 = io.load_sphere(_need(cfg, "sphere2"))
    if kind == "framed_curve":
        pts, nrm = data
        n2 = io.parse_point(_need(cfg, "normal2"), pts.shape[1])
        out = sm.coords_smooth(pts, nrm[0], n2, e1, e2, cfg.tol)
        report = {"input_kind": kind}
    elif kind == "curve":
        pts = data
        (y11,) = _initials(cfg, 1, [e1, e2], cfg.rng, pts.shape[1])
        aux = io.parse_point(cfg.aux, pts.shape[1]) if cfg.aux else None
        sq = dc.initial_square(pts[0], e1, e2, y11, aux, cfg.tol)
        red = dc.double_reduction_curve(pts, e1, e2, sq, cfg.tol, strict=cfg.order == "both")
        out = red.other_order.points if cfg.order == "ji" else red.curve.points
        report = {"input_kind": kind, "order": cfg.order, "initial_square": sq.as_array(),
                  "order_check": red.order_check}
    else:
        raise ValueError(f"coords does not accept {kind} input")
    io.write_json(_need(cfg, "output"), io.curve_doc(out))
    report.update(residuals_e1=_residuals(out, e1), residuals_e2=_residuals(out, e2),
                  concircularity=[inc.concircularity_residual(*out[k:k + 4])
                                  for k in range(len(out) - 3)])
    return report, ("curves", [pts, out], ["input", "coordinates"])


def cmd_channel(cfg):
    kind, data = io.read_geometry(_need(cfg, "input"))
    if kind != "chain":
        raise ValueError("channel needs a chain of curves")
    if cfg.normal is not None:
        n0 = sm.initial_normal(data[0], io.parse_point(cfg.normal, data[0].shape[1]))
    else:
        n0 = sm.initial_normal(data[0], cfg.rng.normal(size=data[0].shape[1]))
    strips, _ = ch.smooth_seminet(data, n0, cfg.arc_samples, cfg.reverse, cfg.tol)
    io.write_obj(_need(cfg, "output"), strips)
    report = {"strips": len(strips), "initial_normal": n0,
              "vertex_residuals": [float(s.vertex_residuals().max()) for s in strips],
              "seam_angles": [ch.seam_continuity(a, b) for a, b in zip(strips, strips[1:])]}
    return report, ("strips", strips)


def cmd_validate(cfg):
    kind, data = io.read_geometry(_need(cfg, "input"))
    if cfg.target is not None:
        kind1, other = io.read_geometry(cfg.target)
        if kind not in ("curve", "framed_curve") or kind1 not in ("curve", "framed_curve"):
            raise ValueError("pair validation needs two curves")
        x = data[0] if kind == "framed_curve" else data
        y = other[0] if kind1 == "framed_curve" else other
        pair = _pair_report(x, y, cfg.tol)
        report = {"mode": "pair", **pair}
        passed = pair["passed"]
        figure = ("residuals", {"edge": pair["residuals"]})
    elif kind == "net":
        res = dc.quad_residuals(data)
        passed = bool(np.all(res <= cfg.tol))
        report = {"mode": "net", "passed": passed, "quad_residuals": res}
        figure = ("residuals", {"quad": res})
    elif kind == "chain":
        links = [_pair_report(a, b, cfg.tol) for a, b in zip(data, data[1:])]
        passed = all(link["passed"] for link in links)
        report = {"mode": "chain", "passed": passed, "links": links}
        figure = ("residuals", {f"link {k}": link["residuals"] for k, link in enumerate(links)})
    else:
        raise ValueError("validate needs a net, a chain, or a curve with --target")
    if not passed:
        raise ValidationFailed((report, figure))
    return report, figure


COMMANDS = {
    "transform": cmd_transform,
    "reduce-net": cmd_reduce_net,
    "interpolate": cmd_interpolate,
    "coords": cmd_coords,
    "channel": cmd_channel,
    "validate": cmd_validate,
}


def _render(path, figure):
    from . import plotting

    kind, *args = figure
    if kind == "curves":
        plotting.plot_curves(path, args[0], args[1])
    elif kind == "net":
        plotting.plot_net(path, args[0])
    elif kind == "strips":
        plotting.plot_strips(path, args[0])
    else:
        plotting.plot_residuals(path, args[0])


def _emit(cfg, report):
    text = io.dumps(report)
    if cfg.report:
        io.write_text(cfg.report, text)
    else:
        sys.stdout.write(text)


def run(cfg):
    """Execute one job; returns the exit status."""
    header = {"command": cfg.command, "tol": cfg.tol, "seed": cfg.seed}
    try:
        report, figure = COMMANDS[cfg.command](cfg)
        status = EXIT_OK
    except ValidationFailed as fail:
        report, figure = fail.report
        status = EXIT_GEOMETRY
    except GeometryError as err:
        print(f"ribaucour {cfg.command}: {type(err).__name__}: {err}", file=sys.stderr)
        _emit(cfg, {**header, "status": "error", "exit_code": EXIT_GEOMETRY, **err.to_dict()})
        return EXIT_GEOMETRY
    except (ValueError, OSError, json.JSONDecodeError) as err:
        print(f"ribaucour {cfg.command}: {err}", file=sys.stderr)
        _emit(cfg, {**header, "status": "error", "exit_code": EXIT_INPUT,
                    "error": type(err).__name__, "message": str(err)})
        return EXIT_INPUT
    _emit(cfg, {**header, "status": "ok" if status == EXIT_OK else "failed", **report})
    if cfg.figure:
        _render(cfg.figure, figure)
    return status


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors; status 2 is reserved for geometry
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL,
                        help="relative tolerance (default %(default)g)")
    common.add_argument("--seed", type=int, default=0,
                        help="seed for default initial points (default %(default)s)")
    common.add_argument("--arc-samples", type=int, default=9,
                        help="points per channel arc (default %(default)s)")
    common.add_argument("--report", help="write the JSON report here instead of stdout")
    common.add_argument("--figure", help="render a figure to this image file")

    parser = _Parser(prog="ribaucour",
                                     description="Ribaucour transforms of curves and nets.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("transform", parents=[common],
                       help="transform a curve, framed curve or net onto a sphere")
    p.add_argument("--input", required=True)
    p.add_argument("--sphere", required=True, help="sphere JSON text or file")
    p.add_argument("--initial", action="append", default=[], help="x,y,z on the sphere")
    p.add_argument("--output", required=True)

    p = sub.add_parser("reduce-net", parents=[common],
                       help="transform a circular net onto a sphere, with route checks")
    p.add_argument("--input", required=True)
    p.add_argument("--sphere", required=True)
    p.add_argument("--initial", action="append", default=[])
    p.add_argument("--output", required=True)

    p = sub.add_parser("interpolate", parents=[common],
                       help="join two curves by three transforms through a sphere")
    p.add_argument("--input", required=True, help="first curve")
    p.add_argument("--target", required=True, help="second curve")
    p.add_argument("--sphere", required=True)
    p.add_argument("--initial", action="append", default=[],
                   help="initial points of the three new curves, in order")
    p.add_argument("--output", required=True)

    p = sub.add_parser("coords", parents=[common],
                       help="map a space curve to a circle by two reductions")
    p.add_argument("--input", required=True)
    p.add_argument("--sphere", required=True, help="first hypersphere")
    p.add_argument("--sphere2", required=True, help="second hypersphere, orthogonal to the first")
    p.add_argument("--initial", action="append", default=[],
                   help="final initial point, on both hyperspheres")
    p.add_argument("--aux", help="auxiliary point fixing the initial circle")
    p.add_argument("--normal2", help="second initial normal for framed curves")
    p.add_argument("--order", choices=["ij", "ji", "both"], default="both")
    p.add_argument("--output", required=True)

    p = sub.add_parser("channel", parents=[common],
                       help="channel-surface strips between consecutive curves of a chain")
    p.add_argument("--input", required=True, help="chain of curves")
    p.add_argument("--normal", help="initial normal direction at the first sample")
    p.add_argument("--reverse", action="store_true", help="use the complementary arcs")
    p.add_argument("--output", required=True, help="OBJ mesh")

    p = sub.add_parser("validate", parents=[common],
                       help="check a curve pair, a chain or a net")
    p.add_argument("--input", required=True)
    p.add_argument("--target", help="partner curve for pair validation")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = JobConfig(**vars(args))
    except ValueError as err:
        print(f"ribaucour: {err}", file=sys.stderr)
        return EXIT_INPUT
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
