"""Command-line entry point. Every subcommand prints one JSON document."""

from __future__ import annotations

import argparse
import math
import sys

from . import __version__, chains, lipschitz, metric, porosity, rug
from .errors import MetrikitError
from .io import METRICS, load_field, load_mask, load_space, to_json


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _space_args(p, second=False):
    p.add_argument("--input", required=True)
    p.add_argument("--metric", choices=METRICS, default="euclidean")
    if second:
        p.add_argument("--input2", required=True)
        p.add_argument("--metric2", choices=METRICS, default="euclidean")


def _metric_check(args, ultra):
    space = load_space(args.input, args.metric)
    verify = metric.verify_ultrametric if ultra else metric.verify_metric
    return verify(space, args.tol)


def cmd_check_metric(args):
    return _metric_check(args, ultra=False)


def cmd_check_ultra(args):
    return _metric_check(args, ultra=True)


def cmd_snowflake(args):
    out = metric.snowflake(load_space(args.input, args.metric), args.q)
    return {"dist": out.dist, "report": metric.verify_ultrametric(out, args.tol)}


def cmd_distortion(args):
    s1 = load_space(args.input, args.metric)
    s2 = load_space(args.input2, args.metric2)
    if args.map:
        corr = metric.Correspondence.from_sequence(_ints(args.map))
    else:
        corr = metric.Correspondence.identity(s1.n)
    return {"distortion": metric.distortion(s1, s2, corr)}


def cmd_lipschitz_fit(args):
    space = load_space(args.input, args.metric)
    return lipschitz.fit_constant(space, load_field(args.field), args.alpha)


def cmd_lipschitz_verify(args):
    space = load_space(args.input, args.metric)
    bad = lipschitz.verify_lipschitz(space, load_field(args.field), args.alpha, args.C, args.tol)
    return {
        "holds": not bad,
        "violations": [{"pair": [i, j], "defect": d} for i, j, d in bad],
    }


def cmd_dist_field(args):
    space = load_space(args.input, args.metric)
    f = lipschitz.distance_field(space, _ints(args.anchors))
    return {"values": f.values, "fit": lipschitz.fit_constant(space, f, 1.0)}


def cmd_rug_ball(args):
    est, err = rug.ball_measure(args.t, args.samples, args.seed)
    return {
        "t": args.t,
        "samples": args.samples,
        "seed": args.seed,
        "estimate": est,
        "stderr": err,
        "expected": rug.BALL_CONSTANT * args.t**3,
    }


def cmd_rug_probe(args):
    rows = rug.order_probe(args.component, args.alpha, _floats(args.meshes), args.cells)
    return {"probe": [{"h": h, "constant": c} for h, c in rows]}


def cmd_chain(args):
    space = load_space(args.input, args.metric)
    query = chains.ChainQuery(args.epsilon, args.lam, args.source, args.target)
    res = chains.chain_exists(space, query)
    out = {"result": res}
    if args.field is not None and res.found:
        field = load_field(args.field)
        fit = lipschitz.fit_constant(space, field, args.alpha)
        out["fit"] = fit
        out["oscillation_bound"] = chains.oscillation_bound(
            fit.constant, args.alpha, args.epsilon, args.lam
        )
        out["bound_holds"] = chains.verify_chain_bound(
            space, field, fit, res.chain, args.epsilon, args.lam
        )
    return out


def cmd_min_lambda(args):
    space = load_space(args.input, args.metric)
    lam, attained = chains.min_lambda(space, args.source, args.target, args.epsilon)
    return {"lambda_inf": lam, "attained": attained, "reachable": not math.isinf(lam)}


def cmd_cantor(args):
    space = chains.cantor_space(args.depth, args.ratio)
    out = {"points": chains.cantor_points(space), "labels": list(space.labels)}
    if args.alpha is not None:
        out["left_indicator_fit"] = lipschitz.fit_constant(
            space, chains.prefix_indicator(space, "0"), args.alpha
        )
    return out


def cmd_porosity(args):
    return porosity.porosity_probe(load_mask(args.mask), args.C, _floats(args.radii))


def cmd_subdiv(args):
    gset = load_mask(args.mask)
    root = porosity.Cube(0, (0,) * gset.n)
    return {
        "porous": porosity.porous_by_subdivision(gset, args.L),
        "root_witness": porosity.subcube_witness(gset, args.L, root),
    }


def cmd_boxdim(args):
    gset = load_mask(args.mask)
    slope, records = porosity.box_dimension_estimate(gset, args.L, args.kmax)
    return {
        "slope": slope,
        "counts": records,
        "porous": porosity.porous_by_subdivision(gset, args.L),
        "upper_bound": porosity.dimension_upper_bound(args.L, gset.n),
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="metrikit", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--output", help="write the JSON report here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=func)
        return p

    p = add("check-metric", cmd_check_metric, "verify the metric axioms")
    _space_args(p)
    p.add_argument("--tol", type=float, default=0.0)
    p = add("check-ultra", cmd_check_ultra, "verify the ultrametric inequality")
    _space_args(p)
    p.add_argument("--tol", type=float, default=0.0)
    p = add("snowflake", cmd_snowflake, "raise all distances to a power")
    _space_args(p)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--tol", type=float, default=0.0)
    p = add("distortion", cmd_distortion, "bilipschitz constant of a correspondence")
    _space_args(p, second=True)
    p.add_argument("--map", help="comma-separated images of 0..n-1 (default identity)")

    p = add("lipschitz-fit", cmd_lipschitz_fit, "fit the order-alpha Lipschitz constant")
    _space_args(p)
    p.add_argument("--field", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p = add("lipschitz-verify", cmd_lipschitz_verify, "list pairs breaking a Lipschitz bound")
    _space_args(p)
    p.add_argument("--field", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--tol", type=float, default=0.0)
    p = add("dist-field", cmd_dist_field, "distance to a set of anchor points")
    _space_args(p)
    p.add_argument("--anchors", required=True, help="comma-separated point indices")

    p = add("rug-ball", cmd_rug_ball, "Monte Carlo area of a parabolic ball")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p = add("rug-probe", cmd_rug_probe, "coordinate-function constants on refining rug grids")
    p.add_argument("--component", type=int, choices=(1, 2), default=1)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--meshes", required=True, help="comma-separated mesh sizes")
    p.add_argument("--cells", type=int, default=4)

    p = add("chain", cmd_chain, "search for an (epsilon, lambda)-chain")
    _space_args(p)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--source", type=int, required=True)
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--field", help="optional field for the oscillation check")
    p.add_argument("--alpha", type=float, default=2.0)
    p = add("min-lambda", cmd_min_lambda, "smallest chain budget joining two points")
    _space_args(p)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--source", type=int, required=True)
    p.add_argument("--target", type=int, required=True)
    p = add("cantor", cmd_cantor, "Cantor-set point space")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--ratio", type=float, default=1 / 3)
    p.add_argument("--alpha", type=float, help="also fit the left-half indicator at this order")

    p = add("porosity", cmd_porosity, "ball-form porosity probe on a mask")
    p.add_argument("--mask", required=True)
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--radii", required=True, help="comma-separated radii")
    p = add("subdiv", cmd_subdiv, "L-adic subcube porosity test")
    p.add_argument("--mask", required=True)
    p.add_argument("--L", type=int, required=True)
    p = add("boxdim", cmd_boxdim, "box-counting slope and covering counts")
    p.add_argument("--mask", required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--kmax", type=int, required=True)
    return parser


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "output")}


def _emit(text: str, output: str | None):
    if output:
        with open(output, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    report = {"command": args.command, "config": _config(args), "version": __version__}
    try:
        report["result"] = args.func(args)
        status = 0
    except MetrikitError as exc:
        report["error"] = {"kind": exc.kind, "message": str(exc)}
        status = 1
    except OSError as exc:
        report["error"] = {"kind": "io", "message": str(exc)}
        status = 1
    _emit(to_json(report), args.output)
    if status:
        print(f"metrikit {args.command}: {report['error']['kind']} error: "
              f"{report['error']['message']}", file=sys.stderr)
    else:
        print(f"metrikit {args.command}: ok", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
