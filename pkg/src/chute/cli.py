"""Command-line entry points: solve, experiment, oracle, front, serve.

Exit codes: 0 success, 2 parse/parameter problems, 3 solver failures.
Result files are written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .engine import CHUTE1, CHUTE2, ChuteConfig, chute
from .errors import ChuteError, ParameterError, ParseError, SolverError
from .instances import (
    WeightVector,
    evaluate_outcome,
    parse_instance,
    sample_weight_vectors,
)
from .reporting import (
    ExperimentConfig,
    atomic_write_text,
    front_csv,
    merge_result_docs,
    render_front_figure,
    run_experiment,
    write_experiment,
)
from .scalarize import (
    DEFAULT_EPSILON,
    DEFAULT_RHO,
    ChebyshevParams,
    ReferencePoint,
    estimate_reference_point,
)
from .solver import brute_force_chebyshev, maximize_objective

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SOLVER = 3


def _parse_lambda(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(x) for x in text.split(","))
    except ValueError as e:
        raise ParameterError(f"cannot parse lambda {text!r}: {e}") from e
    return vals


def _load_instance(path: str):
    try:
        return parse_instance(Path(path).read_text())
    except OSError as e:
        raise ParseError(f"cannot read instance file {path!r}: {e}") from e


def _add_shared_flags(p: argparse.ArgumentParser, *, many_instances: bool = False):
    if many_instances:
        p.add_argument("--instance", action="append", required=True, metavar="PATH",
                       help="instance file; repeat for several")
    else:
        p.add_argument("--instance", required=True, metavar="PATH", help="instance file")
    p.add_argument("--lambda", dest="lam", metavar="a,b[,c]",
                   help="explicit weight vector")
    p.add_argument("--lambda-count", type=int, metavar="N",
                   help="sample N weight vectors from the unit simplex")
    p.add_argument("--seed", type=int, default=0, help="sampling seed")
    p.add_argument("--rho", type=float, default=DEFAULT_RHO)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--out", metavar="PATH", help="output file or directory")


def _add_budget_flags(p: argparse.ArgumentParser, many_gammas: bool, many_variants: bool):
    if many_gammas:
        p.add_argument("--gamma", type=float, action="append", metavar="G",
                       help="probing density; repeat for a sweep (default 10)")
    else:
        p.add_argument("--gamma", type=float, default=10.0, metavar="G")
    if many_variants:
        p.add_argument("--variant", choices=[CHUTE1, CHUTE2], action="append",
                       help="algorithm variant; repeat for both (default chute1)")
    else:
        p.add_argument("--variant", choices=[CHUTE1, CHUTE2], default=CHUTE1)
    p.add_argument("--tl", type=float, default=5.0, help="incumbent deadline, seconds")
    p.add_argument("--ts", type=float, default=2.0,
                   help="dual-search deadline and per-objective y* deadline, seconds")
    p.add_argument("--n-stall", type=int, default=20, help="dual-search stall limit")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chute",
                                     description="Interval bounds on Pareto optimal outcomes")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="one interval representation for one lambda")
    _add_shared_flags(p)
    _add_budget_flags(p, many_gammas=False, many_variants=False)
    p.add_argument("--format", choices=["json"], default="json")

    p = sub.add_parser("experiment", help="sweep instances x lambdas x gammas x variants")
    _add_shared_flags(p, many_instances=True)
    _add_budget_flags(p, many_gammas=True, many_variants=True)
    p.add_argument("--format", choices=["json", "csv"], default="csv")

    p = sub.add_parser("oracle", help="exact optimum by exhaustive enumeration (n <= 25)")
    _add_shared_flags(p)
    p.add_argument("--format", choices=["json"], default="json")

    p = sub.add_parser("front", help="merge result files into a two-sided front")
    p.add_argument("--results", nargs="+", required=True, metavar="PATH",
                   help="result JSON files from `solve`")
    p.add_argument("--out", required=True, metavar="PATH", help="points CSV path")
    p.add_argument("--no-figure", action="store_true",
                   help="skip the figure render next to the CSV")

    p = sub.add_parser("serve", help="run the navigation HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data", required=True, metavar="DIR", help="persistence directory")
    return parser


def _pick_lambda(args, k: int) -> WeightVector:
    if args.lam is not None:
        return WeightVector(_parse_lambda(args.lam))
    if args.lambda_count is not None:
        return sample_weight_vectors(k, args.lambda_count, args.seed)[0]
    raise ParameterError("need --lambda or --lambda-count")


def cmd_solve(args) -> int:
    inst = _load_instance(args.instance)
    lam = _pick_lambda(args, inst.k)
    y_star = estimate_reference_point(inst, per_objective_deadline=args.ts,
                                      epsilon=args.epsilon)
    cfg = ChuteConfig(variant=args.variant, tl=args.tl, gamma=args.gamma,
                      rho=args.rho, n_stall=args.n_stall, ts=args.ts)
    result = chute(inst, lam, y_star, cfg)
    text = json.dumps(result.to_dict(), indent=2, sort_keys=True)
    if args.out:
        atomic_write_text(Path(args.out), text)
    else:
        print(text)
    return EXIT_OK


def cmd_experiment(args) -> int:
    lambdas = (( _parse_lambda(args.lam),) if args.lam is not None else None)
    config = ExperimentConfig(
        instance_paths=tuple(args.instance),
        lambdas=lambdas,
        lambda_count=args.lambda_count,
        seed=args.seed,
        gammas=tuple(args.gamma or [10.0]),
        variants=tuple(args.variant or [CHUTE1]),
        tl=args.tl, ts=args.ts, n_stall=args.n_stall,
        rho=args.rho, epsilon=args.epsilon,
        out_dir=args.out or ".",
        fmt=args.format,
    )
    results = run_experiment(config)
    written = write_experiment(results, config.out_dir)
    for path in written:
        print(path)
    failures = [c for c in results.cells if c.error]
    for c in failures:
        print(f"cell failed: {c.instance_name} lambda#{c.lambda_no} "
              f"gamma={c.gamma} {c.variant}: {c.error}", file=sys.stderr)
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = _load_instance(args.instance)
    lam = _pick_lambda(args, inst.k)
    # exact maxima are available at oracle scale, so y* is exact + epsilon
    values, prov = [], []
    for l in range(inst.k):
        report = maximize_objective(inst, l, deadline=3600.0)
        values.append(report.objective + args.epsilon)
        prov.append("exact-plus-epsilon")
    y_star = ReferencePoint(tuple(values), tuple(prov))
    params = ChebyshevParams(lam, y_star, args.rho)
    report = brute_force_chebyshev(inst, params)
    doc = {
        "instance": inst.name,
        "lambda": list(lam.weights),
        "rho": args.rho,
        "y_star": list(y_star.values),
        "objective": report.objective,
        "bits": list(report.incumbent.bits) if report.incumbent else None,
        "outcome": (list(evaluate_outcome(inst, report.incumbent).values)
                    if report.incumbent else None),
        "status": report.status,
        "enumerated": report.nodes,
    }
    text = json.dumps(doc, indent=2, sort_keys=True)
    if args.out:
        atomic_write_text(Path(args.out), text)
    else:
        print(text)
    return EXIT_OK


def cmd_front(args) -> int:
    docs = []
    for path in args.results:
        try:
            docs.append(json.loads(Path(path).read_text()))
        except (OSError, json.JSONDecodeError) as e:
            raise ParseError(f"cannot read result file {path!r}: {e}") from e
    points = merge_result_docs(docs)
    out = Path(args.out)
    atomic_write_text(out, front_csv(points))
    print(out)
    if not args.no_figure:
        fig = out.with_suffix(".png")
        render_front_figure(points, fig)
        print(fig)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.data)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "solve": cmd_solve,
        "experiment": cmd_experiment,
        "oracle": cmd_oracle,
        "front": cmd_front,
        "serve": cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except SolverError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SOLVER
    except ChuteError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
