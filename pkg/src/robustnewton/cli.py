"""Command-line front end.

Commands: eval | solve | roots | trace | render | verify.  Complex literals
use the syntax a, bi, a+bi or a-bi with no whitespace (e.g. 0.3i, 1.5-2i);
polynomials are ascending comma-separated coefficients (--coeffs) or a JSON
file {"coeffs": [[re, im], ...]} (--poly-file).

Exit codes: 0 success / root found; 1 invalid input; 2 stopped at product
tolerance (plain method); 3 iteration cap; 4 all-roots convergence failure
(partial output still written); 5 verification found a counterexample.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import verify as verify_mod
from ._backend import backend_name
from .errors import ConvergenceFailure, CriticalPointError
from .poly import (
    Polynomial,
    evaluate,
    parse_complex,
    parse_poly,
    poly_from_json,
)
from .rnm import Orbit, Termination, orbit_to_csv, run_modified_rnm, run_rnm
from .render import Window, render_basins, write_image
from .roots import solve_all
from .smale import hybrid_solve, run_newton

_EXIT_BY_TERMINATION = {
    Termination.ROOT_TOLERANCE: 0,
    Termination.PRODUCT_TOLERANCE: 2,
    Termination.MAX_ITERS: 3,
}


def _add_common(sub, methods=("modified", "plain", "newton", "hybrid")):
    sub.add_argument("--coeffs", help="ascending comma-separated complex coefficients")
    sub.add_argument("--poly-file", help='JSON file {"coeffs": [[re,im],...]}')
    sub.add_argument("--eps", type=float, default=1e-10)
    sub.add_argument("--max-iters", type=int, default=10**6)
    sub.add_argument("--method", choices=methods, default=methods[0])


def _load_poly(args) -> Polynomial:
    if (args.coeffs is None) == (args.poly_file is None):
        raise ValueError("provide exactly one of --coeffs or --poly-file")
    if args.coeffs is not None:
        return parse_poly(args.coeffs)
    with open(args.poly_file, "r", encoding="utf-8") as fh:
        return poly_from_json(json.load(fh))


def _parse_size(text: str) -> tuple[int, int]:
    w, _, h = text.lower().partition("x")
    return int(w), int(h)


def _run_method(p, seed, args) -> Orbit:
    if args.method == "plain":
        return run_rnm(p, seed, eps=args.eps, max_iters=args.max_iters)
    if args.method == "modified":
        return run_modified_rnm(p, seed, eps=args.eps, max_iters=args.max_iters)
    if args.method == "newton":
        return run_newton(p, seed, eps=args.eps, max_iters=args.max_iters)
    return hybrid_solve(
        p, seed, args.eps, max_iters=args.max_iters,
        greedy_compare=getattr(args, "greedy_compare", False),
    ).orbit


def cmd_eval(args) -> int:
    p = _load_poly(args)
    v = evaluate(p, parse_complex(args.at))
    print(json.dumps({"value": [v.real, v.imag], "modulus": abs(v)}))
    return 0


def cmd_solve(args) -> int:
    p = _load_poly(args)
    seed = parse_complex(args.seed)
    orbit = _run_method(p, seed, args)
    z = orbit.final
    residual = orbit.fvals[-1] ** 0.5
    print(
        json.dumps(
            {
                "z": [z.real, z.imag],
                "residual": residual,
                "termination": orbit.termination.value,
                "iters": orbit.iterations,
            }
        )
    )
    return _EXIT_BY_TERMINATION[orbit.termination]


def cmd_roots(args) -> int:
    p = _load_poly(args)
    try:
        rs = solve_all(p, eps=args.eps, max_iters=args.max_iters)
        code = 0
    except ConvergenceFailure as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        rs = exc.partial
        code = 4
    print(
        json.dumps(
            {
                "roots": [[r.real, r.imag] for r in rs.roots],
                "residuals": list(rs.residuals),
                "method": list(rs.method),
            }
        )
    )
    return code


def cmd_trace(args) -> int:
    p = _load_poly(args)
    seed = parse_complex(args.seed)
    orbit = _run_method(p, seed, args)
    csv_text = orbit_to_csv(orbit)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    return _EXIT_BY_TERMINATION[orbit.termination]


def cmd_render(args) -> int:
    p = _load_poly(args)
    pw, ph = _parse_size(args.size)
    width = args.width
    height = args.height if args.height is not None else width * ph / pw
    window = Window(
        center=parse_complex(args.center), width=width, height=height,
        px_w=pw, px_h=ph,
    )
    method = {
        "rnm": "rnm",
        "plain": "rnm",
        "modified": "modified_rnm",
        "modified_rnm": "modified_rnm",
        "newton": "newton",
    }[args.method]
    grid = render_basins(p, window, method=method, eps=args.eps,
                         max_iters=args.max_iters)
    write_image(grid, palette=args.palette, path=args.out,
                image_format=args.image_format)
    print(
        json.dumps(
            {
                "out": args.out,
                "size": [pw, ph],
                "basins": int((grid.root_index.max() + 1) if grid.root_index.size else 0),
                "unconverged": int((grid.root_index < 0).sum()),
            }
        )
    )
    return 0


def cmd_verify(args) -> int:
    if args.corrupt_step_scale != 1.0:
        verify_mod.STEP_SCALE_HOOK = args.corrupt_step_scale
    try:
        report = verify_mod.run_verification(args.num_samples, rng_seed=args.rng_seed)
    finally:
        verify_mod.STEP_SCALE_HOOK = 1.0
    for line in report.lines():
        print(line)
    if report.ok:
        return 0
    ce = verify_mod.first_counterexample(report)
    if ce:
        print(f"counterexample: {ce}", file=sys.stderr)
    return 5


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rnm",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument(
        "--backend", action="store_true", help="print the active kernel backend and exit"
    )
    sub = parser.add_subparsers(dest="command")

    s = sub.add_parser("eval", help="evaluate p(z)")
    _add_common(s)
    s.add_argument("--at", required=True, help="evaluation point (complex literal)")
    s.set_defaults(fn=cmd_eval)

    s = sub.add_parser("solve", help="iterate from a seed to a root")
    _add_common(s)
    s.add_argument("--seed", required=True, help="starting point (complex literal)")
    s.add_argument("--greedy-compare", action="store_true",
                   help="hybrid: keep the smaller-residual of damped/Newton iterates")
    s.add_argument("--hybrid", dest="method", action="store_const", const="hybrid",
                   help="shorthand for --method=hybrid")
    s.set_defaults(fn=cmd_solve)

    s = sub.add_parser("roots", help="all roots via deflation")
    _add_common(s, methods=("modified",))
    s.set_defaults(fn=cmd_roots)

    s = sub.add_parser("trace", help="CSV orbit trace")
    _add_common(s)
    s.add_argument("--seed", required=True)
    s.add_argument("--out", help="write CSV here instead of stdout")
    s.set_defaults(fn=cmd_trace)

    s = sub.add_parser("render", help="basin-of-attraction image (PPM)")
    _add_common(s, methods=("rnm", "plain", "modified", "modified_rnm", "newton"))
    s.add_argument("--size", default="256x256", help="WxH pixels")
    s.add_argument("--center", default="0", help="window center (complex literal)")
    s.add_argument("--width", type=float, default=4.0)
    s.add_argument("--height", type=float, default=None,
                   help="defaults to width * H / W (square pixels)")
    s.add_argument("--palette", choices=("classic", "grayscale"), default="classic")
    s.add_argument("--image-format", choices=("ppm", "png"), default="ppm")
    s.add_argument("--out", default="basins.ppm")
    s.set_defaults(fn=cmd_render, max_iters_default=10_000)

    s = sub.add_parser("verify", help="empirical check of the step guarantees")
    s.add_argument("--num-samples", type=int, default=500)
    s.add_argument("--rng-seed", type=int, default=0)
    s.add_argument("--corrupt-step-scale", type=float, default=1.0,
                   help=argparse.SUPPRESS)
    s.set_defaults(fn=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.backend:
        print(backend_name())
        return 0
    if not getattr(args, "fn", None):
        parser.print_help()
        return 1
    try:
        return args.fn(args)
    except (ValueError, OSError, json.JSONDecodeError, CriticalPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
