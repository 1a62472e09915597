"""Command line front end.

Examples
--------
    fourmom run --case two_packets --cells 1000 --cfl 1 --tend 0.1
    fourmom convergence --case free_boundary --cells 400,800,1600,3200
    fourmom riemann four-packet --rho 1 --v1 0.8 --v2 1.2

Exit status: 0 success, 1 usage, 2 numerical failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .cases import CASES, FOUR_PACKET_CENTER, FOUR_PACKET_RHO, FOUR_PACKET_V, get_case
from .entropy import EntropySpec
from .errors import MomentError
from .harness import (
    MOMENT_NAMES,
    RunReport,
    convergence_order,
    errors_as_dict,
    l1_error,
    relative_l1_error,
    write_convergence_csv,
    write_fields_csv,
)
from .kernels import BACKEND
from .riemann import four_packet_dissipation, four_packet_states, solve_four_packet_star
from .solver import run_case

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3
DISSIPATION_ALPHAS = (0, 0.5, 1, 1.5, 2, 3, 4)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad flags; we reserve 2 for numerical failures."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _cfl(text):
    v = float(text)
    if not 0.0 < v <= 1.0:
        raise argparse.ArgumentTypeError(f"cfl must lie in (0, 1], got {text}")
    return v


def _positive(text):
    v = float(text)
    if not v > 0.0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _nonnegative(text):
    v = float(text)
    if not v >= 0.0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative number, got {text}")
    return v


def _cells(text):
    try:
        out = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cells must be an integer or a comma list, got {text!r}") from None
    if not out or any(n < 1 for n in out):
        raise argparse.ArgumentTypeError(f"cell counts must be positive, got {text!r}")
    return out


def _add_common(p, cells_default):
    p.add_argument("--case", choices=sorted(CASES), required=True)
    p.add_argument("--cells", type=_cells, default=cells_default, help="int or comma list")
    p.add_argument("--cfl", type=_cfl, default=None, help="Courant number in (0, 1] (case default)")
    p.add_argument("--tend", type=_nonnegative, default=None, help="final time (case default)")
    p.add_argument("--eps1", type=_positive, default=1e-9, help="dispersion threshold e/m0^2")
    p.add_argument("--eta", type=_positive, default=2.0, help="cone aperture")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    p.add_argument("--exact-init", action="store_true", help="exact cell averages for free_boundary")


def build_parser():
    ap = _Parser(prog="fourmom", description="Four-moment quadrature method: simulations and Riemann solutions")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="advance one case on one grid")
    _add_common(run, [400])

    conv = sub.add_parser("convergence", help="errors and observed orders over several grids")
    _add_common(conv, [400, 800, 1600, 3200])
    conv.add_argument("--jobs", type=int, default=1, help="grids solved in parallel")

    rie = sub.add_parser("riemann", help="exact Riemann solutions")
    rsub = rie.add_subparsers(dest="problem", required=True, parser_class=_Parser)
    fp = rsub.add_parser("four-packet", help="star state of the symmetric four-packet collision")
    fp.add_argument("--rho", type=_positive, default=FOUR_PACKET_RHO)
    fp.add_argument("--v1", type=float, default=FOUR_PACKET_V[0])
    fp.add_argument("--v2", type=float, default=FOUR_PACKET_V[1])
    fp.add_argument("--out", type=Path, default=Path("out"))
    return ap


def _solve(args_tuple):
    case, n, cfl, tend, eps1, eta, exact_init = args_tuple
    t0 = time.perf_counter()
    state, config = run_case(case, n, cfl, tend, eps1, eta, exact_init)
    return state, config, time.perf_counter() - t0


def _star_payload(rho, v1, v2):
    star = solve_four_packet_star(rho, v1, v2)
    data = four_packet_states(rho, v1, v2)
    diss = {
        f"D({a:g})": float(four_packet_dissipation(star, rho, v1, v2, EntropySpec.from_alpha(a)))
        for a in DISSIPATION_ALPHAS
    }
    from .riemann import four_packet_measure_solution, generalized_rh_residual

    rh = generalized_rh_residual(data, four_packet_measure_solution(star))
    star_d = {k: float(v) for k, v in star._asdict().items()}
    star_d["rh_residual"] = float(abs(rh).max())
    return star_d, diss


def _report(args, results):
    spec = get_case(args.case)
    states = [r[0] for r in results]
    config = results[0][1]
    rep = RunReport(
        case=args.case,
        n_cells=[s.grid.n_cells for s in states],
        cfl=config.cfl,
        t_end=config.t_end,
        eps1=args.eps1,
        eta=args.eta,
        boundary=config.boundary,
        backend=BACKEND,
        wall_time=float(sum(r[2] for r in results)),
    )
    for s in states:
        key = str(s.grid.n_cells)
        rep.l1_errors[key] = errors_as_dict(l1_error(s, spec.reference, config.t_end))
        rep.relative_l1_errors[key] = errors_as_dict(relative_l1_error(s, spec.reference, config.t_end))
        d = asdict(s.diagnostics)
        d["boundary_inflow"] = [float(v) for v in d["boundary_inflow"]]
        rep.diagnostics[key] = {k: (float(v) if isinstance(v, float) else v) for k, v in d.items()}
    if len(states) > 1:
        for target, source in ((rep.orders, rep.l1_errors), (rep.relative_orders, rep.relative_l1_errors)):
            table = {int(k): [v[m] for m in MOMENT_NAMES] for k, v in source.items()}
            target.update(errors_as_dict(convergence_order(table)))
    if args.case == "four_packets":
        rep.star, rep.dissipation = _star_payload(FOUR_PACKET_RHO, *FOUR_PACKET_V)
        rep.star["center"] = FOUR_PACKET_CENTER
    return rep


def _cmd_run(args):
    if len(args.cells) != 1:
        raise UsageError("run takes a single cell count; use 'convergence' for several")
    results = [_solve((args.case, args.cells[0], args.cfl, args.tend, args.eps1, args.eta, args.exact_init))]
    rep = _report(args, results)
    state = results[0][0]
    stem = f"{args.case}_n{state.grid.n_cells}"
    fpath = write_fields_csv(state, args.out / f"{stem}_fields.csv")
    rpath = rep.write(args.out / f"{stem}_report.json")
    err = rep.l1_errors[str(state.grid.n_cells)]
    print(f"{args.case}: {state.grid.n_cells} cells, t={state.time:.6g}, {state.diagnostics.n_steps} steps")
    print("L1 errors: " + ", ".join(f"{m}={err[m]:.6g}" for m in MOMENT_NAMES))
    print(f"wrote {fpath}\nwrote {rpath}")


def _cmd_convergence(args):
    if len(args.cells) < 2:
        raise UsageError("convergence needs at least two cell counts")
    tasks = [(args.case, n, args.cfl, args.tend, args.eps1, args.eta, args.exact_init) for n in args.cells]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_solve, tasks))
    else:
        results = [_solve(t) for t in tasks]
    rep = _report(args, results)
    # single writer, in grid order
    for state, _, _ in results:
        write_fields_csv(state, args.out / f"{args.case}_n{state.grid.n_cells}_fields.csv")
    cpath = write_convergence_csv(rep, args.out / f"{args.case}_convergence.csv")
    rpath = rep.write(args.out / f"{args.case}_convergence_report.json")
    print(f"{'cells':>6} " + " ".join(f"{'rel ' + m:>12}" for m in MOMENT_NAMES))
    for n in rep.n_cells:
        r = rep.relative_l1_errors[str(n)]
        print(f"{n:>6} " + " ".join(f"{r[m]:>12.6g}" for m in MOMENT_NAMES))
    print(f"{'order':>6} " + " ".join(f"{rep.relative_orders[m]:>12.4f}" for m in MOMENT_NAMES))
    print(f"wrote {cpath}\nwrote {rpath}")


def _cmd_four_packet(args):
    star, diss = _star_payload(args.rho, args.v1, args.v2)
    payload = {"rho": args.rho, "v1": args.v1, "v2": args.v2, "star": star, "dissipation": diss}
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    path = args.out / "four_packet_star.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    sys.stdout.write(text)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            _cmd_run(args)
        elif args.command == "convergence":
            _cmd_convergence(args)
        else:
            _cmd_four_packet(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"fourmom: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MomentError as exc:
        print(f"fourmom: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        # invalid parameter combinations rejected by the library
        print(f"fourmom: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        where = f" ({exc.filename})" if getattr(exc, "filename", None) else ""
        print(f"fourmom: I/O error{where}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
