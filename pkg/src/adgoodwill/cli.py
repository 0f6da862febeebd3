"""Command line entry point.

Exit codes: 0 ok, 1 verification violation (or stability condition fails),
2 input error, 3 inconclusive verification, 4 unsupported combination.
"""

from __future__ import annotations

import argparse
import csv
import sys
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import hjb
from .errors import ScenarioError, UnsupportedScenario
from .grid import ControlPath
from .lift import check_equivalence, initial_datum
from .noise import NoisePath, increment_matrix
from .params import ScenarioParams
from .scenario import load
from .sdde import CHUNK, euler_paths
from .stability import invariant_measure_condition
from .verification import verify_dominance

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_INCONCLUSIVE, EXIT_UNSUPPORTED = 0, 1, 2, 3, 4


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_table(path, header, rows) -> None:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh)
        out.writerow(header)
        for row in rows:
            out.writerow([_fmt(v) for v in row])


def parse_control(spec: str, params: ScenarioParams, vf=None) -> ControlPath:
    """``optimal | zero | const:<c> | scaled:<f>`` (f times the optimal path)."""
    spec = spec.strip()
    if spec == "zero":
        return ControlPath.constant(0.0, params.T, params.dt)
    if spec.startswith("const:"):
        return ControlPath.constant(float(spec[6:]), params.T, params.dt)
    if spec == "optimal" or spec.startswith("scaled:"):
        if vf is None:
            vf = hjb.solve(params)
        z = hjb.optimal_control_path(vf)
        return z if spec == "optimal" else z.scaled(float(spec[7:]))
    raise ScenarioError(f"unknown control spec {spec!r}; use optimal, zero, const:<c> or scaled:<f>")


def _auto_control(spec: str, params: ScenarioParams) -> ControlPath:
    if spec == "auto":
        if params.point_delay:
            print("note: point-delay scenario, simulating with zero spending", file=sys.stderr)
            spec = "zero"
        else:
            spec = "optimal"
    return parse_control(spec, params)


def _refined_name(out: Path, factor: int) -> Path:
    return out.with_name(f"{out.stem}_refine{factor}{out.suffix}")


def cmd_simulate(args) -> int:
    sc = load(args.scenario)
    n_paths = args.paths if args.paths is not None else sc.n_paths
    seed = args.seed if args.seed is not None else sc.seed
    levels = args.dt_refine
    if levels < 1:
        raise ScenarioError("--dt-refine must be >= 1")
    out = Path(args.out)
    for level in range(levels):
        factor = 2 ** level
        params = sc.params.refined(factor)
        control = _auto_control(args.control, sc.params).resampled(params.dt)
        substeps = 2 ** (levels - 1 - level)
        paths = []
        for start in range(0, n_paths, CHUNK):
            stop = min(start + CHUNK, n_paths)
            if params.sigma == 0:
                dW = np.zeros((stop - start, params.n_steps))
            else:
                dW = increment_matrix(seed, range(start, stop), params.n_steps, params.dt, substeps)
            paths.append(euler_paths(params, control, dW))
        y = np.concatenate(paths)
        mean = np.mean(y, axis=0)
        p05, p95 = np.percentile(y, [5, 95], axis=0)
        rows = zip(params.times, mean, p05, p95, control.values)
        target = out if level == 0 else _refined_name(out, factor)
        write_table(target, ["t", "y_mean", "y_p05", "y_p95", "z"], rows)
        print(f"wrote {target} ({params.n_steps + 1} rows, dt={params.dt:.6g}, paths={n_paths})")
    return EXIT_OK


def cmd_solve(args) -> int:
    sc = load(args.scenario)
    params = sc.params
    vf = hjb.solve(params)
    z = hjb.optimal_control_path(vf)
    write_table(args.out, ["t", "w0", "Bw", "z_star", "c"],
                zip(params.times, vf.w0, vf.Bw, z.values, vf.c))
    v0 = hjb.value_function(vf, 0.0, initial_datum(params))
    print(f"v(0, x_init) = {v0:.17g}")
    return EXIT_OK


def cmd_verify(args) -> int:
    sc = load(args.scenario)
    params = sc.params
    n_paths = args.paths if args.paths is not None else sc.n_paths
    seed = args.seed if args.seed is not None else sc.seed
    vf = hjb.solve(params)
    if args.corrupt_w0 is not None:
        vf = replace(vf, w0=vf.w0 * args.corrupt_w0)
    labels = [s.strip() for s in args.controls.split(",") if s.strip()]
    controls = [parse_control(s, params, vf) for s in labels]
    report = verify_dominance(params, vf, controls, n_paths, seed, labels)
    rows = report.rows()
    header = list(rows[0]) if rows else ["label"]
    write_table(args.out, header, [[r[h] for h in header] for r in rows])
    print(f"v(0, x_init) = {report.v_value:.17g}")
    print(f"J(z*) - v = {report.optimal_gap:.6g} +/- {report.optimal_half_width:.3g}")
    for r in rows:
        print(f"  {r['label']:>14}: J = {r['j_mean']:.6g} +/- {r['half_width_95']:.3g}"
              f"  (v - G = {r['predicted_j']:.6g})  {r['status']}")
    print(f"verdict: {report.verdict}")
    return {"pass": EXIT_OK, "violation": EXIT_VIOLATION, "inconclusive": EXIT_INCONCLUSIVE}[report.verdict]


def observed_orders(errors) -> list[float]:
    e = np.asarray(errors, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return list(np.log2(e[:-1] / e[1:]))


def cmd_equivalence(args) -> int:
    sc = load(args.scenario)
    base = sc.params
    if base.point_delay:
        print("error: the structural operator is undefined for point-delay forgetting; "
              "equivalence check unsupported", file=sys.stderr)
        return EXIT_UNSUPPORTED
    R = args.refinements
    if R < 1:
        raise ScenarioError("--refinements must be >= 1")
    control_base = _auto_control(args.control, base)
    rows, e_state, e_struct = [], [], []
    finest = 2 ** (R - 1)
    for i in range(R):
        params = base.refined(2 ** i)
        control = control_base.resampled(params.dt)
        noise = None
        if params.sigma > 0:
            noise = NoisePath(sc.seed if args.seed is None else args.seed, 0, params.dt,
                              params.n_steps, finest // 2 ** i)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            res = check_equivalence(params, control, noise)
        struct = res.max_err_structural if res.structural_checked else "skipped"
        rows.append([params.n_points, params.dt, res.max_err_state, struct])
        e_state.append(res.max_err_state)
        e_struct.append(res.max_err_structural)
    write_table(args.out, ["n_points", "dt", "max_err_state", "max_err_structural"], rows)
    skipped = rows[0][3] == "skipped"
    if skipped:
        print("note: horizon shorter than the delay window, structural check skipped")
    if R > 1:
        print("observed order (state):      " + ", ".join(f"{o:.3f}" for o in observed_orders(e_state)))
        if not skipped:
            print("observed order (structural): " + ", ".join(f"{o:.3f}" for o in observed_orders(e_struct)))
    return EXIT_OK


def cmd_stability(args) -> int:
    v = invariant_measure_condition(args.a0, args.a1, args.variant)
    for name in ("a0", "a1", "gamma_root", "bound", "holds", "variant"):
        print(f"{name} = {getattr(v, name)}")
    if v.note:
        print(f"note = {v.note}")
    return EXIT_OK if v.holds else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="adgoodwill", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Monte Carlo goodwill bands under a control")
    p.add_argument("scenario")
    p.add_argument("out")
    p.add_argument("--paths", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--dt-refine", type=int, default=1,
                   help="number of grid levels: dt, dt/2, ... (one file per level)")
    p.add_argument("--control", default="auto",
                   help="auto | optimal | zero | const:<c> | scaled:<f>")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("solve", help="explicit value function and optimal spending")
    p.add_argument("scenario")
    p.add_argument("out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="Monte Carlo check of value dominance and optimality")
    p.add_argument("scenario")
    p.add_argument("out")
    p.add_argument("--controls", default="optimal,zero,scaled:1.1")
    p.add_argument("--paths", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--corrupt-w0", type=float, default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("equivalence", help="SDDE vs lifted equation refinement study")
    p.add_argument("scenario")
    p.add_argument("out")
    p.add_argument("--refinements", type=int, default=3)
    p.add_argument("--seed", type=int)
    p.add_argument("--control", default="auto")
    p.set_defaults(func=cmd_equivalence)

    p = sub.add_parser("stability", help="invariant-measure condition for a point delay")
    p.add_argument("a0", type=float)
    p.add_argument("a1", type=float)
    p.add_argument("--variant", choices=("cot", "coth"), default="cot")
    p.set_defaults(func=cmd_stability)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UnsupportedScenario as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
