"""Command-line front end.

Subcommands::

    verify    build a named metric from expression parameters and check the
              flatness / Ricci-flatness verdict it is expected to satisfy
    generate  iterate the KN solution chain from a seed and emit a pool file
    solve     run the finite-difference KdV evolution and compare to oracles
    report    merge prior JSON reports into a theorem-by-theorem matrix

Exit codes: 0 all verdicts as expected, 1 verdict mismatch, 2 usage or
expression errors, 3 numeric instability. JSON output is deterministic apart
from the ``timing_seconds`` field.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .expr import ExprError, RationalExpr, VarSet
from .knkdv import (
    KNSolution,
    NotASolution,
    PoolEntry,
    kdv_residual,
    kn_iterate,
    kn_residual,
    l_from_f2,
    load_pool,
    m_constraint_residual,
    save_pool,
)
from .metrics import REGISTRY
from .numeric import (
    CFLViolationError,
    Grid1D,
    InstabilityError,
    SampledMetric,
    constant_field,
    residual_ladder,
    soliton,
    solve_kdv,
    zero_field,
)
from .parser import ParseError, parse
from .tensor import analyze_curvature

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_UNSTABLE = 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="flatlab", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    pv = sub.add_parser("verify", help="verify a named metric family")
    pv.add_argument("metric_pos", nargs="?", metavar="METRIC",
                    help="family name: eq4 | eq1 | eq6 | eq8 | thm4")
    pv.add_argument("--metric", dest="metric_opt", help="family name (alternative to the positional)")
    pv.add_argument("--param", action="append", default=[], metavar="NAME=EXPR",
                    help="parameter binding, repeatable")
    pv.add_argument("--eps", help="deformation constant for thm4 (default 1)")
    pv.add_argument("--pool", help="solution-pool JSON; verify once per entry")
    pv.add_argument("--expect-curved", choices=("auto", "require", "record"), default="auto",
                    help="thm4 nonzero-curvature expectation (default auto: "
                         "require for nonconstant l, record otherwise)")
    pv.add_argument("--probe", action="append", default=[], metavar="X,Y,Z[,U,V,W]",
                    help="numeric curvature probe point, repeatable (informational)")
    pv.add_argument("--h-ladder", default="1e-2,5e-3,2.5e-3", metavar="H1,H2,H3")
    _common_out(pv)

    pg = sub.add_parser("generate", help="iterate the KN solution chain")
    pg.add_argument("--start", required=True, help="seed expression in x, z")
    pg.add_argument("--generations", type=int, default=2)
    _common_out(pg)

    ps = sub.add_parser("solve", help="finite-difference KdV evolution")
    ps.add_argument("--initial", default="soliton:1",
                    help="zero | const:V | soliton:C (default soliton:1)")
    ps.add_argument("--grid", default="-30,30,1024", metavar="MIN,MAX,N")
    ps.add_argument("--dz", type=float, default=None,
                    help="step size (default: largest stable step for the run)")
    ps.add_argument("--steps", type=int, default=None,
                    help="step count (default: reach --z-final)")
    ps.add_argument("--z-final", type=float, default=1.0)
    ps.add_argument("--tol", type=float, default=1e-3, help="oracle-error budget")
    ps.add_argument("--mass-tol", type=float, default=1e-6, help="relative mass-drift budget")
    ps.add_argument("--record-every", type=int, default=0,
                    help="record every k-th slice into CSV dumps (0: ends only)")
    _common_out(ps)

    pr = sub.add_parser("report", help="merge prior JSON reports")
    pr.add_argument("inputs", nargs="*", help="paths of verify/generate/solve reports")
    _common_out(pr)
    return p


def _common_out(p):
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--format", choices=("json", "text"), default="text")


# ---------------------------------------------------------------------------
# helpers


def _parse_params(pairs: list[str], vs: VarSet) -> dict[str, RationalExpr]:
    out = {}
    for item in pairs:
        name, sep, expr = item.partition("=")
        if not sep:
            raise ExprError(f"--param needs NAME=EXPR, got {item!r}")
        out[name.strip()] = parse(expr, vs)
    return out


def _emit(report: dict, args) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    if args.format == "json":
        print(text)
    else:
        _render_text(report)


def _render_text(report: dict) -> None:
    print(f"command: {report['command']}   run: {report['run_id']}")
    for chk in report.get("checks", []):
        status = {True: "PASS", False: "FAIL", None: "INFO"}[chk["pass"]]
        detail = chk.get("actual")
        print(f"  [{status}] {chk['name']}: expected={chk.get('expected')} actual={detail}")
    for row in report.get("matrix", []):
        print(f"  {row['row']:8s} {'PASS' if row['pass'] else 'FAIL'} ({row['source']})")
    if "chain" in report:
        for entry in report["chain"]:
            print(f"  {entry['name']}: {entry['expr']} (residual_verified={entry['residual_verified']})")
    extra = report.get("numeric", [])
    for item in extra:
        print(f"  [INFO] probe {item['point']}: riemann_order={item['riemann_order']}"
              f" residuals={[e['max_abs_riemann'] for e in item['entries']]}")
    print(f"  passed: {report['passed']}   ({report['timing_seconds']:.2f}s)")


def _check(name, expected, actual) -> dict:
    return {"name": name, "expected": expected, "actual": actual,
            "pass": None if expected is None else (expected == actual)}


# ---------------------------------------------------------------------------
# verify


def _verify_once(family, params: dict[str, RationalExpr], vs: VarSet, args) -> tuple[list, list]:
    checks = []
    numeric = []
    metric = family.build(params)
    rep = analyze_curvature(metric)
    if family.expect_flat:
        checks.append(_check(f"{family.name}-flat", True, rep.flat))
    checks.append(_check(f"{family.name}-ricci-flat", family.expect_ricci_flat, rep.ricci_flat))
    if family.name == "thm4":
        curved = not rep.flat
        mode = args.expect_curved
        if mode == "auto":
            l = params["l"]
            mode = "require" if (l.depends_on("x") or l.depends_on("z")) else "record"
        expected = True if mode == "require" else None
        checks.append(_check("thm4-riemann-nonzero", expected, curved))
    # diagnostics the verdict rests on
    if "l" in params:
        checks.append(_check(f"{family.name}-kdv-residual",
                             None, str(kdv_residual(params["l"]))))
    if "F2" in params:
        checks.append(_check(f"{family.name}-kn-residual",
                             None, str(kn_residual(params["F2"]))))
    if family.name == "eq6":
        checks.append(_check("eq6-m-constraint-residual", None,
                             str(m_constraint_residual(params["L"], params["M"]))))
        checks.append(_check("eq6-L-kdv-residual", None,
                             str(kdv_residual(params["L"], "u", "w"))))
    checks[-1]["witness"] = rep.witness
    checks[-1]["nonzero_riemann_indices"] = [list(ix) for ix in rep.nonzero_riemann_indices[:32]]
    for probe in args.probe:
        pt = tuple(float(t) for t in probe.split(","))
        if len(pt) != metric.dim:
            raise ExprError(f"probe {probe!r} has {len(pt)} coordinates, metric has {metric.dim}")
        hs = tuple(float(t) for t in args.h_ladder.split(","))
        ladder = residual_ladder(SampledMetric.from_symbolic(metric), pt, hs)
        numeric.append(ladder.to_dict())
    return checks, numeric


def cmd_verify(args) -> tuple[dict, int]:
    name = args.metric_pos or args.metric_opt
    if not name:
        raise ExprError("verify needs a metric name (positional or --metric)")
    family = REGISTRY.get(name)
    if family is None:
        raise ExprError(f"unknown metric family {name!r} (have {', '.join(sorted(REGISTRY))})")
    vs = VarSet(["x", "y", "z", "u", "v", "w"])
    params = _parse_params(args.param, vs)
    if name == "thm4" and args.eps is not None:
        params["eps"] = parse(args.eps, vs)
    checks: list = []
    numeric: list = []
    if args.pool:
        for entry in load_pool(args.pool):
            e = parse(entry.expr, vs)
            if name == "eq1":
                if entry.equation != "kn":
                    continue
                sub = dict(params, F2=e)
            elif name == "eq4":
                sub = dict(params, l=l_from_f2(e) if entry.equation == "kn" else e)
            else:
                raise ExprError("--pool applies to eq1 or eq4")
            c, n = _verify_once(family, sub, vs, args)
            for item in c:
                item["name"] = f"{entry.name}:{item['name']}"
            checks.extend(c)
            numeric.extend(n)
    else:
        missing = [p for p in family.params if p not in params and p != "eps"]
        if missing:
            raise ExprError(f"{name} needs --param for: {', '.join(missing)}")
        checks, numeric = _verify_once(family, params, vs, args)
    passed = all(c["pass"] is not False for c in checks)
    report = {
        "run_id": f"verify-{name}",
        "command": "verify",
        "config": {
            "metric": name,
            "params": {k: str(v) for k, v in sorted(params.items())},
            "pool": args.pool,
            "expect_curved": args.expect_curved,
        },
        "checks": checks,
        "numeric": numeric,
        "passed": passed,
    }
    return report, EXIT_OK if passed else EXIT_MISMATCH


# ---------------------------------------------------------------------------
# generate


def cmd_generate(args) -> tuple[dict, int]:
    vs = VarSet(["x", "z"])
    seed = parse(args.start, vs)
    sol = KNSolution.create(seed)  # raises NotASolution for bad seeds
    chain = [sol]
    failure = None
    for _ in range(args.generations):
        try:
            chain.append(kn_iterate(chain[-1]))
        except ExprError as exc:
            failure = str(exc)
            break
    entries = [
        PoolEntry(
            name=f"F2{s.generation}",
            expr=str(s.expr),
            equation="kn",
            residual_verified=kn_residual(s.expr).is_zero(),
        )
        for s in chain
    ]
    if args.out:
        pool_path = Path(args.out).with_suffix(".pool.json")
        save_pool(pool_path, entries)
    complete = failure is None and len(chain) == args.generations + 1
    report = {
        "run_id": "generate",
        "command": "generate",
        "config": {"start": args.start, "generations": args.generations},
        "chain": [e.to_dict() for e in entries],
        "checks": [_check("chain-complete", True, complete),
                   _check("chain-residuals-zero", True,
                          all(e.residual_verified for e in entries))],
        "error": failure,
        "passed": complete and all(e.residual_verified for e in entries),
    }
    return report, EXIT_OK if report["passed"] else EXIT_MISMATCH


# ---------------------------------------------------------------------------
# solve


def _initial_field(spec: str):
    kind, _, arg = spec.partition(":")
    if kind == "zero":
        return zero_field(), zero_field(), "zero"
    if kind == "const":
        v = float(arg) if arg else 0.5
        return constant_field(v), constant_field(v), f"const:{v}"
    if kind == "soliton":
        c = float(arg) if arg else 1.0
        f = soliton(c)
        return f, f, f"soliton:{c}"
    raise ExprError(f"unknown initial data {spec!r}")


def cmd_solve(args) -> tuple[dict, int]:
    lo, hi, n = args.grid.split(",")
    grid = Grid1D(float(lo), float(hi), int(n))
    initial, oracle, label = _initial_field(args.initial)
    xs = grid.points()
    max0 = float(np.max(np.abs(np.asarray(initial(xs, 0.0), dtype=float))))
    from .numeric import cfl_limit

    if args.dz is None:
        limit = cfl_limit(grid.dx, max0)
        steps = args.steps or max(1, int(np.ceil(args.z_final / limit)))
        dz = args.z_final / steps
    else:
        dz = args.dz
        steps = args.steps or max(1, int(round(args.z_final / dz)))
    res = solve_kdv(initial, grid, steps, dz, record_every=args.record_every)
    exact = np.asarray(oracle(xs, res.z_final), dtype=float)
    if exact.shape != xs.shape:
        exact = np.full_like(xs, float(oracle(0.0, res.z_final)))
    err = float(np.max(np.abs(res.field.values - exact)))
    checks = [
        _check("oracle-max-error-within-tol", True, err <= args.tol),
        _check("mass-drift-within-tol", True, res.mass_drift_rel <= args.mass_tol),
    ]
    passed = all(c["pass"] for c in checks)
    report = {
        "run_id": f"solve-{label}",
        "command": "solve",
        "config": {
            "initial": label,
            "grid": [grid.x_min, grid.x_max, grid.n],
            "dz": dz,
            "steps": steps,
        },
        "checks": checks,
        "oracle_max_error": err,
        "mass_drift_rel": res.mass_drift_rel,
        "passed": passed,
    }
    if args.out:
        base = Path(args.out)
        slices = res.slices or [(0.0, np.asarray(initial(xs, 0.0), dtype=float)),
                                (res.z_final, res.field.values)]
        for zval, values in slices:
            path = base.with_name(f"{base.stem}_z{zval:.6g}.csv")
            with path.open("w") as fh:
                fh.write("x,value\n")
                for xv, lv in zip(xs, values):
                    fh.write(f"{xv!r},{lv!r}\n")
    return report, EXIT_OK if passed else EXIT_MISMATCH


# ---------------------------------------------------------------------------
# report


_THEOREM_ROW = {"eq1": "Thm1", "eq4": "Thm2", "eq6": "Thm3", "eq8": "Thm4", "thm4": "Thm4"}


def cmd_report(args) -> tuple[dict, int]:
    if not args.inputs:
        raise ExprError("report needs at least one input file")
    merged: dict[str, dict] = {}
    for path in args.inputs:
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ExprError(f"cannot read report {path!r}: {exc}") from exc
        rid = doc.get("run_id", path)
        if rid in merged:
            print(f"warning: duplicate run id {rid!r}; later run wins", file=sys.stderr)
        merged[rid] = doc
    rows: dict[str, dict] = {}
    for rid, doc in sorted(merged.items()):
        cmd = doc.get("command")
        if cmd == "verify":
            row = _THEOREM_ROW.get(doc["config"]["metric"], doc["config"]["metric"])
        elif cmd in ("solve", "generate"):
            row = "numeric" if cmd == "solve" else "Thm1"
        else:
            continue
        ok = bool(doc.get("passed"))
        if row in rows:
            rows[row] = {"row": row, "pass": rows[row]["pass"] and ok,
                         "source": rows[row]["source"] + "," + rid}
        else:
            rows[row] = {"row": row, "pass": ok, "source": rid}
    order = ["Thm1", "Thm2", "Thm3", "Thm4", "numeric"]
    matrix = [rows[r] for r in order if r in rows]
    matrix += [rows[r] for r in sorted(rows) if r not in order]
    passed = all(r["pass"] for r in matrix) and bool(matrix)
    report = {
        "run_id": "report",
        "command": "report",
        "config": {"inputs": list(args.inputs)},
        "matrix": matrix,
        "checks": [],
        "passed": passed,
    }
    return report, EXIT_OK if passed else EXIT_MISMATCH


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        if args.command == "verify":
            report, code = cmd_verify(args)
        elif args.command == "generate":
            report, code = cmd_generate(args)
        elif args.command == "solve":
            report, code = cmd_solve(args)
        else:
            report, code = cmd_report(args)
    except (CFLViolationError, InstabilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except (ParseError, NotASolution, ExprError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report["timing_seconds"] = round(time.perf_counter() - t0, 6)
    _emit(report, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
