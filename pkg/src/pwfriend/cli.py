"""Command-line front end: ``tables``, ``sweep``, ``check`` and ``regress``.

Exit codes: 0 success, 2 input error, 3 a requested check failed.
"""
from __future__ import annotations

import argparse
import ast
import json
import math
import operator
import sys

import numpy as np

from .conditions import DegenerateParametersError, def2a_residuals, nondisturbance_check
from .decoherence import decoherence_functional
from .linalg import TOL
from .params import WignerFriendParams
from .regress import DEFAULT_TOL as REGRESS_TOL
from .regress import run_regress
from .rules import Rule
from .scenarios import build_wigner_friend, wigner_friend_family
from .sweep import COLUMN_HELP, Axis, SweepSpec, render_csv, run_sweep
from .tables import TABLE_IDS, crosscheck, eval_table, operator_tables

EXIT_OK, EXIT_INPUT, EXIT_CHECK = 0, 2, 3


class InputError(Exception):
    pass


# -- input files ---------------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_NAMES = {"pi": math.pi, "e": math.e}
_FUNCS = {name: getattr(math, name) for name in
          ("sqrt", "sin", "cos", "tan", "asin", "acos", "atan", "exp", "log")}


def safe_eval(text: str) -> float:
    """Evaluate a numeric expression such as ``1/sqrt(2)`` or ``pi/2``."""
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand))
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ValueError(f"unsupported expression element {ast.dump(node)[:40]}")
    try:
        return float(ev(ast.parse(text.strip(), mode="eval")))
    except (SyntaxError, ZeroDivisionError, OverflowError) as exc:
        raise ValueError(str(exc)) from None


def read_kv(path: str) -> dict[str, tuple[int, str]]:
    """key = value lines with '#' comments; returns key -> (line number, raw value)."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    out: dict[str, tuple[int, str]] = {}
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise InputError(f"{path}:{n}: expected 'key = value'")
        if key in out:
            raise InputError(f"{path}:{n}: duplicate key {key!r}")
        out[key] = (n, value)
    return out


def _number(path: str, key: str, entry: tuple[int, str]) -> float:
    n, raw = entry
    try:
        return safe_eval(raw)
    except ValueError as exc:
        raise InputError(f"{path}:{n}: bad value for {key!r}: {exc}") from None


PARAM_KEYS = {"a", "b", "alpha", "beta", "phi_S", "phi_SF", "phi", "t_F", "t_1", "t_W", "t_2"}


def load_params(path: str) -> WignerFriendParams:
    """Missing b / beta follow from normalisation; ``phi`` sets phi_S = phi + phi_SF."""
    kv = read_kv(path)
    for key, (n, _) in kv.items():
        if key not in PARAM_KEYS:
            raise InputError(f"{path}:{n}: unknown key {key!r}")
    v = {k: _number(path, k, e) for k, e in kv.items()}
    for req in ("a", "alpha"):
        if req not in v:
            raise InputError(f"{path}: missing required key {req!r}")
    if "phi" in v and "phi_S" in v:
        raise InputError(f"{path}:{kv['phi'][0]}: give either phi or phi_S, not both")
    phi_sf = v.get("phi_SF", 0.0)
    phi_s = v["phi"] + phi_sf if "phi" in v else v.get("phi_S", 0.0)
    b = v.get("b", math.sqrt(max(0.0, 1 - v["a"] ** 2)))
    beta = v.get("beta", math.sqrt(max(0.0, 1 - v["alpha"] ** 2)))
    times = {k: v[k] for k in ("t_F", "t_1", "t_W", "t_2") if k in v}
    try:
        return WignerFriendParams(v["a"], b, phi_s, v["alpha"], beta, phi_sf, **times)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


SPEC_AXES = ("alpha", "phi", "a", "a_over_alpha")
SPEC_FIXED = ("phi_SF", "t_F", "t_1", "t_W", "t_2")


def load_spec(path: str) -> SweepSpec:
    kv = read_kv(path)
    axes, fixed, tol, out = {}, {}, TOL, None
    for key, (n, raw) in kv.items():
        if key in SPEC_AXES:
            parts = raw.split(":")
            if len(parts) == 1:
                lo = hi = _number(path, key, (n, parts[0]))
                steps = 1
            elif len(parts) == 3:
                lo, hi = (_number(path, key, (n, x)) for x in parts[:2])
                steps_f = _number(path, key, (n, parts[2]))
                if steps_f != int(steps_f) or steps_f < 1:
                    raise InputError(f"{path}:{n}: steps must be a positive integer")
                steps = int(steps_f)
            else:
                raise InputError(f"{path}:{n}: range must be 'min:max:steps' or a single value")
            axes[key] = Axis(key, lo, hi, steps)
        elif key in SPEC_FIXED:
            fixed[key] = _number(path, key, (n, raw))
        elif key == "tol":
            tol = _number(path, key, (n, raw))
        elif key == "out":
            out = raw
        else:
            raise InputError(f"{path}:{n}: unknown key {key!r}")
    for req in ("alpha", "phi"):
        if req not in axes:
            raise InputError(f"{path}: missing axis {req!r}")
    try:
        return SweepSpec(axes["alpha"], axes["phi"], axes.get("a"), axes.get("a_over_alpha"),
                         fixed, tol, out)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


# -- reporting helpers -----------------------------------------------------------

def _c(z: complex) -> str:
    z = complex(z)
    if abs(z.imag) < 5e-13:
        return f"{z.real: .6f}"
    return f"{z.real: .4f}{z.imag:+.4f}i"


def _grid(vals, null=None) -> list[str]:
    rows = []
    for i, f in enumerate(("up", "down")):
        cells = []
        for j in range(2):
            if null is not None and null[i, j]:
                cells.append(f"{'n/a':>14}")
            else:
                cells.append(f"{_c(vals[i, j]):>14}")
        rows.append(f"    {f:<5}" + "".join(cells))
    return rows


def _jsonable(z):
    z = complex(z)
    return None if math.isnan(z.real) else ([z.real, z.imag] if z.imag else z.real)


def tables_report(p: WignerFriendParams, tol: float) -> tuple[str, dict]:
    h = build_wigner_friend(p)
    ops = operator_tables(p, h, tol)
    lines = [f"a={p.a:.6g} b={p.b:.6g} alpha={p.alpha:.6g} beta={p.beta:.6g} phi={p.phi:.6g}",
             f"{'':9}{'yes':>14}{'no':>14}"]
    report: dict = {"params": {k: getattr(p, k) for k in ("a", "b", "phi_S", "alpha", "beta",
                                                          "phi_SF", "phi")}, "tables": {}}
    for tid in TABLE_IDS:
        entry: dict = {}
        try:
            if tid == "T2":
                cc = crosscheck(tid, p, h, tol, ops)
                closed = eval_table(tid, p, cc.branch)
            else:
                closed = eval_table(tid, p)
                cc = crosscheck(tid, p, h, tol, ops)
        except DegenerateParametersError as exc:
            lines.append(f"{tid}: degenerate ({exc})")
            entry["status"] = "degenerate"
            report["tables"][tid] = entry
            continue
        except ValueError as exc:
            lines.append(f"{tid}: not applicable ({exc})")
            entry["status"] = "not applicable"
            report["tables"][tid] = entry
            continue
        head = f"{tid}: max |closed - operator| = {cc.max_deviation:.3g}"
        if cc.branch:
            head += f" (branch {cc.branch})"
        lines.append(head)
        entry.update(status="ok", max_deviation=cc.max_deviation, branch=cc.branch)
        for direction in ("forward", "reversed"):
            vals = getattr(closed, direction)
            if vals is None:
                continue
            guard = getattr(closed, f"{direction}_guard")
            lines.append(f"  {direction}")
            lines += _grid(vals, guard)
            entry[direction] = [[None if guard is not None and guard[i, j] else
                                 _jsonable(vals[i, j]) for j in range(2)] for i in range(2)]
        report["tables"][tid] = entry
    lines.append("operator rules (rows: Friend up/down, columns: Wigner yes/no)")
    report["operator"] = {}
    for (rule, direction), t in ops.items():
        lines.append(f"  {rule.value} {direction}")
        lines += ["  " + r for r in _grid(t.values, t.null)]
        report["operator"][f"{rule.value}_{direction}"] = {
            "values": [[None if t.null[i, j] else _jsonable(t.values[i, j]) for j in range(2)]
                       for i in range(2)],
            "valid": t.valid.tolist()}
    return "\n".join(lines), report


CHECK_NAMES = ("def2a_normalized", "def3_valid", "def3_commutator", "nondisturbance",
               "consistent", "weakly_consistent")


def check_report(p: WignerFriendParams, tol: float) -> dict:
    h = build_wigner_friend(p)
    ops = operator_tables(p, h, tol)
    d2a = ops[Rule.DEF2A, "forward"]
    def3 = [ops[Rule.DEF3, d] for d in ("forward", "reversed")]
    comm = max(res.diagnostics["commutator"] for t in def3 for res in t.results if res)
    dec = decoherence_functional(wigner_friend_family(h, p), h, tol)
    nd = nondisturbance_check(p, tol)
    try:
        r = def2a_residuals(p, tol)
        closed = {"r1": r.residuals["r1"], "r2": r.residuals["r2"], "branch": r.branch}
    except DegenerateParametersError:
        closed = None
    norm = {k: v for res in d2a.results if res for k, v in res.diagnostics.items()}
    return {
        "checks": {
            "def2a_normalized": bool(np.all(d2a.valid | d2a.null)),
            "def3_valid": all(bool(np.all(t.valid | t.null)) for t in def3),
            "def3_commutator": comm < tol,
            "nondisturbance": nd.satisfied,
            "consistent": dec.consistent,
            "weakly_consistent": dec.weakly_consistent,
        },
        "residuals": {
            "def2a_closed_form": closed,
            "def2a_operator": norm,
            "commutator_max": comm,
            "nondisturbance": nd.residuals,
            "nondisturbance_branch": nd.branch,
            "offdiag_max": dec.max_off_diagonal,
            "offdiag_real_max": dec.max_off_diagonal_real,
        },
        "decoherence": {
            "labels": ["/".join(lab) for lab in dec.labels],
            "re": dec.matrix.real.tolist(),
            "im": dec.matrix.imag.tolist(),
        },
    }


# -- subcommands -------------------------------------------------------------------

def _write(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="ascii", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from None


def cmd_tables(args) -> int:
    p = load_params(args.params)
    text, report = tables_report(p, args.tol)
    print(text)
    if args.out:
        _write(args.out, json.dumps(report, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = load_spec(args.spec)
    if args.tol is not None:
        spec = SweepSpec(spec.alpha, spec.phi, spec.a, spec.a_over_alpha, spec.fixed,
                         args.tol, spec.out)
    out = args.out or spec.out
    if not out:
        raise InputError("no output path: pass --out or set 'out' in the spec")
    records = run_sweep(spec, jobs=args.jobs)
    _write(out, render_csv(records))
    counts = {k: sum(r.flags[k] for r in records) for k in records[0].flags} if records else {}
    print(f"{len(records)} grid points -> {out}")
    for k, v in counts.items():
        print(f"  {k}: {v}")
    return EXIT_OK


def cmd_check(args) -> int:
    p = load_params(args.params)
    rep = check_report(p, args.tol)
    required = CHECK_NAMES if args.require == "all" else tuple(
        x.strip() for x in args.require.split(",") if x.strip())
    unknown = set(required) - set(CHECK_NAMES)
    if unknown:
        raise InputError(f"unknown check(s) {sorted(unknown)}; choose from {CHECK_NAMES}")
    rep["required"] = list(required)
    for name in CHECK_NAMES:
        mark = "*" if name in required else " "
        print(f"{mark} {name:<18} {'true' if rep['checks'][name] else 'false'}")
    res = rep["residuals"]
    if res["def2a_closed_form"]:
        print(f"  r1={res['def2a_closed_form']['r1']:.3g} r2={res['def2a_closed_form']['r2']:.3g}")
    print(f"  commutator_max={res['commutator_max']:.3g} "
          f"offdiag_max={res['offdiag_max']:.3g} offdiag_real_max={res['offdiag_real_max']:.3g}")
    if args.out:
        _write(args.out, json.dumps(rep, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if all(rep["checks"][n] for n in required) else EXIT_CHECK


def cmd_regress(args) -> int:
    try:
        dims = tuple(int(x) for x in args.dims.split(","))
    except ValueError:
        raise InputError(f"--dims must be a comma-separated list of integers, got {args.dims!r}")
    if args.trials < 1 or any(not 2 <= d <= 4 for d in dims):
        raise InputError("need --trials >= 1 and dimensions between 2 and 4")
    tol = REGRESS_TOL if args.tol is None else args.tol
    rep = run_regress(args.seed, args.trials, dims, identity=args.identity)
    for name, dev in rep.max_deviation.items():
        print(f"{name:<18} max deviation {dev:.3g}  {'pass' if dev < tol else 'FAIL'}")
    if args.out:
        _write(args.out, json.dumps({"seed": args.seed, "trials": args.trials, "dims": dims,
                                     "tol": tol, "max_deviation": rep.max_deviation},
                                    indent=2, sort_keys=True) + "\n")
    return EXIT_OK if rep.passed(tol) else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pwfriend", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    t = sub.add_parser("tables", help="closed-form tables next to the operator-level rules")
    t.add_argument("--params", required=True, help="key = value parameter file")
    t.add_argument("--out", help="JSON report path")
    t.add_argument("--tol", type=float, default=TOL)
    t.set_defaults(func=cmd_tables)

    s = sub.add_parser("sweep", help="classify a parameter grid into CSV",
                       epilog=COLUMN_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    s.add_argument("--spec", required=True, help="sweep spec; ranges as 'name = min:max:steps'")
    s.add_argument("--out", help="CSV path (overrides 'out' in the spec)")
    s.add_argument("--tol", type=float, default=None)
    s.add_argument("--jobs", type=int, default=1, help="worker processes; row order is unaffected")
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser("check", help="validity conditions and the decoherence functional")
    c.add_argument("--params", required=True)
    c.add_argument("--out", help="JSON report path")
    c.add_argument("--tol", type=float, default=TOL)
    c.add_argument("--require", default="all",
                   help=f"comma-separated checks that must hold for exit 0 ({', '.join(CHECK_NAMES)})"
                        " or 'all'")
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("regress", help="randomised reduction to the Born rule without Wigner")
    r.add_argument("--seed", type=int, default=1)
    r.add_argument("--trials", type=int, default=100)
    r.add_argument("--dims", default="2,3,4")
    r.add_argument("--identity", action="store_true", help="trivial dynamics, equal bases")
    r.add_argument("--tol", type=float, default=None)
    r.add_argument("--out", help="JSON report path")
    r.set_defaults(func=cmd_regress)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
