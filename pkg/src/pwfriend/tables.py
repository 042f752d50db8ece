"""Closed-form two-time probability tables for the Wigner's-friend setup.

Tables are 2×2 arrays indexed [f, w] with f in (up, down) and w in (yes, no).
``forward`` conditions on the Friend's record, ``reversed`` on Wigner's.

  T1  Def1 (collapse)
  T2  Def2a on its normalised manifold, one table per quadratic root
  T3  Def2b (one-time)
  T4  Def3 at the two non-disturbance points
  T5  Def2a numerator/denominator for arbitrary parameters
  T6  Def3 candidates for arbitrary parameters (complex)

These are evaluated straight from the algebraic expressions, independently of
the operator-level rules, so that the two can be compared.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .conditions import DegenerateParametersError, def2a_residuals, nondisturbance_check
from .history import HistoryState
from .linalg import TOL
from .params import WignerFriendParams
from .rules import Rule, rule_table

TABLE_IDS = ("T1", "T2", "T3", "T4", "T5", "T6")
F_LABELS = ("up", "down")
W_LABELS = ("yes", "no")
GUARD = 1e-12


@dataclass(frozen=True)
class TableValue:
    table: str
    f: str
    w: str
    direction: str
    value: complex
    guard: bool


@dataclass(frozen=True, eq=False)
class ClosedFormTable:
    table: str
    forward: np.ndarray | None
    reversed: np.ndarray | None = None
    forward_guard: np.ndarray | None = None
    reversed_guard: np.ndarray | None = None
    branch: str | None = None

    def entries(self) -> list[TableValue]:
        out = []
        for direction in ("forward", "reversed"):
            vals = getattr(self, direction)
            if vals is None:
                continue
            guard = getattr(self, f"{direction}_guard")
            for i, f in enumerate(F_LABELS):
                for j, w in enumerate(W_LABELS):
                    g = bool(guard[i, j]) if guard is not None else False
                    out.append(TableValue(self.table, f, w, direction, complex(vals[i, j]), g))
        return out


def _need_nonzero(p: WignerFriendParams, names: str, table: str):
    for n in names.split(","):
        if getattr(p, n) == 0:
            raise DegenerateParametersError(
                f"{table} divides by {n}=0; use the operator-level rules instead")


def _collapse_pattern(p: WignerFriendParams) -> np.ndarray:
    al2, be2 = p.alpha**2, p.beta**2
    return np.array([[al2, be2], [be2, al2]], dtype=complex)


def wigner_marginals(p: WignerFriendParams) -> tuple[float, float]:
    """P(yes), P(no) for Wigner's record at t_2."""
    a, b, al, be = p.a, p.b, p.alpha, p.beta
    p_yes = abs(a * al + b * be * cmath.exp(1j * p.phi)) ** 2
    p_no = a**2 * be**2 + b**2 * al**2 - 2 * a * b * al * be * math.cos(p.phi)
    return p_yes, p_no


def _wigner_guard(p: WignerFriendParams) -> np.ndarray:
    p_yes, p_no = wigner_marginals(p)
    return np.array([[p_yes < GUARD, p_no < GUARD]] * 2)


def table1(p: WignerFriendParams) -> ClosedFormTable:
    return ClosedFormTable("T1", _collapse_pattern(p), _collapse_pattern(p),
                           reversed_guard=_wigner_guard(p))


def chi(p: WignerFriendParams) -> float:
    return 2 * math.cos(p.phi) * math.sqrt(
        max(0.0, 1 - (p.alpha**2 - p.beta**2) ** 2 * math.sin(p.phi) ** 2))


def table2(p: WignerFriendParams, branch: str) -> ClosedFormTable:
    if branch not in ("plus", "minus"):
        raise ValueError("T2 needs branch='plus' or 'minus'")
    s = 1.0 if branch == "plus" else -1.0
    al, be = p.alpha, p.beta
    c2 = math.cos(2 * p.phi)
    x = chi(p)
    fwd = np.array([
        [(1 + 2 * al**2 + (be**4 - al**4) * c2 + s * x) / 4,
         (1 + 2 * be**2 + (al**4 - be**4) * c2 - s * x) / 4],
        [(1 + 2 * be**2 + (al**4 - be**4) * c2 + s * x) / 4,
         (1 + 2 * al**2 + (be**4 - al**4) * c2 - s * x) / 4],
    ], dtype=complex)
    return ClosedFormTable("T2", fwd, branch=branch)


def table3(p: WignerFriendParams) -> ClosedFormTable:
    _need_nonzero(p, "a,b,alpha,beta", "T3")
    a, b, al, be, c = p.a, p.b, p.alpha, p.beta, math.cos(p.phi)
    n_up = al**2 / be**2 + be**2 / al**2 + 2 * (b / a) * c * (al / be - be / al) + 2 * b**2 / a**2
    n_dn = al**2 / be**2 + be**2 / al**2 + 2 * (a / b) * c * (be / al - al / be) + 2 * a**2 / b**2
    fwd = np.array([
        [(al**2 / be**2 + 2 * (b * al) / (a * be) * c + b**2 / a**2) / n_up,
         (be**2 / al**2 - 2 * (b * be) / (a * al) * c + b**2 / a**2) / n_up],
        [(be**2 / al**2 + 2 * (a * be) / (b * al) * c + a**2 / b**2) / n_dn,
         (al**2 / be**2 - 2 * (a * al) / (b * be) * c + a**2 / b**2) / n_dn],
    ], dtype=complex)
    return ClosedFormTable("T3", fwd, _collapse_pattern(p), reversed_guard=_wigner_guard(p))


def table4(p: WignerFriendParams, tol: float = TOL) -> ClosedFormTable:
    """Def3 at a non-disturbance point.

    Entries conditioned on Wigner's null outcome are 0 by convention.
    """
    nd = nondisturbance_check(p, tol)
    if not nd.satisfied:
        raise ValueError("T4 is only defined at non-disturbance points")
    al2, be2 = p.alpha**2, p.beta**2
    if nd.branch == "ND1":
        fwd = [[1, 0], [1, 0]]
        rev = [[al2, 0], [be2, 0]]
    else:
        fwd = [[0, 1], [0, 1]]
        rev = [[0, be2], [0, al2]]
    null = np.array([[False, True], [False, True]])
    rev_null = null if nd.branch == "ND1" else ~null
    return ClosedFormTable("T4", np.array(fwd, dtype=complex), np.array(rev, dtype=complex),
                           reversed_guard=rev_null, branch=nd.branch)


def table5(p: WignerFriendParams) -> ClosedFormTable:
    _need_nonzero(p, "a,b", "T5")
    a, b, al, be, c = p.a, p.b, p.alpha, p.beta, math.cos(p.phi)
    fwd = np.array([
        [(a**2 * al**4 + 2 * a * b * al**3 * be * c + b**2 * al**2 * be**2) / a**2,
         (a**2 * be**4 - 2 * a * b * al * be**3 * c + b**2 * al**2 * be**2) / a**2],
        [(b**2 * be**4 + 2 * a * b * al * be**3 * c + a**2 * al**2 * be**2) / b**2,
         (b**2 * al**4 - 2 * a * b * al**3 * be * c + a**2 * al**2 * be**2) / b**2],
    ], dtype=complex)
    return ClosedFormTable("T5", fwd)


def table6(p: WignerFriendParams) -> ClosedFormTable:
    _need_nonzero(p, "a,b", "T6")
    a, b, al, be = p.a, p.b, p.alpha, p.beta
    e_m = cmath.exp(-1j * p.phi)
    e_p = cmath.exp(1j * p.phi)
    fwd = np.array([
        [al**2 + (b / a) * al * be * e_m, be**2 - (b / a) * al * be * e_m],
        [be**2 + (a / b) * al * be * e_p, al**2 - (a / b) * al * be * e_p],
    ], dtype=complex)
    # Reversed entries divide by P(yes) and P(no) at t_2, which vanish at the
    # non-disturbance points.
    d_yes, d_no = wigner_marginals(p)
    guard = _wigner_guard(p)
    with np.errstate(divide="ignore", invalid="ignore"):
        rev = np.array([
            [a * al / (a * al + b * be * e_p) if d_yes >= GUARD else np.nan,
             (a**2 * be**2 - a * b * al * be * e_m) / d_no if d_no >= GUARD else np.nan],
            [b * be / (b * be + a * al * e_m) if d_yes >= GUARD else np.nan,
             (b**2 * al**2 - a * b * al * be * e_p) / d_no if d_no >= GUARD else np.nan],
        ], dtype=complex)
    return ClosedFormTable("T6", fwd, rev, reversed_guard=guard)


def eval_table(table_id: str, p: WignerFriendParams, branch: str | None = None) -> ClosedFormTable:
    if table_id == "T1":
        return table1(p)
    if table_id == "T2":
        if branch is None:
            raise ValueError("T2 needs an explicit branch ('plus' or 'minus')")
        return table2(p, branch)
    if table_id == "T3":
        return table3(p)
    if table_id == "T4":
        return table4(p)
    if table_id == "T5":
        return table5(p)
    if table_id == "T6":
        return table6(p)
    raise ValueError(f"unknown table {table_id!r}; expected one of {TABLE_IDS}")


# -- operator-level counterparts ---------------------------------------------

def operator_tables(p: WignerFriendParams, h: HistoryState | None = None,
                    tol: float = TOL) -> dict:
    """Every rule evaluated on the history state, keyed by (rule, direction)."""
    from .scenarios import build_wigner_friend, friend_events, wigner_events

    h = build_wigner_friend(p) if h is None else h
    fs = list(friend_events(p).values())
    fs2 = list(friend_events(p, t=p.t_2).values())
    ws = list(wigner_events(p).values())
    out = {}
    for rule in Rule:
        rows = fs2 if rule is Rule.DEF2B else fs
        out[rule, "forward"] = rule_table(h, rule, rows, ws, tol=tol)
        if rule is not Rule.DEF2A:
            out[rule, "reversed"] = rule_table(h, rule, rows, ws, reverse=True, tol=tol)
    return out


def _raw_ratio(table) -> np.ndarray:
    vals = np.zeros(table.values.shape, dtype=complex)
    for k, res in enumerate(table.results):
        if res is not None:
            vals.flat[k] = res.numerator / res.denominator
    return vals


@dataclass(frozen=True)
class CrossCheck:
    table: str
    max_deviation: float
    branch: str | None
    compared: int


def _deviation(closed: np.ndarray, guard, op_vals: np.ndarray, op_null: np.ndarray):
    mask = np.ones(closed.shape, dtype=bool) if guard is None else ~guard
    if np.any(op_null & mask):
        return math.inf, int(mask.sum())
    if not mask.any():
        return 0.0, 0
    return float(np.max(np.abs(closed[mask] - op_vals[mask]))), int(mask.sum())


def crosscheck(table_id: str, p: WignerFriendParams, h: HistoryState | None = None,
               tol: float = TOL, ops: dict | None = None) -> CrossCheck:
    """Largest |closed form - operator rule| over the table's non-guarded entries."""
    ops = operator_tables(p, h, tol) if ops is None else ops
    if table_id == "T2":
        if not def2a_residuals(p, tol).satisfied:
            raise ValueError("T2 presupposes the Def2a normalisation conditions, which fail here")
        op = ops[Rule.DEF2A, "forward"]
        best = None
        for branch in ("plus", "minus"):
            dev, n = _deviation(table2(p, branch).forward, None, op.values, op.null)
            if best is None or dev < best.max_deviation:
                best = CrossCheck("T2", dev, branch, n)
        return best

    rule = {"T1": Rule.DEF1, "T3": Rule.DEF2B, "T4": Rule.DEF3,
            "T5": Rule.DEF2A, "T6": Rule.DEF3}[table_id]
    closed = eval_table(table_id, p)
    worst, count = 0.0, 0
    for direction in ("forward", "reversed"):
        vals = getattr(closed, direction)
        if vals is None:
            continue
        op = ops[rule, direction]
        op_vals = _raw_ratio(op) if table_id in ("T5", "T6") else op.values
        guard = getattr(closed, f"{direction}_guard")
        dev, n = _deviation(vals, guard, op_vals, op.null)
        if table_id == "T4" and guard is not None:
            # null-conditioned entries must be null on the operator side too
            if np.any(guard != op.null):
                dev = math.inf
            else:
                dev = max(dev, float(np.max(np.abs(op.values[guard] - vals[guard]), initial=0.0)))
        worst = max(worst, dev)
        count += n
    return CrossCheck(table_id, worst, closed.branch, count)
