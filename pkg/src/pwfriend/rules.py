"""The four two-time conditional-probability rules.

Every rule takes a history state, a conditioning event and a query event.
Rules never raise on invalid probability values: they return
``valid=False`` with diagnostics, since the invalid regions are what one
wants to map.  They do raise when conditioning on a null event.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .history import HistoryState, conditional_state
from .linalg import TOL, LinearOperator

NULL_TOL = 1e-12


class NullConditioningError(ValueError):
    """The conditioning event has (numerically) zero probability."""


class UnsupportedRuleError(ValueError):
    """The rule has no meaning for the requested event ordering."""


class Rule(enum.Enum):
    DEF1 = "def1"
    DEF2A = "def2a"
    DEF2B = "def2b"
    DEF3 = "def3"


@dataclass(frozen=True, eq=False)
class OutcomeEvent:
    """Outcome ``label`` read off a memory by ``projector`` at clock time ``time``."""

    label: str
    time: float
    projector: LinearOperator

    def at(self, t: float) -> OutcomeEvent:
        return replace(self, time=t)


@dataclass(frozen=True)
class RuleResult:
    value: complex
    rule: Rule
    valid: bool
    numerator: complex
    denominator: float
    diagnostics: dict[str, float] = field(default_factory=dict)

    @property
    def real(self) -> float:
        return float(np.real(self.value))


def _proj(h: HistoryState, ev: OutcomeEvent, tol: float) -> np.ndarray:
    return h.projector_matrix(ev.projector, tol)


def _state(h: HistoryState, t: float) -> np.ndarray:
    return conditional_state(h, t).amps


def _prob(h: HistoryState, ev: OutcomeEvent, tol: float, t: float | None = None) -> float:
    psi = _state(h, ev.time if t is None else t)
    return float(np.vdot(psi, _proj(h, ev, tol) @ psi).real)


def _denominator(h: HistoryState, cond: OutcomeEvent, tol: float) -> float:
    den = _prob(h, cond, tol)
    if den < NULL_TOL:
        raise NullConditioningError(
            f"P({cond.label} at t={cond.time}) = {den:.3g}; cannot condition on it")
    return den


def _distinct(cond: OutcomeEvent, query: OutcomeEvent):
    if cond.time == query.time:
        raise ValueError("this rule needs the two events at different clock times")


def _clamped(x: float) -> float:
    return min(max(x, 0.0), 1.0)


def prob_def1(h: HistoryState, cond: OutcomeEvent, query: OutcomeEvent,
              tol: float = TOL) -> RuleResult:
    """Two-time collapse: project on ``cond``, evolve to the query time, project again."""
    _distinct(cond, query)
    den = _denominator(h, cond, tol)
    x = _proj(h, cond, tol) @ _state(h, cond.time)
    y = _proj(h, query, tol) @ (h.propagator(cond.time, query.time) @ x)
    num = float(np.vdot(y, y).real)
    return RuleResult(_clamped(num / den), Rule.DEF1, True, num, den)


def def2a_normalization_residual(h: HistoryState, cond: OutcomeEvent, t2: float,
                                 tol: float = TOL) -> float:
    """Row sum minus one of the Def2a candidates conditioned on ``cond``.

    For query outcomes that are complete on the state at ``t2`` the row sum
    is P(cond read at t2) / P(cond at its own time).
    """
    return _prob(h, cond, tol, t=t2) / _denominator(h, cond, tol) - 1.0


def prob_def2a(h: HistoryState, cond: OutcomeEvent, query: OutcomeEvent,
               cond_family: Sequence[OutcomeEvent] | None = None,
               tol: float = TOL) -> RuleResult:
    """Both memories read at the query time, divided by P(cond) at the conditioning time.

    ``valid`` requires the normalisation residual of every member of
    ``cond_family`` (default: just ``cond``) to vanish.  Members with zero
    probability are skipped since nothing is ever conditioned on them.
    """
    if cond.time > query.time:
        raise UnsupportedRuleError(
            "Def2a cannot condition on the later event: the numerator does not "
            "depend on the earlier time and the earlier record is not yet written")
    _distinct(cond, query)
    den = _denominator(h, cond, tol)
    y = _proj(h, query, tol) @ (_proj(h, cond, tol) @ _state(h, query.time))
    num = float(np.vdot(y, y).real)
    diagnostics = {}
    for c in (cond,) if cond_family is None else cond_family:
        if _prob(h, c, tol) < NULL_TOL:
            continue
        diagnostics[f"normalization[{c.label}]"] = def2a_normalization_residual(
            h, c, query.time, tol)
    valid = all(abs(r) < tol for r in diagnostics.values())
    value = num / den
    return RuleResult(_clamped(value) if valid else value, Rule.DEF2A, valid, num, den,
                      diagnostics)


def prob_def2b(h: HistoryState, cond: OutcomeEvent, query: OutcomeEvent,
               tol: float = TOL) -> RuleResult:
    """One-time rule: both memories read at the same (final) clock time."""
    if cond.time != query.time:
        raise ValueError("Def2b reads both records at one clock time")
    den = _denominator(h, cond, tol)
    y = _proj(h, query, tol) @ (_proj(h, cond, tol) @ _state(h, query.time))
    num = float(np.vdot(y, y).real)
    return RuleResult(_clamped(num / den), Rule.DEF2B, True, num, den)


def commutator_residual(h: HistoryState, first: OutcomeEvent, second: OutcomeEvent,
                        tol: float = TOL) -> float:
    """|| [U P_first U^dag, P_second] phi(t_second) || with U the evolution first -> second."""
    if not first.time < second.time:
        raise ValueError("events must be ordered first.time < second.time")
    u = h.propagator(first.time, second.time)
    p1 = _proj(h, first, tol)
    b = _proj(h, second, tol)
    psi = _state(h, second.time)

    def a(v):
        return u @ (p1 @ (u.conj().T @ v))

    return float(np.linalg.norm(a(b @ psi) - b @ a(psi)))


def prob_def3(h: HistoryState, cond: OutcomeEvent, query: OutcomeEvent,
              tol: float = TOL) -> RuleResult:
    """<phi(t_late)| P_late U P_early |phi(t_early)> / P(cond).

    The candidate is complex in general.  It is reported as valid when it is
    real and lies in [0, 1] within ``tol``; the commutator residual is kept
    as a diagnostic.
    """
    _distinct(cond, query)
    early, late = sorted((cond, query), key=lambda e: e.time)
    den = _denominator(h, cond, tol)
    x = _proj(h, early, tol) @ _state(h, early.time)
    y = _proj(h, late, tol) @ (h.propagator(early.time, late.time) @ x)
    num = complex(np.vdot(_state(h, late.time), y))
    value = num / den
    diagnostics = {
        "imag": abs(value.imag),
        "negativity": max(0.0, -value.real),
        "excess": max(0.0, value.real - 1.0),
        "commutator": commutator_residual(h, early, late, tol),
    }
    valid = (diagnostics["imag"] < tol and diagnostics["negativity"] < tol
             and diagnostics["excess"] < tol)
    if valid:
        value = complex(_clamped(value.real))
    return RuleResult(value, Rule.DEF3, valid, num, den, diagnostics)


RULES = {
    Rule.DEF1: prob_def1,
    Rule.DEF2A: prob_def2a,
    Rule.DEF2B: prob_def2b,
    Rule.DEF3: prob_def3,
}


@dataclass(frozen=True, eq=False)
class RuleTable:
    """Rule values indexed [row, col].

    Entries whose conditioning event is null are reported as 0 and flagged
    in ``null``; they are never valid.
    """

    rule: Rule
    reverse: bool
    values: np.ndarray
    valid: np.ndarray
    null: np.ndarray
    results: tuple


def rule_table(h: HistoryState, rule: Rule, rows: Sequence[OutcomeEvent],
               cols: Sequence[OutcomeEvent], reverse: bool = False,
               tol: float = TOL) -> RuleTable:
    """Evaluate ``rule`` on every (row, col) pair.

    Forward tables condition on the row event and query the column event;
    ``reverse=True`` swaps the roles while keeping the [row, col] layout.
    """
    shape = (len(rows), len(cols))
    values = np.zeros(shape, dtype=complex)
    valid = np.zeros(shape, dtype=bool)
    null = np.zeros(shape, dtype=bool)
    results = []
    for i, r in enumerate(rows):
        for j, c in enumerate(cols):
            cond, query = (c, r) if reverse else (r, c)
            kwargs = {"cond_family": cols if reverse else rows} if rule is Rule.DEF2A else {}
            try:
                res = RULES[rule](h, cond, query, tol=tol, **kwargs)
            except NullConditioningError:
                null[i, j] = True
                results.append(None)
                continue
            values[i, j] = res.value
            valid[i, j] = res.valid
            results.append(res)
    return RuleTable(rule, reverse, values, valid, null, tuple(results))
