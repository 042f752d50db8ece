"""Validity conditions for Def2a (normalisation) and Def3 (reality/positivity)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .history import HistoryState
from .linalg import TOL
from .params import WignerFriendParams
from .rules import OutcomeEvent, commutator_residual

ANGLE_TOL = 1e-9


class DegenerateParametersError(ValueError):
    """A ratio in the closed-form conditions is undefined (zero amplitude)."""


@dataclass(frozen=True)
class ConditionReport:
    rule: str
    satisfied: bool
    residuals: dict[str, float] = field(default_factory=dict)
    branch: str | None = None  # "plus", "minus", "ND1" or "ND2"


@dataclass(frozen=True)
class Def2aRoots:
    """Roots of the two Def2a quadratics: (plus, minus) for b/a and for a/b."""

    b_over_a: tuple[float, float]
    a_over_b: tuple[float, float]
    discriminant: float
    reciprocal: dict[tuple[str, str], bool]


def def2a_residuals(p: WignerFriendParams, tol: float = TOL) -> ConditionReport:
    """Left-hand sides of the two Def2a normalisation conditions minus one."""
    if p.a == 0 or p.b == 0:
        raise DegenerateParametersError("Def2a conditions need a*b != 0")
    al, be = p.alpha, p.beta
    r_ba = p.b / p.a
    r1, r2 = ratio_residuals(al, be, p.phi, r_ba, p.a / p.b)
    ok = abs(r1) < tol and abs(r2) < tol
    branch = None
    if ok and al * be != 0:
        roots = def2a_solve_ratios(al, be, p.phi)
        plus, minus = roots.b_over_a
        branch = "plus" if abs(r_ba - plus) <= abs(r_ba - minus) else "minus"
    return ConditionReport("def2a", ok, {"r1": r1, "r2": r2}, branch)


def ratio_residuals(alpha: float, beta: float, phi: float,
                    b_over_a: float, a_over_b: float) -> tuple[float, float]:
    """The two normalisation residuals with the amplitude ratios as free unknowns."""
    cross = 2 * math.cos(phi) * (alpha**3 * beta - alpha * beta**3)
    r1 = alpha**4 + beta**4 + cross * b_over_a + 2 * alpha**2 * beta**2 * b_over_a**2 - 1
    r2 = alpha**4 + beta**4 - cross * a_over_b + 2 * alpha**2 * beta**2 * a_over_b**2 - 1
    return r1, r2


def def2a_solve_ratios(alpha: float, beta: float, phi: float,
                       tol: float = TOL) -> Def2aRoots:
    if alpha * beta == 0:
        raise DegenerateParametersError("Def2a roots need alpha*beta != 0")
    d2 = alpha**2 - beta**2
    disc = 1 - math.sin(phi) ** 2 * d2**2
    sq = math.sqrt(max(disc, 0.0))
    c = math.cos(phi) * d2
    ba = ((-c + sq) / (2 * alpha * beta), (-c - sq) / (2 * alpha * beta))
    ab = ((c + sq) / (2 * alpha * beta), (c - sq) / (2 * alpha * beta))
    signs = ("plus", "minus")
    reciprocal = {(s1, s2): abs(ba[i] * ab[j] - 1) < tol
                  for i, s1 in enumerate(signs) for j, s2 in enumerate(signs)}
    return Def2aRoots(ba, ab, disc, reciprocal)


def def3_commutator_residual(h: HistoryState, cond: OutcomeEvent, query: OutcomeEvent,
                             tol: float = TOL) -> float:
    """Norm of [U P_m U^dag, P_n] on the state at the later time."""
    early, late = sorted((cond, query), key=lambda e: e.time)
    return commutator_residual(h, early, late, tol)


def _angle_distance(x: float, target: float) -> float:
    d = (x - target) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


def nondisturbance_check(p: WignerFriendParams, tol: float = TOL,
                         angle_tol: float = ANGLE_TOL) -> ConditionReport:
    """Is the post-Friend state an eigenvector of Wigner's measurement?

    ND1: phi = 0 (mod 2pi), a = alpha, b = beta.
    ND2: a = beta, b = -alpha; with b >= 0 the sign sits in the phase, phi = pi.
    """
    d0 = _angle_distance(p.phi, 0.0)
    dpi = _angle_distance(p.phi, math.pi)
    nd1 = max(abs(p.a - p.alpha), abs(p.b - p.beta))
    nd2 = max(abs(p.a - p.beta), abs(p.b - p.alpha))
    residuals = {"phase_0": d0, "phase_pi": dpi, "nd1": nd1, "nd2": nd2}
    if d0 < angle_tol and nd1 < tol:
        return ConditionReport("nondisturbance", True, residuals, "ND1")
    if dpi < angle_tol and nd2 < tol:
        return ConditionReport("nondisturbance", True, residuals, "ND2")
    return ConditionReport("nondisturbance", False, residuals)
