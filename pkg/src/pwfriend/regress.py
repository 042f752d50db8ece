"""Randomised reduction check: without a superobserver every rule is the Born rule."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .history import one_time_prob
from .rules import Rule, prob_def1, prob_def2a, prob_def2b, prob_def3
from .scenarios import (
    NonWignerParams,
    born_oracle,
    build_non_wigner,
    m_events,
    n_events,
    random_non_wigner,
)

DEFAULT_TOL = 1e-10
CHECKS = ("def1", "def2a", "def2b", "def3", "def2a_denominator")


def rule_matrices(p: NonWignerParams, extension: str = "cyclic") -> dict[str, np.ndarray]:
    """Every rule's P(n|m) indexed [m, n]; null rows are left at nan."""
    h = build_non_wigner(p, extension)
    ms, ns = m_events(p), n_events(p)
    d = p.dim
    out = {r.value: np.full((d, d), np.nan, dtype=complex) for r in Rule}
    for i, m in enumerate(ms):
        if _p_at(h, m) < 1e-12:
            continue
        for j, n in enumerate(ns):
            out["def1"][i, j] = prob_def1(h, m, n).value
            r = prob_def2a(h, m, n, cond_family=ms)
            out["def2a"][i, j] = r.numerator / r.denominator
            out["def2b"][i, j] = prob_def2b(h, m.at(p.t_2), n).value
            out["def3"][i, j] = prob_def3(h, m, n).value
    return out


def _p_at(h, ev, t=None) -> float:
    return one_time_prob(h, ev.time if t is None else t, ev.projector)


def denominator_gap(p: NonWignerParams) -> float:
    """max_m |P(m read at t_2) - P(m read at t_1)|."""
    h = build_non_wigner(p)
    return max(abs(_p_at(h, m, p.t_2) - _p_at(h, m)) for m in m_events(p))


@dataclass
class RegressReport:
    trials: int
    max_deviation: dict[str, float] = field(default_factory=lambda: dict.fromkeys(CHECKS, 0.0))

    def passed(self, tol: float) -> bool:
        return all(v < tol for v in self.max_deviation.values())


def run_regress(seed: int, trials: int, dims=(2, 3, 4), identity: bool = False) -> RegressReport:
    """Draw ``trials`` scenarios, cycling through ``dims``; deterministic in ``seed``.

    With ``identity`` the free Hamiltonian is zero and both bases coincide,
    so every rule must return the Kronecker delta.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    rep = RegressReport(trials)
    for k in range(trials):
        d = dims[k % len(dims)]
        p = random_non_wigner(rng, d, np.zeros((d, d)) if identity else None)
        if identity:
            p = NonWignerParams(p.initial, p.hamiltonian, p.m_basis, p.m_basis,
                                p.t0, p.t_M, p.t_1, p.t_N, p.t_2)
        oracle = born_oracle(p)
        for name, mat in rule_matrices(p).items():
            mask = ~np.isnan(mat)
            dev = float(np.max(np.abs(mat[mask] - oracle[mask]), initial=0.0))
            rep.max_deviation[name] = max(rep.max_deviation[name], dev)
        rep.max_deviation["def2a_denominator"] = max(rep.max_deviation["def2a_denominator"],
                                                     denominator_gap(p))
    return rep

