"""Chain operators and the decoherence functional for two-time history families."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .history import HistoryState, conditional_state
from .linalg import TOL, LinearOperator, outer
from .rules import OutcomeEvent


@dataclass(frozen=True, eq=False)
class HistoryFamily:
    """rho0 at time t0 plus one projector family per later time.

    Each family must resolve the identity on the state reached at its time;
    memory "ready" outcomes that carry no weight may be left out.
    """

    rho0: LinearOperator
    t0: float
    families: tuple[tuple[OutcomeEvent, ...], ...]

    def __post_init__(self):
        fams = tuple(tuple(f) for f in self.families)
        object.__setattr__(self, "families", fams)
        m = self.rho0.matrix
        if np.max(np.abs(m - m.conj().T)) > TOL or abs(np.trace(m) - 1) > TOL:
            raise ValueError("rho0 must be Hermitian with unit trace")
        if np.min(np.linalg.eigvalsh(m)) < -TOL:
            raise ValueError("rho0 must be positive")
        times = [self.t0]
        for fam in fams:
            ts = {e.time for e in fam}
            if len(ts) != 1:
                raise ValueError("all projectors of a family must share one time")
            times.append(ts.pop())
        if any(t1 >= t2 for t1, t2 in zip(times, times[1:])):
            raise ValueError("family times must be increasing and later than t0")

    @property
    def times(self) -> tuple[float, ...]:
        return tuple(fam[0].time for fam in self.families)

    def outcomes(self):
        return list(itertools.product(*(range(len(f)) for f in self.families)))

    def labels(self, i: Sequence[int]) -> tuple[str, ...]:
        return tuple(fam[k].label for fam, k in zip(self.families, i))


def pure_family(h: HistoryState, t0: float, families) -> HistoryFamily:
    """Family with rho0 the (pure) conditional state of ``h`` at ``t0``."""
    return HistoryFamily(outer(conditional_state(h, t0)), t0, families)


def check_complete(family: HistoryFamily, h: HistoryState, tol: float = TOL):
    for fam in family.families:
        psi = conditional_state(h, fam[0].time).amps
        total = sum(h.projector_matrix(e.projector, tol) for e in fam)
        if np.linalg.norm(total @ psi - psi) > tol:
            raise ValueError(f"family at t={fam[0].time} is not complete on the state")


def heisenberg(h: HistoryState, t0: float, ev: OutcomeEvent, tol: float = TOL) -> np.ndarray:
    """U(t0, t_k) P U(t_k, t0)."""
    p = h.projector_matrix(ev.projector, tol)
    u = h.propagator(t0, ev.time)
    return u.conj().T @ p @ u


def chain_operator(family: HistoryFamily, h: HistoryState, i: Sequence[int],
                   tol: float = TOL) -> LinearOperator:
    """Time-ordered product of Heisenberg projectors, earliest on the left."""
    if len(i) != len(family.families):
        raise IndexError("need one outcome index per time")
    k = np.eye(h.space.dim, dtype=complex)
    for fam, idx in zip(family.families, i):
        if not 0 <= idx < len(fam):
            raise IndexError(f"outcome index {idx} out of range for a family of {len(fam)}")
        k = k @ heisenberg(h, family.t0, fam[idx], tol)
    return LinearOperator(h.space, k)


@dataclass(frozen=True, eq=False)
class DecoherenceFunctional:
    matrix: np.ndarray
    outcomes: tuple[tuple[int, ...], ...]
    labels: tuple[tuple[str, ...], ...]
    consistent: bool
    weakly_consistent: bool

    @property
    def off_diagonal(self) -> np.ndarray:
        return self.matrix[~np.eye(len(self.matrix), dtype=bool)]

    @property
    def max_off_diagonal(self) -> float:
        off = self.off_diagonal
        return float(np.max(np.abs(off))) if off.size else 0.0

    @property
    def max_off_diagonal_real(self) -> float:
        off = self.off_diagonal
        return float(np.max(np.abs(off.real))) if off.size else 0.0


def decoherence_functional(family: HistoryFamily, h: HistoryState,
                           tol: float = TOL) -> DecoherenceFunctional:
    """D[i, i'] = tr(K(i)^dag rho0 K(i'))."""
    check_complete(family, h, tol)
    outcomes = family.outcomes()
    ks = [chain_operator(family, h, i, tol).matrix for i in outcomes]
    rho = family.rho0.matrix
    n = len(ks)
    d = np.empty((n, n), dtype=complex)
    for a in range(n):
        left = ks[a].conj().T @ rho
        for b in range(n):
            d[a, b] = np.trace(left @ ks[b])
    off = d[~np.eye(n, dtype=bool)]
    consistent = bool(np.all(np.abs(off) < tol))
    weak = bool(np.all(np.abs(off.real) < tol))
    return DecoherenceFunctional(d, tuple(outcomes),
                                 tuple(family.labels(i) for i in outcomes),
                                 consistent, weak)
