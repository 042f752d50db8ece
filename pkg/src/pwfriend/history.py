"""History states in a piecewise-in-clock-time representation.

With the clock Hamiltonian equal to the clock momentum and delta-kick
measurement couplings, projecting the history state onto clock reading ``t``
gives a conditional state that only changes at event times (plus free
evolution under ``H_S`` between them).  We therefore store the schedule and
the initial conditional state instead of a discretised clock register.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .linalg import (
    TOL,
    LinearOperator,
    StateVector,
    check_projector,
    embed,
    is_hermitian,
    is_unitary,
)


# Embedded projectors, shared across history states.  Entries hold a reference
# to the operator so its id cannot be recycled while cached.
_EMBEDDED: dict = {}
_EMBEDDED_MAX = 512


class EventTimeError(ValueError):
    """A clock reading coincides with an event time, or times are misordered."""


@dataclass(frozen=True, eq=False)
class Event:
    time: float
    unitary: LinearOperator
    label: str = ""


@dataclass(frozen=True, eq=False)
class EventSchedule:
    events: tuple[Event, ...] = ()
    hamiltonian: LinearOperator | None = None

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        times = [e.time for e in self.events]
        if any(not math.isfinite(t) for t in times):
            raise EventTimeError("event times must be finite")
        if any(t1 >= t2 for t1, t2 in zip(times, times[1:])):
            raise EventTimeError(f"event times must be strictly increasing, got {times}")
        spaces = {e.unitary.space for e in self.events}
        if self.hamiltonian is not None:
            spaces.add(self.hamiltonian.space)
            if not is_hermitian(self.hamiltonian):
                raise ValueError("free Hamiltonian is not Hermitian")
        if len(spaces) > 1:
            raise ValueError("all events must act on the same space")
        for e in self.events:
            if not is_unitary(e.unitary):
                raise ValueError(f"event {e.label or e.time} is not unitary")

    @property
    def times(self) -> tuple[float, ...]:
        return tuple(e.time for e in self.events)


@dataclass(frozen=True, eq=False)
class HistoryState:
    """Conditional states of a history state for every clock reading.

    ``initial`` is the conditional state at the reference time ``t0``.  When
    there is no free Hamiltonian ``t0`` may be ``-inf`` (the default), i.e.
    the state before every event.
    """

    initial: StateVector
    schedule: EventSchedule = field(default_factory=EventSchedule)
    t0: float = -math.inf
    # memo for propagators and states; the object is immutable
    _memo: dict = field(default_factory=dict, init=False, repr=False)

    @property
    def space(self):
        return self.initial.space

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return self.schedule.times

    @cached_property
    def _eig(self):
        w, v = np.linalg.eigh(self.schedule.hamiltonian.matrix)
        return w, v

    def _free(self, dt: float) -> np.ndarray:
        if self.schedule.hamiltonian is None or dt == 0:
            return np.eye(self.space.dim, dtype=complex)
        w, v = self._eig
        return (v * np.exp(-1j * w * dt)) @ v.conj().T

    def _check_time(self, t: float):
        if not math.isfinite(t):
            raise EventTimeError("clock readings must be finite")
        if t in self.breakpoints:
            raise EventTimeError(f"t={t} is an event time; the conditional state is ambiguous there")

    def propagator(self, t_from: float, t_to: float) -> np.ndarray:
        """Matrix of the evolution from ``t_from`` to ``t_to`` (either direction)."""
        key = ("U", t_from, t_to)
        if key not in self._memo:
            u = self._propagate(t_from, t_to) if t_from <= t_to else \
                self._propagate(t_to, t_from).conj().T
            u.setflags(write=False)
            self._memo[key] = u
        return self._memo[key]

    def _propagate(self, t_from: float, t_to: float) -> np.ndarray:
        u = np.eye(self.space.dim, dtype=complex)
        last = t_from
        for e in self.schedule.events:
            if t_from < e.time < t_to:
                u = e.unitary.matrix @ self._free(e.time - last) @ u
                last = e.time
        return self._free(t_to - last) @ u

    def projector_matrix(self, proj: LinearOperator, tol: float = TOL) -> np.ndarray:
        """``proj`` embedded into the full space, checked once and memoised."""
        key = (id(proj), self.space, tol)
        hit = _EMBEDDED.get(key)
        if hit is None or hit[0] is not proj:
            if len(_EMBEDDED) >= _EMBEDDED_MAX:
                _EMBEDDED.clear()
            m = check_projector(embed(proj, self.space), tol).matrix
            hit = _EMBEDDED[key] = (proj, m)
        return hit[1]


def build_history(initial: StateVector, schedule: EventSchedule | None = None,
                  t0: float | None = None, tol: float = TOL) -> HistoryState:
    schedule = EventSchedule() if schedule is None else schedule
    if abs(initial.norm - 1) > tol:
        raise ValueError(f"initial state has norm {initial.norm}, expected 1")
    if schedule.events and schedule.events[0].unitary.space != initial.space:
        raise ValueError("schedule and initial state live on different spaces")
    if t0 is None:
        if schedule.hamiltonian is not None:
            raise ValueError("a reference time t0 is required when H_S is present")
        t0 = -math.inf
    if schedule.events and t0 >= schedule.events[0].time:
        raise EventTimeError("reference time must precede every event")
    return HistoryState(initial, schedule, t0)


def conditional_state(h: HistoryState, t: float) -> StateVector:
    h._check_time(t)
    key = ("psi", t)
    if key not in h._memo:
        h._memo[key] = StateVector(h.space, h.propagator(h.t0, t) @ h.initial.amps)
    return h._memo[key]


def evolution_map(h: HistoryState, t1: float, t2: float) -> LinearOperator:
    """The unitary taking the conditional state at ``t1`` to the one at ``t2``."""
    h._check_time(t1)
    h._check_time(t2)
    if not t1 < t2:
        raise EventTimeError(f"evolution_map needs t1 < t2, got {t1}, {t2}")
    return LinearOperator(h.space, h.propagator(t1, t2))


def one_time_prob(h: HistoryState, t: float, proj: LinearOperator, tol: float = TOL) -> float:
    psi = conditional_state(h, t).amps
    p = np.vdot(psi, h.projector_matrix(proj, tol) @ psi).real
    return float(min(max(p, 0.0), 1.0))
