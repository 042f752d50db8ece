"""Factories for the Wigner's-friend experiment and the plain two-measurement setup."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .history import Event, EventSchedule, HistoryState, build_history
from .linalg import (
    LinearOperator,
    StateVector,
    compose,
    embed,
    identity,
    ket,
    outer,
    space,
    tensor,
    tensor_all,
)
from .params import WignerFriendParams
from .rules import OutcomeEvent

# Basis layout: S = (up, down); F = (R, up, down); W = (R, yes, no).
S = space("S", 2)
F = space("F", 3)
W = space("W", 3)
SFW = compose(S, F, W)
UP, DOWN = 0, 1
READY = 0
F_INDEX = {"up": 1, "down": 2}
W_INDEX = {"yes": 1, "no": 2}

EXTENSIONS = ("cyclic", "transposition")


def pointer_shift(dim: int, ready: int, target: int, extension: str = "cyclic") -> np.ndarray:
    """A permutation matrix on a pointer register sending |ready> to |target>.

    Only the action on |ready> is physical; the rest of the matrix just
    completes it to a unitary.
    """
    if extension == "cyclic":
        k = (target - ready) % dim
        return np.roll(np.eye(dim), k, axis=0)
    if extension == "transposition":
        perm = np.arange(dim)
        perm[ready], perm[target] = target, ready
        return np.eye(dim)[perm]
    raise ValueError(f"unknown extension {extension!r}, expected one of {EXTENSIONS}")


def measurement_unitary(projectors: list[LinearOperator], pointer: str,
                        targets: list[int], into, ready: int = READY,
                        extension: str = "cyclic") -> LinearOperator:
    """sum_k P_k ⊗ V_k where V_k moves the pointer from ``ready`` to ``targets[k]``."""
    dim = into.factor_dim(pointer)
    total = np.zeros((into.dim, into.dim), dtype=complex)
    for proj, tgt in zip(projectors, targets):
        v = LinearOperator(space(pointer, dim), pointer_shift(dim, ready, tgt, extension))
        total += embed(tensor(proj, v), into).matrix
    return LinearOperator(into, total)


@lru_cache(maxsize=64)
def memory_projector(sp, index: int) -> LinearOperator:
    return outer(ket(sp, index))


def system_state(p: WignerFriendParams) -> StateVector:
    return StateVector(S, [p.a, p.b * np.exp(1j * p.phi_S)])


def yes_state(p: WignerFriendParams) -> StateVector:
    sf = compose(S, F)
    return (p.alpha * ket(sf, (UP, F_INDEX["up"]))
            + p.beta * np.exp(1j * p.phi_SF) * ket(sf, (DOWN, F_INDEX["down"])))


@lru_cache(maxsize=None)
def friend_unitary(extension: str = "cyclic") -> LinearOperator:
    """The Friend's measurement of S in the up/down basis; parameter independent."""
    pi_s = [outer(ket(S, UP)), outer(ket(S, DOWN))]
    return measurement_unitary(pi_s, "F", [F_INDEX["up"], F_INDEX["down"]], SFW,
                               extension=extension)


def build_wigner_friend(p: WignerFriendParams, extension: str = "cyclic",
                        yes: StateVector | None = None) -> HistoryState:
    """History state on S⊗F⊗W with the Friend's measurement at t_F and Wigner's at t_W.

    ``yes`` overrides Wigner's |yes> with any normalised vector on S⊗F.
    No free dynamics.
    """
    yes = yes_state(p) if yes is None else yes.normalized()
    if yes.space != compose(S, F):
        raise ValueError("override |yes> must live on S⊗F")
    u_f = friend_unitary(extension)
    pi_yes = outer(yes)
    pi_no = identity(yes.space) - pi_yes
    u_w = measurement_unitary([pi_yes, pi_no], "W", [W_INDEX["yes"], W_INDEX["no"]], SFW,
                              extension=extension)
    schedule = EventSchedule((Event(p.t_F, u_f, "friend"), Event(p.t_W, u_w, "wigner")))
    initial = tensor_all([system_state(p), ket(F, READY), ket(W, READY)])
    return build_history(initial, schedule)


def friend_events(p: WignerFriendParams, t: float | None = None) -> dict[str, OutcomeEvent]:
    """Readouts of the Friend's memory, at t_1 unless ``t`` is given."""
    t = p.t_1 if t is None else t
    return {f: OutcomeEvent(f, t, memory_projector(F, i)) for f, i in F_INDEX.items()}


def wigner_events(p: WignerFriendParams, t: float | None = None) -> dict[str, OutcomeEvent]:
    t = p.t_2 if t is None else t
    return {w: OutcomeEvent(w, t, memory_projector(W, i)) for w, i in W_INDEX.items()}


@dataclass(frozen=True, eq=False)
class NonWignerParams:
    """Two measurements of the same system S, recorded in memories M and N.

    ``m_basis``/``n_basis`` hold basis vectors as columns.  Times satisfy
    t0 < t_M < t_1 < t_N < t_2.
    """

    initial: np.ndarray
    hamiltonian: np.ndarray
    m_basis: np.ndarray
    n_basis: np.ndarray
    t0: float = 0.0
    t_M: float = 1.0
    t_1: float = 1.5
    t_N: float = 2.0
    t_2: float = 2.5

    def __post_init__(self):
        d = len(self.initial)
        if not 2 <= d <= 4:
            raise ValueError("system dimension must be between 2 and 4")
        if abs(np.linalg.norm(self.initial) - 1) > 1e-12:
            raise ValueError("initial state is not normalised")
        h = np.asarray(self.hamiltonian)
        if h.shape != (d, d) or np.max(np.abs(h - h.conj().T)) > 1e-12:
            raise ValueError("hamiltonian must be a Hermitian d×d matrix")
        for name in ("m_basis", "n_basis"):
            b = np.asarray(getattr(self, name))
            if b.shape != (d, d) or np.max(np.abs(b.conj().T @ b - np.eye(d))) > 1e-10:
                raise ValueError(f"{name} must hold an orthonormal basis as columns")
        if not self.t0 < self.t_M < self.t_1 < self.t_N < self.t_2:
            raise ValueError("times must satisfy t0 < t_M < t_1 < t_N < t_2")

    @property
    def dim(self) -> int:
        return len(self.initial)

    def spaces(self):
        d = self.dim
        return space("S", d), space("M", d + 1), space("N", d + 1)


def _basis_projectors(sp, basis: np.ndarray) -> list[LinearOperator]:
    return [outer(StateVector(sp, basis[:, k])) for k in range(basis.shape[1])]


def build_non_wigner(p: NonWignerParams, extension: str = "cyclic") -> HistoryState:
    s, m, n = p.spaces()
    full = compose(s, m, n)
    targets = list(range(1, p.dim + 1))
    u_m = measurement_unitary(_basis_projectors(s, p.m_basis), "M", targets, full,
                              extension=extension)
    u_n = measurement_unitary(_basis_projectors(s, p.n_basis), "N", targets, full,
                              extension=extension)
    h = embed(LinearOperator(s, p.hamiltonian), full)
    schedule = EventSchedule((Event(p.t_M, u_m, "M"), Event(p.t_N, u_n, "N")), hamiltonian=h)
    initial = tensor_all([StateVector(s, p.initial), ket(m, READY), ket(n, READY)])
    return build_history(initial, schedule, t0=p.t0)


def m_events(p: NonWignerParams) -> list[OutcomeEvent]:
    _, m, _ = p.spaces()
    return [OutcomeEvent(f"m{k}", p.t_1, memory_projector(m, k + 1)) for k in range(p.dim)]


def n_events(p: NonWignerParams) -> list[OutcomeEvent]:
    _, _, n = p.spaces()
    return [OutcomeEvent(f"n{k}", p.t_2, memory_projector(n, k + 1)) for k in range(p.dim)]


def born_oracle(p: NonWignerParams) -> np.ndarray:
    """|<n|U_S(t_N, t_M)|m>|^2 indexed [m, n], computed directly on S."""
    u = scipy.linalg.expm(-1j * p.hamiltonian * (p.t_N - p.t_M))
    amp = p.n_basis.conj().T @ u @ p.m_basis
    return np.abs(amp.T) ** 2


def _haar_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_non_wigner(rng: np.random.Generator, dim: int,
                      hamiltonian: np.ndarray | None = None) -> NonWignerParams:
    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    if hamiltonian is None:
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        hamiltonian = (g + g.conj().T) / 2
    times = np.sort(rng.uniform(0.0, 3.0, 5))
    return NonWignerParams(psi / np.linalg.norm(psi), hamiltonian,
                           _haar_unitary(rng, dim), _haar_unitary(rng, dim),
                           *map(float, times))


def wigner_friend_family(h: HistoryState, p: WignerFriendParams):
    """Two-time family {up, down at t_1} then {yes, no at t_2}, starting before t_F."""
    from .decoherence import pure_family

    return pure_family(h, p.t_F - 1.0, [list(friend_events(p).values()),
                                         list(wigner_events(p).values())])
