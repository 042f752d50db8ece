"""Dense complex linear algebra over small labelled tensor-product spaces.

A :class:`HilbertSpace` is an ordered list of ``(label, dim)`` factors.
States and operators carry their space so that embeddings can permute
factors into place instead of relying on positional conventions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

TOL = 1e-9

# Canonical factor orders used by the scenarios.
WIGNER_ORDER = ("S", "F", "W")
NON_WIGNER_ORDER = ("S", "M", "N")


class SpaceMismatchError(ValueError):
    """Operands live on incompatible spaces."""


@dataclass(frozen=True)
class HilbertSpace:
    factors: tuple[tuple[str, int], ...]

    def __post_init__(self):
        if not self.factors:
            raise ValueError("a Hilbert space needs at least one factor")
        labels = [lab for lab, _ in self.factors]
        if len(set(labels)) != len(labels):
            raise ValueError(f"repeated factor labels: {labels}")
        for lab, d in self.factors:
            if int(d) != d or d < 1:
                raise ValueError(f"factor {lab!r} has invalid dimension {d}")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.factors)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.factors)

    @property
    def dim(self) -> int:
        return math.prod(d for _, d in self.factors)

    @property
    def label(self) -> str:
        return self.factors[0][0] if len(self.factors) == 1 else "composite"

    def factor_dim(self, label: str) -> int:
        return dict(self.factors)[label]

    def __mul__(self, other: HilbertSpace) -> HilbertSpace:
        return HilbertSpace(self.factors + other.factors)

    def __str__(self):
        return "⊗".join(f"{lab}({d})" for lab, d in self.factors)


def space(label: str, dim: int) -> HilbertSpace:
    return HilbertSpace(((label, dim),))


def compose(*spaces: HilbertSpace) -> HilbertSpace:
    return reduce(lambda x, y: x * y, spaces)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    space: HilbertSpace
    amps: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amps).reshape(-1)
        if amps.shape != (self.space.dim,):
            raise SpaceMismatchError(
                f"{amps.shape[0]} amplitudes for a space of dim {self.space.dim}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("state has non-finite amplitudes")
        object.__setattr__(self, "amps", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> StateVector:
        n = self.norm
        if n == 0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.space, self.amps / n)

    def __add__(self, other: StateVector) -> StateVector:
        _same_space(self.space, other.space)
        return StateVector(self.space, self.amps + other.amps)

    def __sub__(self, other: StateVector) -> StateVector:
        _same_space(self.space, other.space)
        return StateVector(self.space, self.amps - other.amps)

    def __mul__(self, c: complex) -> StateVector:
        return StateVector(self.space, c * self.amps)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class LinearOperator:
    space: HilbertSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        d = self.space.dim
        if m.shape != (d, d):
            raise SpaceMismatchError(f"matrix of shape {m.shape} on a space of dim {d}")
        if not np.all(np.isfinite(m)):
            raise ValueError("operator has non-finite entries")
        object.__setattr__(self, "matrix", m)

    @property
    def dag(self) -> LinearOperator:
        return adjoint(self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __add__(self, other: LinearOperator) -> LinearOperator:
        _same_space(self.space, other.space)
        return LinearOperator(self.space, self.matrix + other.matrix)

    def __sub__(self, other: LinearOperator) -> LinearOperator:
        _same_space(self.space, other.space)
        return LinearOperator(self.space, self.matrix - other.matrix)

    def __mul__(self, c: complex) -> LinearOperator:
        return LinearOperator(self.space, c * self.matrix)

    __rmul__ = __mul__


def _same_space(x: HilbertSpace, y: HilbertSpace):
    if x != y:
        raise SpaceMismatchError(f"space mismatch: {x} vs {y}")


def ket(sp: HilbertSpace, index: int | Sequence[int]) -> StateVector:
    """Computational basis vector; ``index`` may be flat or one index per factor."""
    if not isinstance(index, (int, np.integer)):
        index = int(np.ravel_multi_index(tuple(index), sp.dims))
    amps = np.zeros(sp.dim, dtype=complex)
    amps[index] = 1.0
    return StateVector(sp, amps)


def identity(sp: HilbertSpace) -> LinearOperator:
    return LinearOperator(sp, np.eye(sp.dim))


def outer(x: StateVector, y: StateVector | None = None) -> LinearOperator:
    """|x><y| (``y`` defaults to ``x``)."""
    y = x if y is None else y
    _same_space(x.space, y.space)
    return LinearOperator(x.space, np.outer(x.amps, y.amps.conj()))


def projector(x: StateVector) -> LinearOperator:
    """Rank-1 projector onto the ray of ``x`` (normalised first)."""
    return outer(x.normalized())


def tensor(x, y):
    """Kronecker product of two states or two operators, factors concatenated."""
    sp = x.space * y.space
    if isinstance(x, StateVector) and isinstance(y, StateVector):
        return StateVector(sp, np.kron(x.amps, y.amps))
    if isinstance(x, LinearOperator) and isinstance(y, LinearOperator):
        return LinearOperator(sp, np.kron(x.matrix, y.matrix))
    raise TypeError("tensor() needs two states or two operators")


def tensor_all(items: Iterable):
    return reduce(tensor, items)


def permute(x, order: Sequence[str]):
    """Reorder the tensor factors of a state or operator."""
    sp = x.space
    if sorted(order) != sorted(sp.labels):
        raise SpaceMismatchError(f"cannot permute {sp} into order {tuple(order)}")
    perm = [sp.labels.index(lab) for lab in order]
    new_sp = HilbertSpace(tuple(sp.factors[i] for i in perm))
    n = len(sp.dims)
    if isinstance(x, StateVector):
        amps = x.amps.reshape(sp.dims).transpose(perm).reshape(-1)
        return StateVector(new_sp, amps)
    t = x.matrix.reshape(sp.dims + sp.dims)
    t = t.transpose(perm + [n + i for i in perm])
    return LinearOperator(new_sp, t.reshape(new_sp.dim, new_sp.dim))


def embed(op: LinearOperator, into: HilbertSpace) -> LinearOperator:
    """op ⊗ 1 on the remaining factors, permuted into the factor order of ``into``."""
    if op.space == into:
        return op
    target = dict(into.factors)
    for lab, d in op.space.factors:
        if target.get(lab) != d:
            raise SpaceMismatchError(f"factor {lab}({d}) is not part of {into}")
    rest = [(lab, d) for lab, d in into.factors if lab not in op.space.labels]
    full = op
    if rest:
        full = tensor(op, identity(HilbertSpace(tuple(rest))))
    return permute(full, into.labels)


def adjoint(op: LinearOperator) -> LinearOperator:
    return LinearOperator(op.space, op.matrix.conj().T)


def matmul(a: LinearOperator, b):
    _same_space(a.space, b.space)
    if isinstance(b, StateVector):
        return StateVector(b.space, a.matrix @ b.amps)
    return LinearOperator(a.space, a.matrix @ b.matrix)


def inner(x: StateVector, y: StateVector) -> complex:
    """<x|y>, antilinear in the first argument."""
    _same_space(x.space, y.space)
    return complex(np.vdot(x.amps, y.amps))


def expval(psi: StateVector, a: LinearOperator) -> complex:
    return inner(psi, a @ psi)


def is_projector(op: LinearOperator, tol: float = TOL) -> bool:
    m = op.matrix
    return bool(np.max(np.abs(m @ m - m)) < tol and np.max(np.abs(m - m.conj().T)) < tol)


def is_unitary(op: LinearOperator, tol: float = TOL) -> bool:
    m = op.matrix
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(len(m)))) < tol)


def is_hermitian(op: LinearOperator, tol: float = TOL) -> bool:
    return bool(np.max(np.abs(op.matrix - op.matrix.conj().T)) < tol)


def check_projector(op: LinearOperator, tol: float = TOL) -> LinearOperator:
    if not is_projector(op, tol):
        raise ValueError("operator is not an orthogonal projector")
    return op


def check_unitary(op: LinearOperator, tol: float = TOL) -> LinearOperator:
    if not is_unitary(op, tol):
        raise ValueError("operator is not unitary")
    return op


def partial_trace(psi: StateVector, keep: Sequence[str]) -> np.ndarray:
    """Reduced density matrix of ``psi`` on the factors ``keep`` (in that order)."""
    sp = psi.space
    order = list(keep) + [lab for lab in sp.labels if lab not in keep]
    psi = permute(psi, order)
    dk = int(np.prod([sp.factor_dim(lab) for lab in keep]))
    m = psi.amps.reshape(dk, -1)
    return m @ m.conj().T


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(rho - sigma))))
