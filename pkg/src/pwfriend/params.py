from __future__ import annotations

import math
from dataclasses import dataclass, replace

NORM_TOL = 1e-12


@dataclass(frozen=True)
class WignerFriendParams:
    """Initial state a|up> + b e^{i phi_S}|down>, Wigner's |yes> = alpha|up,up> + beta e^{i phi_SF}|down,down>.

    Clock times must satisfy t_F < t_1 < t_W < t_2.
    """

    a: float
    b: float
    phi_S: float
    alpha: float
    beta: float
    phi_SF: float
    t_F: float = 1.0
    t_W: float = 3.0
    t_1: float = 2.0
    t_2: float = 4.0

    def __post_init__(self):
        for name in ("a", "b", "alpha", "beta"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be a finite non-negative real, got {v}")
        for name in ("phi_S", "phi_SF", "t_F", "t_W", "t_1", "t_2"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if abs(self.a**2 + self.b**2 - 1) > NORM_TOL:
            raise ValueError(f"a^2 + b^2 = {self.a**2 + self.b**2}, expected 1")
        if abs(self.alpha**2 + self.beta**2 - 1) > NORM_TOL:
            raise ValueError(f"alpha^2 + beta^2 = {self.alpha**2 + self.beta**2}, expected 1")
        if not self.t_F < self.t_1 < self.t_W < self.t_2:
            raise ValueError("times must satisfy t_F < t_1 < t_W < t_2")

    @property
    def phi(self) -> float:
        return self.phi_S - self.phi_SF

    @classmethod
    def from_amplitudes(cls, a: float, alpha: float, phi_S: float = 0.0,
                        phi_SF: float = 0.0, **times) -> WignerFriendParams:
        """Fill in b and beta from normalisation."""
        return cls(a, math.sqrt(max(0.0, 1 - a * a)), phi_S,
                   alpha, math.sqrt(max(0.0, 1 - alpha * alpha)), phi_SF, **times)

    def with_phase(self, phi: float) -> WignerFriendParams:
        return replace(self, phi_S=phi + self.phi_SF)
