"""Shared strategies and parameter generators for the test modules."""
import math

import numpy as np
from hypothesis import strategies as st

from pwfriend.params import WignerFriendParams

ANGLE = st.floats(min_value=0.05, max_value=math.pi / 2 - 0.05)
PHASE = st.floats(min_value=-2 * math.pi, max_value=2 * math.pi)


@st.composite
def generic_params(draw):
    """Amplitudes bounded away from 0 so every closed form is defined."""
    th, ps = draw(ANGLE), draw(ANGLE)
    return WignerFriendParams(math.cos(th), math.sin(th), draw(PHASE),
                              math.cos(ps), math.sin(ps), draw(PHASE))


def random_params(rng: np.random.Generator, margin: float = 0.05) -> WignerFriendParams:
    th, ps = rng.uniform(margin, math.pi / 2 - margin, 2)
    phi_s, phi_sf = rng.uniform(-math.pi, math.pi, 2)
    return WignerFriendParams(math.cos(th), math.sin(th), phi_s,
                              math.cos(ps), math.sin(ps), phi_sf)


def on_manifold(alpha: float, phi: float, branch: str = "plus") -> WignerFriendParams:
    """Point satisfying the Def2a normalisation conditions (b/a from the chosen root)."""
    from pwfriend.conditions import def2a_solve_ratios

    beta = math.sqrt(1 - alpha**2)
    roots = def2a_solve_ratios(alpha, beta, phi)
    ba = roots.b_over_a[0 if branch == "plus" else 1]
    if ba < 0:
        # the sign of b goes into the phase
        ba, phi = -ba, phi + math.pi
    a = 1 / math.sqrt(1 + ba**2)
    return WignerFriendParams(a, ba * a, phi, alpha, beta, 0.0)
