import math

import pytest
from helpers import generic_params, on_manifold
from hypothesis import given
from hypothesis import strategies as st

from pwfriend.conditions import (
    DegenerateParametersError,
    def2a_residuals,
    def2a_solve_ratios,
    def3_commutator_residual,
    nondisturbance_check,
    ratio_residuals,
)
from pwfriend.params import WignerFriendParams
from pwfriend.rules import def2a_normalization_residual
from pwfriend.scenarios import build_wigner_friend, friend_events, wigner_events

ALPHA = st.floats(min_value=0.05, max_value=0.995)
PHI = st.floats(min_value=-math.pi, max_value=math.pi)


def test_roots_at_real_phase():
    r = def2a_solve_ratios(0.6, 0.8, 0.0)
    assert r.b_over_a == pytest.approx((4 / 3, -3 / 4), abs=1e-12)
    assert r.a_over_b == pytest.approx((3 / 4, -4 / 3), abs=1e-12)
    assert r.reciprocal == {("plus", "plus"): True, ("minus", "minus"): True,
                            ("plus", "minus"): False, ("minus", "plus"): False}


@given(ALPHA, PHI)
def test_roots_zero_both_residuals(alpha, phi):
    beta = math.sqrt(1 - alpha**2)
    r = def2a_solve_ratios(alpha, beta, phi)
    for i in range(2):
        r1, r2 = ratio_residuals(alpha, beta, phi, r.b_over_a[i], r.a_over_b[i])
        assert abs(r1) < 1e-9 and abs(r2) < 1e-9


@given(ALPHA, PHI)
def test_only_same_sign_roots_are_reciprocal(alpha, phi):
    r = def2a_solve_ratios(alpha, math.sqrt(1 - alpha**2), phi)
    assert r.reciprocal[("plus", "plus")] and r.reciprocal[("minus", "minus")]
    assert not r.reciprocal[("plus", "minus")] and not r.reciprocal[("minus", "plus")]
    # mixed products are never positive, so they can never equal one
    assert r.b_over_a[0] * r.a_over_b[1] <= 1e-12
    assert r.b_over_a[1] * r.a_over_b[0] <= 1e-12


@given(ALPHA, PHI, st.sampled_from(["plus", "minus"]))
def test_manifold_points_are_normalised(alpha, phi, branch):
    p = on_manifold(alpha, phi, branch)
    rep = def2a_residuals(p)
    assert rep.satisfied
    # the sign of b is absorbed into the phase, so the canonical point sits on +
    assert rep.branch == "plus"


@given(generic_params())
def test_closed_form_residuals_match_operator_level(p):
    h = build_wigner_friend(p)
    fe = friend_events(p)
    rep = def2a_residuals(p)
    assert math.isclose(rep.residuals["r1"], def2a_normalization_residual(h, fe["up"], p.t_2),
                        abs_tol=1e-12)
    assert math.isclose(rep.residuals["r2"], def2a_normalization_residual(h, fe["down"], p.t_2),
                        abs_tol=1e-12)


def test_counterexample_is_def2a_normalised():
    p = WignerFriendParams(1 / math.sqrt(2), 1 / math.sqrt(2), 0.0, 0.6, 0.8, math.pi / 2)
    rep = def2a_residuals(p)
    assert rep.satisfied and rep.branch == "plus"


def test_degenerate_inputs():
    with pytest.raises(DegenerateParametersError):
        def2a_residuals(WignerFriendParams.from_amplitudes(1.0, 0.6))
    with pytest.raises(DegenerateParametersError):
        def2a_solve_ratios(1.0, 0.0, 0.3)


@pytest.mark.parametrize("p,branch", [
    (WignerFriendParams.from_amplitudes(0.6, 0.6), "ND1"),
    (WignerFriendParams.from_amplitudes(0.6, 0.6, phi_S=2 * math.pi), "ND1"),
    (WignerFriendParams(0.8, 0.6, math.pi, 0.6, 0.8, 0.0), "ND2"),
    (WignerFriendParams(0.8, 0.6, 0.0, 0.6, 0.8, -math.pi), "ND2"),
])
def test_nondisturbance_points(p, branch):
    rep = nondisturbance_check(p)
    assert rep.satisfied and rep.branch == branch
    assert def2a_residuals(p).satisfied


@pytest.mark.parametrize("p", [
    WignerFriendParams.from_amplitudes(0.6, 0.8),
    WignerFriendParams.from_amplitudes(0.6, 0.6, phi_S=math.pi),
    WignerFriendParams.from_amplitudes(0.6, 0.6, phi_S=1e-6),
    WignerFriendParams(1 / math.sqrt(2), 1 / math.sqrt(2), 0.0, 0.6, 0.8, math.pi / 2),
])
def test_disturbing_points(p):
    assert not nondisturbance_check(p).satisfied


def test_commutator_wrapper_orders_events():
    p = WignerFriendParams.from_amplitudes(0.6, 0.6)
    h = build_wigner_friend(p)
    up, yes = friend_events(p)["up"], wigner_events(p)["yes"]
    assert def3_commutator_residual(h, yes, up) == def3_commutator_residual(h, up, yes)
    assert math.isclose(def3_commutator_residual(h, up, yes), 0.48, abs_tol=1e-12)
