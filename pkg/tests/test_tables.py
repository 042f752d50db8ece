import math

import numpy as np
import pytest
from helpers import generic_params, on_manifold
from hypothesis import given
from hypothesis import strategies as st

from pwfriend.conditions import DegenerateParametersError
from pwfriend.params import WignerFriendParams
from pwfriend.tables import (
    TABLE_IDS,
    crosscheck,
    eval_table,
    table2,
    wigner_marginals,
)

ND1 = WignerFriendParams.from_amplitudes(0.6, 0.6)
ND2 = WignerFriendParams(0.8, 0.6, math.pi, 0.6, 0.8, 0.0)


@pytest.mark.parametrize("tid", ["T1", "T3", "T5", "T6"])
@given(p=generic_params())
def test_closed_forms_match_operator_rules(tid, p):
    assert crosscheck(tid, p).max_deviation < 1e-9


@given(st.floats(0.05, 0.995), st.floats(-math.pi, math.pi))
def test_t2_matches_def2a_on_manifold(alpha, phi):
    p = on_manifold(alpha, phi)
    cc = crosscheck("T2", p)
    assert cc.max_deviation < 1e-9 and cc.branch == "plus"


@given(st.floats(0.05, 0.995), st.floats(-math.pi, math.pi))
def test_t2_minus_branch_is_plus_branch_shifted_by_pi(alpha, phi):
    p = WignerFriendParams.from_amplitudes(0.6, alpha, phi_S=phi)
    q = p.with_phase(phi + math.pi)
    assert np.allclose(table2(p, "minus").forward, table2(q, "plus").forward, atol=1e-12)


def test_t2_rows_sum_to_one():
    p = on_manifold(0.3, 1.1)
    assert np.allclose(table2(p, "plus").forward.sum(axis=1), 1)


def test_t2_off_manifold_is_refused():
    with pytest.raises(ValueError):
        crosscheck("T2", WignerFriendParams.from_amplitudes(0.6, 0.8, phi_S=0.7))
    with pytest.raises(ValueError):
        eval_table("T2", ND1)


@pytest.mark.parametrize("p,fwd,rev", [
    (ND1, [[1, 0], [1, 0]], [[0.36, 0], [0.64, 0]]),
    (ND2, [[0, 1], [0, 1]], [[0, 0.64], [0, 0.36]]),
])
def test_t4_patterns(p, fwd, rev):
    t = eval_table("T4", p)
    assert np.allclose(t.forward, fwd) and np.allclose(t.reversed, rev)
    assert crosscheck("T4", p).max_deviation < 1e-10


def test_t4_needs_nondisturbance():
    with pytest.raises(ValueError):
        eval_table("T4", WignerFriendParams.from_amplitudes(0.6, 0.8))


def test_t6_hand_values():
    # a=0.6, alpha=0.8, phi=0: alpha^2 + (b/a) alpha beta = 0.64 + 0.64
    t = eval_table("T6", WignerFriendParams.from_amplitudes(0.6, 0.8))
    assert t.forward[0, 0] == pytest.approx(1.28)
    assert t.forward[0, 1] == pytest.approx(-0.28)
    assert t.forward[1, 0] == pytest.approx(0.36 + 0.75 * 0.48)
    # P(yes) = (0.48 + 0.48)^2
    assert wigner_marginals(WignerFriendParams.from_amplitudes(0.6, 0.8))[0] == \
        pytest.approx(0.96**2)


@given(generic_params())
def test_t6_rows_sum_to_one(p):
    t = eval_table("T6", p)
    assert np.allclose(t.forward.sum(axis=1), 1, atol=1e-12)
    if not np.any(t.reversed_guard):
        assert np.allclose(t.reversed.sum(axis=0), 1, atol=1e-10)


def test_coincidence_point_t1_t2_t3():
    for alpha in (0.3, 0.6, 0.9):
        p = WignerFriendParams(1 / math.sqrt(2), 1 / math.sqrt(2), math.pi / 2,
                               alpha, math.sqrt(1 - alpha**2), 0.0)
        t1 = eval_table("T1", p).forward
        t2 = eval_table("T2", p, crosscheck("T2", p).branch).forward
        t3 = eval_table("T3", p).forward
        assert np.allclose(t1, t2, atol=1e-12) and np.allclose(t1, t3, atol=1e-12)


@pytest.mark.parametrize("tid", ["T3", "T5", "T6"])
def test_degenerate_amplitudes(tid):
    with pytest.raises(DegenerateParametersError):
        eval_table(tid, WignerFriendParams.from_amplitudes(0.0, 0.6))


def test_guards_at_nondisturbance():
    for tid in ("T1", "T3", "T6"):
        t = eval_table(tid, ND1)
        assert t.reversed_guard.tolist() == [[False, True], [False, True]]
        assert crosscheck(tid, ND1).max_deviation < 1e-12


def test_entries_and_unknown_ids():
    t = eval_table("T6", ND1)
    entries = t.entries()
    assert len(entries) == 8
    assert sum(e.guard for e in entries) == 2
    assert {e.direction for e in entries} == {"forward", "reversed"}
    with pytest.raises(ValueError):
        eval_table("T7", ND1)
    assert TABLE_IDS == ("T1", "T2", "T3", "T4", "T5", "T6")
