import math

import numpy as np
import pytest
from helpers import generic_params
from hypothesis import given
from hypothesis import strategies as st

from pwfriend.decoherence import (
    HistoryFamily,
    chain_operator,
    check_complete,
    decoherence_functional,
    pure_family,
)
from pwfriend.history import one_time_prob
from pwfriend.linalg import LinearOperator
from pwfriend.params import WignerFriendParams
from pwfriend.rules import Rule, rule_table
from pwfriend.scenarios import (
    born_oracle,
    build_non_wigner,
    build_wigner_friend,
    friend_events,
    m_events,
    n_events,
    random_non_wigner,
    wigner_events,
    wigner_friend_family,
)

COUNTER = WignerFriendParams(1 / math.sqrt(2), 1 / math.sqrt(2), 0.0, 0.6, 0.8, math.pi / 2)


def _dec(p):
    h = build_wigner_friend(p)
    return decoherence_functional(wigner_friend_family(h, p), h), h


def test_counterexample_is_weakly_but_not_fully_consistent():
    d, _ = _dec(COUNTER)
    off = d.off_diagonal
    big = off[np.abs(off) > 1e-10]
    assert len(big) == 4
    assert np.allclose(np.abs(big), 0.24, atol=1e-10)
    assert np.max(np.abs(big.real)) < 1e-10
    assert d.weakly_consistent and not d.consistent


@given(generic_params())
def test_functional_is_hermitian_with_unit_trace(p):
    d, _ = _dec(p)
    assert np.allclose(d.matrix, d.matrix.conj().T, atol=1e-12)
    assert math.isclose(np.trace(d.matrix).real, 1, abs_tol=1e-12)
    assert np.sum(d.matrix).real == pytest.approx(1, abs=1e-12)


@given(generic_params())
def test_diagonal_is_collapse_joint_probability(p):
    # D[(f,w),(f,w)] = ||Pi_w Pi^f chi||^2 = P(f) * Def1(w|f)
    d, h = _dec(p)
    t = rule_table(h, Rule.DEF1, list(friend_events(p).values()), list(wigner_events(p).values()))
    p_f = [abs(p.a) ** 2, abs(p.b) ** 2]
    for k, (i, j) in enumerate(d.outcomes):
        if p_f[i] > 1e-12:
            assert math.isclose(d.matrix[k, k].real, p_f[i] * t.values[i, j].real, abs_tol=1e-12)


@given(generic_params())
def test_row_sums_give_def3_numerators(p):
    # sum_f' D[(f,w),(f',w)] = <chi|Pi_w Pi^f|chi>
    d, h = _dec(p)
    t = rule_table(h, Rule.DEF3, list(friend_events(p).values()), list(wigner_events(p).values()))
    for k, (i, j) in enumerate(d.outcomes):
        row = sum(d.matrix[k, m] for m, (_, jj) in enumerate(d.outcomes) if jj == j)
        res = t.results[2 * i + j]
        if res is not None:
            assert abs(row - res.numerator) < 1e-12


@given(generic_params())
def test_off_diagonals_only_between_friend_outcomes(p):
    d, _ = _dec(p)
    for k, (i, j) in enumerate(d.outcomes):
        for m, (i2, j2) in enumerate(d.outcomes):
            if j != j2:
                assert abs(d.matrix[k, m]) < 1e-12


def test_nondisturbance_off_diagonal_is_alpha2_beta2():
    d, _ = _dec(WignerFriendParams.from_amplitudes(0.6, 0.6))
    assert math.isclose(d.max_off_diagonal, 0.36 * 0.64, abs_tol=1e-12)
    assert math.isclose(d.max_off_diagonal_real, 0.36 * 0.64, abs_tol=1e-12)


@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3]))
def test_no_superobserver_chain_matches_born(seed, dim):
    p = random_non_wigner(np.random.default_rng(seed), dim)
    h = build_non_wigner(p)
    fam = pure_family(h, p.t0 + 0.5 * (p.t_M - p.t0), [m_events(p), n_events(p)])
    d = decoherence_functional(fam, h)
    # records in separate memories always decohere
    assert d.consistent
    born = born_oracle(p)
    for k, (i, j) in enumerate(d.outcomes):
        p_m = one_time_prob(h, p.t_1, m_events(p)[i].projector)
        assert math.isclose(d.matrix[k, k].real, p_m * born[i, j], abs_tol=1e-12)


def test_family_validation():
    p = WignerFriendParams.from_amplitudes(0.6, 0.7)
    h = build_wigner_friend(p)
    fam = wigner_friend_family(h, p)
    with pytest.raises(ValueError):
        HistoryFamily(fam.rho0, 10.0, fam.families)
    with pytest.raises(ValueError):
        HistoryFamily(LinearOperator(h.space, 2 * fam.rho0.matrix), fam.t0, fam.families)
    mixed = [[friend_events(p)["up"], wigner_events(p)["yes"]]]
    with pytest.raises(ValueError):
        HistoryFamily(fam.rho0, fam.t0, mixed)
    incomplete = pure_family(h, fam.t0, [[friend_events(p)["up"]]])
    with pytest.raises(ValueError):
        check_complete(incomplete, h)
    with pytest.raises(IndexError):
        chain_operator(fam, h, (0,))
    with pytest.raises(IndexError):
        chain_operator(fam, h, (0, 5))
    assert fam.labels((1, 0)) == ("down", "yes")
    assert fam.times == (p.t_1, p.t_2)
