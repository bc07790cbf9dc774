import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prosocial.beliefs import (
    ParticipationRule,
    belief_profile,
    expected_motivation,
    mc_oracle,
    participation_mass,
)

from oracles import quadrature_beliefs

FIELDS = ("mass_act", "E_va_act", "E_va_abstain", "E_vv_act", "E_vv_abstain")
GRID = [round(0.1 * i, 10) for i in range(20)]


@pytest.mark.parametrize(
    "R,t,expected",
    [(1, 0.0, 1.0), (1, 0.5, 0.875), (0, 0.4, 0.6), (1, 1.5, 0.125), (1, 2.5, 0.0), (0, -1.0, 1.0)],
)
def test_participation_mass(R, t, expected):
    assert participation_mass(ParticipationRule(R, t)) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("R,t", [(1, 0.5), (1, 1.0), (1, 1.5), (0, 0.4), (0, 0.9)])
def test_profile_matches_quadrature(R, t):
    # midpoint quadrature error is O(1/m) near the slanted boundary
    prof = belief_profile(ParticipationRule(R, t))
    for name, q in zip(FIELDS, quadrature_beliefs(R, t)):
        assert getattr(prof, name) == pytest.approx(q, abs=2e-3), name


def test_expected_motivation_examples():
    assert expected_motivation(ParticipationRule(0, 0.4), "va", 1) == pytest.approx(0.7, abs=1e-15)
    for B in (0, 1):
        assert expected_motivation(ParticipationRule(0, 0.4), "vv", B) == 0.5
    # (1/2 - t^3/6) / (1 - t^2/2) at t = 1/2 is 23/42
    assert expected_motivation(ParticipationRule(1, 0.5), "vv", 1) == pytest.approx(23 / 42, abs=1e-15)
    assert expected_motivation(ParticipationRule(1, 1.0), "vv", 1) == pytest.approx(2 / 3, abs=1e-15)


def test_profile_examples():
    full = belief_profile(ParticipationRule(1, 0.0))
    assert full.mass_act == 1.0
    assert full.E_va_act == full.E_vv_act == 0.5
    assert full.abstain_empty and not full.act_empty
    assert full.E_va_abstain == full.E_vv_abstain == 0.5

    half = belief_profile(ParticipationRule(1, 1.0))
    assert half.mass_act == 0.5
    assert half.E_vv_act == pytest.approx(2 / 3, abs=1e-15)
    assert half.E_vv_abstain == pytest.approx(1 / 3, abs=1e-15)

    tail = belief_profile(ParticipationRule(0, 0.4))
    assert tail.E_va_act == pytest.approx(0.7, abs=1e-15)
    assert tail.E_va_abstain == pytest.approx(0.2, abs=1e-15)
    assert tail.E_vv_act == tail.E_vv_abstain == 0.5


def test_limit_convention_is_continuous():
    for R, edge, eps in ((1, 0.0, 1e-7), (0, 0.0, 1e-7)):
        inside = belief_profile(ParticipationRule(R, edge + eps), off_path="limit")
        outside = belief_profile(ParticipationRule(R, edge - eps), off_path="limit")
        assert inside.gap("va") == pytest.approx(outside.gap("va"), abs=1e-6)
    top = belief_profile(ParticipationRule(1, 2.0 - 1e-7), off_path="limit")
    beyond = belief_profile(ParticipationRule(1, 2.5), off_path="limit")
    assert beyond.act_empty
    assert top.gap("vv") == pytest.approx(beyond.gap("vv"), abs=1e-6)


def test_unknown_off_path_rejected():
    with pytest.raises(ValueError):
        belief_profile(ParticipationRule(1, 0.5), off_path="bogus")


@pytest.mark.parametrize("R", [0, 1])
@pytest.mark.parametrize("t", GRID)
def test_law_of_total_expectation(R, t):
    prof = belief_profile(ParticipationRule(R, t))
    if prof.degenerate:
        return
    for x in ("va", "vv"):
        total = prof.mass_act * prof.expectation(x, 1) + (1 - prof.mass_act) * prof.expectation(x, 0)
        assert abs(total - 0.5) <= 1e-12


@settings(max_examples=300, deadline=None)
@given(st.sampled_from([0, 1]), st.floats(-3, 3), st.sampled_from(["prior", "limit"]))
def test_profile_fields_in_unit_interval(R, t, off_path):
    prof = belief_profile(ParticipationRule(R, t), off_path=off_path)
    for name in FIELDS:
        assert 0.0 <= getattr(prof, name) <= 1.0
    assert prof.E_vv_act == prof.E_vv_abstain if R == 0 else prof.E_va_act == prof.E_vv_act


@settings(max_examples=300, deadline=None)
@given(st.floats(1e-6, 1 - 1e-6))
def test_uniform_tail_gap_is_exactly_half(t):
    assert belief_profile(ParticipationRule(0, t)).gap("va") == 0.5


@settings(max_examples=300, deadline=None)
@given(st.floats(1e-6, 2 - 1e-6))
def test_incentive_makes_actors_look_extrinsic(t):
    prof = belief_profile(ParticipationRule(1, t))
    assert prof.E_vv_act > prof.E_vv_abstain
    assert prof.E_va_act > prof.E_va_abstain


def test_mc_oracle_is_deterministic():
    a = mc_oracle(ParticipationRule(1, 0.7), 10_000, seed=11)
    b = mc_oracle(ParticipationRule(1, 0.7), 10_000, seed=11)
    assert a == b


def test_mc_oracle_examples():
    est = mc_oracle(ParticipationRule(1, 0.5), 1_000_000, seed=2024)
    assert abs(est.E_vv_act - 23 / 42) < 0.002
    assert mc_oracle(ParticipationRule(1, 0.0), 1000, seed=1).mass_act == 1.0
    empty = mc_oracle(ParticipationRule(0, 1.5), 1000, seed=1)
    assert empty.act_empty and empty.mass_act == 0.0
    assert empty.E_va_act == 0.5


def test_mc_oracle_rejects_zero_samples():
    with pytest.raises(ValueError):
        mc_oracle(ParticipationRule(1, 0.5), 0, seed=1)


def test_rule_rejects_bad_input():
    with pytest.raises(ValueError):
        ParticipationRule(2, 0.5)
    with pytest.raises(ValueError):
        ParticipationRule(1, math.inf)
