import math

import numpy as np
import pytest

from prosocial.model import ModelParams, decide
from prosocial.popsim import (
    SweepSpec,
    fitted_boundary,
    lattice_population,
    sample_population,
    simulate_grid,
    sweep,
)


def test_population_is_reproducible():
    a, b = sample_population(5, 42), sample_population(5, 42)
    assert np.array_equal(a.v_a, b.v_a) and np.array_equal(a.v_v, b.v_v)
    assert a.n == 5 and len(a.agents) == 5


def test_population_mean():
    pop = sample_population(1_000_000, 9)
    assert abs(pop.v_a.mean() - 0.5) < 0.002
    assert abs(pop.v_v.mean() - 0.5) < 0.002


def test_single_agent_in_range():
    (agent,) = sample_population(1, 123).agents
    assert 0 <= agent.v_a <= 1 and 0 <= agent.v_v <= 1


def test_population_rejects_empty():
    with pytest.raises(ValueError):
        sample_population(0, 1)


def test_lattice_population_one_point_per_cell():
    pop = lattice_population(50, 3)
    cells = set(zip((pop.v_a * 50).astype(int), (pop.v_v * 50).astype(int)))
    assert pop.n == 2500 and len(cells) == 2500


def test_neutral_norm_acting_set():
    pop = sample_population(20_000, 5)
    sim = simulate_grid(ModelParams(c=0.4, R=1, S_vv=0.0), pop)
    expected = (pop.v_a + pop.v_v - 0.4 >= 0).astype(np.int8)
    assert np.array_equal(sim.B, expected)


def test_negative_norm_shrinks_acting_set():
    pop = sample_population(20_000, 6)
    neg = simulate_grid(ModelParams(c=1.0, R=1, S_vv=-1.0), pop)
    zero = simulate_grid(ModelParams(c=1.0, R=1, S_vv=0.0), pop)
    assert neg.acting_fraction < zero.acting_fraction


def test_threshold_beyond_square_means_no_actors():
    # naive beliefs at c=1 with S_vv=-1 push the threshold to 1 + 1/3
    pop = sample_population(5000, 7)
    sim = simulate_grid(ModelParams(c=1.0, R=0, S_va=-1.0), pop, mode="naive")
    assert sim.equilibrium.t_star >= 1.0
    assert sim.B.sum() == 0


def test_pairs_match_vectorised_decisions():
    pop = sample_population(200, 8)
    sim = simulate_grid(ModelParams(c=0.5, R=1, S_vv=0.4), pop)
    pairs = list(sim.pairs())
    assert [d.B for _, d in pairs] == sim.B.tolist()
    assert [a.v_a for a, _ in pairs] == pop.v_a.tolist()
    agent, dec = pairs[0]
    assert decide(agent, sim.params, sim.equilibrium.beliefs) == dec


def test_sweep_reproduces_incentive_panels():
    spec = SweepSpec(axes={"c": [0.2, 0.4, 0.6, 0.8], "R": [0, 1], "S_vv": [0.0]}, n=40_000, seed=1)
    cells = sweep(spec)
    assert len(cells) == 8
    for cell in cells:
        c, R = cell.point["c"], cell.point["R"]
        expected = 1 - c if R == 0 else 1 - c * c / 2
        assert cell.participation_rate_analytic == pytest.approx(expected, abs=1e-12)
        band = 4 * math.sqrt(expected * (1 - expected) / cell.n)
        assert abs(cell.participation_rate_empirical - expected) <= band


def test_single_point_sweep_matches_simulate_grid():
    from prosocial._seeding import sub_seed

    spec = SweepSpec(axes={"c": [0.5]}, n=3000, seed=77, base=ModelParams(R=1, S_vv=0.3))
    (cell,) = sweep(spec)
    sim = simulate_grid(ModelParams(c=0.5, R=1, S_vv=0.3), sample_population(3000, sub_seed(77, 0)))
    assert cell.participation_rate_empirical == sim.acting_fraction


def test_sweep_rates_non_decreasing_in_norm():
    spec = SweepSpec(axes={"S_vv": list(np.linspace(-1, 1, 11))}, n=100, seed=2, base=ModelParams(c=0.6, R=1))
    rates = [c.participation_rate_analytic for c in sweep(spec)]
    assert all(b >= a for a, b in zip(rates, rates[1:]))


def test_sweep_independent_of_worker_count():
    spec = SweepSpec(axes={"c": [0.3, 0.5, 0.7], "S_vv": [-0.5, 0.5]}, n=2000, seed=4)
    assert sweep(spec, workers=1) == sweep(spec, workers=4)


def test_sweep_rejects_bad_specs():
    with pytest.raises(ValueError):
        SweepSpec(axes={"c": []})
    with pytest.raises(ValueError):
        SweepSpec(axes={"colour": [1]})
    with pytest.raises(ValueError):
        SweepSpec(axes={"c": list(np.linspace(0, 1, 200)), "S_vv": list(np.linspace(-1, 1, 200))}, max_cells=1000)


def test_boundary_intercept_tracks_threshold():
    pop = lattice_population(200, 1)
    for S in (-1.0, 0.0, 0.5):
        sim = simulate_grid(ModelParams(c=0.6, R=1, S_vv=S), pop)
        fit = fitted_boundary(sim)
        assert fit.lo <= sim.equilibrium.t_star <= fit.hi
        assert fit.intercept == pytest.approx(sim.equilibrium.t_star, abs=0.01)
