"""Norm-extended prosocial signalling model: beliefs, equilibria, simulation
and a synthetic survey pipeline."""

__version__ = "0.1.0"

from .beliefs import (
    BeliefProfile,
    MonteCarloProfile,
    ParticipationRule,
    belief_profile,
    expected_motivation,
    mc_oracle,
    participation_mass,
)
from .equilibrium import (
    EquilibriumResult,
    ReputationCostPoint,
    UnattainableRateError,
    calibrate_norm,
    reputational_cost_curve,
    solve_threshold,
)
from .model import Agent, Decision, ModelParams, decide, decide_many, direct_benefit, reputational_benefit
from .popsim import Population, SweepCell, SweepSpec, sample_population, simulate_grid, sweep

__all__ = [
    "Agent", "BeliefProfile", "Decision", "EquilibriumResult", "ModelParams", "MonteCarloProfile",
    "ParticipationRule", "Population", "ReputationCostPoint", "SweepCell", "SweepSpec",
    "UnattainableRateError", "belief_profile", "calibrate_norm", "decide", "decide_many",
    "direct_benefit", "expected_motivation", "mc_oracle", "participation_mass",
    "reputational_benefit", "reputational_cost_curve", "sample_population", "simulate_grid",
    "solve_threshold", "sweep",
]
