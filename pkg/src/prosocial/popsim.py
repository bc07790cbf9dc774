"""Agent populations, per-agent decisions and parameter sweeps."""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ._seeding import sub_seed
from .beliefs import ParticipationRule, participation_mass
from .equilibrium import EquilibriumResult, solve_threshold
from .model import Agent, Decision, ModelParams, decide_many

SWEEP_AXES = ("c", "R", "VIS", "pref_va", "pref_vv", "S_va", "S_vv")
MAX_CELLS = 10_000


@dataclass(frozen=True, eq=False)
class Population:
    v_a: np.ndarray
    v_v: np.ndarray
    seed: int

    def __post_init__(self):
        if self.v_a.shape != self.v_v.shape or self.v_a.ndim != 1:
            raise ValueError("v_a and v_v must be 1-d arrays of equal length")

    @property
    def n(self) -> int:
        return int(self.v_a.size)

    @property
    def agents(self) -> List[Agent]:
        return [Agent(float(a), float(v)) for a, v in zip(self.v_a, self.v_v)]


def sample_population(n: int, seed: int) -> Population:
    if n < 1:
        raise ValueError(f"population size must be >= 1, got {n!r}")
    rng = np.random.default_rng(seed)
    v_a = rng.random(n)
    v_v = rng.random(n)
    return Population(v_a, v_v, seed)


def lattice_population(side: int, seed: int) -> Population:
    """One uniformly jittered point per cell of a ``side`` x ``side`` lattice."""
    if side < 1:
        raise ValueError(f"lattice side must be >= 1, got {side!r}")
    rng = np.random.default_rng(seed)
    i, j = np.meshgrid(np.arange(side), np.arange(side), indexing="ij")
    jitter = rng.random((2, side * side))
    v_a = (i.ravel() + jitter[0]) / side
    v_v = (j.ravel() + jitter[1]) / side
    return Population(v_a, v_v, seed)


@dataclass(frozen=True, eq=False)
class GridSimulation:
    params: ModelParams
    population: Population
    equilibrium: EquilibriumResult
    B: np.ndarray

    @property
    def acting_fraction(self) -> float:
        return float(self.B.mean())

    @property
    def converged(self) -> bool:
        return self.equilibrium.converged

    def pairs(self) -> Iterator[Tuple[Agent, Decision]]:
        """(Agent, Decision) pairs in population order."""
        from .model import decide

        for agent in self.population.agents:
            yield agent, decide(agent, self.params, self.equilibrium.beliefs)


def simulate_grid(params: ModelParams, population: Population, mode: str = "rational") -> GridSimulation:
    """Solve beliefs once, then apply the decision rule to every agent.

    An unconverged equilibrium still yields decisions under the best
    threshold found; check ``GridSimulation.converged``.
    """
    eq = solve_threshold(params, mode)
    B = decide_many(population.v_a, population.v_v, params, eq.beliefs)
    return GridSimulation(params, population, eq, B)


@dataclass(frozen=True)
class BoundaryFit:
    """Location of the act/abstain boundary along the v_a axis.

    ``lo`` is the largest score among abstainers and ``hi`` the smallest
    among actors (``None`` when that side is empty). ``intercept`` is their
    midpoint, or the one available side.
    """

    lo: Optional[float]
    hi: Optional[float]
    intercept: Optional[float]


def fitted_boundary(sim: GridSimulation) -> BoundaryFit:
    rule = ParticipationRule(sim.params.R, 0.0)
    score = rule.score(sim.population.v_a, sim.population.v_v)
    acts = sim.B.astype(bool)
    lo = float(score[~acts].max()) if (~acts).any() else None
    hi = float(score[acts].min()) if acts.any() else None
    if lo is not None and hi is not None:
        intercept = 0.5 * (lo + hi)
    else:
        intercept = lo if hi is None else hi
    return BoundaryFit(lo, hi, intercept)


@dataclass(frozen=True)
class SweepSpec:
    axes: Mapping[str, Sequence[float]]
    n: int = 10_000
    seed: int = 0
    mode: str = "rational"
    base: ModelParams = field(default_factory=ModelParams)
    max_cells: int = MAX_CELLS

    def __post_init__(self):
        for name, values in self.axes.items():
            if name not in SWEEP_AXES:
                raise ValueError(f"unknown sweep axis {name!r}; expected one of {SWEEP_AXES}")
            if len(values) == 0:
                raise ValueError(f"sweep axis {name!r} is empty")
        if self.n < 1:
            raise ValueError("population size must be >= 1")
        if self.size > self.max_cells:
            raise ValueError(f"sweep has {self.size} cells, more than max_cells={self.max_cells}")

    @property
    def size(self) -> int:
        return math.prod(len(v) for v in self.axes.values())

    def points(self) -> List[Dict[str, float]]:
        names = list(self.axes)
        return [dict(zip(names, combo)) for combo in itertools.product(*(self.axes[k] for k in names))]


@dataclass(frozen=True)
class SweepCell:
    index: int
    point: Dict[str, float]
    t_star: float
    participation_rate_analytic: float
    participation_rate_empirical: float
    converged: bool
    n: int

    @property
    def stderr(self) -> float:
        p = self.participation_rate_analytic
        return math.sqrt(p * (1.0 - p) / self.n)


def _run_cell(spec: SweepSpec, index: int, point: Dict[str, float]) -> SweepCell:
    params = spec.base.replace(**point)
    pop = sample_population(spec.n, sub_seed(spec.seed, index))
    sim = simulate_grid(params, pop, spec.mode)
    eq = sim.equilibrium
    return SweepCell(
        index=index,
        point=dict(point),
        t_star=eq.t_star,
        participation_rate_analytic=participation_mass(ParticipationRule(params.R, eq.t_star)),
        participation_rate_empirical=sim.acting_fraction,
        converged=eq.converged,
        n=spec.n,
    )


def sweep(spec: SweepSpec, workers: Optional[int] = None) -> List[SweepCell]:
    """Evaluate every point of the axes' cross product.

    Cell ``i`` draws its population from ``sub_seed(spec.seed, i)``, so the
    output does not depend on ``workers`` or completion order.
    """
    points = spec.points()
    if workers is None or workers <= 1:
        return [_run_cell(spec, i, p) for i, p in enumerate(points)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_cell, spec, i, p) for i, p in enumerate(points)]
        return [f.result() for f in futures]
