"""Per-agent utilities and the binary act/abstain decision.

An agent acts (B=1) when direct benefit plus norm-weighted reputational
benefit is at least as large as the utility of abstaining. Ties act.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

import numpy as np

if TYPE_CHECKING:
    from .beliefs import BeliefProfile


def _check_range(name: str, value: float, lo: float, hi: float) -> float:
    value = float(value)
    if not (lo <= value <= hi):
        raise ValueError(f"{name}={value!r} outside [{lo}, {hi}]")
    return value


@dataclass(frozen=True)
class ModelParams:
    """Population-level constants of the model.

    ``S_va`` and ``S_vv`` are the social-norm weights on perceived intrinsic
    and extrinsic motivation. ``S_va=1, S_vv=-1`` gives the classic
    signalling setup without norms.
    """

    c: float = 0.5
    R: int = 1
    VIS: float = 1.0
    pref_va: float = 1.0
    pref_vv: float = 1.0
    S_va: float = 0.0
    S_vv: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "c", _check_range("c", self.c, 0.0, 1.0))
        if self.R not in (0, 1) or isinstance(self.R, float) and not self.R.is_integer():
            raise ValueError(f"R must be 0 or 1, got {self.R!r}")
        object.__setattr__(self, "R", int(self.R))
        for name in ("VIS", "pref_va", "pref_vv"):
            object.__setattr__(self, name, _check_range(name, getattr(self, name), 0.0, 1.0))
        for name in ("S_va", "S_vv"):
            object.__setattr__(self, name, _check_range(name, getattr(self, name), -1.0, 1.0))

    def replace(self, **changes) -> "ModelParams":
        fields = {k: getattr(self, k) for k in self.__dataclass_fields__}
        fields.update(changes)
        return ModelParams(**fields)

    @property
    def norm_weight_va(self) -> float:
        return self.VIS * self.S_va * self.pref_va

    @property
    def norm_weight_vv(self) -> float:
        return self.VIS * self.S_vv * self.pref_vv


@dataclass(frozen=True)
class Agent:
    v_a: float
    v_v: float
    c_i: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "v_a", _check_range("v_a", self.v_a, 0.0, 1.0))
        object.__setattr__(self, "v_v", _check_range("v_v", self.v_v, 0.0, 1.0))
        if self.c_i is not None:
            object.__setattr__(self, "c_i", _check_range("c_i", self.c_i, 0.0, 1.0))

    def cost(self, params: ModelParams) -> float:
        return params.c if self.c_i is None else self.c_i


@dataclass(frozen=True)
class Decision:
    B: int
    utility_act: float
    utility_abstain: float


def direct_benefit(agent: Agent, params: ModelParams, B: int) -> float:
    """``B*(v_a + v_v*R) - B*c``, with the agent's own cost when set."""
    if B not in (0, 1):
        raise ValueError(f"B must be 0 or 1, got {B!r}")
    return B * (agent.v_a + agent.v_v * params.R) - B * agent.cost(params)


def reputational_benefit(params: ModelParams, beliefs: "BeliefProfile", B: int) -> float:
    if B not in (0, 1):
        raise ValueError(f"B must be 0 or 1, got {B!r}")
    if beliefs.R != params.R:
        raise ValueError(
            f"belief profile computed for R={beliefs.R} but params have R={params.R}"
        )
    e_va = beliefs.expectation("va", B)
    e_vv = beliefs.expectation("vv", B)
    return params.VIS * (params.S_va * params.pref_va * e_va + params.S_vv * params.pref_vv * e_vv)


def decide(agent: Agent, params: ModelParams, beliefs: "BeliefProfile") -> Decision:
    u_act = direct_benefit(agent, params, 1) + reputational_benefit(params, beliefs, 1)
    u_abstain = direct_benefit(agent, params, 0) + reputational_benefit(params, beliefs, 0)
    return Decision(B=int(u_act >= u_abstain), utility_act=u_act, utility_abstain=u_abstain)


def decide_many(v_a, v_v, params: ModelParams, beliefs: "BeliefProfile", c=None) -> np.ndarray:
    """Vectorised :func:`decide`; returns the int8 array of B.

    Uses the same floating-point expression order as the scalar path, so the
    two agree element for element. ``c`` overrides ``params.c`` per agent.
    """
    v_a = np.asarray(v_a, dtype=float)
    v_v = np.asarray(v_v, dtype=float)
    cost = params.c if c is None else np.asarray(c, dtype=float)
    rep_act = reputational_benefit(params, beliefs, 1)
    rep_abstain = reputational_benefit(params, beliefs, 0)
    u_act = (1 * (v_a + v_v * params.R) - 1 * cost) + rep_act
    u_abstain = 0.0 + rep_abstain
    return (u_act >= u_abstain).astype(np.int8)
