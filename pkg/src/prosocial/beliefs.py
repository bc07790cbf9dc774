"""Observer beliefs: conditional means of uniform motivations given an action.

Motivations ``(v_a, v_v)`` are uniform on the unit square. Without an
incentive (R=0) agents act when ``v_a >= t``; with one (R=1) they act when
``v_a + v_v >= t``. The conditional means follow from the geometry of the
acting and abstaining regions: a uniform tail for R=0, a corner triangle and
its complement for R=1.

Empty regions (e.g. nobody abstains when ``t <= 0``) have no defined
conditional mean. Two conventions are available:

``"prior"``
    the empty side gets the prior mean 0.5 (the default).
``"limit"``
    the empty side gets the limit of its mean as the region shrinks to
    nothing, which keeps belief gaps continuous in ``t``. The equilibrium
    solver uses this one.

Either way the profile carries ``act_empty`` / ``abstain_empty`` flags.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

PRIOR_MEAN = 0.5
OFF_PATH_CONVENTIONS = ("prior", "limit")


@dataclass(frozen=True)
class ParticipationRule:
    R: int
    t: float

    def __post_init__(self):
        if self.R not in (0, 1):
            raise ValueError(f"R must be 0 or 1, got {self.R!r}")
        object.__setattr__(self, "R", int(self.R))
        t = float(self.t)
        if not math.isfinite(t):
            raise ValueError(f"threshold must be finite, got {self.t!r}")
        object.__setattr__(self, "t", t)

    def score(self, v_a, v_v):
        """The quantity compared against ``t``."""
        return v_a + v_v if self.R else v_a


@dataclass(frozen=True)
class BeliefProfile:
    R: int
    E_va_act: float
    E_va_abstain: float
    E_vv_act: float
    E_vv_abstain: float
    mass_act: float
    act_empty: bool = False
    abstain_empty: bool = False

    def expectation(self, which: str, B: int) -> float:
        if which not in ("va", "vv"):
            raise ValueError(f"which must be 'va' or 'vv', got {which!r}")
        suffix = "act" if B == 1 else "abstain"
        if B not in (0, 1):
            raise ValueError(f"B must be 0 or 1, got {B!r}")
        return getattr(self, f"E_{which}_{suffix}")

    def gap(self, which: str) -> float:
        """E(x | act) - E(x | abstain)."""
        return self.expectation(which, 1) - self.expectation(which, 0)

    @property
    def degenerate(self) -> bool:
        return self.act_empty or self.abstain_empty


@dataclass(frozen=True)
class MonteCarloProfile(BeliefProfile):
    """Sampled profile; ``stderr`` maps field name to its standard error."""

    n_samples: int = 0
    stderr: Dict[str, float] = field(default_factory=dict)


def participation_mass(rule: ParticipationRule) -> float:
    t = rule.t
    if rule.R == 0:
        return min(max(1.0 - t, 0.0), 1.0)
    if t <= 0.0:
        return 1.0
    if t <= 1.0:
        return 1.0 - t * t / 2.0
    if t < 2.0:
        s = 2.0 - t
        return s * s / 2.0
    return 0.0


def _check_off_path(off_path: str) -> None:
    if off_path not in OFF_PATH_CONVENTIONS:
        raise ValueError(f"off_path must be one of {OFF_PATH_CONVENTIONS}, got {off_path!r}")


def _score_means(rule: ParticipationRule, off_path: str) -> Tuple[float, float, bool, bool]:
    """Means of the informative coordinate over (acting, abstaining) regions.

    For R=1 both coordinates share these means by symmetry of the rule.
    """
    t = rule.t
    if rule.R == 0:
        if t <= 0.0:
            return PRIOR_MEAN, (0.0 if off_path == "limit" else PRIOR_MEAN), False, True
        if t >= 1.0:
            return (1.0 if off_path == "limit" else PRIOR_MEAN), PRIOR_MEAN, True, False
        act = (1.0 + t) / 2.0
        # act - 0.5 is exact for act in [0.5, 1], so the gap is exactly 0.5.
        return act, act - 0.5, False, False

    if t <= 0.0:
        return PRIOR_MEAN, (0.0 if off_path == "limit" else PRIOR_MEAN), False, True
    if t >= 2.0:
        return (1.0 if off_path == "limit" else PRIOR_MEAN), PRIOR_MEAN, True, False
    if t <= 1.0:
        # abstainers fill the lower-left triangle with legs t
        tri = t * t / 2.0
        centroid = t / 3.0
        act = (0.5 - tri * centroid) / (1.0 - tri)
        return act, centroid, False, False
    # actors fill the upper-right triangle with legs 2 - t
    s = 2.0 - t
    tri = s * s / 2.0
    centroid = 1.0 - s / 3.0
    abstain = (0.5 - tri * centroid) / (1.0 - tri)
    return centroid, abstain, False, False


def expected_motivation(
    rule: ParticipationRule, which: str, B: int, off_path: str = "prior"
) -> float:
    return belief_profile(rule, off_path=off_path).expectation(which, B)


def belief_profile(rule: ParticipationRule, off_path: str = "prior") -> BeliefProfile:
    _check_off_path(off_path)
    act, abstain, act_empty, abstain_empty = _score_means(rule, off_path)
    if rule.R == 0:
        # the rule carries no information about v_v
        vv_act = vv_abstain = PRIOR_MEAN
    else:
        vv_act, vv_abstain = act, abstain
    return BeliefProfile(
        R=rule.R,
        E_va_act=act,
        E_va_abstain=abstain,
        E_vv_act=vv_act,
        E_vv_abstain=vv_abstain,
        mass_act=participation_mass(rule),
        act_empty=act_empty,
        abstain_empty=abstain_empty,
    )


def _mean_and_se(x: np.ndarray) -> Tuple[float, float]:
    if x.size == 0:
        return PRIOR_MEAN, 0.0
    mean = float(x.mean())
    se = float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0
    return mean, se


def mc_oracle(rule: ParticipationRule, n_samples: int, seed: int) -> MonteCarloProfile:
    """Estimate the belief profile by sampling the unit square.

    Every coordinate mean is estimated from the samples, including the ones
    the analytic path fixes by convention. Empty sampled regions report the
    prior mean with the matching ``*_empty`` flag set and a zero standard
    error.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    v_a = rng.random(n_samples)
    v_v = rng.random(n_samples)
    acts = rule.score(v_a, v_v) >= rule.t
    n_act = int(acts.sum())
    p = n_act / n_samples

    stats = {}
    for name, values in (("va", v_a), ("vv", v_v)):
        stats[f"E_{name}_act"] = _mean_and_se(values[acts])
        stats[f"E_{name}_abstain"] = _mean_and_se(values[~acts])
    stderr = {k: se for k, (_, se) in stats.items()}
    stderr["mass_act"] = math.sqrt(p * (1.0 - p) / n_samples)
    return MonteCarloProfile(
        R=rule.R,
        mass_act=p,
        act_empty=n_act == 0,
        abstain_empty=n_act == n_samples,
        n_samples=n_samples,
        stderr=stderr,
        **{k: m for k, (m, _) in stats.items()},
    )
