"""Synthetic cross-country survey microdata driven by the norm model.

Each country has an acceptability norm and an incentive level for two
incentive types (financial, time). One type drives behaviour (``channel``
in :class:`LinkSettings`). The model's S_vv is the rescaled norm,
``2 * norm - 1``, so 50% acceptability is a neutral norm. Incentive levels
use the {0, 0.5, 1} coding (none / some operators / all operators). Any
positive level switches the incentive on, and 0.5 optionally halves
visibility to mimic partial availability.

Individuals draw uniform motivations and a cost around the country mean.
They decide against equilibrium beliefs solved at the country's mean cost.
Demographic covariates are drawn independently of everything else.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ._seeding import sub_seed
from .beliefs import ParticipationRule, participation_mass
from .equilibrium import EquilibriumResult, solve_threshold
from .model import ModelParams, decide_many, reputational_benefit

INCENTIVE_LEVELS = (0.0, 0.5, 1.0)
CHANNELS = ("time", "financial")

# marginal shares of the covariates, in category order
EDUCATION_PROBS = (0.01, 0.17, 0.45, 0.37)
COMMUNITY_PROBS = (0.27, 0.42, 0.31)
AGE_MEAN, AGE_SD, AGE_RANGE = 51.29, 17.81, (18, 99)
P_FEMALE, P_COHABITING, P_EMPLOYED = 0.56, 0.65, 0.49
CHILDREN_MEAN, CHILDREN_MAX = 0.29, 15


def rescale_norm(norm: float) -> float:
    """Acceptability share in [0, 1] to the model's S scale in [-1, 1]."""
    return 2.0 * norm - 1.0


def unscale_norm(S: float) -> float:
    return (S + 1.0) / 2.0


@dataclass(frozen=True)
class CountrySpec:
    country_id: str
    S_vv_fin: float
    S_vv_time: float
    incentive_fin: float
    incentive_time: float
    cost_mean: float

    def __post_init__(self):
        for name in ("S_vv_fin", "S_vv_time", "cost_mean"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v!r} outside [0, 1]")
        for name in ("incentive_fin", "incentive_time"):
            if getattr(self, name) not in INCENTIVE_LEVELS:
                raise ValueError(f"{name} must be one of {INCENTIVE_LEVELS}")

    def norm(self, channel: str) -> float:
        return self.S_vv_time if channel == "time" else self.S_vv_fin

    def incentive(self, channel: str) -> float:
        return self.incentive_time if channel == "time" else self.incentive_fin


def _check_probs(name: str, probs: Mapping[float, float]) -> None:
    if any(k not in INCENTIVE_LEVELS for k in probs):
        raise ValueError(f"{name}: incentive levels must be among {INCENTIVE_LEVELS}")
    if any(p < 0 for p in probs.values()) or not np.isclose(sum(probs.values()), 1.0):
        raise ValueError(f"{name}: proportions must be non-negative and sum to 1")


def _check_range(name: str, rng: Tuple[float, float], allow_point: bool = False) -> None:
    lo, hi = rng
    ok = lo <= hi if allow_point else lo < hi
    if not (0.0 <= lo and hi <= 1.0 and ok):
        raise ValueError(f"{name}: degenerate or out-of-range interval {rng!r}")


@dataclass(frozen=True)
class CountrySettings:
    """Distributions for country-level variables.

    Defaults follow the observed 28-country ranges and incentive shares.
    ``cost_range`` may be a single point; the default gives every country the
    same mean cost so that cost is not an unobserved country-level
    confounder of the pooled regression.
    """

    fin_norm_range: Tuple[float, float] = (0.02, 0.39)
    time_norm_range: Tuple[float, float] = (0.12, 0.70)
    fin_incentive_probs: Mapping[float, float] = field(
        default_factory=lambda: {0.0: 0.82, 0.5: 0.04, 1.0: 0.14}
    )
    time_incentive_probs: Mapping[float, float] = field(
        default_factory=lambda: {0.0: 0.46, 0.5: 0.25, 1.0: 0.29}
    )
    cost_range: Tuple[float, float] = (0.6, 0.6)

    def __post_init__(self):
        _check_range("fin_norm_range", self.fin_norm_range)
        _check_range("time_norm_range", self.time_norm_range)
        _check_range("cost_range", self.cost_range, allow_point=True)
        _check_probs("fin_incentive_probs", self.fin_incentive_probs)
        _check_probs("time_incentive_probs", self.time_incentive_probs)


@dataclass(frozen=True)
class LinkSettings:
    """How country variables and latent draws turn into survey rows."""

    channel: str = "time"
    VIS: float = 1.0
    pref_va: float = 1.0
    pref_vv: float = 1.0
    S_va: float = 0.0
    cost_spread: float = 0.1
    attenuate_partial: bool = True
    intrinsic_cutoff: float = 0.37
    extrinsic_cutoff: float = 0.94
    mode: str = "rational"

    def __post_init__(self):
        if self.channel not in CHANNELS:
            raise ValueError(f"channel must be one of {CHANNELS}")
        if not 0.0 <= self.cost_spread <= 0.5:
            raise ValueError("cost_spread must be in [0, 0.5]")
        for name in ("intrinsic_cutoff", "extrinsic_cutoff"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")


@dataclass(frozen=True)
class SurveyRow:
    country_id: str
    donated: int
    v_a: float
    v_v: float
    cost: float
    intrinsic_flag: int
    extrinsic_flag: int
    age: int
    gender: int
    cohabiting: int
    education: int
    employed: int
    community: int
    children: int


SURVEY_FIELDS = tuple(SurveyRow.__dataclass_fields__)


def generate_countries(
    n_countries: int, settings: Optional[CountrySettings] = None, seed: int = 0
) -> List[CountrySpec]:
    if n_countries < 2:
        raise ValueError("need at least 2 countries")
    settings = settings or CountrySettings()
    rng = np.random.default_rng(seed)

    def levels(probs: Mapping[float, float]) -> np.ndarray:
        keys = sorted(probs)
        return rng.choice(keys, size=n_countries, p=[probs[k] for k in keys])

    fin_norm = rng.uniform(*settings.fin_norm_range, size=n_countries)
    time_norm = rng.uniform(*settings.time_norm_range, size=n_countries)
    fin_inc = levels(settings.fin_incentive_probs)
    time_inc = levels(settings.time_incentive_probs)
    cost = rng.uniform(*settings.cost_range, size=n_countries)
    width = len(str(n_countries - 1))
    return [
        CountrySpec(
            country_id=f"C{i:0{width}d}",
            S_vv_fin=float(fin_norm[i]),
            S_vv_time=float(time_norm[i]),
            incentive_fin=float(fin_inc[i]),
            incentive_time=float(time_inc[i]),
            cost_mean=float(cost[i]),
        )
        for i in range(n_countries)
    ]


def country_params(country: CountrySpec, link: LinkSettings) -> ModelParams:
    level = country.incentive(link.channel)
    vis = link.VIS
    if level == 0.5 and link.attenuate_partial:
        vis *= 0.5
    return ModelParams(
        c=country.cost_mean,
        R=int(level > 0),
        VIS=vis,
        pref_va=link.pref_va,
        pref_vv=link.pref_vv,
        S_va=link.S_va,
        S_vv=rescale_norm(country.norm(link.channel)),
    )


def country_equilibrium(country: CountrySpec, link: LinkSettings) -> EquilibriumResult:
    return solve_threshold(country_params(country, link), link.mode)


def _cost_bounds(country: CountrySpec, link: LinkSettings) -> Tuple[float, float]:
    return country.cost_mean - link.cost_spread, country.cost_mean + link.cost_spread


def country_participation_rate(country: CountrySpec, link: LinkSettings, nodes: int = 4001) -> float:
    """Expected donation rate of a country, averaging over individual costs.

    With beliefs fixed, an individual with cost ``c_i`` acts when its score
    reaches ``c_i - (rep_act - rep_abstain)``; the rate is the participation
    mass at that threshold averaged over the cost distribution.
    """
    params = country_params(country, link)
    eq = country_equilibrium(country, link)
    rep_gap = reputational_benefit(params, eq.beliefs, 1) - reputational_benefit(params, eq.beliefs, 0)
    lo, hi = _cost_bounds(country, link)
    if hi == lo:
        costs = np.array([lo])
    else:
        # midpoint rule over the uniform cost draw
        costs = lo + (np.arange(nodes) + 0.5) * (hi - lo) / nodes
    costs = np.clip(costs, 0.0, 1.0)
    return float(np.mean([participation_mass(ParticipationRule(params.R, c - rep_gap)) for c in costs]))


def _covariates(rng: np.random.Generator, n: int) -> Dict[str, np.ndarray]:
    age = np.clip(np.rint(rng.normal(AGE_MEAN, AGE_SD, size=n)), *AGE_RANGE).astype(int)
    return {
        "age": age,
        "gender": (rng.random(n) < P_FEMALE).astype(int),
        "cohabiting": (rng.random(n) < P_COHABITING).astype(int),
        "education": rng.choice(len(EDUCATION_PROBS), size=n, p=EDUCATION_PROBS),
        "employed": (rng.random(n) < P_EMPLOYED).astype(int),
        "community": rng.choice(len(COMMUNITY_PROBS), size=n, p=COMMUNITY_PROBS),
        "children": np.minimum(rng.poisson(CHILDREN_MEAN, size=n), CHILDREN_MAX),
    }


def _country_rows(
    index: int, country: CountrySpec, n: int, link: LinkSettings, seed: int
) -> List[SurveyRow]:
    rng = np.random.default_rng(sub_seed(seed, index))
    params = country_params(country, link)
    eq = country_equilibrium(country, link)
    v_a = rng.random(n)
    v_v = rng.random(n)
    lo, hi = _cost_bounds(country, link)
    cost = np.clip(rng.uniform(lo, hi, size=n), 0.0, 1.0) if hi > lo else np.full(n, lo)
    donated = decide_many(v_a, v_v, params, eq.beliefs, c=cost)
    cov = _covariates(rng, n)
    return [
        SurveyRow(
            country_id=country.country_id,
            donated=int(donated[i]),
            v_a=float(v_a[i]),
            v_v=float(v_v[i]),
            cost=float(cost[i]),
            intrinsic_flag=int(v_a[i] > link.intrinsic_cutoff),
            extrinsic_flag=int(v_v[i] > link.extrinsic_cutoff),
            **{k: int(v[i]) for k, v in cov.items()},
        )
        for i in range(n)
    ]


def generate_microdata(
    countries: Sequence[CountrySpec],
    n_per_country: int,
    link: Optional[LinkSettings] = None,
    seed: int = 0,
) -> List[SurveyRow]:
    """Rows ordered by country (input order), then by draw index.

    Country ``i`` uses the stream ``sub_seed(seed, i)``, so adding or
    removing later countries leaves earlier blocks unchanged.
    """
    if n_per_country < 1:
        raise ValueError("n_per_country must be >= 1")
    if len({c.country_id for c in countries}) != len(countries):
        raise ValueError("country ids must be unique")
    link = link or LinkSettings()
    rows: List[SurveyRow] = []
    for i, country in enumerate(countries):
        rows.extend(_country_rows(i, country, n_per_country, link, seed))
    return rows


def columns(rows: Sequence[SurveyRow]) -> Dict[str, np.ndarray]:
    """Column-wise view of the rows as numpy arrays."""
    out = {}
    for name in SURVEY_FIELDS:
        values = [getattr(r, name) for r in rows]
        out[name] = np.array(values, dtype=object if name == "country_id" else None)
    return out


def country_as_dict(country: CountrySpec) -> Dict[str, object]:
    return asdict(country)
