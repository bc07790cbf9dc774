"""Synthetic-data experiment: generate countries and rows, then fit the
norm x incentive logistic model."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ._seeding import sub_seed
from .stats import RegressionFit, logistic_fit
from .synthsurvey import (
    CountrySettings,
    CountrySpec,
    LinkSettings,
    SurveyRow,
    generate_countries,
    generate_microdata,
)

INTERACTION = "norm:incentive_all"
PARTIAL_INTERACTION = "norm:incentive_some"


def design_matrix(
    rows: Sequence[SurveyRow],
    countries: Sequence[CountrySpec],
    channel: str = "time",
    country_effects: bool = False,
) -> Tuple[np.ndarray, np.ndarray, List[str]]:
    """Design ``X``, outcome ``y`` and column names for the pooled model.

    Country-level norm and incentive come from ``countries``; the incentive
    enters as "some operators" and "all operators" indicators, each with its
    own norm interaction (no-incentive countries are the reference). With
    ``country_effects`` one indicator per non-reference country is appended
    last. Those indicators span the country-level columns, so the rank check
    in :func:`logistic_fit` drops some of them.
    """
    by_id = {c.country_id: c for c in countries}
    missing = {r.country_id for r in rows} - set(by_id)
    if missing:
        raise KeyError(f"rows reference unknown countries: {sorted(missing)}")
    norm = np.array([by_id[r.country_id].norm(channel) for r in rows])
    incentive = np.array([by_id[r.country_id].incentive(channel) for r in rows])

    def col(name):
        return np.array([getattr(r, name) for r in rows], dtype=float)

    educ = col("education")
    community = col("community")
    cols: Dict[str, np.ndarray] = {
        "intercept": np.ones(len(rows)),
        "norm": norm,
        "incentive_some": (incentive == 0.5).astype(float),
        "incentive_all": (incentive == 1.0).astype(float),
        PARTIAL_INTERACTION: norm * (incentive == 0.5),
        INTERACTION: norm * (incentive == 1.0),
        "age10": col("age") / 10.0,
        "female": col("gender"),
        "cohabiting": col("cohabiting"),
        "educ_upto15": (educ == 1).astype(float),
        "educ_16to19": (educ == 2).astype(float),
        "educ_20plus": (educ == 3).astype(float),
        "employed": col("employed"),
        "community_mid": (community == 1).astype(float),
        "community_rural": (community == 2).astype(float),
        "children": col("children"),
        "intrinsic": col("intrinsic_flag"),
        "extrinsic": col("extrinsic_flag"),
    }
    if country_effects:
        ids = [r.country_id for r in rows]
        for c in countries[1:]:
            cols[f"country[{c.country_id}]"] = np.array([i == c.country_id for i in ids], dtype=float)
    names = list(cols)
    X = np.column_stack([cols[k] for k in names])
    y = col("donated")
    return X, y, names


@dataclass(frozen=True)
class ExperimentResult:
    countries: List[CountrySpec]
    rows: List[SurveyRow]
    fit: RegressionFit

    @property
    def interaction(self) -> Tuple[float, float]:
        return self.fit[INTERACTION], self.fit.se(INTERACTION)


def run_experiment(
    n_countries: int = 28,
    n_per_country: int = 1000,
    seed: int = 0,
    settings: Optional[CountrySettings] = None,
    link: Optional[LinkSettings] = None,
    country_effects: bool = False,
) -> ExperimentResult:
    link = link or LinkSettings()
    countries = generate_countries(n_countries, settings, seed=sub_seed(seed, 0))
    rows = generate_microdata(countries, n_per_country, link, seed=sub_seed(seed, 1))
    X, y, names = design_matrix(rows, countries, link.channel, country_effects)
    fit = logistic_fit(X, y, names)
    return ExperimentResult(countries, rows, fit)
