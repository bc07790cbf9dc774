"""Self-consistent participation thresholds.

Observers form beliefs from who acts, and who acts depends on those beliefs.
With a threshold rule the agent acts when its score (``v_a``, or
``v_a + v_v`` under an incentive) reaches

    t = c - VIS * (S_va*pref_va*gap_va(t) + S_vv*pref_vv*gap_vv(t))

where ``gap_x(t) = E(x | act) - E(x | abstain)`` under the rule at ``t``.
``solve_threshold`` finds the fixed point ("rational" beliefs) or evaluates
the right-hand side once at the reputation-free threshold ``t = c``
("naive" beliefs).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .beliefs import BeliefProfile, ParticipationRule, belief_profile, participation_mass
from .model import ModelParams

log = logging.getLogger(__name__)

MODES = ("rational", "naive")

DAMPING = 0.5
MAX_ITER = 10_000
TOL = 1e-10
SCAN_POINTS = 512
# iterations without a new best residual before giving up on damping
STALL_WINDOW = 50


class ConvergenceError(RuntimeError):
    pass


class UnattainableRateError(ValueError):
    """Target participation rate lies outside what S_vv in [-1, 1] can reach."""

    def __init__(self, target: float, interval: Tuple[float, float]):
        self.target = target
        self.interval = interval
        super().__init__(
            f"target rate {target!r} outside attainable interval "
            f"[{interval[0]!r}, {interval[1]!r}]"
        )


@dataclass(frozen=True)
class EquilibriumResult:
    t_star: float
    beliefs: BeliefProfile
    participation_rate: float
    residual: float
    iterations: int
    converged: bool
    mode: str
    roots: Tuple[float, ...] = ()
    bracket: Optional[Tuple[float, float]] = None
    method: str = "damped"

    @property
    def rule(self) -> ParticipationRule:
        return ParticipationRule(self.beliefs.R, self.t_star)


@dataclass(frozen=True)
class ReputationCostPoint:
    """Incentive-induced reputational penalties at cost ``c``.

    Both fields are non-negative magnitudes. The signed differences are
    their negations:
    ``gap_va(R=1) - gap_va(R=0) == -intrinsic_cost`` and
    ``E(v_v|R=1,B=0) - E(v_v|R=1,B=1) == -extrinsic_cost``.
    """

    c: float
    intrinsic_cost: float
    extrinsic_cost: float


def _profile(R: int, t: float, off_path: str) -> BeliefProfile:
    return belief_profile(ParticipationRule(R, t), off_path=off_path)


def rhs(params: ModelParams, t: float, off_path: str = "limit") -> float:
    """Threshold implied by beliefs formed under the rule at ``t``."""
    prof = _profile(params.R, t, off_path)
    return params.c - params.VIS * (
        params.S_va * params.pref_va * prof.gap("va")
        + params.S_vv * params.pref_vv * prof.gap("vv")
    )


def _bisect(f, lo: float, hi: float, flo: float, max_iter: int = 200) -> Tuple[float, float, float]:
    """Bisect a sign change of ``f`` on [lo, hi]; returns (root, lo, hi)."""
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fmid = f(mid)
        if fmid == 0.0:
            return mid, mid, mid
        if (fmid < 0.0) == (flo < 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
    # pick the endpoint with the smaller defect
    root = lo if abs(f(lo)) <= abs(f(hi)) else hi
    return root, lo, hi


def _scan_roots(defect, lo: float, hi: float) -> List[Tuple[float, float, float]]:
    grid = np.linspace(lo, hi, SCAN_POINTS)
    values = [defect(float(x)) for x in grid]
    found = []
    for i in range(SCAN_POINTS - 1):
        a, b = float(grid[i]), float(grid[i + 1])
        fa, fb = values[i], values[i + 1]
        if fa == 0.0:
            found.append((a, a, a))
        elif (fa < 0.0) != (fb < 0.0) and fb != 0.0:
            found.append(_bisect(defect, a, b, fa))
    if values[-1] == 0.0:
        found.append((float(grid[-1]),) * 3)
    return found


def _result(params, t, mode, off_path, residual, iterations, converged, **extra) -> EquilibriumResult:
    return EquilibriumResult(
        t_star=t,
        beliefs=_profile(params.R, t, off_path),
        participation_rate=participation_mass(ParticipationRule(params.R, t)),
        residual=residual,
        iterations=iterations,
        converged=converged,
        mode=mode,
        **extra,
    )


def solve_threshold(
    params: ModelParams,
    mode: str = "rational",
    *,
    tol: float = TOL,
    max_iter: int = MAX_ITER,
    damping: float = DAMPING,
    off_path: str = "limit",
) -> EquilibriumResult:
    """Participation threshold under rational or naive observer beliefs.

    Rational mode runs damped fixed-point iteration from ``t = c`` and falls
    back to scanning ``defect(t) = t - rhs(t)`` for sign changes, bisecting
    each one. With several roots the one closest to ``c`` is returned and
    all are listed in ``roots``. A result that misses ``tol`` comes back
    with ``converged=False`` and the best bracket found.

    ``off_path`` selects the belief convention for empty regions (see
    :mod:`prosocial.beliefs`). The default ``"limit"`` keeps the defect
    continuous; with ``"prior"`` a fixed point need not exist.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")

    if mode == "naive":
        t = rhs(params, params.c, off_path)
        # beliefs stay frozen at t=c, so the naive map is constant
        residual = abs(t - rhs(params, params.c, off_path))
        return _result(params, t, mode, off_path, residual, 0, True, roots=(t,), method="naive")

    def defect(x: float) -> float:
        return x - rhs(params, x, off_path)

    t = params.c
    best_t, best_res = t, abs(defect(t))
    stall = 0
    it = 0
    while it < max_iter:
        if best_res <= tol:
            break
        target = rhs(params, t, off_path)
        t = (1.0 - damping) * t + damping * target
        it += 1
        res = abs(defect(t))
        if res < best_res:
            best_t, best_res, stall = t, res, 0
        else:
            stall += 1
            if stall >= STALL_WINDOW:
                break
    if best_res <= tol:
        # one undamped step usually gains a few more digits
        polished = rhs(params, best_t, off_path)
        res = abs(defect(polished))
        if res < best_res:
            best_t, best_res = polished, res
        return _result(params, best_t, mode, off_path, best_res, it, True, roots=(best_t,))

    log.debug("damped iteration stalled at residual %.3g; scanning for roots", best_res)
    lo, hi = min(0.0, params.c - 2.0), max(2.0, params.c + 2.0)
    found = _scan_roots(defect, lo, hi)
    if not found:
        return _result(
            params, best_t, mode, off_path, best_res, it, False, bracket=None, method="scan"
        )
    roots = tuple(r for r, _, _ in found)
    pick = min(range(len(found)), key=lambda i: (abs(found[i][0] - params.c), i))
    root, blo, bhi = found[pick]
    residual = abs(defect(root))
    converged = residual <= tol
    return _result(
        params,
        root,
        mode,
        off_path,
        residual,
        it,
        converged,
        roots=roots,
        bracket=None if converged else (blo, bhi),
        method="bisection",
    )


def belief_gaps(R: int, t: float, off_path: str = "limit") -> Tuple[float, float]:
    prof = _profile(R, t, off_path)
    return prof.gap("va"), prof.gap("vv")


def reputational_cost_curve(c_grid: Sequence[float]) -> List[ReputationCostPoint]:
    """Reputational penalties of an incentive at reputation-free thresholds."""
    points = []
    for c in c_grid:
        c = float(c)
        if not 0.0 <= c <= 1.0:
            raise ValueError(f"cost {c!r} outside [0, 1]")
        gap_a0, _ = belief_gaps(0, c)
        gap_a1, gap_v1 = belief_gaps(1, c)
        points.append(ReputationCostPoint(c=c, intrinsic_cost=gap_a0 - gap_a1, extrinsic_cost=gap_v1))
    return points


def participation_at(params: ModelParams, S_vv: float, mode: str = "rational") -> float:
    res = solve_threshold(params.replace(S_vv=S_vv), mode)
    if not res.converged:
        raise ConvergenceError(f"no equilibrium at S_vv={S_vv!r}: residual {res.residual:.3g}")
    return res.participation_rate


def calibrate_norm(
    target_rate: float,
    params: ModelParams,
    mode: str = "rational",
    tol: float = 1e-13,
    max_iter: int = 200,
) -> float:
    """S_vv whose equilibrium participation rate equals ``target_rate``.

    ``params.S_vv`` is ignored. The rate is non-decreasing in S_vv, so plain
    bisection on [-1, 1] is used.
    """
    if not 0.0 < target_rate < 1.0:
        raise ValueError(f"target_rate must be in (0, 1), got {target_rate!r}")
    lo, hi = -1.0, 1.0
    r_lo = participation_at(params, lo, mode)
    r_hi = participation_at(params, hi, mode)
    if not r_lo <= target_rate <= r_hi:
        raise UnattainableRateError(target_rate, (r_lo, r_hi))
    if r_lo == r_hi:
        return 0.0
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if participation_at(params, mid, mode) < target_rate:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
