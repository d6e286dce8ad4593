"""Strategies for regular continuous adjustable coins.

A single toss is optimised by comparing the penalty with three thresholds:
the rate at ``p_min`` and the slopes ``mu'(p_min)`` and ``mu'(p_max)``.
Between the two slopes the optimal probability solves ``mu'(P) = E``, found
by bisection. Reusable coins reuse the simple-coin recursions.
"""

from __future__ import annotations

import dataclasses
from typing import Iterable, Sequence

from acoins.coins import CACoin, TossPlan, TossStep, check_penalty, require_regular
from acoins.errors import InstanceError
from acoins.simple import BoundedRecursionTrace

MAX_BISECTION_ITERATIONS = 200
BISECTION_WIDTH_TOL = 1e-13
DERIVATIVE_REL_TOL = 1e-10

NOT_BENEFICIAL = "not-beneficial"
BOUNDARY_MIN = "boundary-min"
INTERIOR = "interior"
BOUNDARY_MAX = "boundary-max"


def bisect_increasing(f, lo, hi, target, ftol=0.0):
    """Solve ``f(x) = target`` for ``f`` increasing on ``[lo, hi]``.

    Stops after ``MAX_BISECTION_ITERATIONS`` halvings, once the bracket is
    no wider than ``BISECTION_WIDTH_TOL``, or when ``|f(x) - target| <= ftol``.
    """
    mid = 0.5 * (lo + hi)
    for _ in range(MAX_BISECTION_ITERATIONS):
        mid = 0.5 * (lo + hi)
        val = f(mid) - target
        if abs(val) <= ftol or hi - lo <= BISECTION_WIDTH_TOL:
            break
        if val < 0:
            lo = mid
        else:
            hi = mid
    return mid


@dataclasses.dataclass(frozen=True)
class CaSingleTossResult:
    decision: str  # "toss" or "skip"
    p_star: float | None
    cost: float
    case: str
    diagnostics: tuple[str, ...] = ()


def ca_thresholds(ca: CACoin) -> tuple[float, float, float]:
    """``(r_min, E_low, E_high)``: rate at ``p_min`` and slopes of ``mu`` at both ends."""
    require_regular(ca)
    return ca.rate(ca.p_min), ca.dmu(ca.p_min), ca.dmu(ca.p_max)


def min_rate_point(ca: CACoin) -> float:
    """Probability minimising ``mu(P)/P`` on the coin's interval.

    This is ``p_min`` when the rate increases from the start. Otherwise it is
    the root of ``P*mu'(P) - mu(P)``, which is increasing for convex ``mu``.
    """
    g = lambda P: P * ca.dmu(P) - ca.mu(P)  # noqa: E731
    if g(ca.p_min) >= 0:
        return ca.p_min
    if g(ca.p_max) <= 0:
        return ca.p_max
    return bisect_increasing(g, ca.p_min, ca.p_max, 0.0)


def _single_toss(ca: CACoin, E: float, rate_increasing: bool) -> CaSingleTossResult:
    r_min, E_low, E_high = ca.rate(ca.p_min), ca.dmu(ca.p_min), ca.dmu(ca.p_max)
    diagnostics = ()
    threshold = r_min
    if not rate_increasing:
        # mu'(p_min) < r(p_min): the rate dips inside the interval, so the
        # give-up threshold is the smallest rate, not r(p_min).
        threshold = ca.rate(min_rate_point(ca))
        diagnostics = (
            f"coin {ca.id!r}: r(p_min)={r_min:.6g} exceeds E_low={E_low:.6g}; "
            f"using minimum rate {threshold:.6g} as the give-up threshold",
        )
    if E <= threshold:
        return CaSingleTossResult("skip", None, E, NOT_BENEFICIAL, diagnostics)
    if E <= E_low:
        P, case = ca.p_min, BOUNDARY_MIN
    elif E < E_high:
        P = bisect_increasing(
            ca.dmu, ca.p_min, ca.p_max, E, ftol=DERIVATIVE_REL_TOL * max(1.0, E)
        )
        case = INTERIOR
    else:
        P, case = ca.p_max, BOUNDARY_MAX
    return CaSingleTossResult("toss", P, ca.mu(P) + (1.0 - P) * E, case, diagnostics)


def ca_single_toss(ca: CACoin, E: float) -> CaSingleTossResult:
    """Best single toss of a continuous coin against penalty ``E``."""
    E = check_penalty(E)
    report = require_regular(ca)
    return _single_toss(ca, E, report.rate_increasing)


def ca_best_coin(coins: Iterable[CACoin], E: float) -> tuple[CACoin | None, CaSingleTossResult]:
    """Single-toss optimum over several coins; ``(None, skip result)`` if none helps."""
    E = check_penalty(E)
    coins = list(coins)
    if not coins:
        raise InstanceError("ca_best_coin needs at least one coin")
    flags = {id(ca): require_regular(ca).rate_increasing for ca in coins}
    return _best(coins, E, flags)


def _best(coins, E, flags):
    results = [(ca, _single_toss(ca, E, flags[id(ca)])) for ca in coins]
    ca, res = min(results, key=lambda t: (t[1].cost, t[0].id))
    if res.decision == "skip":
        diags = tuple(d for _, r in results for d in r.diagnostics)
        return None, CaSingleTossResult("skip", None, E, NOT_BENEFICIAL, diags)
    return ca, res


def ca_reusable_unbounded(coins: CACoin | Sequence[CACoin], E: float) -> TossPlan:
    """Repeat the lowest-rate setting until success, if that rate is below ``E``.

    For a coin whose rate increases on its interval this is ``P = p_min``.
    """
    E = check_penalty(E)
    if isinstance(coins, CACoin):
        coins = [coins]
    best = None
    for ca in coins:
        require_regular(ca)
        P = min_rate_point(ca)
        key = (ca.rate(P), ca.id)
        if best is None or key < best[0]:
            best = (key, ca, P)
    if best is None:
        raise InstanceError("ca_reusable_unbounded needs at least one coin")
    (r, _), ca, P = best
    if r < E:
        return TossPlan([TossStep.of(ca.at(P), repeat=True)], r, "ca/reusable/unbounded")
    return TossPlan.give_up(E, "ca/reusable/unbounded")


def ca_reusable_bounded(coins: CACoin | Sequence[CACoin], E: float, k: int) -> BoundedRecursionTrace:
    """At most ``k`` tosses: ``E_{j+1}`` is the best single-toss cost against ``E_j``.

    Each level records the chosen coin fixed at its optimal probability.
    """
    E = check_penalty(E)
    if isinstance(coins, CACoin):
        coins = [coins]
    coins = list(coins)
    if k < 0:
        raise InstanceError("toss budget must be >= 0")
    if not coins:
        raise InstanceError("ca_reusable_bounded needs at least one coin")
    flags = {id(ca): require_regular(ca).rate_increasing for ca in coins}
    levels = [(E, None)]
    value = E
    for _ in range(k):
        ca, res = _best(coins, value, flags)
        if ca is None or not res.cost < value:
            levels.append((value, None))
            continue
        value = res.cost
        levels.append((value, ca.at(res.p_star)))
    return BoundedRecursionTrace(tuple(levels), "ca/reusable/bounded")


def ca_single_toss_plan(ca: CACoin, E: float) -> TossPlan:
    res = ca_single_toss(ca, E)
    steps = [] if res.decision == "skip" else [TossStep.of(ca.at(res.p_star))]
    return TossPlan(steps, res.cost, f"ca/one-time/single/{res.case}", res.diagnostics)
