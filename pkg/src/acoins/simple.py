"""Optimal strategies for games over simple coins.

Covers one coin or a given sequence (backwards induction), reusable coins
with unbounded or bounded toss budgets, and one-time coins with unbounded
(sort by rate) or bounded (dynamic programming) budgets.
"""

from __future__ import annotations

import dataclasses
from typing import Iterable, Sequence

import numpy as np

from acoins.coins import (
    SimpleCoin,
    TossPlan,
    TossStep,
    _choice_key,
    check_penalty,
    expected_cost_single,
)
from acoins.errors import InstanceError


def sequence_cost(seq: Sequence[SimpleCoin], E: float) -> float:
    """Expected cost of tossing ``seq`` in order until a success, then paying ``E``.

    Sums, over every stopping event, its probability times the fees paid so
    far (plus ``E`` when all tosses fail).
    """
    total = 0.0
    survive = 1.0
    fees = 0.0
    for c in seq:
        fees += c.fee
        total += survive * c.p * fees
        survive *= 1.0 - c.p
    return total + survive * (fees + E)


def sequence_cost_rates(seq: Sequence[SimpleCoin], E: float) -> float:
    """The same expected cost written as a convex combination of rates and ``E``."""
    total = 0.0
    survive = 1.0
    for c in seq:
        total += survive * c.p * (c.fee / c.p)
        survive *= 1.0 - c.p
    return total + survive * E


def _by_rate(coins: Iterable[SimpleCoin]) -> list[SimpleCoin]:
    # Equal rates are cost-neutral to swap; order them by id for determinism.
    return sorted(coins, key=lambda c: (c.fee / c.p, c.id))


def decide_given_order(seq: Sequence[SimpleCoin], E: float) -> TossPlan:
    """Best toss/skip decision for each coin of a fixed sequence."""
    E = check_penalty(E)
    seq = list(seq)
    value = E
    tossed = [False] * len(seq)
    for i in range(len(seq) - 1, -1, -1):
        c = seq[i]
        if c.fee / c.p < value:
            tossed[i] = True
            value = expected_cost_single(c, value)
    steps = [TossStep.of(c) for c, t in zip(seq, tossed) if t]
    return TossPlan(steps, value, "simple/one-time/order-given")


def reusable_unbounded(coins: Iterable[SimpleCoin], E: float) -> TossPlan:
    """Repeat the minimum-rate coin until success if its rate is below ``E``."""
    E = check_penalty(E)
    coins = list(coins)
    if not coins:
        raise InstanceError("reusable_unbounded needs at least one coin")
    best = min(coins, key=lambda c: (c.fee / c.p, c.p, c.id))
    variant = "simple/reusable/unbounded"
    if best.fee / best.p < E:
        return TossPlan([TossStep.of(best, repeat=True)], best.fee / best.p, variant)
    return TossPlan.give_up(E, variant)


@dataclasses.dataclass(frozen=True)
class BoundedRecursionTrace:
    """Values ``E_0 = E, E_1, ..., E_k`` of the bounded reusable recursion.

    ``levels[j]`` is ``(E_j, coin)`` where ``coin`` is the coin tossed first
    by the optimal ``j``-toss strategy (None when it does not toss, and for
    ``j = 0``). The optimal ``k``-toss strategy tosses ``levels[k]``'s coin,
    then ``levels[k-1]``'s, and so on down to level 1.
    """

    levels: tuple[tuple[float, SimpleCoin | None], ...]
    variant: str = "simple/reusable/bounded"

    @property
    def value(self) -> float:
        return self.levels[-1][0]

    @property
    def values(self) -> list[float]:
        return [v for v, _ in self.levels]

    def to_plan(self) -> TossPlan:
        steps = [TossStep.of(c) for _, c in reversed(self.levels) if c is not None]
        return TossPlan(steps, self.value, self.variant)


def reusable_bounded(coins: Iterable[SimpleCoin], E: float, k: int) -> BoundedRecursionTrace:
    """At most ``k`` tosses of reusable coins, solved level by level."""
    E = check_penalty(E)
    coins = list(coins)
    if k < 0:
        raise InstanceError("toss budget must be >= 0")
    if not coins:
        raise InstanceError("reusable_bounded needs at least one coin")
    levels = [(E, None)]
    value = E
    for _ in range(k):
        best = min(coins, key=lambda c: _choice_key(c, value))
        cost = expected_cost_single(best, value)
        if cost < value:
            value = cost
            levels.append((value, best))
        else:
            levels.append((value, None))
    return BoundedRecursionTrace(tuple(levels))


def one_time_unlimited(coins: Iterable[SimpleCoin], E: float) -> TossPlan:
    """Toss every coin with rate below ``E`` once, in increasing order of rate."""
    E = check_penalty(E)
    order = _by_rate(c for c in coins if c.fee / c.p < E)
    return TossPlan(
        [TossStep.of(c) for c in order], sequence_cost(order, E), "simple/one-time/unbounded"
    )


@dataclasses.dataclass(frozen=True)
class DpTable:
    """Table of the bounded one-time dynamic program.

    ``coins`` are the beneficial coins sorted by rate. ``values[i, j]`` is the
    optimal cost using at most ``j`` of ``coins[i:]`` (row ``n`` is the
    empty suffix, worth ``E``). ``toss[i, j]`` records whether that optimum
    tosses ``coins[i]``.
    """

    coins: tuple[SimpleCoin, ...]
    values: np.ndarray
    toss: np.ndarray

    @property
    def value(self) -> float:
        return float(self.values[0, -1])


def one_time_bounded_dp(coins: Iterable[SimpleCoin], E: float, k: int) -> tuple[DpTable, TossPlan]:
    """At most ``k`` one-time tosses, in ``O(kn)`` time.

    With ``X[i] = fee_i + (1 - p_i) * OPT(i+1, j-1)``, the recursion
    ``OPT(i, j) = min(OPT(i+1, j), X[i])`` unrolls to a suffix minimum of
    ``X`` and ``E``, so each budget level is a single vectorised pass.
    """
    E = check_penalty(E)
    if k < 0:
        raise InstanceError("toss budget must be >= 0")
    order = _by_rate(c for c in coins if c.fee / c.p < E)
    n = len(order)
    fee = np.fromiter((c.fee for c in order), dtype=float, count=n)
    fail = np.fromiter((1.0 - c.p for c in order), dtype=float, count=n)

    values = np.empty((n + 1, k + 1))
    values[:, 0] = E
    toss = np.zeros((n, k + 1), dtype=bool)
    buf = np.empty(n + 1)
    buf[n] = E
    for j in range(1, k + 1):
        x = fee + fail * values[1:, j - 1]
        buf[:n] = x
        col = np.minimum.accumulate(buf[::-1])[::-1]
        values[:, j] = col
        toss[:, j] = x < col[1:]

    steps = []
    i, j = 0, k
    while i < n and j > 0:
        if toss[i, j]:
            steps.append(TossStep.of(order[i]))
            j -= 1
        i += 1
    table = DpTable(tuple(order), values, toss)
    return table, TossPlan(steps, table.value, "simple/one-time/bounded")
