"""Monte Carlo plan execution and brute-force oracles.

Simulation uses numpy's Philox4x64 counter-based generator. Trials are cut
into fixed-size blocks and block ``b`` draws from the stream keyed by
``SeedSequence([seed, b])``, so a report depends only on ``(plan, E, trials,
seed, block_size)`` and not on how many workers process the blocks.

The oracles enumerate every ordered toss sequence directly. They share no
code with the solvers they check beyond the coin types.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from acoins.coins import DiscreteCoin, SimpleCoin, TossPlan, check_penalty
from acoins.discrete import one_time_selection_exact
from acoins.errors import EnumerationCapError, InstanceError
from acoins.simple import one_time_bounded_dp, one_time_unlimited

DEFAULT_BLOCK_SIZE = 2**16
ORACLE_REL_TOL = 1e-9
MAX_ORACLE_COINS = 8
MAX_ORACLE_NODES = 5_000_000
SEED_MASK = 2**64 - 1


@dataclasses.dataclass(frozen=True)
class SimReport:
    trials: int
    mean: float
    sample_std: float
    ci95_halfwidth: float
    seed: int

    @property
    def standard_error(self) -> float:
        return self.sample_std / math.sqrt(self.trials)


def _block_stats(plan: TossPlan, E: float, seed: int, block: int, n: int):
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))
    cost = np.zeros(n)
    alive = np.ones(n, dtype=bool)
    for step in plan.steps:
        if step.repeat:
            if step.p >= 1.0:
                tosses = np.ones(n)
            else:
                u = 1.0 - rng.random(n)  # in (0, 1]
                tosses = np.maximum(np.ceil(np.log(u) / math.log1p(-step.p)), 1.0)
            cost[alive] += step.fee * tosses[alive]
            alive[:] = False
            break
        cost[alive] += step.fee
        alive &= ~(rng.random(n) < step.p)
    cost[alive] += E
    # Shift by the minimum so constant samples give an exact mean and zero spread.
    base = cost.min()
    shifted = cost - base
    mean = base + shifted.mean()
    m2 = float(np.sum((cost - mean) ** 2))
    return n, float(mean), m2


def _merge(a, b):
    na, ma, sa = a
    nb, mb, sb = b
    n = na + nb
    delta = mb - ma
    return n, ma + delta * nb / n, sa + sb + delta * delta * na * nb / n


def simulate_plan(
    plan: TossPlan,
    E: float,
    trials: int,
    seed: int = 0,
    workers: int = 1,
    block_size: int = DEFAULT_BLOCK_SIZE,
) -> SimReport:
    """Play ``plan`` ``trials`` times and summarise the realised costs.

    A repeated step draws its number of tosses from the geometric
    distribution by inversion, ``ceil(ln u / ln(1 - p))``.
    """
    E = check_penalty(E)
    if trials < 1:
        raise InstanceError("trials must be >= 1")
    seed &= SEED_MASK
    sizes = [block_size] * (trials // block_size)
    if trials % block_size:
        sizes.append(trials % block_size)
    jobs = list(enumerate(sizes))
    run = lambda job: _block_stats(plan, E, seed, job[0], job[1])  # noqa: E731
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(job) for job in jobs]
    acc = parts[0]
    for part in parts[1:]:
        acc = _merge(acc, part)
    n, mean, m2 = acc
    std = math.sqrt(m2 / (n - 1)) if n > 1 else 0.0
    return SimReport(n, mean, std, 1.96 * std / math.sqrt(n), seed)


@dataclasses.dataclass(frozen=True)
class OracleReport:
    oracle_value: float
    candidate_value: float
    agree: bool
    witness: tuple

    @classmethod
    def build(cls, oracle_value, candidate_value, witness):
        agree = abs(oracle_value - candidate_value) <= ORACLE_REL_TOL * max(1.0, oracle_value)
        return cls(oracle_value, candidate_value, agree, tuple(witness))


def _search(menus: Sequence[Sequence[SimpleCoin]], E: float, budget: int):
    """Minimum expected cost over ordered sequences using each menu at most once.

    Every prefix is a candidate strategy (stop and pay ``E`` after it).
    Returns ``(cost, [(menu index, entry index), ...])``.
    """
    n = len(menus)
    best = [E, ()]
    used = [False] * n
    path = []

    def visit(acc, survive):
        if len(path) >= budget:
            return
        for i in range(n):
            if used[i]:
                continue
            used[i] = True
            for j, c in enumerate(menus[i]):
                path.append((i, j))
                acc2 = acc + survive * c.fee
                survive2 = survive * (1.0 - c.p)
                value = acc2 + survive2 * E
                if value < best[0]:
                    best[0], best[1] = value, tuple(path)
                visit(acc2, survive2)
                path.pop()
            used[i] = False

    visit(0.0, 1.0)
    return best[0], list(best[1])


def _node_count(sizes, budget):
    # Number of ordered prefixes explored by _search.
    total = 0
    frontier = {(): 1}
    for _ in range(min(budget, len(sizes))):
        nxt = {}
        for used, count in frontier.items():
            for i, s in enumerate(sizes):
                if i not in used:
                    key = tuple(sorted((*used, i)))
                    nxt[key] = nxt.get(key, 0) + count * s
        total += sum(nxt.values())
        frontier = nxt
        if total > MAX_ORACLE_NODES:
            break
    return total


def brute_force_one_time(
    coins: Sequence[SimpleCoin],
    E: float,
    budget: int | None = None,
    candidate: float | None = None,
) -> OracleReport:
    """Exhaustive optimum of the one-time simple-coin game.

    Tries every subset of at most ``budget`` coins in every order. When no
    candidate value is given it is taken from the matching solver. The
    witness lists coin ids in toss order.
    """
    E = check_penalty(E)
    coins = list(coins)
    if len(coins) > MAX_ORACLE_COINS:
        raise EnumerationCapError(len(coins), MAX_ORACLE_COINS)
    k = len(coins) if budget is None else min(budget, len(coins))
    value, path = _search([[c] for c in coins], E, k)
    if candidate is None:
        if budget is None:
            candidate = one_time_unlimited(coins, E).expected_cost
        else:
            candidate = one_time_bounded_dp(coins, E, budget)[1].expected_cost
    return OracleReport.build(value, candidate, [coins[i].id for i, _ in path])


def brute_force_selection(
    coins: Sequence[DiscreteCoin], E: float, candidate: float | None = None
) -> OracleReport:
    """Exhaustive optimum of the one-time discrete game, over choices and orders.

    Does not assume the rate ordering. The witness lists ``(coin id, p)``
    pairs in toss order.
    """
    E = check_penalty(E)
    coins = list(coins)
    if len(coins) > MAX_ORACLE_COINS:
        raise EnumerationCapError(len(coins), MAX_ORACLE_COINS)
    nodes = _node_count([len(d.entries) for d in coins], len(coins))
    if nodes > MAX_ORACLE_NODES:
        raise EnumerationCapError(nodes, MAX_ORACLE_NODES)
    value, path = _search([d.entries for d in coins], E, len(coins))
    if candidate is None:
        candidate = one_time_selection_exact(coins, E)[1].expected_cost
    witness = [(coins[i].id, coins[i].entries[j].p) for i, j in path]
    return OracleReport.build(value, candidate, witness)


def subset_product_oracle(m: Sequence[int], N: int) -> bool:
    """True iff some subset of ``m`` (possibly empty) multiplies to exactly ``N``."""
    m = [int(x) for x in m]
    N = int(N)
    if len(m) > 30:
        raise EnumerationCapError(2 ** len(m), 2**30)
    if N < 1:
        return False
    reach = {1}
    for x in m:
        reach |= {r * x for r in reach if N % (r * x) == 0}
    return N in reach
