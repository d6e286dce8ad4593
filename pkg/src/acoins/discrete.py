"""Strategies for discrete adjustable coins and the {0,1} hardness instances.

Reusable discrete coins reduce to the union of their entries. One-time
discrete coins in a given order are solved by backwards induction. When the
order is free the entry selection problem is NP-hard, so it is solved here by
exhaustive enumeration under an explicit size cap. The {0,1} cost algebra and
the subset-product reduction live here as well.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from acoins.coins import (
    DiscreteCoin,
    SimpleCoin,
    TossPlan,
    TossStep,
    ZeroOneInstance,
    check_penalty,
    cost_discrete,
)
from acoins.errors import EnumerationCapError, InstanceError
from acoins.simple import (
    _by_rate,
    reusable_bounded,
    reusable_unbounded,
    sequence_cost,
)

DEFAULT_SELECTION_CAP = 2**24
MAX_ZERO_ONE_N = 30
# Largest prod(m) accepted by the subset-product generator (signed 64-bit).
MAX_PRODUCT = 2**63 - 1


def union_entries(coins: Iterable[DiscreteCoin]) -> list[SimpleCoin]:
    return [e for d in coins for e in d.entries]


def reusable_discrete(coins: Iterable[DiscreteCoin], E: float, budget: int | None = None) -> TossPlan:
    """Reusable discrete coins: play the simple-coin strategy on all entries.

    With ``budget=None`` the tosses are unbounded; otherwise at most
    ``budget`` tosses are made.
    """
    union = union_entries(coins)
    if budget is None:
        plan = reusable_unbounded(union, E)
        variant = "discrete/reusable/unbounded"
    else:
        plan = reusable_bounded(union, E, budget).to_plan()
        variant = "discrete/reusable/bounded"
    return dataclasses.replace(plan, variant=variant)


def sequence_given_order_discrete(seq: Sequence[DiscreteCoin], E: float) -> TossPlan:
    """For each coin in turn, skip it or toss its best entry against the suffix value."""
    E = check_penalty(E)
    value = E
    chosen: list[SimpleCoin | None] = [None] * len(seq)
    for i in range(len(seq) - 1, -1, -1):
        cost, entry = cost_discrete(seq[i], value)
        if cost < value:
            chosen[i] = entry
            value = cost
    steps = [TossStep.of(c) for c in chosen if c is not None]
    return TossPlan(steps, value, "discrete/one-time/order-given")


@dataclasses.dataclass(frozen=True)
class Selection:
    """Per discrete coin, the index of the chosen entry or None for skip."""

    choices: tuple[int | None, ...]

    def chosen(self, coins: Sequence[DiscreteCoin]) -> list[SimpleCoin]:
        return [d.entries[i] for d, i in zip(coins, self.choices) if i is not None]


def selection_size(coins: Sequence[DiscreteCoin]) -> int:
    return math.prod(len(d.entries) + 1 for d in coins)


def one_time_selection_exact(
    coins: Sequence[DiscreteCoin], E: float, cap: int = DEFAULT_SELECTION_CAP
) -> tuple[Selection, TossPlan]:
    """Optimal one-time play over discrete coins when the order is free.

    Every way of choosing at most one entry per coin is scored by tossing the
    chosen entries in increasing order of rate. Entries with rate >= E are
    never worth choosing and are treated as skips.

    Raises:
        EnumerationCapError: if ``prod(len(entries) + 1)`` exceeds ``cap``.
    """
    E = check_penalty(E)
    coins = list(coins)
    size = selection_size(coins)
    if size > cap:
        raise EnumerationCapError(size, cap)
    options = []
    for d in coins:
        useful = [i for i, e in enumerate(d.entries) if e.fee / e.p < E]
        options.append([None, *useful])

    best_cost = E
    best_choice = tuple(None for _ in coins)
    best_order: list[SimpleCoin] = []
    for choice in itertools.product(*options):
        picked = [d.entries[i] for d, i in zip(coins, choice) if i is not None]
        if not picked:
            continue
        order = _by_rate(picked)
        cost = sequence_cost(order, E)
        if cost < best_cost:
            best_cost, best_choice, best_order = cost, choice, order
    plan = TossPlan([TossStep.of(c) for c in best_order], best_cost, "discrete/one-time/selection")
    return Selection(best_choice), plan


# ---------------------------------------------------------------------------
# {0,1} cost algebra
# ---------------------------------------------------------------------------


def zero_one_cost(inst: ZeroOneInstance, S: Iterable[int]):
    """Cost of choosing the rate-0 entry exactly for the (0-based) indices in ``S``.

    ``H_S * (1 + D * prod(ell over the complement of S))``. Exact when the
    instance holds fractions.
    """
    S = set(S)
    _check_subset(inst, S)
    H = math.prod(inst.h[i] for i in S)
    rest = math.prod(inst.ell[i] for i in range(inst.n) if i not in S)
    return H * (1 + inst.D * rest)


def zero_one_cost_factored(inst: ZeroOneInstance, S: Iterable[int]):
    """The same cost as ``H_S + D * prod(ell) / B_S`` with ``b = ell / h``."""
    S = set(S)
    _check_subset(inst, S)
    H = math.prod(inst.h[i] for i in S)
    B = math.prod(inst.ell[i] / inst.h[i] for i in S)
    return H + inst.D * math.prod(inst.ell) / B


def _check_subset(inst, S):
    bad = [i for i in S if not 0 <= i < inst.n]
    if bad:
        raise InstanceError(f"indices {bad} are outside 0..{inst.n - 1}")


def is_square_instance(inst: ZeroOneInstance, rel_tol: float = 1e-12) -> bool:
    """True iff ``ell[i] == h[i]**2`` for every i (exactly for fractions)."""
    for hi, li in zip(inst.h, inst.ell):
        if isinstance(hi, Fraction) and isinstance(li, Fraction):
            if li != hi * hi:
                return False
        elif not math.isclose(float(li), float(hi) ** 2, rel_tol=rel_tol):
            return False
    return True


@dataclasses.dataclass(frozen=True)
class ZeroOneSolveResult:
    best_set: frozenset[int]
    best_cost: float
    C: float
    H_S: float
    B_S: float
    bound: float | None  # 2 * sqrt(C), only for instances with ell == h**2


def _subset_products(h: np.ndarray, ell: np.ndarray):
    # Index bit i set <=> i in S. Products are built by doubling, so each
    # entry is a direct product with no accumulated division error.
    H = np.ones(1)
    L = np.ones(1)
    for hi, li in zip(h, ell):
        H = np.concatenate([H, H * hi])
        L = np.concatenate([L * li, L])
    return H, L


def zero_one_solve(inst: ZeroOneInstance) -> ZeroOneSolveResult:
    """Minimise :func:`zero_one_cost` over all ``2**n`` subsets.

    The subsets are split into a low and a high half of the index bits; each
    block of high-half subsets is evaluated against all low-half subsets at
    once. Ties go to the subset with the smallest bitmask.
    """
    n = inst.n
    if n > MAX_ZERO_ONE_N:
        raise EnumerationCapError(2**n, 2**MAX_ZERO_ONE_N)
    h = np.array([float(x) for x in inst.h])
    ell = np.array([float(x) for x in inst.ell])
    D = float(inst.D)
    lo_bits = n // 2
    H_lo, L_lo = _subset_products(h[:lo_bits], ell[:lo_bits])
    H_hi, L_hi = _subset_products(h[lo_bits:], ell[lo_bits:])

    best_cost, best_mask = math.inf, 0
    for hi_mask in range(len(H_hi)):
        cost = (H_lo * H_hi[hi_mask]) * (1.0 + D * (L_lo * L_hi[hi_mask]))
        j = int(np.argmin(cost))
        if cost[j] < best_cost:
            best_cost, best_mask = float(cost[j]), (hi_mask << lo_bits) | j

    S = frozenset(i for i in range(n) if best_mask >> i & 1)
    H_S = math.prod(float(inst.h[i]) for i in S)
    B_S = math.prod(float(inst.ell[i]) / float(inst.h[i]) for i in S)
    C = D * math.prod(ell.tolist())
    bound = 2.0 * math.sqrt(C) if is_square_instance(inst) else None
    return ZeroOneSolveResult(S, best_cost, C, H_S, B_S, bound)


def subset_product_to_acoins(
    m: Sequence[int], N: int
) -> tuple[ZeroOneInstance, list[DiscreteCoin], float]:
    """Map a subset-product instance ``(m, N)`` to a {0,1} coin game.

    ``h_i = 1/m_i``, ``ell_i = 1/m_i**2`` and ``D = (prod(m)/N)**2``, all as
    exact fractions; the penalty is ``D + 1``. A subset of ``m`` multiplies to
    ``N`` iff the game's optimum equals ``2*sqrt(C) = 2/N``.

    Raises:
        InstanceError: on invalid input or when ``prod(m)`` leaves the 64-bit range.
    """
    m = [int(x) for x in m]
    N = int(N)
    if not m or any(x < 2 for x in m):
        raise InstanceError("every m_i must be a natural number >= 2")
    P = math.prod(m)
    if P > MAX_PRODUCT:
        raise InstanceError(f"prod(m) = {P} overflows the 64-bit integer range")
    if not 1 <= N <= P:
        raise InstanceError(f"need 1 <= N <= prod(m) = {P}, got N = {N}")
    h = tuple(Fraction(1, x) for x in m)
    ell = tuple(Fraction(1, x * x) for x in m)
    D = Fraction(P, N) ** 2
    inst = ZeroOneInstance(h, ell, D)
    try:
        E = float(D + 1)
    except OverflowError as exc:
        raise InstanceError("penalty does not fit in a float") from exc
    return inst, inst.coins(), E


@dataclasses.dataclass(frozen=True)
class EquivalenceReport:
    agree: bool
    subsets_checked: int
    exact_solver_cost: float | None
    zero_one_best_cost: float
    diagnostics: tuple[str, ...]


def zero_one_equivalence_check(
    inst: ZeroOneInstance, E: float | None = None, rel_tol: float = 1e-9
) -> EquivalenceReport:
    """Cross-check the {0,1} closed form against the general game.

    For every subset S the explicit coin sequence (rate-0 entries of S, then
    rate-1 entries of the rest) is scored with :func:`sequence_cost` and
    compared with :func:`zero_one_cost`. The exhaustive selection solver on
    the discrete-coin form must also reproduce :func:`zero_one_solve`.
    """
    if inst.n > 12:
        raise EnumerationCapError(2**inst.n, 2**12)
    if E is None:
        E = float(inst.penalty)
    E = check_penalty(E)
    if E <= 1:
        raise InstanceError("a {0,1} game needs a penalty above 1")
    fl = ZeroOneInstance(inst.to_float().h, inst.to_float().ell, E - 1)
    coins = fl.coins()
    diagnostics = []
    for r in range(inst.n + 1):
        for S in itertools.combinations(range(inst.n), r):
            seq = [coins[i].entries[0] for i in S]
            seq += [coins[i].entries[1] for i in range(inst.n) if i not in S]
            got = sequence_cost(seq, E)
            want = float(zero_one_cost(fl, S))
            if not math.isclose(got, want, rel_tol=rel_tol):
                diagnostics.append(f"S={sorted(S)}: sequence cost {got!r} != closed form {want!r}")
    solved = zero_one_solve(fl)
    _, plan = one_time_selection_exact(coins, E)
    if not math.isclose(plan.expected_cost, solved.best_cost, rel_tol=rel_tol):
        diagnostics.append(
            f"selection solver {plan.expected_cost!r} != subset minimum {solved.best_cost!r}"
        )
    return EquivalenceReport(
        not diagnostics, 2**inst.n, plan.expected_cost, solved.best_cost, tuple(diagnostics)
    )
