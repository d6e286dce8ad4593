import itertools
import math
import random
from fractions import Fraction

import pytest

from acoins import (
    DiscreteCoin,
    SimpleCoin,
    ZeroOneInstance,
    one_time_selection_exact,
    reusable_bounded,
    reusable_discrete,
    sequence_cost,
    sequence_cost_rates,
    sequence_given_order_discrete,
    subset_product_to_acoins,
    zero_one_cost,
    zero_one_cost_factored,
    zero_one_equivalence_check,
    zero_one_solve,
)
from acoins.discrete import is_square_instance, union_entries
from acoins.errors import EnumerationCapError, InstanceError
from acoins.verification import brute_force_selection, subset_product_oracle
from conftest import random_menu

MENU = DiscreteCoin("A", ((0.5, 1), (0.7, 2)))


def test_reusable_discrete_unbounded():
    plan = reusable_discrete([MENU], 4)
    assert plan.variant == "discrete/reusable/unbounded"
    assert plan.expected_cost == 2
    assert plan.steps[0].p == 0.5 and plan.steps[0].repeat
    plan = reusable_discrete([MENU], 1.5)
    assert plan.steps == () and plan.expected_cost == 1.5


def test_reusable_discrete_bounded_uses_union():
    rng = random.Random(3)
    for _ in range(50):
        coins = [random_menu(rng, rng.randint(1, 4), f"d{i}") for i in range(rng.randint(1, 3))]
        E = rng.uniform(0.5, 30)
        k = rng.randint(0, 6)
        plan = reusable_discrete(coins, E, k)
        want = reusable_bounded(union_entries(coins), E, k).value
        assert plan.variant == "discrete/reusable/bounded"
        assert plan.expected_cost == want


def test_sequence_given_order_discrete():
    # suffix: second copy costs min(1 + 0.5*10, 2 + 0.3*10) = 5; first copy ties
    # at 3.5 between (0.5, 1) and (0.7, 2) and the lower p wins
    plan = sequence_given_order_discrete([MENU, DiscreteCoin("B", MENU.entries)], 10)
    assert plan.expected_cost == pytest.approx(3.5, rel=1e-12)
    assert [(s.coin_id, s.p) for s in plan.steps] == [("A", 0.5), ("B", 0.7)]


def test_sequence_given_order_discrete_vs_enumeration():
    rng = random.Random(5)
    for _ in range(100):
        coins = [random_menu(rng, rng.randint(1, 3), f"d{i}") for i in range(rng.randint(1, 4))]
        E = rng.uniform(0.5, 30)
        best = E
        for choice in itertools.product(*[[None, *d.entries] for d in coins]):
            best = min(best, sequence_cost([c for c in choice if c is not None], E))
        assert sequence_given_order_discrete(coins, E).expected_cost == pytest.approx(best, rel=1e-9)


def test_selection_subset_product_example():
    inst, coins, E = subset_product_to_acoins([2, 3, 6], 6)
    assert E == 37
    sel, plan = one_time_selection_exact(coins, E)
    assert plan.expected_cost == pytest.approx(1 / 3, rel=1e-12)
    # rate-0 entries chosen for exactly a subset multiplying to 6
    zero_rate = [i for i, c in enumerate(sel.choices) if c == 0]
    assert math.prod([2, 3, 6][i] for i in zero_rate) == 6


def test_selection_cap():
    coins = [DiscreteCoin(f"d{i}", ((0.5, 1), (0.7, 2))) for i in range(4)]
    with pytest.raises(EnumerationCapError, match="81 exceeds cap 80"):
        one_time_selection_exact(coins, 10, cap=80)
    one_time_selection_exact(coins, 10, cap=81)


@pytest.mark.parametrize("seed", range(6))
def test_selection_matches_brute_force(seed):
    rng = random.Random(100 + seed)
    for _ in range(15):
        coins = [random_menu(rng, rng.randint(1, 3), f"d{i}") for i in range(rng.randint(1, 4 + seed % 3))]
        E = rng.uniform(0.5, 40)
        rep = brute_force_selection(coins, E)
        assert rep.agree, rep


def test_zero_one_cost_exact_values():
    inst, _, _ = subset_product_to_acoins([2, 3, 6], 6)
    assert zero_one_cost(inst, []) == Fraction(37, 36)
    assert zero_one_cost(inst, [2]) == Fraction(1, 3)
    assert zero_one_cost(inst, [0, 1]) == Fraction(1, 3)
    assert zero_one_cost(inst, [0, 1, 2]) == Fraction(37, 36)
    for r in range(4):
        for S in itertools.combinations(range(3), r):
            assert zero_one_cost(inst, S) == zero_one_cost_factored(inst, S)
    with pytest.raises(InstanceError):
        zero_one_cost(inst, [3])


def test_zero_one_closed_form_matches_sequence_cost():
    rng = random.Random(9)
    for _ in range(100):
        n = rng.randint(1, 6)
        h = [rng.uniform(0.05, 0.95) for _ in range(n)]
        ell = [x * rng.uniform(0.05, 0.95) for x in h]
        inst = ZeroOneInstance(tuple(h), tuple(ell), rng.uniform(0.1, 50))
        coins = inst.coins()
        for r in range(n + 1):
            for S in itertools.combinations(range(n), r):
                seq = [coins[i].entries[0] for i in S] + [coins[i].entries[1] for i in range(n) if i not in S]
                assert sequence_cost(seq, inst.penalty) == pytest.approx(zero_one_cost(inst, S), rel=1e-12)


def test_zero_one_solve_examples():
    inst, _, _ = subset_product_to_acoins([2, 3], 5)
    res = zero_one_solve(inst)
    assert res.best_cost == pytest.approx(61 / 150, rel=1e-12)
    assert res.best_set == frozenset({0, 1})
    assert res.bound == pytest.approx(0.4, rel=1e-12)
    assert res.best_cost > res.bound

    inst = ZeroOneInstance((0.5,), (0.25,), 4.0)
    res = zero_one_solve(inst)
    assert res.best_set == frozenset() and res.best_cost == 2.0

    inst, _, _ = subset_product_to_acoins([2], 2)
    res = zero_one_solve(inst)
    assert res.best_set == frozenset({0})
    assert res.best_cost == pytest.approx(1.0, rel=1e-12)


def test_zero_one_solve_tie_goes_to_smallest_mask():
    inst, _, _ = subset_product_to_acoins([2, 3, 6], 6)
    res = zero_one_solve(inst)
    assert res.best_set == frozenset({0, 1})
    assert res.best_cost == pytest.approx(1 / 3, rel=1e-12)


def test_zero_one_solve_matches_exhaustive():
    rng = random.Random(13)
    for _ in range(50):
        n = rng.randint(1, 11)
        h = [rng.uniform(0.05, 0.95) for _ in range(n)]
        ell = [x * rng.uniform(0.05, 0.95) for x in h]
        inst = ZeroOneInstance(tuple(h), tuple(ell), rng.uniform(0.1, 50))
        want = min(
            zero_one_cost(inst, S) for r in range(n + 1) for S in itertools.combinations(range(n), r)
        )
        res = zero_one_solve(inst)
        assert res.best_cost == pytest.approx(want, rel=1e-12)
        assert res.bound is None


def test_square_instance_detection():
    inst, _, _ = subset_product_to_acoins([4, 5], 4)
    assert is_square_instance(inst)
    assert is_square_instance(inst.to_float())
    assert not is_square_instance(ZeroOneInstance((0.5,), (0.2,), 1.0))


@pytest.mark.parametrize(
    "m, N, msg",
    [
        ([2, 1], 2, ">= 2"),
        ([], 1, ">= 2"),
        ([2, 3], 7, "1 <= N"),
        ([2, 3], 0, "1 <= N"),
        ([2**32, 2**32], 1, "overflows"),
    ],
)
def test_generator_refuses_bad_input(m, N, msg):
    with pytest.raises(InstanceError, match=msg):
        subset_product_to_acoins(m, N)


def test_zero_one_instance_validation():
    with pytest.raises(InstanceError):
        ZeroOneInstance((0.5,), (0.6,), 1.0)
    with pytest.raises(InstanceError):
        ZeroOneInstance((0.5,), (0.25,), 0)
    with pytest.raises(InstanceError):
        ZeroOneInstance((1.0,), (0.25,), 1.0)


def test_equivalence_check_reduction_instances():
    for m, N in [([2, 3, 6], 6), ([2, 3], 5), ([2, 2, 3, 5], 12)]:
        inst, _, _ = subset_product_to_acoins(m, N)
        rep = zero_one_equivalence_check(inst)
        assert rep.agree, rep.diagnostics
        assert rep.subsets_checked == 2 ** len(m)


def test_equivalence_check_random_instance():
    rng = random.Random(17)
    h = [rng.uniform(0.1, 0.9) for _ in range(6)]
    ell = [x * rng.uniform(0.1, 0.9) for x in h]
    inst = ZeroOneInstance(tuple(h), tuple(ell), 5.0)
    rep = zero_one_equivalence_check(inst)
    assert rep.agree, rep.diagnostics
    assert rep.exact_solver_cost == pytest.approx(rep.zero_one_best_cost, rel=1e-9)
    with pytest.raises(InstanceError):
        zero_one_equivalence_check(inst, E=0.5)


def test_affine_rate_map_preserves_optimal_subset():
    # mapping rate 0 -> a and rate 1 -> b (and E the same way) shifts and
    # scales every sequence cost, so the best subset does not move
    rng = random.Random(19)
    for _ in range(40):
        n = rng.randint(1, 5)
        h = [rng.uniform(0.1, 0.9) for _ in range(n)]
        ell = [x * rng.uniform(0.1, 0.9) for x in h]
        D = rng.uniform(0.5, 20)
        inst = ZeroOneInstance(tuple(h), tuple(ell), D)
        a = rng.uniform(0, 2)
        b = a + rng.uniform(0.1, 3)
        E = inst.penalty
        E2 = a + (b - a) * E
        costs = {}
        for r in range(n + 1):
            for S in itertools.combinations(range(n), r):
                seq = [SimpleCoin(1 - h[i], (1 - h[i]) * a) for i in S]
                seq += [SimpleCoin(1 - ell[i], (1 - ell[i]) * b) for i in range(n) if i not in S]
                got = sequence_cost_rates(seq, E2)
                assert got == pytest.approx(a + (b - a) * zero_one_cost(inst, S), rel=1e-12)
                costs[S] = got
        best = min(costs, key=costs.get)
        want = zero_one_solve(inst).best_set
        assert costs[best] == pytest.approx(costs[tuple(sorted(want))], rel=1e-12)


def _exact_minimum(inst):
    n = inst.n
    return min(zero_one_cost(inst, S) for r in range(n + 1) for S in itertools.combinations(range(n), r))


@pytest.mark.parametrize(
    "m, N",
    [
        ([2, 3, 5, 7, 11, 13, 17], 2 * 5 * 13),
        ([2, 3, 5, 7, 11, 13, 17], 2 * 5 * 13 + 1),
        ([4, 9, 25, 49], 4 * 49),
        ([4, 9, 25, 49], 4 * 49 - 1),
        ([99, 100, 101], 9999),
        ([99, 100, 101], 9900),
        ([1000, 1000], 999999),
        ([1000, 999], 999),
    ],
)
def test_reduction_exact_with_fractions(m, N):
    inst, _, _ = subset_product_to_acoins(m, N)
    assert math.prod(m) <= 10**6
    best = _exact_minimum(inst)
    assert (best == Fraction(2, N)) == subset_product_oracle(m, N)
    assert best >= Fraction(2, N)


def test_reduction_random_exact():
    rng = random.Random(23)
    for _ in range(200):
        m = [rng.randint(2, 12) for _ in range(rng.randint(1, 5))]
        N = rng.randint(1, math.prod(m))
        inst, _, _ = subset_product_to_acoins(m, N)
        assert (_exact_minimum(inst) == Fraction(2, N)) == subset_product_oracle(m, N)
