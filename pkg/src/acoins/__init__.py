"""Solvers for adjustable-coin games.

An adjustable coin offers one or more (success probability, fee) settings.
Tossing succeeds with the chosen probability for the chosen fee; a player
who stops without a success pays a penalty. This package computes optimal
toss plans for simple, discrete and continuous coins, checks them against
brute-force oracles and simulation, and builds NP-hard instances from
subset product.
"""

from acoins.coins import (
    CACoin,
    DiscreteCoin,
    RegularityReport,
    SimpleCoin,
    TossPlan,
    TossStep,
    ZeroOneInstance,
    benefit,
    best_coin_for_penalty,
    cost_discrete,
    expected_cost_single,
    is_beneficial,
    plan_cost,
    prune_to_efficient,
    rate,
    validate_regular,
)
from acoins.continuous import (
    CaSingleTossResult,
    ca_best_coin,
    ca_reusable_bounded,
    ca_reusable_unbounded,
    ca_single_toss,
    ca_thresholds,
)
from acoins.discrete import (
    Selection,
    ZeroOneSolveResult,
    one_time_selection_exact,
    reusable_discrete,
    sequence_given_order_discrete,
    subset_product_to_acoins,
    zero_one_cost,
    zero_one_cost_factored,
    zero_one_equivalence_check,
    zero_one_solve,
)
from acoins.errors import EnumerationCapError, InstanceError, NotRegularError
from acoins.simple import (
    BoundedRecursionTrace,
    DpTable,
    decide_given_order,
    one_time_bounded_dp,
    one_time_unlimited,
    reusable_bounded,
    reusable_unbounded,
    sequence_cost,
    sequence_cost_rates,
)
from acoins.verification import (
    OracleReport,
    SimReport,
    brute_force_one_time,
    brute_force_selection,
    simulate_plan,
    subset_product_oracle,
)

__version__ = "0.1.0"
