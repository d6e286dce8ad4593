"""Command-line front end.

Subcommands::

    acoins solve INSTANCE            print the optimal plan as JSON
    acoins simulate INSTANCE PLAN    Monte Carlo check of a plan
    acoins prune INSTANCE            drop inessential discrete-coin entries
    acoins gen-subset-product --m 2,3,6 --N 6
    acoins oracle-check INSTANCE     compare the solver with brute force

Exit codes: 0 success, 1 oracle disagreement, 2 input error, 3 size cap.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from acoins.coins import CACoin, DiscreteCoin, SimpleCoin, TossPlan, prune_to_efficient
from acoins.continuous import (
    ca_reusable_bounded,
    ca_reusable_unbounded,
    ca_single_toss_plan,
)
from acoins.discrete import (
    DEFAULT_SELECTION_CAP,
    one_time_selection_exact,
    reusable_discrete,
    sequence_given_order_discrete,
    subset_product_to_acoins,
)
from acoins.errors import EnumerationCapError, InstanceError
from acoins.instance import (
    Instance,
    dumps,
    fraction_str,
    instance_from_dict,
    load_plan,
    plan_to_dict,
    parse_number,
    read_json,
)
from acoins.simple import (
    decide_given_order,
    one_time_bounded_dp,
    one_time_unlimited,
    reusable_bounded,
    reusable_unbounded,
)
from acoins.verification import (
    brute_force_one_time,
    brute_force_selection,
    simulate_plan,
    subset_product_oracle,
)

EXIT_OK, EXIT_DISAGREE, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


def _as_discrete(c):
    return c if isinstance(c, DiscreteCoin) else DiscreteCoin(c.id, (c,))


def solve_instance(inst: Instance, cap: int = DEFAULT_SELECTION_CAP) -> TossPlan:
    """Route an instance to the solver for its coin kinds and mode."""
    kinds = inst.kinds()
    E, k = inst.penalty, inst.max_tosses
    coins = list(inst.coins)

    if "ca" in kinds:
        if kinds != {"ca"}:
            raise InstanceError("continuous coins cannot be mixed with simple or discrete coins")
        if inst.reusable:
            if k is None:
                return ca_reusable_unbounded(coins, E)
            return ca_reusable_bounded(coins, E, k).to_plan()
        if len(coins) == 1 and not inst.order_given:
            if k == 0:
                return TossPlan.give_up(E, "ca/one-time/single")
            return ca_single_toss_plan(coins[0], E)
        raise InstanceError(
            "one-time play of several continuous coins is not supported; "
            "nearest supported variants: a single one-time continuous coin, or reusable mode"
        )

    if kinds == {"simple"}:
        if inst.reusable:
            if k is None:
                return reusable_unbounded(coins, E)
            return reusable_bounded(coins, E, k).to_plan()
        if inst.order_given:
            if k is not None:
                raise InstanceError(
                    "order_given with max_tosses is not supported; nearest supported variants: "
                    "order_given with max_tosses=null, or a free order with max_tosses"
                )
            return decide_given_order(coins, E)
        if k is None:
            return one_time_unlimited(coins, E)
        return one_time_bounded_dp(coins, E, k)[1]

    discrete = [_as_discrete(c) for c in coins]
    if inst.reusable:
        return reusable_discrete(discrete, E, k)
    if k is not None:
        raise InstanceError(
            "one-time discrete coins with max_tosses are not supported; "
            "nearest supported variant: max_tosses=null"
        )
    if inst.order_given:
        return sequence_given_order_discrete(discrete, E)
    return one_time_selection_exact(discrete, E, cap)[1]


def _step_matches(coin, step) -> bool:
    def close(a, b):
        return math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-15)

    if isinstance(coin, SimpleCoin):
        return close(coin.p, step.p) and close(coin.fee, step.fee)
    if isinstance(coin, DiscreteCoin):
        return any(close(e.p, step.p) and close(e.fee, step.fee) for e in coin.entries)
    if isinstance(coin, CACoin):
        inside = coin.p_min - 1e-12 <= step.p <= coin.p_max + 1e-12
        return inside and math.isclose(coin.mu(step.p), step.fee, rel_tol=1e-9, abs_tol=1e-12)
    return False


def check_plan_against(inst: Instance, plan: TossPlan):
    coins = inst.by_id()
    for i, step in enumerate(plan.steps):
        coin = coins.get(step.coin_id)
        if coin is None:
            raise InstanceError(f"plan step {i}: coin {step.coin_id!r} is not in the instance")
        if not _step_matches(coin, step):
            raise InstanceError(
                f"plan step {i}: (p={step.p!r}, fee={step.fee!r}) is not a setting of coin {step.coin_id!r}"
            )


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_solve(args):
    inst = instance_from_dict(read_json(args.instance))
    plan = solve_instance(inst, args.cap)
    sys.stdout.write(dumps(plan_to_dict(plan)))
    return EXIT_OK


def cmd_simulate(args):
    inst = instance_from_dict(read_json(args.instance))
    plan = load_plan(args.plan)
    check_plan_against(inst, plan)
    rep = simulate_plan(plan, inst.penalty, args.trials, args.seed, workers=args.workers)
    gap = abs(rep.mean - plan.expected_cost)
    print(f"trials          {rep.trials}")
    print(f"seed            {rep.seed}")
    print(f"mean            {rep.mean!r}")
    print(f"sample std      {rep.sample_std!r}")
    print(f"95% CI          +/- {rep.ci95_halfwidth!r}")
    print(f"analytic cost   {plan.expected_cost!r}")
    print(f"gap             {gap!r}")
    block = {
        "trials": rep.trials,
        "seed": rep.seed,
        "mean": rep.mean,
        "sample_std": rep.sample_std,
        "ci95_halfwidth": rep.ci95_halfwidth,
        "expected_cost": plan.expected_cost,
        "gap": gap,
        "within_ci": gap <= rep.ci95_halfwidth,
    }
    print(json.dumps(block, sort_keys=True))
    return EXIT_OK


def prune_instance_dict(data) -> tuple[dict, list[tuple[str, float, float]]]:
    """Return a copy of ``data`` with discrete coins pruned, and the removed entries."""
    inst = instance_from_dict(data)
    out = json.loads(json.dumps(data))
    removed = []
    for raw, coin in zip(out["coins"], inst.coins):
        if not isinstance(coin, DiscreteCoin):
            continue
        kept = {c.p for c in prune_to_efficient(coin).entries}
        entries = []
        for raw_entry in raw["entries"]:
            p = float(parse_number(raw_entry["p"], "p"))
            if p in kept:
                entries.append(raw_entry)
            else:
                fee = next(e.fee for e in coin.entries if e.p == p)
                removed.append((coin.id, p, fee))
        raw["entries"] = entries
    return out, removed


def cmd_prune(args):
    data = read_json(args.instance)
    out, removed = prune_instance_dict(data)
    text = dumps(out)
    report = sys.stdout
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
        report = sys.stderr
    for cid, p, fee in removed:
        print(f"removed {cid} p={p!r} fee={fee!r}", file=report)
    if not removed:
        print("no entries removed", file=report)
    return EXIT_OK


def subset_product_instance(m, N) -> tuple[dict, dict]:
    inst, coins, _ = subset_product_to_acoins(m, N)
    E = inst.D + 1
    data = {
        "penalty": fraction_str(E),
        "mode": {"reusable": False, "max_tosses": None, "order_given": False},
        "coins": [
            {
                "type": "discrete",
                "id": d.id,
                "entries": [
                    {"p": fraction_str(1 - h), "fee": 0},
                    {"p": fraction_str(1 - l), "fee": fraction_str(1 - l)},
                ],
            }
            for d, h, l in zip(coins, inst.h, inst.ell)
        ],
    }
    C = inst.D * math.prod(inst.ell)
    sqrt_c = Fraction(1, int(N))  # C == 1/N**2 for these instances
    meta = {
        "m": [int(x) for x in m],
        "N": int(N),
        "D": fraction_str(inst.D),
        "E": fraction_str(E),
        "C": fraction_str(C),
        "C_float": float(C),
        "bound": float(2 * sqrt_c),
        "bound_exact": fraction_str(2 * sqrt_c),
        "solvable": subset_product_oracle(m, N),
    }
    return data, meta


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise InstanceError(f"--m: expected comma-separated naturals, got {text!r}") from exc


def cmd_gen(args):
    data, meta = subset_product_instance(_int_list(args.m), args.N)
    if args.out:
        out = Path(args.out)
        out.write_text(dumps(data), encoding="utf-8")
        meta_path = out.with_name(out.stem + ".meta.json")
        meta_path.write_text(dumps(meta), encoding="utf-8")
        print(dumps(meta), end="")
    else:
        sys.stdout.write(dumps({"instance": data, "metadata": meta}))
    return EXIT_OK


def cmd_oracle(args):
    inst = instance_from_dict(read_json(args.instance))
    kinds = inst.kinds()
    if inst.reusable or inst.order_given or "ca" in kinds:
        raise InstanceError(
            "oracle-check supports one-time, free-order instances of simple or discrete coins"
        )
    if kinds == {"simple"}:
        rep = brute_force_one_time(list(inst.coins), inst.penalty, inst.max_tosses)
    else:
        if inst.max_tosses is not None:
            raise InstanceError("oracle-check on discrete coins needs max_tosses=null")
        rep = brute_force_selection([_as_discrete(c) for c in inst.coins], inst.penalty)
    block = {
        "oracle_value": rep.oracle_value,
        "candidate_value": rep.candidate_value,
        "agree": rep.agree,
        "witness": [list(w) if isinstance(w, tuple) else w for w in rep.witness],
    }
    sys.stdout.write(dumps(block))
    return EXIT_OK if rep.agree else EXIT_DISAGREE


def build_parser():
    parser = argparse.ArgumentParser(prog="acoins", description="Adjustable-coin game solver")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="print the optimal plan for an instance")
    p.add_argument("instance")
    p.add_argument("--cap", type=int, default=DEFAULT_SELECTION_CAP,
                   help="largest selection enumeration allowed (default: 2**24)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("simulate", help="Monte Carlo evaluation of a plan")
    p.add_argument("instance")
    p.add_argument("plan")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("prune", help="prune discrete coins to their essential entries")
    p.add_argument("instance")
    p.add_argument("--out", help="write the pruned instance here instead of stdout")
    p.set_defaults(func=cmd_prune)

    p = sub.add_parser("gen-subset-product", help="build a {0,1} instance from subset product")
    p.add_argument("--m", required=True, help="comma-separated naturals >= 2, e.g. 2,3,6")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--out", help="instance path; metadata goes next to it as <stem>.meta.json")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("oracle-check", help="compare the solver with exhaustive search")
    p.add_argument("instance")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EnumerationCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except InstanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
