"""JSON instance and plan files.

An instance file looks like::

    {"penalty": 37,
     "mode": {"reusable": false, "max_tosses": null, "order_given": false},
     "coins": [{"type": "discrete", "id": "A1",
                "entries": [{"p": "1/2", "fee": 0}, {"p": "3/4", "fee": "3/4"}]}]}

Coin types are ``simple`` (``p``, ``fee``), ``discrete`` (``entries``) and
``ca`` (``p_min``, ``p_max``, ``family`` and ``params``: ``{"a", "q"}`` for
the power family, ``{"coefficients": [...]}`` for polynomials). Any number
may be written as a JSON number or as a string such as ``"3/4"``.
"""

from __future__ import annotations

import dataclasses
import json
from fractions import Fraction
from pathlib import Path

from acoins.coins import CACoin, DiscreteCoin, SimpleCoin, TossPlan, TossStep, check_penalty
from acoins.errors import InstanceError


@dataclasses.dataclass(frozen=True)
class Instance:
    penalty: float
    coins: tuple
    reusable: bool = False
    max_tosses: int | None = None
    order_given: bool = False

    def kinds(self) -> set[str]:
        out = set()
        for c in self.coins:
            if isinstance(c, SimpleCoin):
                out.add("simple")
            elif isinstance(c, DiscreteCoin):
                out.add("discrete")
            else:
                out.add("ca")
        return out

    def by_id(self) -> dict:
        return {c.id: c for c in self.coins}


def parse_number(value, where: str) -> Fraction:
    if isinstance(value, bool) or value is None:
        raise InstanceError(f"{where}: expected a number, got {value!r}")
    if isinstance(value, str):
        value = value.strip()
    try:
        return Fraction(value)
    except (ValueError, TypeError, ZeroDivisionError, OverflowError) as exc:
        raise InstanceError(f"{where}: cannot read {value!r} as a number") from exc


def _num(obj, key, where):
    if key not in obj:
        raise InstanceError(f"{where}: missing field {key!r}")
    return float(parse_number(obj[key], f"{where}.{key}"))


def _coin(obj, where):
    if not isinstance(obj, dict):
        raise InstanceError(f"{where}: expected an object")
    kind = obj.get("type")
    cid = obj.get("id")
    if cid is None:
        raise InstanceError(f"{where}: missing field 'id'")
    cid = str(cid)
    try:
        if kind == "simple":
            return SimpleCoin(_num(obj, "p", where), _num(obj, "fee", where), cid)
        if kind == "discrete":
            entries = obj.get("entries")
            if not isinstance(entries, list) or not entries:
                raise InstanceError(f"{where}.entries: expected a non-empty list")
            pairs = [
                (_num(e, "p", f"{where}.entries[{j}]"), _num(e, "fee", f"{where}.entries[{j}]"))
                for j, e in enumerate(entries)
            ]
            return DiscreteCoin(cid, tuple(pairs))
        if kind == "ca":
            family = obj.get("family")
            params = obj.get("params") or {}
            if family == "power":
                args = (_num(params, "a", f"{where}.params"), _num(params, "q", f"{where}.params"))
            elif family == "polynomial":
                coeffs = params.get("coefficients")
                if not isinstance(coeffs, list):
                    raise InstanceError(f"{where}.params.coefficients: expected a list")
                args = tuple(
                    float(parse_number(c, f"{where}.params.coefficients[{j}]"))
                    for j, c in enumerate(coeffs)
                )
            else:
                raise InstanceError(f"{where}.family: expected 'power' or 'polynomial', got {family!r}")
            return CACoin(cid, _num(obj, "p_min", where), _num(obj, "p_max", where), family, args)
    except InstanceError as exc:
        if str(exc).startswith(where):
            raise
        raise InstanceError(f"{where}: {exc}") from exc
    raise InstanceError(f"{where}.type: expected 'simple', 'discrete' or 'ca', got {kind!r}")


def instance_from_dict(data) -> Instance:
    if not isinstance(data, dict):
        raise InstanceError("instance: expected a JSON object")
    if "penalty" not in data:
        raise InstanceError("instance: missing field 'penalty'")
    E = check_penalty(parse_number(data["penalty"], "penalty"))
    mode = data.get("mode", {})
    if not isinstance(mode, dict):
        raise InstanceError("mode: expected an object")
    reusable = mode.get("reusable", False)
    order_given = mode.get("order_given", False)
    k = mode.get("max_tosses")
    if not isinstance(reusable, bool) or not isinstance(order_given, bool):
        raise InstanceError("mode: 'reusable' and 'order_given' must be booleans")
    if k is not None and (isinstance(k, bool) or not isinstance(k, int) or k < 0):
        raise InstanceError(f"mode.max_tosses: expected null or a count >= 0, got {k!r}")
    raw = data.get("coins")
    if not isinstance(raw, list) or not raw:
        raise InstanceError("coins: expected a non-empty list")
    coins = tuple(_coin(c, f"coins[{i}]") for i, c in enumerate(raw))
    seen = set()
    for i, c in enumerate(coins):
        if c.id in seen:
            raise InstanceError(f"coins[{i}].id: duplicate id {c.id!r}")
        seen.add(c.id)
    return Instance(E, coins, reusable, k, order_given)


def read_json(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceError(f"{path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def load_instance(path) -> Instance:
    return instance_from_dict(read_json(path))


def dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=False) + "\n"


# ---------------------------------------------------------------------------
# Plans
# ---------------------------------------------------------------------------


def plan_to_dict(plan: TossPlan) -> dict:
    return {
        "variant": plan.variant,
        "expected_cost": plan.expected_cost,
        "steps": [
            {"coin_id": s.coin_id, "p": s.p, "fee": s.fee, "repeat": s.repeat} for s in plan.steps
        ],
        "diagnostics": list(plan.diagnostics),
    }


def plan_from_dict(data) -> TossPlan:
    if not isinstance(data, dict):
        raise InstanceError("plan: expected a JSON object")
    try:
        steps = []
        for s in data["steps"]:
            steps.append(
                TossStep(str(s["coin_id"]), float(s["p"]), float(s["fee"]), bool(s.get("repeat", False)))
            )
        return TossPlan(
            steps,
            float(data["expected_cost"]),
            str(data.get("variant", "")),
            tuple(str(d) for d in data.get("diagnostics", [])),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceError(f"plan: malformed field ({exc})") from exc


def load_plan(path) -> TossPlan:
    return plan_from_dict(read_json(path))


def fraction_str(x: Fraction) -> str | int:
    x = Fraction(x)
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
