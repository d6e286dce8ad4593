import random

import pytest

from acoins import DiscreteCoin, SimpleCoin

# criterion id -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def record(criterion, passed, detail=""):
    ACCEPTANCE[criterion] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(k.split(".")[0].lstrip("AC")), k)):
        passed, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {key} {detail}")


def random_coins(rng, n, id_prefix="c", zero_fee_chance=0.1):
    coins = []
    for i in range(n):
        p = rng.uniform(0.01, 1.0)
        fee = 0.0 if rng.random() < zero_fee_chance else rng.uniform(0.0, 5.0)
        coins.append(SimpleCoin(p, fee, f"{id_prefix}{i}"))
    return coins


def random_menu(rng, n, cid="m"):
    ps = sorted(rng.sample(range(1, 101), n))
    fees = sorted(rng.uniform(0, 10) for _ in range(n))
    return DiscreteCoin(cid, tuple((p / 100, f) for p, f in zip(ps, fees)))


@pytest.fixture
def rng():
    return random.Random(12345)
