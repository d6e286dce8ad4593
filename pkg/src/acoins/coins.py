"""Coin types, the single-toss cost algebra and efficiency pruning.

A simple coin is a ``(p, fee)`` pair: tossing it costs ``fee`` and succeeds
with probability ``p``. Its *rate* ``fee / p`` is the expected cost of
tossing it until it succeeds. A game also has a penalty ``E > 0`` that is
paid when the player stops without a success.

All objects here are immutable; every function is pure.
"""

from __future__ import annotations

import dataclasses
import math
from fractions import Fraction
from typing import Iterable, Sequence

from acoins.errors import InstanceError, NotRegularError

Number = float | Fraction

# Finite-difference gradient check for continuous coins.
FD_STEP_FRACTION = 1e-6
FD_REL_TOL = 1e-4


def check_penalty(E) -> float:
    """Return ``E`` as a float, rejecting non-positive or non-finite values."""
    E = float(E)
    if not math.isfinite(E) or E <= 0:
        raise InstanceError(f"penalty must be a positive finite number, got {E!r}")
    return E


@dataclasses.dataclass(frozen=True)
class SimpleCoin:
    """A coin with one success probability ``p`` in (0, 1] and a fee >= 0."""

    p: float
    fee: float
    id: str = ""

    def __post_init__(self):
        p, fee = float(self.p), float(self.fee)
        if not (0.0 < p <= 1.0):
            raise InstanceError(f"coin {self.id!r}: p must lie in (0, 1], got {p!r}")
        if not math.isfinite(fee) or fee < 0:
            raise InstanceError(f"coin {self.id!r}: fee must be finite and >= 0, got {fee!r}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "fee", fee)
        object.__setattr__(self, "id", str(self.id))

    @property
    def rate(self) -> float:
        return self.fee / self.p


def rate(c: SimpleCoin) -> float:
    return c.fee / c.p


def expected_cost_single(c: SimpleCoin, E: float) -> float:
    """Expected payment of the one-toss game: fee plus penalty on failure."""
    return c.fee + (1.0 - c.p) * E


def benefit(c: SimpleCoin, E: float) -> float:
    """Reduction of the expected cost obtained by tossing ``c`` once: ``pE - fee``."""
    return c.p * E - c.fee


def is_beneficial(c: SimpleCoin, E: float) -> bool:
    # rate == E is an indifference point; we do not toss.
    return c.fee / c.p < E


def _choice_key(c: SimpleCoin, E: float):
    return (expected_cost_single(c, E), c.p, c.id)


def best_coin_for_penalty(coins: Iterable[SimpleCoin], E: float) -> SimpleCoin | None:
    """Return the coin with the cheapest single toss, or None if no toss beats ``E``.

    Cost ties prefer the lower success probability, then the smaller id.
    """
    coins = list(coins)
    if not coins:
        raise InstanceError("best_coin_for_penalty needs at least one coin")
    best = min(coins, key=lambda c: _choice_key(c, E))
    if expected_cost_single(best, E) < E:
        return best
    return None


@dataclasses.dataclass(frozen=True)
class DiscreteCoin:
    """An adjustable coin with finitely many ``(p, fee)`` settings.

    Entries are kept sorted by increasing ``p`` and carry the coin's id.
    Entries may be given as ``SimpleCoin`` objects or ``(p, fee)`` pairs.
    """

    id: str
    entries: tuple[SimpleCoin, ...]

    def __post_init__(self):
        cid = str(self.id)
        entries = []
        for e in self.entries:
            if isinstance(e, SimpleCoin):
                entries.append(SimpleCoin(e.p, e.fee, cid))
            else:
                p, fee = e
                entries.append(SimpleCoin(p, fee, cid))
        if not entries:
            raise InstanceError(f"discrete coin {cid!r} has no entries")
        entries.sort(key=lambda c: c.p)
        for a, b in zip(entries, entries[1:]):
            if a.p == b.p:
                raise InstanceError(f"discrete coin {cid!r}: duplicate probability {a.p!r}")
        object.__setattr__(self, "id", cid)
        object.__setattr__(self, "entries", tuple(entries))

    def __len__(self):
        return len(self.entries)


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def prune_to_efficient(d: DiscreteCoin) -> DiscreteCoin:
    """Drop every entry that is never the unique best choice for any penalty.

    An entry survives iff for some ``E > 0`` it is strictly cheaper than every
    other entry *and* than giving up (cost ``E``). Geometrically these are the
    vertices of the strict lower convex hull of ``{(0, 0)} U {(p, fee)}``, the
    origin standing for the give-up option. The hull test runs in exact
    rational arithmetic on the shortest decimal form of each float, so
    points that are collinear as written are treated as collinear.

    The result has strictly convex fees and strictly increasing rates.
    """
    pts = [(Fraction(repr(c.p)), Fraction(repr(c.fee)), c) for c in d.entries]
    hull = [(Fraction(0), Fraction(0), None)]
    for pt in pts:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) <= 0:
            hull.pop()
        hull.append(pt)
    kept = tuple(h[2] for h in hull[1:])
    if len(kept) == len(d.entries):
        return d
    return DiscreteCoin(d.id, kept)


def removed_entries(d: DiscreteCoin) -> list[SimpleCoin]:
    """Entries of ``d`` that :func:`prune_to_efficient` discards."""
    kept = {c.p for c in prune_to_efficient(d).entries}
    return [c for c in d.entries if c.p not in kept]


def cost_discrete(d: DiscreteCoin, E: float) -> tuple[float, SimpleCoin]:
    """Cheapest single-toss cost over the entries of ``d`` and the entry achieving it.

    Ties go to the smaller probability.
    """
    best = min(d.entries, key=lambda c: (expected_cost_single(c, E), c.p))
    return expected_cost_single(best, E), best


# ---------------------------------------------------------------------------
# Continuous coins
# ---------------------------------------------------------------------------

FAMILIES = ("power", "polynomial")


@dataclasses.dataclass(frozen=True)
class CACoin:
    """A continuous adjustable coin with fee function ``mu`` on ``[p_min, p_max]``.

    ``family="power"`` takes ``params=(a, q)`` for ``mu(P) = a * P**q`` with
    ``a > 0`` and ``q > 1``. ``family="polynomial"`` takes up to five
    coefficients ``(c0, c1, ..., c4)`` for ``mu(P) = sum(ck * P**k)``.
    """

    id: str
    p_min: float
    p_max: float
    family: str
    params: tuple[float, ...]

    def __post_init__(self):
        p_min, p_max = float(self.p_min), float(self.p_max)
        if not (0.0 < p_min < p_max <= 1.0):
            raise InstanceError(
                f"CA coin {self.id!r}: need 0 < p_min < p_max <= 1, got [{p_min}, {p_max}]"
            )
        if self.family not in FAMILIES:
            raise InstanceError(f"CA coin {self.id!r}: unknown family {self.family!r}")
        params = tuple(float(x) for x in self.params)
        if self.family == "power":
            if len(params) != 2:
                raise InstanceError(f"CA coin {self.id!r}: power family needs (a, q)")
            a, q = params
            if not (a > 0 and q > 1):
                raise InstanceError(f"CA coin {self.id!r}: power family needs a > 0 and q > 1")
        else:
            if not 1 <= len(params) <= 5:
                raise InstanceError(f"CA coin {self.id!r}: polynomial needs 1 to 5 coefficients")
        object.__setattr__(self, "id", str(self.id))
        object.__setattr__(self, "p_min", p_min)
        object.__setattr__(self, "p_max", p_max)
        object.__setattr__(self, "params", params)

    @classmethod
    def power(cls, a, q, p_min, p_max, id=""):
        return cls(id, p_min, p_max, "power", (a, q))

    @classmethod
    def polynomial(cls, coefficients, p_min, p_max, id=""):
        return cls(id, p_min, p_max, "polynomial", tuple(coefficients))

    def mu(self, P: float) -> float:
        if self.family == "power":
            a, q = self.params
            return a * P**q
        acc = 0.0
        for c in reversed(self.params):
            acc = acc * P + c
        return acc

    def dmu(self, P: float) -> float:
        if self.family == "power":
            a, q = self.params
            return a * q * P ** (q - 1)
        acc = 0.0
        for k in range(len(self.params) - 1, 0, -1):
            acc = acc * P + k * self.params[k]
        return acc

    def d2mu(self, P: float) -> float:
        if self.family == "power":
            a, q = self.params
            return a * q * (q - 1) * P ** (q - 2)
        acc = 0.0
        for k in range(len(self.params) - 1, 1, -1):
            acc = acc * P + k * (k - 1) * self.params[k]
        return acc

    def rate(self, P: float) -> float:
        return self.mu(P) / P

    def at(self, P: float) -> SimpleCoin:
        """The simple coin obtained by fixing the success probability at ``P``."""
        return SimpleCoin(P, self.mu(P), self.id)


@dataclasses.dataclass(frozen=True)
class RegularityReport:
    valid: bool
    message: str
    point: float | None = None
    max_fd_rel_error: float = 0.0
    rate_increasing: bool = True

    def raise_if_invalid(self):
        if not self.valid:
            raise NotRegularError(self.message, self.point)


def validate_regular(ca: CACoin, grid_size: int = 101) -> RegularityReport:
    """Check the sign conditions ``mu >= 0``, ``mu' > 0``, ``mu'' > 0`` on a grid.

    The derivative conditions are strict at interior grid points and
    non-strict at the two endpoints. The analytic first derivative is also
    compared with central differences. Whether the rate ``mu(P)/P`` increases
    is reported but does not make the coin invalid.
    """
    if grid_size < 3:
        raise ValueError("grid_size must be at least 3")
    lo, hi = ca.p_min, ca.p_max
    h = FD_STEP_FRACTION * (hi - lo)
    grid = [lo + (hi - lo) * i / (grid_size - 1) for i in range(grid_size)]
    grid[-1] = hi
    derivs = [ca.dmu(P) for P in grid]
    scale = max(abs(x) for x in derivs)
    worst = 0.0
    for i, P in enumerate(grid):
        interior = 0 < i < grid_size - 1
        m, d1, d2 = ca.mu(P), derivs[i], ca.d2mu(P)
        if m < 0:
            return RegularityReport(False, f"mu({P:.6g}) = {m:.6g} < 0", P, worst)
        if d1 < 0 or (interior and d1 <= 0):
            return RegularityReport(False, f"mu'({P:.6g}) = {d1:.6g} is not positive", P, worst)
        if d2 < 0 or (interior and d2 <= 0):
            return RegularityReport(False, f"mu''({P:.6g}) = {d2:.6g} is not positive", P, worst)
        if P - h > 0:
            fd = (ca.mu(P + h) - ca.mu(P - h)) / (2 * h)
        else:
            fd = (-3 * ca.mu(P) + 4 * ca.mu(P + h) - ca.mu(P + 2 * h)) / (2 * h)
        err = abs(fd - d1) / max(abs(d1), 1e-6 * scale, 1e-300)
        worst = max(worst, err)
        if err > FD_REL_TOL:
            return RegularityReport(
                False, f"mu'({P:.6g}) disagrees with finite differences (rel. err {err:.3g})", P, worst
            )
    # For convex mu, P*mu' - mu is increasing, so the rate increases on the
    # whole interval iff it does not decrease at p_min.
    increasing = ca.dmu(lo) * lo >= ca.mu(lo)
    return RegularityReport(True, "regular", None, worst, increasing)


def require_regular(ca: CACoin, grid_size: int = 101) -> RegularityReport:
    report = validate_regular(ca, grid_size)
    report.raise_if_invalid()
    return report


# ---------------------------------------------------------------------------
# {0,1} instances
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class ZeroOneInstance:
    """Failure-probability vectors of a {0,1} discrete-coin game.

    Coin ``i`` offers a rate-0 entry failing with probability ``h[i]`` and a
    rate-1 entry failing with probability ``ell[i] < h[i]``; the penalty is
    ``D + 1``. Values may be floats or ``Fraction`` objects; with fractions
    the cost functions evaluate exactly.
    """

    h: tuple[Number, ...]
    ell: tuple[Number, ...]
    D: Number

    def __post_init__(self):
        h, ell = tuple(self.h), tuple(self.ell)
        if len(h) != len(ell):
            raise InstanceError("h and ell must have the same length")
        for i, (hi, li) in enumerate(zip(h, ell)):
            if not (0 < li < hi < 1):
                raise InstanceError(f"index {i}: need 0 < ell < h < 1, got ell={li}, h={hi}")
        if not self.D > 0:
            raise InstanceError(f"D must be positive, got {self.D}")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "ell", ell)

    @property
    def n(self) -> int:
        return len(self.h)

    @property
    def penalty(self) -> Number:
        return self.D + 1

    @property
    def b(self) -> tuple[Number, ...]:
        return tuple(li / hi for hi, li in zip(self.h, self.ell))

    def to_float(self) -> ZeroOneInstance:
        return ZeroOneInstance(
            tuple(float(x) for x in self.h), tuple(float(x) for x in self.ell), float(self.D)
        )

    def coins(self) -> list[DiscreteCoin]:
        """The equivalent two-entry discrete coins, ids ``A1 .. An``."""
        out = []
        for i, (hi, li) in enumerate(zip(self.h, self.ell)):
            p0, p1 = 1 - hi, 1 - li
            out.append(DiscreteCoin(f"A{i + 1}", ((float(p0), 0.0), (float(p1), float(p1)))))
        return out


# ---------------------------------------------------------------------------
# Plans
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class TossStep:
    coin_id: str
    p: float
    fee: float
    repeat: bool = False

    @classmethod
    def of(cls, c: SimpleCoin, repeat=False) -> TossStep:
        return cls(c.id, c.p, c.fee, repeat)


@dataclasses.dataclass(frozen=True)
class TossPlan:
    """An ordered toss schedule with stop-on-success semantics.

    Steps are tossed in order until one succeeds; a ``repeat`` step is tossed
    until it succeeds and can only be the last step. If every step fails the
    penalty is paid. ``expected_cost`` is the analytic value of the plan.
    """

    steps: tuple[TossStep, ...]
    expected_cost: float
    variant: str = ""
    diagnostics: tuple[str, ...] = ()

    def __post_init__(self):
        steps = tuple(self.steps)
        for s in steps[:-1]:
            if s.repeat:
                raise InstanceError("a repeated step must be the last step of a plan")
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "expected_cost", float(self.expected_cost))
        object.__setattr__(self, "diagnostics", tuple(self.diagnostics))

    @classmethod
    def give_up(cls, E: float, variant="", diagnostics=()) -> TossPlan:
        return cls((), E, variant, diagnostics)

    def coin_ids(self) -> list[str]:
        return [s.coin_id for s in self.steps]


def plan_cost(steps: Sequence[TossStep], E: float) -> float:
    """Analytic expected cost of executing ``steps`` with penalty ``E``."""
    total = 0.0
    survive = 1.0
    for s in steps:
        if s.repeat:
            return total + survive * (s.fee / s.p)
        total += survive * s.fee
        survive *= 1.0 - s.p
    return total + survive * E
