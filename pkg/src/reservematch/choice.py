"""Single-school augmented choice rules.

Every rule returns a :class:`ChoiceResult`: the chosen applicants and the
seat type each one occupies.  Rules taking a plain applicant set share the
signature ``rule(school, applicants, instance)``; the subschool rules take a
:class:`SplitApplicants` instead.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Sequence, Tuple

from .core import Instance, Matching, Seat

MAX_UNIVERSE = 12


@dataclass(frozen=True)
class ChoiceResult:
    school: str
    chosen: FrozenSet[Tuple[str, Seat]]

    @classmethod
    def of(cls, school: str, seats: Mapping[str, Seat]) -> "ChoiceResult":
        return cls(school, frozenset(seats.items()))

    @property
    def seats(self) -> Dict[str, Seat]:
        return dict(self.chosen)

    @property
    def selected(self) -> FrozenSet[str]:
        return frozenset(i for i, _ in self.chosen)

    @property
    def reserved(self) -> FrozenSet[str]:
        return frozenset(i for i, t in self.chosen if t is Seat.RESERVED)

    @property
    def open(self) -> FrozenSet[str]:
        return frozenset(i for i, t in self.chosen if t is Seat.OPEN)

    def as_matching(self, applicants: Iterable[str]) -> Matching:
        seats = self.seats
        return Matching({
            i: (self.school, seats[i]) if i in seats else (None, None)
            for i in set(applicants) | set(seats)
        })

    def problems(self, instance: Instance, applicants: Iterable[str] = None) -> List[str]:
        sch = instance.school(self.school)
        out = []
        if len(self.chosen) != len(self.selected):
            out.append("a student holds two seats")
        if len(self.selected) > sch.capacity:
            out.append("over capacity")
        for t in instance.types:
            if sum(1 for i in self.reserved if instance.type_of(i) == t) > sch.reserve(t):
                out.append(f"over reserve quota for {t}")
        if applicants is not None and not self.selected <= set(applicants):
            out.append("chose a non-applicant")
        return out

    def __repr__(self) -> str:
        o = ",".join(sorted(self.open))
        r = ",".join(sorted(self.reserved))
        return f"ChoiceResult({self.school}: open[{o}] reserved[{r}])"


@dataclass(frozen=True)
class SplitApplicants:
    """Applicants to the open subschool first and to the reserve subschool first."""

    open_first: FrozenSet[str]
    reserve_first: FrozenSet[str]

    def __init__(self, open_first: Iterable[str] = (), reserve_first: Iterable[str] = ()):
        object.__setattr__(self, "open_first", frozenset(open_first))
        object.__setattr__(self, "reserve_first", frozenset(reserve_first))
        if self.open_first & self.reserve_first:
            raise ValueError("split applicant sets must be disjoint")

    @property
    def all(self) -> FrozenSet[str]:
        return self.open_first | self.reserve_first


@dataclass(frozen=True)
class PrecedenceSpec:
    """Seat labels in fill order: ``"o"`` for open, a type id for a reserved seat."""

    seats: Tuple[str, ...]

    def __init__(self, seats: Iterable[str]):
        object.__setattr__(self, "seats", tuple(seats))

    def check(self, school: str, instance: Instance) -> None:
        sch = instance.school(school)
        if len(self.seats) != sch.capacity:
            raise ValueError(f"precedence order has {len(self.seats)} seats, school has {sch.capacity}")
        if self.seats.count("o") != sch.open_quota:
            raise ValueError("open seat count does not match open quota")
        for t in instance.types:
            if self.seats.count(t) != sch.reserve(t):
                raise ValueError(f"reserved seat count for {t} does not match quota")
        unknown = set(self.seats) - set(instance.types) - {"o"}
        if unknown:
            raise ValueError(f"unknown seat labels {sorted(unknown)}")


def _reserve_fill(school: str, pool: Iterable[str], instance: Instance, quotas=None) -> Dict[str, Seat]:
    sch = instance.school(school)
    taken: Dict[str, int] = {}
    out = {}
    for i in instance.ranked(school, pool):
        t = instance.type_of(i)
        cap = sch.reserve(t) if quotas is None else quotas.get(t, 0)
        if taken.get(t, 0) < cap:
            taken[t] = taken.get(t, 0) + 1
            out[i] = Seat.RESERVED
    return out


def _open_fill(school: str, pool: Iterable[str], k: int, instance: Instance) -> Dict[str, Seat]:
    if k <= 0:
        return {}
    return {i: Seat.OPEN for i in instance.ranked(school, pool)[:k]}


def c_sim_ro(school: str, applicants: Iterable[str], instance: Instance) -> ChoiceResult:
    """Reserves first (top applicants of each type), then every other seat open."""
    sch = instance.school(school)
    pool = set(applicants)
    seats = _reserve_fill(school, pool, instance)
    seats.update(_open_fill(school, pool - set(seats), sch.capacity - len(seats), instance))
    return ChoiceResult.of(school, seats)


def c_sim_oro(school: str, applicants: Iterable[str], instance: Instance) -> ChoiceResult:
    """Open quota first, then reserves by type, then unfilled reserves as open seats."""
    sch = instance.school(school)
    pool = set(applicants)
    seats = _open_fill(school, pool, sch.open_quota, instance)
    seats.update(_reserve_fill(school, pool - set(seats), instance))
    seats.update(_open_fill(school, pool - set(seats), sch.capacity - len(seats), instance))
    return ChoiceResult.of(school, seats)


def c_sim_sep(school: str, split: SplitApplicants, instance: Instance) -> ChoiceResult:
    """Independent open and reserve subschools; unfilled reserves stay empty."""
    sch = instance.school(school)
    seats = _open_fill(school, split.open_first, sch.open_quota, instance)
    seats.update(_reserve_fill(school, split.reserve_first, instance))
    return ChoiceResult.of(school, seats)


def c_sim_flex(school: str, split: SplitApplicants, instance: Instance) -> ChoiceResult:
    """Reserves from the reserve subschool, then all remaining seats open."""
    sch = instance.school(school)
    seats = _reserve_fill(school, split.reserve_first, instance)
    seats.update(_open_fill(school, split.open_first, sch.capacity - len(seats), instance))
    return ChoiceResult.of(school, seats)


def c_star(school: str, split: SplitApplicants, instance: Instance) -> ChoiceResult:
    """Deferred acceptance inside one school over its two subschools.

    Students in ``split.open_first`` apply to the open subschool and then the
    reserve subschool; ``split.reserve_first`` students apply in the other
    order.  The school evaluates every round with :func:`c_sim_flex`.  All
    rejected students propose together in the next round.
    """
    order = {i: (Seat.OPEN, Seat.RESERVED) for i in split.open_first}
    order.update({i: (Seat.RESERVED, Seat.OPEN) for i in split.reserve_first})
    step = {i: 0 for i in order}
    held = ChoiceResult.of(school, {})
    proposing = set(order)
    while proposing:
        at_open = {i for i, t in held.chosen if t is Seat.OPEN}
        at_res = {i for i, t in held.chosen if t is Seat.RESERVED}
        for i in proposing:
            if order[i][step[i]] is Seat.OPEN:
                at_open.add(i)
            else:
                at_res.add(i)
        held = c_sim_flex(school, SplitApplicants(at_open, at_res), instance)
        rejected = (at_open | at_res) - held.selected
        proposing = set()
        for i in rejected:
            step[i] += 1
            if step[i] < 2:
                proposing.add(i)
    return held


def c_sim_or(school: str, applicants: Iterable[str], instance: Instance) -> ChoiceResult:
    """Artificial DA where every applicant tries the open seats before the reserves."""
    return c_star(school, SplitApplicants(applicants, ()), instance)


def promoted_order(school: str, type_: str, pool: Iterable[str], instance: Instance) -> List[str]:
    ranked = instance.ranked(school, pool)
    return ([i for i in ranked if instance.type_of(i) == type_]
            + [i for i in ranked if instance.type_of(i) != type_])


def c_precedence(school: str, spec: PrecedenceSpec, applicants: Iterable[str],
                 instance: Instance) -> ChoiceResult:
    """Fill designated seats one at a time in the given order.

    A reserved seat for type ``m`` ranks type-``m`` applicants first; when it
    goes to a student of another type it is recorded as an open seat.
    """
    spec.check(school, instance)
    remaining = set(applicants)
    seats: Dict[str, Seat] = {}
    for label in spec.seats:
        if not remaining:
            break
        if label == "o":
            i = instance.ranked(school, remaining)[0]
            seats[i] = Seat.OPEN
        else:
            i = promoted_order(school, label, remaining, instance)[0]
            seats[i] = Seat.RESERVED if instance.type_of(i) == label else Seat.OPEN
        remaining.discard(i)
    return ChoiceResult.of(school, seats)


def c_backward_transfer(school: str, applicants: Iterable[str], instance: Instance) -> ChoiceResult:
    """Open-then-reserve selection, moving unfilled reserve quota to the open quota.

    Each pass restarts from scratch with the enlarged open quota until no
    reserve quota is left unfilled or every applicant is admitted.
    """
    sch = instance.school(school)
    pool = set(applicants)
    quotas = dict(sch.reserves)
    open_quota = sch.open_quota
    for _ in range(sum(quotas.values()) + 1):
        seats = _open_fill(school, pool, open_quota, instance)
        seats.update(_reserve_fill(school, pool - set(seats), instance, quotas))
        if len(seats) == len(pool):
            break
        unfilled = {}
        for t, q in quotas.items():
            used = sum(1 for i, s in seats.items() if s is Seat.RESERVED and instance.type_of(i) == t)
            if used < q:
                unfilled[t] = q - used
        if not unfilled:
            break
        for t, n in unfilled.items():
            quotas[t] -= n
            open_quota += n
    return ChoiceResult.of(school, seats)


RULES: Dict[str, Callable[[str, Iterable[str], Instance], ChoiceResult]] = {
    "sim-ro": c_sim_ro,
    "sim-oro": c_sim_oro,
    "sim-or": c_sim_or,
    "backward-transfer": c_backward_transfer,
}


def precedence_rule(spec: PrecedenceSpec) -> Callable[[str, Iterable[str], Instance], ChoiceResult]:
    def rule(school, applicants, instance):
        return c_precedence(school, spec, applicants, instance)
    rule.__name__ = f"c_precedence[{''.join(spec.seats)}]"
    return rule


@dataclass
class PropertyReport:
    substitutable: bool
    q_acceptant: bool
    stable: bool
    ro_verifiable: bool
    or_verifiable: bool
    witnesses: Dict[str, Tuple[str, ...]]

    def as_dict(self) -> Dict[str, bool]:
        return {
            "substitutable": self.substitutable,
            "q_acceptant": self.q_acceptant,
            "stable": self.stable,
            "ro_verifiable": self.ro_verifiable,
            "or_verifiable": self.or_verifiable,
        }


def check_choice_properties(rule, school: str, universe: Sequence[str],
                            instance: Instance) -> PropertyReport:
    """Exhaustively evaluate ``rule`` on every subset of ``universe``.

    Verifiability and stability of each choice are checked in the economy
    made of the school and that subset of applicants, all of whom list only
    the school.  The first failing subset of each property is kept as a
    witness.
    """
    from . import audit

    universe = tuple(sorted(set(universe)))
    if len(universe) > MAX_UNIVERSE:
        raise ValueError(f"universe of {len(universe)} students exceeds guard of {MAX_UNIVERSE}")
    sch = instance.school(school)
    results: Dict[FrozenSet[str], ChoiceResult] = {}
    for k in range(len(universe) + 1):
        for combo in itertools.combinations(universe, k):
            results[frozenset(combo)] = rule(school, combo, instance)

    flags = dict(substitutable=True, q_acceptant=True, stable=True,
                 ro_verifiable=True, or_verifiable=True)
    witnesses: Dict[str, Tuple[str, ...]] = {}

    def fail(name, subset):
        if flags[name]:
            flags[name] = False
            witnesses[name] = tuple(sorted(subset))

    for subset, res in results.items():
        for i in res.selected:
            for j in subset - {i}:
                if i not in results[subset - {j}].selected:
                    fail("substitutable", subset)
                    break
        if len(res.selected) != min(sch.capacity, len(subset)):
            fail("q_acceptant", subset)
        sub = instance.restrict(school, subset)
        prefs = {i: [school] for i in subset}
        m = res.as_matching(subset)
        if not audit.stability_report(m, prefs, sub).stable:
            fail("stable", subset)
        if not audit.is_ro_verifiable(m, prefs, sub).passed:
            fail("ro_verifiable", subset)
        if not audit.is_or_verifiable(m, prefs, sub).passed:
            fail("or_verifiable", subset)
    return PropertyReport(witnesses=witnesses, **flags)
