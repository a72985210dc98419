"""Brute-force ground truth for small markets.

Everything here enumerates exhaustively and refuses inputs above its size
guard rather than sampling.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .audit import is_or_verifiable, is_ro_verifiable, is_stable, stability_report
from .choice import ChoiceResult, SplitApplicants, c_backward_transfer, c_sim_or, c_sim_ro, c_star
from .core import Instance, Matching, Seat, rank
from .engine import da_run
from .mechanisms import (SequentialPreferences, consistent_subschool_list, prefs_shape,
                         responsive_da, run_mechanism, sim_flex, sim_or, sim_ro)

MAX_STUDENTS = 8
MAX_RAW_MATCHINGS = 2_000_000
MAX_NE_PROFILES = 400_000
MAX_SP_SCHOOLS = 3


class GuardError(ValueError):
    """An exhaustive computation was asked for more than its size guard allows."""


def ordered_sublists(items: Sequence[str]) -> List[Tuple[str, ...]]:
    """Every ordered list of distinct elements, the empty list first."""
    out: List[Tuple[str, ...]] = []
    for k in range(len(items) + 1):
        out.extend(itertools.permutations(items, k))
    return out


def _options(instance: Instance, i: str) -> List[Tuple[Optional[str], Optional[Seat]]]:
    t = instance.type_of(i)
    opts: List[Tuple[Optional[str], Optional[Seat]]] = [(None, None)]
    for sch in instance.schools:
        if sch.capacity == 0:
            continue
        opts.append((sch.id, Seat.OPEN))
        if sch.reserve(t) > 0:
            opts.append((sch.id, Seat.RESERVED))
    return opts


def enumerate_matchings(instance: Instance) -> Iterator[Matching]:
    """Every augmented matching of ``instance``, each once.

    An open seat only needs a free seat at the school (converted reserves
    count as open); a reserved seat also needs room in her type's quota.
    """
    ids = instance.student_ids
    if len(ids) > MAX_STUDENTS:
        raise GuardError(f"{len(ids)} students exceeds the enumeration guard of {MAX_STUDENTS}")
    opts = [_options(instance, i) for i in ids]
    raw = 1
    for o in opts:
        raw *= len(o)
    if raw > MAX_RAW_MATCHINGS:
        raise GuardError(f"{raw} raw assignments exceeds the enumeration guard of {MAX_RAW_MATCHINGS}")
    load = {s.id: 0 for s in instance.schools}
    rload: Dict[Tuple[str, str], int] = {}
    current: List[Tuple[Optional[str], Optional[Seat]]] = []

    def go(k):
        if k == len(ids):
            yield Matching(dict(zip(ids, current)))
            return
        t = instance.type_of(ids[k])
        for s, seat in opts[k]:
            if s is not None:
                sch = instance.school(s)
                if load[s] >= sch.capacity:
                    continue
                if seat is Seat.RESERVED and rload.get((s, t), 0) >= sch.reserve(t):
                    continue
                load[s] += 1
                if seat is Seat.RESERVED:
                    rload[(s, t)] = rload.get((s, t), 0) + 1
            current.append((s, seat))
            yield from go(k + 1)
            current.pop()
            if s is not None:
                load[s] -= 1
                if seat is Seat.RESERVED:
                    rload[(s, t)] -= 1

    yield from go(0)


def stable_set(instance: Instance, prefs: Mapping[str, Sequence[str]]) -> List[Matching]:
    """All stable augmented matchings, sorted by canonical key."""
    return sorted((m for m in enumerate_matchings(instance) if is_stable(m, prefs, instance)),
                  key=Matching.key)


def single_school_matchings(school: str, applicants: Iterable[str],
                            instance: Instance) -> Iterator[ChoiceResult]:
    """Single-school assignments that admit ``min(q_s, |applicants|)`` students.

    Smaller selections leave a seat empty while someone who wants it is
    turned away, so they can never be stable, let alone verifiable.
    """
    applicants = tuple(sorted(set(applicants)))
    if len(applicants) > 12:
        raise GuardError(f"{len(applicants)} applicants exceeds the single-school guard of 12")
    sch = instance.school(school)
    k = min(sch.capacity, len(applicants))
    for chosen in itertools.combinations(applicants, k):
        for mask in range(1 << k):
            counts: Dict[str, int] = {}
            ok = True
            seats = {}
            for b, i in enumerate(chosen):
                if mask >> b & 1:
                    t = instance.type_of(i)
                    counts[t] = counts.get(t, 0) + 1
                    if counts[t] > sch.reserve(t):
                        ok = False
                        break
                    seats[i] = Seat.RESERVED
                else:
                    seats[i] = Seat.OPEN
            if ok:
                yield ChoiceResult.of(school, seats)


def _open_above_reserved(r: ChoiceResult, score) -> bool:
    return not r.open or not r.reserved or min(map(score, r.open)) > max(map(score, r.reserved))


def _reserved_above_open(r: ChoiceResult, score, type_of) -> bool:
    low: Dict[str, int] = {}
    for i in r.reserved:
        t = type_of(i)
        low[t] = min(low.get(t, score(i)), score(i))
    return all(score(i) < low[type_of(i)] for i in r.open if type_of(i) in low)


def _verifiable_set(school, applicants, instance, check, necessary):
    applicants = set(applicants)
    sub = instance.restrict(school, applicants)
    prefs = {i: [school] for i in applicants}
    # the seat-order test is implied by the full check and far cheaper, so it runs first
    return sorted(
        (r for r in single_school_matchings(school, applicants, instance)
         if necessary(r) and check(r.as_matching(applicants), prefs, sub).passed),
        key=lambda r: sorted((i, t.value) for i, t in r.chosen),
    )


def or_verifiable_choice_set(school: str, applicants: Iterable[str], instance: Instance) -> List[ChoiceResult]:
    """Every OR-verifiable assignment of ``applicants`` at ``school`` (all of whom want it)."""
    score = lambda i: instance.score(i, school)
    return _verifiable_set(school, applicants, instance, is_or_verifiable,
                           lambda r: _open_above_reserved(r, score))


def ro_verifiable_choice_set(school: str, applicants: Iterable[str], instance: Instance) -> List[ChoiceResult]:
    """Every RO-verifiable assignment of ``applicants`` at ``school`` (all of whom want it)."""
    score = lambda i: instance.score(i, school)
    return _verifiable_set(school, applicants, instance, is_ro_verifiable,
                           lambda r: _reserved_above_open(r, score, instance.type_of))


@dataclass
class MinReservedReport:
    holds: bool
    sim_or_reserved: FrozenSet[str]
    member_reserved: List[FrozenSet[str]]
    same_selection: bool


def min_reserved_check(school: str, applicants: Iterable[str], instance: Instance) -> MinReservedReport:
    """Every OR-verifiable assignment selects like ``c_sim_or`` and reserves at least its seats."""
    applicants = set(applicants)
    base = c_sim_or(school, applicants, instance)
    members = or_verifiable_choice_set(school, applicants, instance)
    same = all(r.selected == base.selected for r in members)
    contains = all(base.reserved <= r.reserved for r in members)
    return MinReservedReport(same and contains and bool(members), base.reserved,
                             [r.reserved for r in members], same)


def ro_uniqueness_check(school: str, applicants: Iterable[str], instance: Instance) -> bool:
    """The only RO-verifiable assignment is the reserve-then-open choice."""
    members = ro_verifiable_choice_set(school, applicants, instance)
    return members == [c_sim_ro(school, applicants, instance)]


@dataclass
class ORFormReport:
    members_match_form: bool
    form_verifiable: Optional[bool]
    members: List[ChoiceResult]
    candidates: List[FrozenSet[str]]

    @property
    def holds(self) -> bool:
        return self.members_match_form and self.form_verifiable is not False


def or_form_check(school: str, applicants: Iterable[str], instance: Instance) -> ORFormReport:
    """Compare the OR-verifiable assignments with the threshold form built from ``c_sim_or``.

    The form: select ``c_sim_or``'s students and reserve exactly those ranked
    below some open-seat holder ``j`` of ``c_sim_or`` (or none when nobody
    holds an open seat).  Each member must have that form.  When the school
    is filled, every form candidate within the reserve quotas must in turn
    be OR-verifiable; if it is not filled all seats must be open, so only the
    first direction applies.
    """
    applicants = set(applicants)
    sch = instance.school(school)
    base = c_sim_or(school, applicants, instance)
    score = {i: instance.score(i, school) for i in base.selected}
    candidates = []
    for j in sorted(base.open, key=score.get):
        below = frozenset(i for i in base.selected if score[i] < score[j])
        if below not in candidates:
            candidates.append(below)
    if not base.open:
        candidates.append(frozenset(base.selected) if base.selected else frozenset())
    members = or_verifiable_choice_set(school, applicants, instance)
    match = all(r.selected == base.selected and r.reserved in candidates for r in members)
    form_ok: Optional[bool] = None
    if len(applicants) >= sch.capacity:
        sub = instance.restrict(school, applicants)
        prefs = {i: [school] for i in applicants}
        form_ok = True
        for cand in candidates:
            counts: Dict[str, int] = {}
            for i in cand:
                counts[instance.type_of(i)] = counts.get(instance.type_of(i), 0) + 1
            if any(n > sch.reserve(t) for t, n in counts.items()):
                continue
            r = ChoiceResult.of(school, {i: Seat.RESERVED if i in cand else Seat.OPEN for i in base.selected})
            if not is_or_verifiable(r.as_matching(applicants), prefs, sub).passed:
                form_ok = False
    return ORFormReport(match, form_ok, members, candidates)


def peer_monotonicity_check(school: str, universe: Sequence[str], instance: Instance) -> List[Tuple]:
    """Moving a student from the reserve-first to the open-first group never hurts her own type.

    Returns every violating ``(I, I', i)``; an empty list means the property
    holds over all disjoint pairs drawn from ``universe``.
    """
    universe = tuple(sorted(set(universe)))
    if len(universe) > MAX_STUDENTS:
        raise GuardError(f"universe of {len(universe)} exceeds guard of {MAX_STUDENTS}")
    memo: Dict[Tuple[FrozenSet[str], FrozenSet[str]], FrozenSet[str]] = {}

    def sel(a, b):
        key = (a, b)
        if key not in memo:
            memo[key] = c_star(school, SplitApplicants(a, b), instance).selected
        return memo[key]

    bad = []
    for labels in itertools.product((0, 1, 2), repeat=len(universe)):
        a = frozenset(i for i, l in zip(universe, labels) if l == 1)
        b = frozenset(i for i, l in zip(universe, labels) if l == 2)
        before = sel(a, b)
        for i in b:
            t = instance.type_of(i)
            after = sel(a | {i}, b - {i})
            if not {j for j in before if instance.type_of(j) == t} <= {j for j in after if instance.type_of(j) == t}:
                bad.append((a, b, i))
    return bad


@dataclass
class NEResult:
    mechanism: str
    profiles: List[Tuple[Tuple[Tuple[str, ...], Tuple[str, ...]], ...]]
    outcomes: List[Matching]
    stable: List[bool]
    wasteful: List[bool]
    students: Tuple[str, ...] = ()
    profile_count: int = 0

    def outcome_set(self) -> FrozenSet[Matching]:
        return frozenset(self.outcomes)


def default_strategy_space(instance: Instance) -> List[Tuple[Tuple[str, ...], Tuple[str, ...]]]:
    lists = ordered_sublists(instance.school_ids)
    return [(r, o) for r in lists for o in lists]


def ne_outcomes(instance: Instance, true_prefs: Mapping[str, Sequence[str]], mechanism: str,
                space: Optional[Mapping[str, Sequence[Tuple[Sequence[str], Sequence[str]]]]] = None) -> NEResult:
    """Pure Nash equilibria of a sequential mechanism under complete information.

    ``space`` maps each student to her candidate ``(reserve list, open list)``
    reports; by default every pair of ordered school sublists.  A profile is
    an equilibrium when no student gains by switching to any other report in
    her space, with payoffs read from ``true_prefs``.
    """
    if mechanism not in ("seq-ro", "seq-or"):
        raise ValueError(f"not a sequential mechanism: {mechanism!r}")
    ids = instance.student_ids
    if space is None:
        if len(ids) > 4 or len(instance.schools) > 2:
            raise GuardError("default strategy space needs at most 4 students and 2 schools")
        default = default_strategy_space(instance)
        strategies = [[(tuple(r), tuple(o)) for r, o in default] for _ in ids]
    else:
        strategies = [[(tuple(r), tuple(o)) for r, o in space[i]] for i in ids]
    total = 1
    for s in strategies:
        total *= len(s)
    if total > MAX_NE_PROFILES:
        raise GuardError(f"{total} profiles exceeds the equilibrium guard of {MAX_NE_PROFILES}")

    ro = mechanism == "seq-ro"
    first_seat = Seat.RESERVED if ro else Seat.OPEN
    second_seat = Seat.OPEN if ro else Seat.RESERVED
    # stage-1 report of each strategy, as an index into the distinct lists
    first_of = [[s[0] if ro else s[1] for s in strat] for strat in strategies]
    second_of = [[s[1] if ro else s[0] for s in strat] for strat in strategies]
    res_slot = lambda i, s: (s, instance.type_of(i))
    open_slot = lambda i, s: s

    stage1_memo: Dict[Tuple, Tuple[Dict[str, str], Tuple]] = {}
    stage2_memo: Dict[Tuple, Dict[str, str]] = {}
    outcome_ids: Dict[Matching, int] = {}
    outcomes: List[Matching] = []

    def stage1(lists):
        if lists not in stage1_memo:
            lmap = dict(zip(ids, lists))
            if ro:
                got = responsive_da(ids, lmap, res_slot, lambda k: instance.school(k[0]).reserve(k[1]),
                                    instance.score)
                filled: Dict[str, int] = {}
                for s in got.values():
                    filled[s] = filled.get(s, 0) + 1
                quotas = tuple(sch.capacity - filled.get(sch.id, 0) for sch in instance.schools)
            else:
                got = responsive_da(ids, lmap, open_slot, lambda s: instance.school(s).open_quota,
                                    instance.score)
                quotas = ()
            stage1_memo[lists] = (got, quotas)
        return stage1_memo[lists]

    def stage2(key, quotas):
        if (key, quotas) not in stage2_memo:
            lmap = dict(key)
            rest = [i for i, _ in key]
            if ro:
                q = dict(zip(instance.school_ids, quotas))
                got = responsive_da(rest, lmap, open_slot, lambda s: q[s], instance.score)
            else:
                got = responsive_da(rest, lmap, res_slot, lambda k: instance.school(k[0]).reserve(k[1]),
                                    instance.score)
            stage2_memo[(key, quotas)] = got
        return stage2_memo[(key, quotas)]

    sizes = [len(s) for s in strategies]
    oid = np.empty(sizes, dtype=np.int64)
    for profile in itertools.product(*[range(n) for n in sizes]):
        lists1 = tuple(first_of[k][x] for k, x in enumerate(profile))
        got1, quotas = stage1(lists1)
        key = tuple((i, second_of[k][profile[k]]) for k, i in enumerate(ids) if i not in got1)
        got2 = stage2(key, quotas)
        a = {i: (None, None) for i in ids}
        for i, s in got1.items():
            a[i] = (s, first_seat)
        for i, s in got2.items():
            a[i] = (s, second_seat)
        m = Matching(a)
        n = outcome_ids.get(m)
        if n is None:
            n = outcome_ids[m] = len(outcomes)
            outcomes.append(m)
        oid[profile] = n

    util = np.array([[-rank(true_prefs.get(i, ()), m.school_of(i)) for i in ids] for m in outcomes],
                    dtype=np.float64)
    mask = np.ones(sizes, dtype=bool)
    for k in range(len(ids)):
        u = util[:, k][oid]
        mask &= u == u.max(axis=k, keepdims=True)

    eq_profiles = [tuple(strategies[k][x] for k, x in enumerate(p)) for p in zip(*np.nonzero(mask))]
    eq_ids = sorted(set(oid[mask].tolist()))
    eq_outcomes = sorted((outcomes[n] for n in eq_ids), key=Matching.key)
    reports = [stability_report(m, true_prefs, instance) for m in eq_outcomes]
    return NEResult(
        mechanism=mechanism,
        profiles=eq_profiles,
        outcomes=eq_outcomes,
        stable=[r.stable for r in reports],
        wasteful=[not r.non_wasteful for r in reports],
        students=ids,
        profile_count=total,
    )


@dataclass(frozen=True)
class Violation:
    student: str
    misreport: object
    truthful_school: Optional[str]
    misreport_school: Optional[str]


def strategyproofness_audit(mechanism: str, instance: Instance, true_prefs: Mapping[str, Sequence[str]],
                            mode: str = "auto") -> List[Violation]:
    """Every unilateral misreport that gets a student a strictly better school.

    Misreports range over ordered school sublists.  For sequential mechanisms
    ``mode="copy"`` submits the one list in both stages and ``mode="pairs"``
    tries every pair of stage lists.  Subschool mechanisms try every ordered
    sublist of subschools against the o-first consistent truthful report.
    """
    if len(instance.schools) > MAX_SP_SCHOOLS:
        raise GuardError(f"strategy-proofness audit supports at most {MAX_SP_SCHOOLS} schools")
    shape = prefs_shape(mechanism)
    ids = instance.student_ids
    if shape == "sequential":
        if mode == "auto":
            mode = "copy"
        if mode not in ("copy", "pairs"):
            raise ValueError(f"unknown sequential audit mode {mode!r}")
        truthful = SequentialPreferences.truthful({i: true_prefs.get(i, ()) for i in ids})
        lists = ordered_sublists(instance.school_ids)
        reports = [(l, l) for l in lists] if mode == "copy" else [(r, o) for r in lists for o in lists]
        swap = lambda p, i, rep: p.replace(i, rep[0], rep[1])
    elif shape == "subschool":
        if len(instance.schools) > 2:
            raise GuardError("subschool misreport space supports at most 2 schools")
        truthful = {i: consistent_subschool_list(true_prefs.get(i, ())) for i in ids}
        labels = [f"{s}.{x}" for s in instance.school_ids for x in ("o", "r")]
        reports = [list(l) for l in ordered_sublists(labels)]
        swap = lambda p, i, rep: dict(p, **{i: rep})
    else:
        truthful = {i: list(true_prefs.get(i, ())) for i in ids}
        reports = [list(l) for l in ordered_sublists(instance.school_ids)]
        swap = lambda p, i, rep: dict(p, **{i: rep})

    base = run_mechanism(mechanism, instance, truthful).matching
    out = []
    for i in ids:
        p = true_prefs.get(i, ())
        r0 = rank(p, base.school_of(i))
        for rep in reports:
            got = run_mechanism(mechanism, instance, swap(truthful, i, rep)).matching.school_of(i)
            if rank(p, got) < r0:
                out.append(Violation(i, rep, base.school_of(i), got))
    return out


PAIRS = ("flex_o_first", "flex_r_first", "bt")


@dataclass
class EquivalenceReport:
    pair: str
    holds: bool
    left: Matching
    right: Matching
    detail: str = ""


def equivalence_check(instance: Instance, prefs: Mapping[str, Sequence[str]], pair: str) -> EquivalenceReport:
    """Run both sides of a claimed equivalence and compare.

    ``flex_o_first`` / ``flex_r_first`` compare flexible subschool DA under
    consistent lists against the open-first DA / reserve-open DA; the
    matchings must agree on every triple.  ``bt`` compares DA with the
    backward-transfer rule against the open-first DA: the same students at
    each school, with backward transfer reserving at least the same seats.
    """
    if pair in ("flex_o_first", "flex_r_first"):
        order = "o_first" if pair == "flex_o_first" else "r_first"
        sub = {i: consistent_subschool_list(p, order) for i, p in prefs.items()}
        left = sim_flex(instance, sub).matching
        right = (sim_or if pair == "flex_o_first" else sim_ro)(instance, prefs).matching
        holds = left == right
        return EquivalenceReport(pair, holds, left, right, "" if holds else "matchings differ")
    if pair == "bt":
        left, _ = da_run(instance, prefs, c_backward_transfer)
        right = sim_or(instance, prefs).matching
        same = all(left.school_of(i) == right.school_of(i) for i in instance.student_ids)
        sup = all(left.seat_of(i) is Seat.RESERVED for i in instance.student_ids
                  if right.seat_of(i) is Seat.RESERVED)
        detail = [] if same else ["selections differ"]
        if not sup:
            detail.append("reserved set not a superset")
        return EquivalenceReport(pair, same and sup, left, right, "; ".join(detail))
    raise ValueError(f"unknown equivalence {pair!r}; expected one of {PAIRS}")


def flex_order_invariance(instance: Instance, prefs: Mapping[str, Sequence[str]]) -> List[Tuple[str, Mapping[str, str]]]:
    """Students whose school under flexible subschool DA depends on their own per-school orders.

    Others report o-first consistent lists; each student in turn tries every
    assignment of o-first / r-first to the schools on her list.  Returns the
    ``(student, order)`` pairs that change her school.
    """
    base_sub = {i: consistent_subschool_list(p) for i, p in prefs.items()}
    base = sim_flex(instance, base_sub).matching
    bad = []
    for i, p in prefs.items():
        for combo in itertools.product(("o_first", "r_first"), repeat=len(p)):
            order = dict(zip(p, combo))
            sub = dict(base_sub, **{i: consistent_subschool_list(p, order)})
            if sim_flex(instance, sub).matching.school_of(i) != base.school_of(i):
                bad.append((i, order))
    return bad
