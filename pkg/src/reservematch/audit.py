"""Cutoffs, stability audits and verifiability checks for augmented matchings."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .core import (INF, CutoffProfile, Instance, Matching, Seat, affordable_set,
                   best_affordable, rank)

MODES = ("eq1", "eq2")


def compute_cutoffs(matching: Matching, instance: Instance, mode: str = "eq1") -> CutoffProfile:
    """Lowest occupant score per seat category, 0 when unfilled, ``INF`` for absent reserves.

    Under ``eq1`` the open cutoff is the lowest open-seat score only when the
    whole school is full.  Under ``eq2`` it applies when the open quota alone
    is full, which suits outcomes where reserves never turn into open seats.
    """
    if mode not in MODES:
        raise ValueError(f"unknown cutoff mode {mode!r}")
    open_c: Dict[str, float] = {}
    res_c: Dict[str, Dict[str, float]] = {}
    for sch in instance.schools:
        s = sch.id
        here = matching.at(s)
        opens = [instance.score(i, s) for i in here if matching.seat_of(i) is Seat.OPEN]
        full = len(here) == sch.capacity if mode == "eq1" else len(opens) == sch.open_quota
        open_c[s] = min(opens) if full and opens else 0
        res_c[s] = {}
        for t in instance.types:
            q = sch.reserve(t)
            if q == 0:
                res_c[s][t] = INF
                continue
            held = [instance.score(i, s) for i in here
                    if matching.seat_of(i) is Seat.RESERVED and instance.type_of(i) == t]
            res_c[s][t] = min(held) if len(held) == q else 0
    return CutoffProfile(open_c, res_c)


@dataclass
class StabilityReport:
    individually_rational: bool
    ir_witnesses: List[str]
    non_wasteful: bool
    wasteful_witnesses: List[Tuple[str, str]]
    reserve_non_wasteful: bool
    reserve_wasteful_witnesses: List[Tuple[str, str]]
    justified_envy_pairs: List[Tuple[str, str, str]]

    @property
    def no_justified_envy(self) -> bool:
        return not self.justified_envy_pairs

    @property
    def stable(self) -> bool:
        return (self.individually_rational and self.non_wasteful
                and self.reserve_non_wasteful and self.no_justified_envy)


def stability_report(matching: Matching, prefs: Mapping[str, Sequence[str]],
                     instance: Instance) -> StabilityReport:
    """Check all four stability axioms exhaustively and list every violation."""
    ir, waste, rwaste, envy = [], [], [], []
    ids = instance.student_ids
    for i in ids:
        p = prefs.get(i, ())
        s_i = matching.school_of(i)
        if s_i is not None and s_i not in p:
            ir.append(i)
        t_i = instance.type_of(i)
        r_i = rank(p, s_i)
        for s in p:
            if rank(p, s) >= r_i:
                break
            sch = instance.school(s)
            here = matching.at(s)
            if len(here) < sch.capacity:
                waste.append((i, s))
            n = sum(1 for j in here if matching.seat_of(j) is Seat.RESERVED and instance.type_of(j) == t_i)
            if n < sch.reserve(t_i):
                rwaste.append((i, s))
            pi = instance.score(i, s)
            for j in here:
                if instance.score(j, s) < pi and (
                        instance.type_of(j) == t_i or matching.seat_of(j) is Seat.OPEN):
                    envy.append((i, j, s))
    return StabilityReport(
        individually_rational=not ir, ir_witnesses=ir,
        non_wasteful=not waste, wasteful_witnesses=waste,
        reserve_non_wasteful=not rwaste, reserve_wasteful_witnesses=rwaste,
        justified_envy_pairs=envy,
    )


def is_stable(matching: Matching, prefs: Mapping[str, Sequence[str]], instance: Instance) -> bool:
    """Short-circuiting boolean form of :func:`stability_report`, for oracle loops."""
    occupants: Dict[str, List[str]] = {s: [] for s in instance.school_ids}
    for i, (s, _) in matching.items():
        if s is not None:
            occupants[s].append(i)
    for i in instance.student_ids:
        p = prefs.get(i, ())
        s_i = matching.school_of(i)
        if s_i is not None and s_i not in p:
            return False
        t_i = instance.type_of(i)
        for s in p:
            if s == s_i:
                break
            sch = instance.school(s)
            here = occupants[s]
            if len(here) < sch.capacity:
                return False
            q = sch.reserve(t_i)
            if q and sum(1 for j in here if matching.seat_of(j) is Seat.RESERVED
                         and instance.type_of(j) == t_i) < q:
                return False
            pi = instance.score(i, s)
            for j in here:
                if instance.score(j, s) < pi and (
                        instance.type_of(j) == t_i or matching.seat_of(j) is Seat.OPEN):
                    return False
    return True


@dataclass(frozen=True)
class StudentCheck:
    student: str
    school_ok: bool
    seat_ok: bool
    rule: str
    expected_school: Optional[str] = None
    expected_seat: Optional[Seat] = None

    @property
    def passed(self) -> bool:
        return self.school_ok and self.seat_ok


@dataclass
class VerificationVerdict:
    rule: str
    checks: List[StudentCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[str]:
        return [c.student for c in self.checks if not c.passed]

    def __bool__(self) -> bool:
        return self.passed


def _verify(matching, prefs, instance, rule):
    cut = compute_cutoffs(matching, instance, "eq1")
    verdict = VerificationVerdict(rule)
    for i in instance.student_ids:
        p = prefs.get(i, ())
        s_i, seat = matching[i]
        best = best_affordable(p, affordable_set(i, cut, instance))
        school_ok = best == s_i
        if s_i is None:
            verdict.checks.append(StudentCheck(i, school_ok, True, rule, best, None))
            continue
        pi = instance.score(i, s_i)
        if rule == "RO":
            expected = Seat.RESERVED if pi >= cut.reserve_cutoff(s_i, instance.type_of(i)) else Seat.OPEN
        else:
            expected = Seat.OPEN if pi >= cut.open_cutoff(s_i) else Seat.RESERVED
        verdict.checks.append(StudentCheck(i, school_ok, expected is seat, rule, best, expected))
    return verdict


def is_ro_verifiable(matching: Matching, prefs: Mapping[str, Sequence[str]],
                     instance: Instance) -> VerificationVerdict:
    """Each student is at her best affordable school and holds a reserved seat
    exactly when her score reaches her type's reserve cutoff there."""
    return _verify(matching, prefs, instance, "RO")


def is_or_verifiable(matching: Matching, prefs: Mapping[str, Sequence[str]],
                     instance: Instance) -> VerificationVerdict:
    """Each student is at her best affordable school and holds an open seat
    exactly when her score reaches the open cutoff there."""
    return _verify(matching, prefs, instance, "OR")


@dataclass(frozen=True)
class StageCutoffs:
    """The two per-stage cutoff profiles published by a sequential mechanism."""

    mechanism: str
    stage1: CutoffProfile
    stage2: CutoffProfile


def stage_cutoffs(matching: Matching, instance: Instance, mechanism: str) -> StageCutoffs:
    """Split the final-matching cutoffs by the stage that allocated each seat category."""
    if mechanism == "seq-ro":
        full = compute_cutoffs(matching, instance, "eq1")
        return StageCutoffs(mechanism, CutoffProfile({}, full.reserve), CutoffProfile(full.open, {}))
    if mechanism == "seq-or":
        full = compute_cutoffs(matching, instance, "eq2")
        return StageCutoffs(mechanism, CutoffProfile(full.open, {}), CutoffProfile({}, full.reserve))
    raise ValueError(f"not a sequential mechanism: {mechanism!r}")


def verify_sequential(matching: Matching, cutoffs: StageCutoffs, seq_prefs, instance: Instance,
                      mechanism: str) -> VerificationVerdict:
    """Replay the student-side rule of a sequential mechanism.

    For ``seq-ro`` a student first looks for reserve-affordable schools on her
    reserve list; if there is one she should hold a reserved seat at the best
    of them.  Otherwise she looks at her open list against the stage-2 open
    cutoffs, and otherwise she is unmatched.  ``seq-or`` swaps the stages.
    """
    if cutoffs.mechanism != mechanism:
        raise ValueError(f"cutoffs were published by {cutoffs.mechanism}, not {mechanism}")
    if mechanism == "seq-ro":
        stages = ((Seat.RESERVED, cutoffs.stage1), (Seat.OPEN, cutoffs.stage2))
    elif mechanism == "seq-or":
        stages = ((Seat.OPEN, cutoffs.stage1), (Seat.RESERVED, cutoffs.stage2))
    else:
        raise ValueError(f"not a sequential mechanism: {mechanism!r}")
    verdict = VerificationVerdict(mechanism)
    for i in instance.student_ids:
        t = instance.type_of(i)
        expected_school, expected_seat = None, None
        for seat, prof in stages:
            lst = seq_prefs.list_for(i, seat)
            for s in lst:
                if seat is Seat.RESERVED:
                    c = prof.reserve_cutoff(s, t)
                else:
                    c = prof.open_cutoff(s)
                if instance.score(i, s) >= c:
                    expected_school, expected_seat = s, seat
                    break
            if expected_school is not None:
                break
        s_i, seat_i = matching[i]
        school_ok = s_i == expected_school
        seat_ok = s_i is None or seat_i is expected_seat
        verdict.checks.append(StudentCheck(i, school_ok, seat_ok, mechanism, expected_school, expected_seat))
    return verdict


def reserved_above_open(matching: Matching, instance: Instance) -> bool:
    """Every reserved-seat holder outranks every same-type open-seat holder at her school."""
    for s in instance.school_ids:
        for i in matching.at_seat(s, Seat.RESERVED):
            for j in matching.at_seat(s, Seat.OPEN):
                if instance.type_of(i) == instance.type_of(j) and instance.score(i, s) < instance.score(j, s):
                    return False
    return True


def open_above_reserved(matching: Matching, instance: Instance) -> bool:
    """Every open-seat holder outranks every reserved-seat holder at her school."""
    for s in instance.school_ids:
        res = [instance.score(i, s) for i in matching.at_seat(s, Seat.RESERVED)]
        opn = [instance.score(i, s) for i in matching.at_seat(s, Seat.OPEN)]
        if res and opn and min(opn) < max(res):
            return False
    return True
