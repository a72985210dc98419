"""Batch deferred acceptance over augmented choice rules."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .choice import ChoiceResult, SplitApplicants, c_sim_flex, c_sim_sep
from .core import Instance, Matching, Seat, check_prefs

Rule = Callable[[str, Iterable[str], Instance], ChoiceResult]
RulePerSchool = Union[Rule, Mapping[str, Rule]]


@dataclass(frozen=True)
class DARound:
    # school -> students the rule was evaluated on (split pools for subschool runs)
    pools: Mapping[str, object]
    results: Mapping[str, ChoiceResult]


@dataclass
class DATrace:
    rounds: List[DARound] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rounds)


def _rules_for(instance: Instance, rules: RulePerSchool) -> Dict[str, Rule]:
    if callable(rules):
        return {s: rules for s in instance.school_ids}
    missing = set(instance.school_ids) - set(rules)
    if missing:
        raise ValueError(f"no choice rule for schools {sorted(missing)}")
    return dict(rules)


def da_run(instance: Instance, prefs: Mapping[str, Sequence[str]], rules: RulePerSchool,
           trace: bool = False) -> Tuple[Matching, Optional[DATrace]]:
    """Student-proposing DA where every unassigned student proposes each round.

    Each school keeps every student who has ever proposed to it and applies
    its rule to that whole pool.  For substitutable rules the selected set
    matches the held-plus-new formulation; keeping the full pool also pins
    down seat types for rules such as the open-then-reserve artificial DA,
    whose seat assignment depends on who else applied.
    """
    check_prefs(prefs, instance)
    per_school = _rules_for(instance, rules)
    ids = instance.student_ids
    nxt = {i: 0 for i in ids}
    pools: Dict[str, set] = {s: set() for s in instance.school_ids}
    held: Dict[str, ChoiceResult] = {s: ChoiceResult.of(s, {}) for s in instance.school_ids}
    holder: Dict[str, str] = {}
    log = DATrace() if trace else None

    while True:
        proposals: Dict[str, List[str]] = {}
        for i in ids:
            if i in holder:
                continue
            p = prefs.get(i, ())
            if nxt[i] < len(p):
                proposals.setdefault(p[nxt[i]], []).append(i)
        if not proposals:
            break
        round_results = {}
        for s, new in proposals.items():
            pools[s].update(new)
            res = per_school[s](s, frozenset(pools[s]), instance)
            active = {i for i in pools[s] if holder.get(i) == s} | set(new)
            kept = {i: t for i, t in res.chosen if i in active}
            held[s] = ChoiceResult.of(s, kept)
            for i in active:
                if i in kept:
                    holder[i] = s
                else:
                    holder.pop(i, None)
                    nxt[i] += 1
            round_results[s] = held[s]
        if log is not None:
            log.rounds.append(DARound({s: frozenset(pools[s]) for s in proposals}, round_results))

    assignments = {i: (None, None) for i in ids}
    for s, res in held.items():
        for i, t in res.chosen:
            assignments[i] = (s, t)
    return Matching(assignments), log


def parse_subschool(label: str, instance: Instance) -> Tuple[str, Seat]:
    """``"s.o"`` / ``"s.r"`` to ``(s, seat)``; a bare school id means its open subschool."""
    if instance.has_school(label):
        return label, Seat.OPEN
    head, _, tail = label.rpartition(".")
    if head and instance.has_school(head) and tail in ("o", "r"):
        return head, Seat.OPEN if tail == "o" else Seat.RESERVED
    raise ValueError(f"malformed subschool id {label!r}")


def subschool_label(school: str, seat: Seat) -> str:
    return f"{school}.{seat.short}"


def da_run_subschool(instance: Instance, subschool_prefs: Mapping[str, Sequence[str]],
                     mode: str = "flex", trace: bool = False) -> Tuple[Matching, Optional[DATrace]]:
    """DA where students rank subschools and each school splits its applicants by subschool.

    ``mode`` picks the school-side rule: ``"sep"`` keeps the open and reserve
    subschools independent, ``"flex"`` passes unfilled reserves to the open
    subschool.  Each round the school re-evaluates the applicants it holds
    at each subschool together with the new proposals there.
    """
    rule = {"sep": c_sim_sep, "flex": c_sim_flex}.get(mode)
    if rule is None:
        raise ValueError(f"unknown subschool mode {mode!r}")
    lists: Dict[str, List[Tuple[str, Seat]]] = {}
    for i, lst in subschool_prefs.items():
        instance.student(i)
        parsed = [parse_subschool(x, instance) for x in lst]
        if len(set(parsed)) != len(parsed):
            raise ValueError(f"duplicate subschool in list of {i}")
        lists[i] = parsed
    ids = instance.student_ids
    nxt = {i: 0 for i in ids}
    holding: Dict[str, Tuple[str, Seat]] = {}
    held: Dict[str, ChoiceResult] = {s: ChoiceResult.of(s, {}) for s in instance.school_ids}
    log = DATrace() if trace else None

    while True:
        proposals: Dict[str, Dict[Seat, List[str]]] = {}
        for i in ids:
            if i in holding:
                continue
            lst = lists.get(i, [])
            if nxt[i] < len(lst):
                s, seat = lst[nxt[i]]
                proposals.setdefault(s, {Seat.OPEN: [], Seat.RESERVED: []})[seat].append(i)
        if not proposals:
            break
        round_pools, round_results = {}, {}
        for s, new in proposals.items():
            at_o = {i for i, h in holding.items() if h == (s, Seat.OPEN)} | set(new[Seat.OPEN])
            at_r = {i for i, h in holding.items() if h == (s, Seat.RESERVED)} | set(new[Seat.RESERVED])
            split = SplitApplicants(at_o, at_r)
            res = rule(s, split, instance)
            held[s] = res
            for i in at_o | at_r:
                if i in res.selected:
                    holding[i] = (s, Seat.OPEN if i in at_o else Seat.RESERVED)
                else:
                    holding.pop(i, None)
                    nxt[i] += 1
            round_pools[s] = split
            round_results[s] = res
        if log is not None:
            log.rounds.append(DARound(round_pools, round_results))

    assignments = {i: (None, None) for i in ids}
    for s, res in held.items():
        for i, t in res.chosen:
            assignments[i] = (s, t)
    return Matching(assignments), log
