"""Named end-to-end mechanisms, sequential and simultaneous."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .audit import StageCutoffs, compute_cutoffs, stage_cutoffs
from .choice import c_sim_or, c_sim_oro, c_sim_ro
from .core import CutoffProfile, Instance, Matching, Seat, check_prefs
from .engine import DATrace, da_run, da_run_subschool, subschool_label

SEQUENTIAL = ("seq-ro", "seq-or")
SIMPLE = ("sim-ro", "sim-oro", "sim-or")
SUBSCHOOL = ("sim-sep", "sim-flex")
MECHANISM_IDS = SEQUENTIAL + SIMPLE + SUBSCHOOL


def prefs_shape(mechanism: str) -> str:
    """``"sequential"``, ``"simple"`` or ``"subschool"``: the report a mechanism takes."""
    if mechanism in SEQUENTIAL:
        return "sequential"
    if mechanism in SIMPLE:
        return "simple"
    if mechanism in SUBSCHOOL:
        return "subschool"
    raise ValueError(f"unknown mechanism {mechanism!r}")


@dataclass(frozen=True)
class SequentialPreferences:
    # student -> (reserve-stage list, open-stage list)
    lists: Mapping[str, Tuple[Tuple[str, ...], Tuple[str, ...]]]

    @classmethod
    def from_pairs(cls, pairs: Mapping[str, Tuple[Sequence[str], Sequence[str]]]) -> "SequentialPreferences":
        return cls({i: (tuple(r), tuple(o)) for i, (r, o) in pairs.items()})

    @classmethod
    def truthful(cls, prefs: Mapping[str, Sequence[str]]) -> "SequentialPreferences":
        """Report the same list in both stages."""
        return cls({i: (tuple(p), tuple(p)) for i, p in prefs.items()})

    def reserve_list(self, student: str) -> Tuple[str, ...]:
        return self.lists.get(student, ((), ()))[0]

    def open_list(self, student: str) -> Tuple[str, ...]:
        return self.lists.get(student, ((), ()))[1]

    def list_for(self, student: str, seat: Seat) -> Tuple[str, ...]:
        return self.reserve_list(student) if seat is Seat.RESERVED else self.open_list(student)

    def replace(self, student: str, reserve: Sequence[str], open_: Sequence[str]) -> "SequentialPreferences":
        lists = dict(self.lists)
        lists[student] = (tuple(reserve), tuple(open_))
        return SequentialPreferences(lists)


@dataclass
class MechanismResult:
    mechanism: str
    matching: Matching
    cutoffs: Optional[CutoffProfile] = None
    stages: Optional[StageCutoffs] = None
    trace: Optional[DATrace] = None


def responsive_da(students: Iterable[str], lists: Mapping[str, Sequence[str]],
                  slot: Callable[[str, str], object], capacity: Callable[[object], int],
                  score: Callable[[str, str], int]) -> Dict[str, str]:
    """Plain batch DA where each slot keeps its top ``capacity`` proposers.

    ``slot(i, s)`` names the quota a proposal of ``i`` to ``s`` competes for,
    so per-type reserves are just separate slots.  Returns student -> school
    for matched students.
    """
    students = list(students)
    nxt = {i: 0 for i in students}
    held: Dict[object, List[str]] = {}
    where: Dict[str, str] = {}
    free = [i for i in students]
    while free:
        new: Dict[object, List[Tuple[str, str]]] = {}
        for i in free:
            lst = lists.get(i, ())
            if nxt[i] < len(lst):
                s = lst[nxt[i]]
                new.setdefault(slot(i, s), []).append((i, s))
        if not new:
            break
        free = []
        for k, props in new.items():
            s = props[0][1]
            pool = held.get(k, []) + [i for i, _ in props]
            pool.sort(key=lambda i: -score(i, s))
            cap = capacity(k)
            held[k] = pool[:cap]
            for i in pool[cap:]:
                where.pop(i, None)
                nxt[i] += 1
                free.append(i)
            for i in held[k]:
                where[i] = s
    return where


def _reserve_stage(instance: Instance, students, lists, quotas=None) -> Dict[str, str]:
    def cap(k):
        s, t = k
        return instance.school(s).reserve(t) if quotas is None else quotas.get(k, 0)
    return responsive_da(students, lists, lambda i, s: (s, instance.type_of(i)), cap, instance.score)


def _open_stage(instance: Instance, students, lists, quotas: Mapping[str, int]) -> Dict[str, str]:
    return responsive_da(students, lists, lambda i, s: s, lambda s: quotas.get(s, 0), instance.score)


def _check_seq(instance: Instance, seq_prefs: SequentialPreferences) -> None:
    check_prefs({i: r for i, (r, _) in seq_prefs.lists.items()}, instance)
    check_prefs({i: o for i, (_, o) in seq_prefs.lists.items()}, instance)


def seq_ro_matching(instance: Instance, seq_prefs: SequentialPreferences) -> Matching:
    ids = instance.student_ids
    r_lists = {i: seq_prefs.reserve_list(i) for i in ids}
    o_lists = {i: seq_prefs.open_list(i) for i in ids}
    stage1 = _reserve_stage(instance, ids, r_lists)
    filled: Dict[str, int] = {}
    for s in stage1.values():
        filled[s] = filled.get(s, 0) + 1
    quotas = {sch.id: sch.capacity - filled.get(sch.id, 0) for sch in instance.schools}
    rest = [i for i in ids if i not in stage1]
    stage2 = _open_stage(instance, rest, o_lists, quotas)
    a = {i: (None, None) for i in ids}
    a.update({i: (s, Seat.RESERVED) for i, s in stage1.items()})
    a.update({i: (s, Seat.OPEN) for i, s in stage2.items()})
    return Matching(a)


def seq_or_matching(instance: Instance, seq_prefs: SequentialPreferences) -> Matching:
    ids = instance.student_ids
    r_lists = {i: seq_prefs.reserve_list(i) for i in ids}
    o_lists = {i: seq_prefs.open_list(i) for i in ids}
    stage1 = _open_stage(instance, ids, o_lists, {sch.id: sch.open_quota for sch in instance.schools})
    rest = [i for i in ids if i not in stage1]
    stage2 = _reserve_stage(instance, rest, r_lists)
    a = {i: (None, None) for i in ids}
    a.update({i: (s, Seat.OPEN) for i, s in stage1.items()})
    a.update({i: (s, Seat.RESERVED) for i, s in stage2.items()})
    return Matching(a)


def seq_ro(instance: Instance, seq_prefs: SequentialPreferences) -> MechanismResult:
    """Reserved seats in stage 1, then open seats plus every unfilled reserve in stage 2."""
    _check_seq(instance, seq_prefs)
    m = seq_ro_matching(instance, seq_prefs)
    return MechanismResult("seq-ro", m, compute_cutoffs(m, instance, "eq1"), stage_cutoffs(m, instance, "seq-ro"))


def seq_or(instance: Instance, seq_prefs: SequentialPreferences) -> MechanismResult:
    """Open seats in stage 1, then reserved seats in stage 2; unfilled reserves stay empty."""
    _check_seq(instance, seq_prefs)
    m = seq_or_matching(instance, seq_prefs)
    return MechanismResult("seq-or", m, compute_cutoffs(m, instance, "eq2"), stage_cutoffs(m, instance, "seq-or"))


def _simple(mech, rule):
    def run(instance: Instance, prefs: Mapping[str, Sequence[str]], trace: bool = False) -> MechanismResult:
        m, log = da_run(instance, prefs, rule, trace=trace)
        return MechanismResult(mech, m, compute_cutoffs(m, instance, "eq1"), trace=log)
    run.__name__ = mech.replace("-", "_")
    run.__doc__ = f"DA with ``{rule.__name__}`` at every school; cutoffs by the full-school rule."
    return run


sim_ro = _simple("sim-ro", c_sim_ro)
sim_oro = _simple("sim-oro", c_sim_oro)
sim_or = _simple("sim-or", c_sim_or)


def sim_sep(instance: Instance, subschool_prefs: Mapping[str, Sequence[str]], trace: bool = False) -> MechanismResult:
    """Subschool DA with independent open and reserve subschools.

    Cutoffs use the open-quota rule because reserves never turn into open seats.
    """
    m, log = da_run_subschool(instance, subschool_prefs, "sep", trace=trace)
    return MechanismResult("sim-sep", m, compute_cutoffs(m, instance, "eq2"), trace=log)


def sim_flex(instance: Instance, subschool_prefs: Mapping[str, Sequence[str]], trace: bool = False) -> MechanismResult:
    """Subschool DA where unfilled reserves become open seats."""
    m, log = da_run_subschool(instance, subschool_prefs, "flex", trace=trace)
    return MechanismResult("sim-flex", m, compute_cutoffs(m, instance, "eq1"), trace=log)


def consistent_subschool_list(prefs: Sequence[str],
                              order: Union[str, Mapping[str, str]] = "o_first") -> List[str]:
    """Expand a school list into subschools, keeping each school's pair adjacent.

    ``order`` is ``"o_first"`` / ``"r_first"`` for every school or a map from
    school to one of those.
    """
    out = []
    for s in prefs:
        o = order if isinstance(order, str) else order.get(s, "o_first")
        if o not in ("o_first", "r_first"):
            raise ValueError(f"unknown subschool order {o!r}")
        pair = (Seat.OPEN, Seat.RESERVED) if o == "o_first" else (Seat.RESERVED, Seat.OPEN)
        out.extend(subschool_label(s, t) for t in pair)
    return out


def run_mechanism(mechanism: str, instance: Instance, prefs, trace: bool = False) -> MechanismResult:
    """Dispatch by mechanism id; ``prefs`` must have the mechanism's shape."""
    shape = prefs_shape(mechanism)
    if shape == "sequential":
        if not isinstance(prefs, SequentialPreferences):
            raise TypeError(f"{mechanism} needs sequential preferences")
        return seq_ro(instance, prefs) if mechanism == "seq-ro" else seq_or(instance, prefs)
    if isinstance(prefs, SequentialPreferences):
        raise TypeError(f"{mechanism} takes a single list per student")
    fn = {"sim-ro": sim_ro, "sim-oro": sim_oro, "sim-or": sim_or,
          "sim-sep": sim_sep, "sim-flex": sim_flex}[mechanism]
    return fn(instance, prefs, trace=trace)
