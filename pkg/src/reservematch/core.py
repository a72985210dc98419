"""Domain model: students, schools with reserve quotas, augmented matchings.

Scores are non-negative integers and a higher score means higher priority at
that school.  Cutoffs may be ``INF`` (``math.inf``), which no score reaches.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

INF = math.inf


class Seat(str, enum.Enum):
    RESERVED = "reserved"
    OPEN = "open"

    @property
    def short(self) -> str:
        return "r" if self is Seat.RESERVED else "o"


class InstanceError(ValueError):
    """Raised by :func:`validate_instance` with every violated invariant."""

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class Student:
    id: str
    type: str
    scores: Mapping[str, int]


@dataclass(frozen=True)
class School:
    id: str
    capacity: int
    reserves: Mapping[str, int] = field(default_factory=dict)

    def reserve(self, type_: str) -> int:
        return self.reserves.get(type_, 0)

    @property
    def open_quota(self) -> int:
        return self.capacity - sum(self.reserves.values())


@dataclass(frozen=True)
class Instance:
    """A market.  Construct through :func:`validate_instance` for checked input."""

    types: Tuple[str, ...]
    students: Tuple[Student, ...]
    schools: Tuple[School, ...]

    def __post_init__(self):
        object.__setattr__(self, "_student", {s.id: s for s in self.students})
        object.__setattr__(self, "_school", {s.id: s for s in self.schools})
        by_type: Dict[str, List[str]] = {t: [] for t in self.types}
        for st in self.students:
            by_type.setdefault(st.type, []).append(st.id)
        object.__setattr__(self, "_by_type", {t: tuple(v) for t, v in by_type.items()})

    @property
    def student_ids(self) -> Tuple[str, ...]:
        return tuple(s.id for s in self.students)

    @property
    def school_ids(self) -> Tuple[str, ...]:
        return tuple(s.id for s in self.schools)

    def student(self, sid: str) -> Student:
        try:
            return self._student[sid]
        except KeyError:
            raise KeyError(f"unknown student {sid!r}") from None

    def school(self, sid: str) -> School:
        try:
            return self._school[sid]
        except KeyError:
            raise KeyError(f"unknown school {sid!r}") from None

    def has_school(self, sid: str) -> bool:
        return sid in self._school

    def type_of(self, sid: str) -> str:
        return self.student(sid).type

    def score(self, student: str, school: str) -> int:
        return self._student[student].scores[school]

    def of_type(self, type_: str) -> Tuple[str, ...]:
        return self._by_type.get(type_, ())

    def ranked(self, school: str, students: Iterable[str]) -> List[str]:
        """Students sorted from highest to lowest priority at ``school``."""
        return sorted(students, key=lambda i: -self._student[i].scores[school])

    def restrict(self, school: str, students: Iterable[str]) -> "Instance":
        """The single-school economy of ``school`` and ``students``."""
        keep = set(students)
        return Instance(
            types=self.types,
            students=tuple(
                Student(s.id, s.type, {school: s.scores[school]})
                for s in self.students if s.id in keep
            ),
            schools=(self.school(school),),
        )


def validate_instance(raw: Mapping, strict: bool = True) -> Instance:
    """Build an :class:`Instance` from JSON-shaped data, reporting all problems.

    ``strict`` additionally enforces the modelling assumptions that every
    school keeps at least one open seat and that every positive reserve quota
    is below the size of its type.  The structural rules (unique ids, resolved
    references, reserves not above capacity, strict priorities) always apply.
    """
    problems: List[str] = []
    types = [str(t) for t in raw.get("types", [])]
    if len(set(types)) != len(types):
        problems.append("duplicate type ids")
    type_set = set(types)

    schools: List[School] = []
    seen = set()
    for entry in raw.get("schools", []):
        sid = str(entry["id"])
        if sid in seen:
            problems.append(f"duplicate school id {sid}")
        seen.add(sid)
        cap = entry.get("capacity")
        if not isinstance(cap, int) or isinstance(cap, bool) or cap < 0:
            problems.append(f"school {sid}: capacity must be a non-negative integer")
            cap = 0
        reserves: Dict[str, int] = {}
        for t, q in (entry.get("reserves") or {}).items():
            if t not in type_set:
                problems.append(f"school {sid}: reserve for unknown type {t}")
                continue
            if not isinstance(q, int) or isinstance(q, bool) or q < 0:
                problems.append(f"school {sid}: reserve for {t} must be a non-negative integer")
                continue
            if q:
                reserves[t] = q
        total = sum(reserves.values())
        if total > cap:
            problems.append(f"school {sid}: reserves exceed capacity")
        elif strict and total >= cap:
            problems.append(f"school {sid}: reserves must sum below capacity")
        schools.append(School(sid, cap, reserves))
    if not schools:
        problems.append("instance needs at least one school")
    school_ids = [s.id for s in schools]

    students: List[Student] = []
    seen = set()
    for entry in raw.get("students", []):
        sid = str(entry["id"])
        if sid in seen:
            problems.append(f"duplicate student id {sid}")
        seen.add(sid)
        t = str(entry.get("type"))
        if t not in type_set:
            problems.append(f"student {sid}: unknown type {t}")
        scores = {str(k): v for k, v in (entry.get("scores") or {}).items()}
        for k, v in scores.items():
            if k not in school_ids:
                problems.append(f"student {sid}: score for unknown school {k}")
            elif not isinstance(v, int) or isinstance(v, bool) or v < 0:
                problems.append(f"student {sid}: score at {k} must be a non-negative integer")
        for k in school_ids:
            if k not in scores:
                problems.append(f"student {sid}: missing score at {k}")
        students.append(Student(sid, t, scores))
    if not students:
        problems.append("instance needs at least one student")

    for s in school_ids:
        by_score: Dict[int, str] = {}
        for st in students:
            v = st.scores.get(s)
            if v is None:
                continue
            if v in by_score:
                problems.append(f"tied scores at school {s}: {by_score[v]} and {st.id}")
            by_score[v] = st.id

    if strict:
        sizes = {t: 0 for t in types}
        for st in students:
            if st.type in sizes:
                sizes[st.type] += 1
        for sch in schools:
            for t, q in sch.reserves.items():
                if q >= sizes.get(t, 0):
                    problems.append(
                        f"school {sch.id}: reserve quota not below type size for {t}"
                    )

    if problems:
        raise InstanceError(problems)
    return Instance(tuple(types), tuple(students), tuple(schools))


# (school or None, seat or None); unmatched students carry (None, None)
Assignment = Tuple[Optional[str], Optional[Seat]]
Triple = Tuple[Optional[str], str, Optional[Seat]]


class Matching:
    """An augmented matching: every student's school and seat type.

    Unmatched students have school ``None`` and seat ``None``; equality and
    hashing use this canonical form.
    """

    __slots__ = ("_a", "_key")

    def __init__(self, assignments: Mapping[str, Assignment]):
        a = {}
        for i, (s, t) in assignments.items():
            if s is None:
                a[i] = (None, None)
            else:
                a[i] = (s, Seat(t))
        self._a = a
        self._key = None

    @classmethod
    def from_triples(cls, triples: Iterable[Triple], students: Iterable[str] = ()) -> "Matching":
        a: Dict[str, Assignment] = {i: (None, None) for i in students}
        for s, i, t in triples:
            a[i] = (s, t)
        return cls(a)

    @classmethod
    def empty(cls, students: Iterable[str]) -> "Matching":
        return cls({i: (None, None) for i in students})

    def __getitem__(self, student: str) -> Assignment:
        return self._a[student]

    def __iter__(self) -> Iterator[str]:
        return iter(self._a)

    def __len__(self) -> int:
        return len(self._a)

    def items(self):
        return self._a.items()

    def school_of(self, student: str) -> Optional[str]:
        return self._a[student][0]

    def seat_of(self, student: str) -> Optional[Seat]:
        return self._a[student][1]

    def at(self, school: str) -> List[str]:
        return [i for i, (s, _) in self._a.items() if s == school]

    def at_seat(self, school: str, seat: Seat) -> List[str]:
        return [i for i, (s, t) in self._a.items() if s == school and t is seat]

    def triples(self) -> FrozenSet[Triple]:
        return frozenset((s, i, t) for i, (s, t) in self._a.items())

    def key(self) -> Tuple[Triple, ...]:
        if self._key is None:
            self._key = tuple(sorted(
                ((i, s or "", t.value if t else "") for i, (s, t) in self._a.items())
            ))
        return self._key

    def __eq__(self, other) -> bool:
        return isinstance(other, Matching) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        parts = []
        for i, (s, t) in sorted(self._a.items()):
            parts.append(f"{i}->{s}.{t.short}" if s else f"{i}->None")
        return f"Matching({', '.join(parts)})"

    def problems(self, instance: Instance) -> List[str]:
        """Violations of the augmented-matching conditions for ``instance``."""
        out = []
        ids = set(instance.student_ids)
        if set(self._a) != ids:
            out.append("matching must cover each student exactly once")
        for sch in instance.schools:
            here = self.at(sch.id)
            if len(here) > sch.capacity:
                out.append(f"school {sch.id} over capacity")
            for t in instance.types:
                n = sum(1 for i in self.at_seat(sch.id, Seat.RESERVED) if instance.type_of(i) == t)
                if n > sch.reserve(t):
                    out.append(f"school {sch.id} over reserve quota for {t}")
        for i, (s, _) in self._a.items():
            if s is not None and not instance.has_school(s):
                out.append(f"student {i} matched to unknown school {s}")
        return out

    def is_valid(self, instance: Instance) -> bool:
        return not self.problems(instance)


def to_standard(matching: Matching, instance: Instance) -> Dict[str, FrozenSet[str]]:
    """Erase seat types: school id -> admitted students."""
    return {s: frozenset(matching.at(s)) for s in instance.school_ids}


@dataclass(frozen=True)
class CutoffProfile:
    """Per-school open cutoff and per-type reserve cutoffs.

    Either mapping may be partial (stage profiles of sequential mechanisms
    carry only the seats allocated in that stage).  The null school has all
    cutoffs 0 and is not stored.
    """

    open: Mapping[str, float]
    reserve: Mapping[str, Mapping[str, float]]

    def open_cutoff(self, school: Optional[str]) -> float:
        return 0 if school is None else self.open[school]

    def reserve_cutoff(self, school: Optional[str], type_: str) -> float:
        return 0 if school is None else self.reserve[school][type_]

    def __eq__(self, other):
        if not isinstance(other, CutoffProfile):
            return NotImplemented
        return (dict(self.open) == dict(other.open)
                and {k: dict(v) for k, v in self.reserve.items()}
                == {k: dict(v) for k, v in other.reserve.items()})

    __hash__ = None


def affordable_set(student: str, cutoffs: CutoffProfile, instance: Instance) -> FrozenSet[Optional[str]]:
    """Schools the student's scores reach, always including ``None``."""
    st = instance.student(student)
    out = {None}
    for s in instance.school_ids:
        threshold = min(cutoffs.reserve_cutoff(s, st.type), cutoffs.open_cutoff(s))
        if st.scores[s] >= threshold:
            out.add(s)
    return frozenset(out)


def best_affordable(prefs: Sequence[str], affordable: Iterable[Optional[str]]) -> Optional[str]:
    allowed = set(affordable)
    for s in prefs:
        if s in allowed:
            return s
    return None


def prefers(prefs: Sequence[str], a: Optional[str], b: Optional[str]) -> bool:
    """True when ``a`` is strictly better than ``b`` under ``prefs``.

    Schools missing from ``prefs`` rank below ``None``.
    """
    return rank(prefs, a) < rank(prefs, b)


def rank(prefs: Sequence[str], school: Optional[str]) -> float:
    if school is None:
        return len(prefs)
    try:
        return prefs.index(school)
    except ValueError:
        return len(prefs) + 1


def check_prefs(prefs: Mapping[str, Sequence[str]], instance: Instance) -> None:
    for i, lst in prefs.items():
        instance.student(i)
        if len(set(lst)) != len(lst):
            raise ValueError(f"duplicate school in preference list of {i}")
        for s in lst:
            instance.school(s)
