"""Seeded random markets and preference profiles."""
from __future__ import annotations

import random
from typing import Any, Dict, List, Optional

from .core import validate_instance
from .oracle import ordered_sublists

MAX_TRIES = 200


def gen(students: int, schools: int, types: int, seed: int, reserve_density: float = 0.5,
        max_capacity: Optional[int] = None) -> Dict[str, Any]:
    """A random instance document that passes strict validation.

    Every school gets at least one open seat.  Each (school, type) pair is
    given a reserve with probability ``reserve_density``, capped below both
    the type's size and the remaining room at the school.  Draws that end up
    invalid are redrawn, at most ``MAX_TRIES`` times.
    """
    if students < 1 or schools < 1 or types < 1:
        raise ValueError("students, schools and types must be positive")
    if types > students:
        raise ValueError("more types than students: some type would be empty")
    if not 0 <= reserve_density <= 1:
        raise ValueError("reserve_density must lie in [0, 1]")
    rng = random.Random(seed)
    top = max_capacity or max(2, -(-students // schools) + 1)
    type_ids = [f"m{k + 1}" for k in range(types)]
    school_ids = [f"s{k + 1}" for k in range(schools)]
    student_ids = [f"i{k + 1}" for k in range(students)]
    for _ in range(MAX_TRIES):
        # every type gets at least one member
        assigned = type_ids + [rng.choice(type_ids) for _ in range(students - types)]
        rng.shuffle(assigned)
        size = {t: assigned.count(t) for t in type_ids}
        sch_docs = []
        for s in school_ids:
            cap = rng.randint(1, top)
            reserves = {}
            room = cap - 1
            for t in type_ids:
                limit = min(room, size[t] - 1)
                if limit > 0 and rng.random() < reserve_density:
                    q = rng.randint(1, limit)
                    reserves[t] = q
                    room -= q
            sch_docs.append({"id": s, "capacity": cap, "reserves": reserves})
        scores = {}
        for s in school_ids:
            perm = list(range(1, students + 1))
            rng.shuffle(perm)
            scores[s] = dict(zip(student_ids, perm))
        doc = {
            "types": type_ids,
            "schools": sch_docs,
            "students": [{"id": i, "type": t, "scores": {s: scores[s][i] for s in school_ids}}
                         for i, t in zip(student_ids, assigned)],
        }
        try:
            validate_instance(doc)
        except ValueError:
            continue
        return doc
    raise ValueError("could not draw a valid instance with these parameters")


def gen_prefs(instance, seed: int, allow_empty: bool = True) -> Dict[str, List[str]]:
    """Uniformly random ordered sublist of schools for every student."""
    rng = random.Random(seed)
    lists = ordered_sublists(instance.school_ids)
    if not allow_empty:
        lists = [l for l in lists if l]
    return {i: list(rng.choice(lists)) for i in instance.student_ids}


def gen_single_school(students: int, types: int, seed: int, reserve_density: float = 0.7,
                      max_capacity: Optional[int] = None) -> Dict[str, Any]:
    """One-school instance; handy for choice-rule sweeps."""
    return gen(students, 1, types, seed, reserve_density,
               max_capacity=max_capacity or max(2, students - 1))
