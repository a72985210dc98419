"""Regenerate the bundled example fixtures under src/reservematch/data/.

Every fixture uses one priority ranking shared by all schools, encoded as
rank-descending integer scores (top student gets the largest score).
"""
import json
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "reservematch" / "data"


def market(types, ranking, schools, relaxed=False, scores=None):
    n = len(ranking)
    score = scores or {i: n - k for k, i in enumerate(ranking)}
    type_ids = sorted(set(types.values()), key=lambda t: int(t[1:]))
    inst = {
        "types": type_ids,
        "schools": [{"id": s, "capacity": q, "reserves": r} for s, q, r in schools],
        "students": [{"id": i, "type": types[i], "scores": {s: score[i] for s, _, _ in schools}}
                     for i in sorted(types, key=lambda x: int(x[1:]))],
    }
    if relaxed:
        inst["relaxed_quotas"] = True
    return inst


def typed(**groups):
    out = {}
    for t, members in groups.items():
        for i in members.split():
            out[i] = t
    return out


def seat_rows(open_=(), reserved=(), school="s"):
    rows = [{"student": i, "school": school, "seat": "open"} for i in open_]
    rows += [{"student": i, "school": school, "seat": "reserved"} for i in reserved]
    return rows


def ids(*nums):
    return [f"i{k}" for k in nums]


def single_prefs(inst, school="s"):
    return {st["id"]: [school] for st in inst["students"]}


FIXTURES = {}

# one school, with the listed stable matchings as goldens
t = typed(m1="i1 i2 i3", m2="i4 i5 i6")
inst = market(t, ids(1, 4, 2, 3, 5, 6), [("s", 4, {"m1": 1, "m2": 1})])
FIXTURES["ex1"] = {
    "description": "one school, q=4, one reserve seat per type",
    "instance": inst,
    "prefs": {"prefs": single_prefs(inst)},
    "goldens": {
        "stable_set": [
            seat_rows(ids(2, 3), ids(1, 4)),
            seat_rows(ids(1, 2), ids(3, 4)),
            seat_rows(ids(1, 3), ids(2, 4)),
            seat_rows(ids(1, 4), ids(2, 5)),
            seat_rows(ids(4, 2), ids(1, 5)),
        ],
        "c_sim_ro": {"open": ids(2, 3), "reserved": ids(1, 4)},
        "c_sim_oro": {"open": ids(1, 4), "reserved": ids(2, 5)},
        "c_sim_or": {"open": ids(1, 4), "reserved": ids(2, 5)},
    },
}

# sequential manipulation
t = typed(m1="i1 i2", m2="i3 i4")
inst = market(t, ids(1, 2, 3, 4), [("s1", 2, {"m1": 1}), ("s2", 2, {"m1": 1})])
truth = {i: ["s1", "s2"] for i in ids(1, 2, 3, 4)}
seq_truth = {i: {"reserve": p, "open": p} for i, p in truth.items()}
seq_ro_i2_null = dict(seq_truth, i2={"reserve": [], "open": ["s1", "s2"]})
seq_or_i2_null = dict(seq_truth, i2={"reserve": ["s1", "s2"], "open": []})
FIXTURES["ex2"] = {
    "description": "two schools; truncating the stage-1 list pays off under both sequential mechanisms",
    "instance": inst,
    "prefs": {"truthful": truth, "seq_truthful": seq_truth, "seq_ro_i2_null": seq_ro_i2_null,
              "seq_or_i2_null": seq_or_i2_null},
    "goldens": {
        "seq_ro_truthful": [
            {"student": "i1", "school": "s1", "seat": "reserved"},
            {"student": "i2", "school": "s2", "seat": "reserved"},
            {"student": "i3", "school": "s1", "seat": "open"},
            {"student": "i4", "school": "s2", "seat": "open"},
        ],
        "seq_ro_i2_null_school": "s1",
        "seq_or_truthful": [
            {"student": "i1", "school": "s1", "seat": "open"},
            {"student": "i2", "school": "s2", "seat": "open"},
            {"student": "i3", "school": None, "seat": None},
            {"student": "i4", "school": None, "seat": None},
        ],
        "seq_or_wasteful_ne": [
            {"student": "i1", "school": "s1", "seat": "open"},
            {"student": "i2", "school": "s1", "seat": "reserved"},
            {"student": "i3", "school": "s2", "seat": "open"},
            {"student": "i4", "school": None, "seat": None},
        ],
    },
}

# multiple NE outcomes
t = typed(m1="i1", m2="i2", m3="i3 i4")
inst = market(t, ids(3, 4, 1, 2), [("s1", 2, {"m1": 1}), ("s2", 2, {"m2": 1})], relaxed=True)
truth = {"i1": ["s2", "s1"], "i2": ["s1", "s2"], "i3": ["s2", "s1"], "i4": ["s1", "s2"]}
FIXTURES["ex3"] = {
    "description": "two schools with a Pareto-ranked pair of stable school assignments",
    "instance": inst,
    "prefs": {"truthful": truth},
    "goldens": {
        "mu": [
            {"student": "i1", "school": "s1", "seat": "reserved"},
            {"student": "i2", "school": "s2", "seat": "reserved"},
            {"student": "i3", "school": "s2", "seat": "open"},
            {"student": "i4", "school": "s1", "seat": "open"},
        ],
        "mu_tilde": [
            {"student": "i1", "school": "s2", "seat": "open"},
            {"student": "i2", "school": "s1", "seat": "open"},
            {"student": "i3", "school": "s2", "seat": "open"},
            {"student": "i4", "school": "s1", "seat": "open"},
        ],
    },
}

# mixed subschool orders break verifiability
t = typed(m1="i1 i2 i3", m2="i4 i5 i6")
inst = market(t, ids(1, 2, 3, 4, 5, 6), [("s", 5, {"m1": 2, "m2": 1})])
flex = {i: (["s.o", "s.r"] if i in ("i1", "i2", "i5", "i6") else ["s.r", "s.o"]) for i in ids(1, 2, 3, 4, 5, 6)}
FIXTURES["ex4"] = {
    "description": "one school; students mix o-first and r-first subschool orders",
    "instance": inst,
    "prefs": {"prefs": single_prefs(inst), "flex": flex},
    "goldens": {
        "split": {"open_first": ids(1, 2, 5, 6), "reserve_first": ids(3, 4)},
        "c_star": {"open": ids(1, 2, 5), "reserved": ids(3, 4)},
        "c_sim_sep": {"open": ids(1, 2), "reserved": ids(3, 4)},
    },
}

# OR-verifiable assignments
t = typed(m1="i1 i2 i3 i4", m2="i5 i6 i7 i8", m3="i9 i10")
r5 = ids(1, 2, 3, 5, 4, 9, 6, 7, 8, 10)
inst = market(t, r5, [("s", 8, {"m1": 2, "m2": 1, "m3": 2})], relaxed=True)
FIXTURES["ex5"] = {
    "description": "one school, ten applicants; three OR-verifiable assignments",
    "instance": inst,
    "prefs": {"prefs": single_prefs(inst)},
    "goldens": {
        "c_sim_or": {"open": ids(1, 2, 3, 5, 4, 9), "reserved": ids(6, 10)},
        "c_sim_ro": {"open": ids(3, 4, 6), "reserved": ids(1, 2, 5, 9, 10)},
        "or_choice_set": [
            {"open": ids(1, 2, 3, 5, 4, 9), "reserved": ids(6, 10)},
            {"open": ids(1, 2, 3, 5, 4), "reserved": ids(9, 6, 10)},
            {"open": ids(1, 2, 3, 5), "reserved": ids(4, 9, 6, 10)},
        ],
    },
}

# open-reserve-open is not verifiable
inst = market(t, ids(1, 2, 3, 4, 5, 9, 6, 7, 8, 10), [("s", 8, {"m1": 2, "m2": 1, "m3": 1})])
FIXTURES["ex6"] = {
    "description": "one school where open-reserve-open selection strands reserve holders between open holders",
    "instance": inst,
    "prefs": {"prefs": single_prefs(inst)},
    "goldens": {
        "c_sim_oro": {"open": ids(1, 2, 3, 4, 6, 7), "reserved": ids(5, 9)},
        "c_sim_or": {"open": ids(1, 2, 3, 4, 5, 9), "reserved": ids(6, 10)},
    },
}

# precedence order with open seats first
t = typed(m1="i1 i2 i3", m2="i4 i5 i6", m3="i7 i8 i9")
r7 = ids(1, 2, 3, 4, 7, 8, 9, 5, 6)
inst = market(t, r7, [("s", 6, {"m1": 1, "m2": 1, "m3": 1})])
FIXTURES["ex7"] = {
    "description": "one school, three unit reserves; a precedence order opening with the open seats",
    "instance": inst,
    "prefs": {"prefs": single_prefs(inst)},
    "goldens": {
        "precedence": ["o", "o", "o", "m1", "m2", "m3"],
        "c_precedence": {"open": ids(1, 2, 3, 4), "reserved": ids(5, 7)},
        "c_sim_or": {"open": ids(1, 2, 3, 4), "reserved": ids(5, 7)},
    },
}

# regular-rule comparison
t = typed(m1="i1 i2 i3 i4", m2="i5 i6 i7 i8", m3="i9 i10 i11")
inst = market(t, ids(1, 2, 3, 4, 5, 9, 6, 10, 7, 8, 11), [("s", 9, {"m1": 2, "m2": 2, "m3": 1})])
FIXTURES["ex8"] = {
    "description": "one school, eleven applicants; type m3 tries open seats first, everyone else reserves first",
    "instance": inst,
    "prefs": {"prefs": single_prefs(inst)},
    "goldens": {
        "c_sim_or_selected": ids(1, 2, 3, 4, 5, 9, 6, 10, 7),
        "split": {"open_first": ids(9, 10, 11), "reserve_first": ids(1, 2, 3, 4, 5, 6, 7, 8)},
        "c_star_selected": ids(1, 2, 3, 4, 5, 9, 6, 10, 11),
    },
}

# precedence order versus reserve-open
t = typed(m1="i1 i2 i3", m2="i4 i5 i6", m3="i7 i8 i9", m4="i10 i11 i12")
inst = market(t, ids(1, 2, 4, 5, 7, 8, 9, 10, 11, 12, 6, 3),
              [("s", 7, {"m1": 2, "m2": 2, "m3": 1, "m4": 1})])
FIXTURES["ex9"] = {
    "description": "one school, seven seats, one open; reserves-first precedence orders admit a student reserve-open rejects",
    "instance": inst,
    "prefs": {"prefs": single_prefs(inst)},
    "goldens": {
        "subset_a": ids(1, 2, 3, 7, 8, 9, 10, 11, 12),
        "c_sim_ro_a": ids(1, 2, 7, 8, 9, 10, 11),
        "subset_b": ids(4, 5, 6, 7, 8, 9, 10, 11, 12),
        "c_sim_ro_b": ids(4, 5, 7, 8, 9, 10, 11),
        "precedence": ["m1", "m1", "m2", "m2", "m3", "m4", "o"],
        "c_precedence_b_admits": "i6",
    },
}

# shadow-seat comparison: documentation only
FIXTURES["ex10"] = {
    "description": "same market as ex7; the shadow-seat rule family cannot reproduce this selection (not implemented)",
    "instance": FIXTURES["ex7"]["instance"],
    "prefs": {"prefs": FIXTURES["ex7"]["prefs"]["prefs"]},
    "goldens": {"c_sim_or_selected": ids(1, 2, 3, 4, 5, 7)},
}

# SimFlex trace
t = typed(m1="i1 i2 i3 i4", m2="i5 i6 i7 i8")
inst12 = market(t, ids(1, 2, 5, 6, 3, 4, 7, 8),
                [("s1", 2, {"m2": 1}), ("s2", 2, {"m1": 1}), ("s3", 2, {"m1": 1, "m2": 1}), ("s4", 2, {})],
                relaxed=True)
sub = {
    "i1": ["s1.o", "s2.o", "s2.r", "s3.o", "s4"],
    "i2": ["s1.o", "s2.r", "s2.o", "s3.o", "s4"],
    "i3": ["s2.o", "s2.r", "s1.o", "s3.o", "s4"],
    "i4": ["s2.o", "s2.r", "s1.o", "s3.o", "s4"],
    "i5": ["s2.o", "s1.o", "s1.r", "s3.o", "s4"],
    "i6": ["s1.o", "s1.r", "s2.o", "s3.o", "s4"],
    "i7": ["s2.o", "s1.o", "s1.r", "s3.o", "s4"],
    "i8": ["s1.o", "s1.r", "s2.o", "s3.o", "s4"],
}
school_level = {}
for i, lst in sub.items():
    seen = []
    for x in lst:
        s = x.split(".")[0]
        if s not in seen:
            seen.append(s)
    school_level[i] = seen

FIXTURES["ex11"] = {
    "description": "the ex12 market with school-level preferences read off the ex12 subschool lists",
    "instance": inst12,
    "prefs": {"truthful": school_level},
    "goldens": {},
}

FIXTURES["ex12"] = {
    "description": "four schools, eight students; round-by-round subschool DA with flexible reserves",
    "instance": inst12,
    "prefs": {"subschool": sub},
    "goldens": {
        "rounds": 6,
        "final": [
            {"student": "i1", "school": "s1", "seat": "open"},
            {"student": "i2", "school": "s2", "seat": "reserved"},
            {"student": "i3", "school": "s3", "seat": "open"},
            {"student": "i4", "school": "s3", "seat": "open"},
            {"student": "i5", "school": "s2", "seat": "open"},
            {"student": "i6", "school": "s1", "seat": "reserved"},
            {"student": "i7", "school": "s4", "seat": "open"},
            {"student": "i8", "school": "s4", "seat": "open"},
        ],
    },
}

# backward transfer contrast
t = typed(m1="i1 i3", m2="i2")
inst = market(t, ids(1, 2, 3), [("s", 3, {"m1": 1, "m2": 1})], relaxed=True)
FIXTURES["ex-bt"] = {
    "description": "one school filled exactly; backward transfer keeps reserves the open-first DA releases",
    "instance": inst,
    "prefs": {"prefs": single_prefs(inst)},
    "goldens": {
        "c_backward_transfer": {"open": ids(1), "reserved": ids(3, 2)},
        "c_sim_or": {"open": ids(1, 2, 3), "reserved": []},
    },
}

if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    for name, fx in FIXTURES.items():
        (OUT / f"{name}.json").write_text(json.dumps(dict(name=name, **fx), indent=2) + "\n")
    print(f"wrote {len(FIXTURES)} fixtures to {OUT}")
