"""JSON interchange for instances, preference files, matchings and results.

``INF`` cutoffs are written as the string ``"inf"``; unmatched students are
written with ``"school": null`` and ``"seat": null``.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

from .audit import StageCutoffs
from .core import INF, CutoffProfile, Instance, Matching, Seat, validate_instance
from .mechanisms import MechanismResult, SequentialPreferences

PathLike = Union[str, Path]


def read_json(path: PathLike) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_json(data: Any, path: Optional[PathLike] = None) -> str:
    text = json.dumps(data, indent=2, sort_keys=False) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def instance_to_json(instance: Instance, relaxed: bool = False) -> Dict[str, Any]:
    out: Dict[str, Any] = {
        "types": list(instance.types),
        "schools": [{"id": s.id, "capacity": s.capacity, "reserves": dict(s.reserves)}
                    for s in instance.schools],
        "students": [{"id": st.id, "type": st.type, "scores": dict(st.scores)}
                     for st in instance.students],
    }
    if relaxed:
        out["relaxed_quotas"] = True
    return out


def instance_from_json(raw: Mapping[str, Any]) -> Instance:
    """Validate an instance document.

    A top-level ``"relaxed_quotas": true`` waives the open-seat and
    reserve-below-type-size assumptions, keeping the structural checks.
    """
    return validate_instance(raw, strict=not raw.get("relaxed_quotas", False))


def load_instance(path: PathLike) -> Instance:
    return instance_from_json(read_json(path))


def detect_prefs_shape(raw: Mapping[str, Any]) -> str:
    values = list(raw.values())
    if values and all(isinstance(v, Mapping) for v in values):
        return "sequential"
    if any("." in x for v in values if isinstance(v, list) for x in v):
        return "subschool"
    return "simple"


def prefs_from_json(raw: Mapping[str, Any], shape: str):
    """Parse a preference document for the given shape, rejecting mismatches."""
    if shape == "sequential":
        pairs = {}
        for i, v in raw.items():
            if not isinstance(v, Mapping) or set(v) - {"reserve", "open"}:
                raise ValueError(f"student {i}: sequential entry needs 'reserve' and 'open' lists")
            pairs[i] = (list(v.get("reserve", [])), list(v.get("open", [])))
        return SequentialPreferences.from_pairs(pairs)
    out = {}
    for i, v in raw.items():
        if not isinstance(v, list) or not all(isinstance(x, str) for x in v):
            raise ValueError(f"student {i}: expected a list of ids")
        out[i] = list(v)
    return out


def prefs_to_json(prefs) -> Dict[str, Any]:
    if isinstance(prefs, SequentialPreferences):
        return {i: {"reserve": list(r), "open": list(o)} for i, (r, o) in prefs.lists.items()}
    return {i: list(v) for i, v in prefs.items()}


def matching_to_json(matching: Matching) -> List[Dict[str, Any]]:
    rows = []
    for i in sorted(matching):
        s, t = matching[i]
        rows.append({"student": i, "school": s, "seat": t.value if t else None})
    return rows


def matching_from_json(rows: Sequence[Mapping[str, Any]]) -> Matching:
    a = {}
    for r in rows:
        s = r.get("school")
        a[r["student"]] = (s, Seat(r["seat"]) if s is not None else None)
    return Matching(a)


def _num(x):
    return "inf" if x == INF else x


def _parse_num(x):
    if x == "inf":
        return INF
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return x
    raise ValueError(f"bad cutoff value {x!r}")


def cutoffs_to_json(c: CutoffProfile) -> Dict[str, Any]:
    schools = list(dict.fromkeys(list(c.open) + list(c.reserve)))
    out = {}
    for s in schools:
        entry: Dict[str, Any] = {}
        if s in c.open:
            entry["open"] = _num(c.open[s])
        if s in c.reserve:
            entry["reserve"] = {t: _num(v) for t, v in c.reserve[s].items()}
        out[s] = entry
    return out


def cutoffs_from_json(raw: Mapping[str, Any]) -> CutoffProfile:
    open_c, res_c = {}, {}
    for s, entry in raw.items():
        if "open" in entry:
            open_c[s] = _parse_num(entry["open"])
        if "reserve" in entry:
            res_c[s] = {t: _parse_num(v) for t, v in entry["reserve"].items()}
    return CutoffProfile(open_c, res_c)


def result_to_json(result: MechanismResult) -> Dict[str, Any]:
    out: Dict[str, Any] = {"mechanism": result.mechanism,
                           "matching": matching_to_json(result.matching)}
    if result.cutoffs is not None:
        out["cutoffs"] = cutoffs_to_json(result.cutoffs)
    if result.stages is not None:
        out["stages"] = [cutoffs_to_json(result.stages.stage1), cutoffs_to_json(result.stages.stage2)]
    if result.trace is not None:
        out["trace"] = trace_to_json(result.trace)
    return out


def result_from_json(raw: Mapping[str, Any]) -> MechanismResult:
    mech = raw["mechanism"]
    stages = None
    if raw.get("stages"):
        s1, s2 = raw["stages"]
        stages = StageCutoffs(mech, cutoffs_from_json(s1), cutoffs_from_json(s2))
    cut = cutoffs_from_json(raw["cutoffs"]) if "cutoffs" in raw else None
    # traces are an output-only artifact and are not rebuilt
    return MechanismResult(mech, matching_from_json(raw["matching"]), cut, stages)


def trace_to_json(trace) -> List[Dict[str, Any]]:
    from .choice import SplitApplicants

    rounds = []
    for k, rnd in enumerate(trace.rounds, 1):
        entry = {"round": k, "schools": {}}
        for s, pool in rnd.pools.items():
            res = rnd.results[s]
            if isinstance(pool, SplitApplicants):
                applicants = {"open": sorted(pool.open_first), "reserve": sorted(pool.reserve_first)}
            else:
                applicants = sorted(pool)
            entry["schools"][s] = {
                "applicants": applicants,
                "admitted": {"open": sorted(res.open), "reserved": sorted(res.reserved)},
            }
        rounds.append(entry)
    return rounds
