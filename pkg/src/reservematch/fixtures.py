"""Bundled example markets with their preference files and golden outputs."""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional

from .core import Instance, Matching, Seat
from .io import instance_from_json, prefs_from_json, write_json

NAMES = ("ex1", "ex2", "ex3", "ex4", "ex5", "ex6", "ex7", "ex8", "ex9", "ex10", "ex11", "ex12", "ex-bt")


def raw(name: str) -> Dict[str, Any]:
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}")
    text = resources.files("reservematch").joinpath("data", f"{name}.json").read_text(encoding="utf-8")
    return json.loads(text)


def instance(name: str) -> Instance:
    return instance_from_json(raw(name)["instance"])


def prefs(name: str, key: Optional[str] = None, shape: str = "simple"):
    p = raw(name)["prefs"]
    if key is None:
        key = next(iter(p))
    return prefs_from_json(p[key], shape)


def golden(name: str, key: str) -> Any:
    return raw(name)["goldens"][key]


def matching(rows: Iterable[Mapping[str, Any]], inst: Instance) -> Matching:
    """Golden rows as a full matching: students not listed are unmatched."""
    a = {i: (None, None) for i in inst.student_ids}
    for r in rows:
        s = r.get("school")
        a[r["student"]] = (s, Seat(r["seat"]) if s is not None else None)
    return Matching(a)


def export(directory) -> List[Path]:
    """Write ``<name>.json`` (instance), ``<name>_<prefs>.json`` and ``<name>_goldens.json``."""
    out_dir = Path(directory)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name in NAMES:
        fx = raw(name)
        targets = {f"{name}.json": fx["instance"], f"{name}_goldens.json": fx["goldens"]}
        for key, p in fx["prefs"].items():
            targets[f"{name}_{key}.json"] = p
        for fname, data in targets.items():
            path = out_dir / fname
            write_json(data, path)
            written.append(path)
    return written
