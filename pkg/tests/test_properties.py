import json

from hypothesis import given, settings
from hypothesis import strategies as st

from reservematch import oracle
from reservematch.audit import is_or_verifiable, stability_report
from reservematch.choice import (PrecedenceSpec, SplitApplicants, c_backward_transfer, c_precedence,
                                 c_sim_flex, c_sim_or, c_sim_oro, c_sim_ro, c_sim_sep, c_star)
from reservematch.core import INF, CutoffProfile, Matching, Seat, affordable_set, to_standard
from reservematch.engine import da_run
from reservematch.gen import gen, gen_prefs, gen_single_school
from reservematch.io import instance_from_json, instance_to_json, prefs_from_json, prefs_to_json
from reservematch.mechanisms import sim_or

SETTINGS = settings(max_examples=60, deadline=None)

seeds = st.integers(0, 10_000)


@st.composite
def single_school(draw, max_students=8):
    n = draw(st.integers(2, max_students))
    types = draw(st.integers(1, min(3, n)))
    inst = instance_from_json(gen_single_school(n, types, draw(seeds)))
    pool = draw(st.sets(st.sampled_from(inst.student_ids)))
    return inst, "s1", pool


@st.composite
def markets(draw, students=5, schools=3):
    n = draw(st.integers(1, students))
    k = draw(st.integers(1, schools))
    t = draw(st.integers(1, min(3, n)))
    seed = draw(seeds)
    inst = instance_from_json(gen(n, k, t, seed))
    return inst, gen_prefs(inst, seed + 1)


def within_caps(res, inst):
    sch = inst.school(res.school)
    counts = {}
    for i in res.reserved:
        counts[inst.type_of(i)] = counts.get(inst.type_of(i), 0) + 1
    return len(res.selected) <= sch.capacity and all(n <= sch.reserve(t) for t, n in counts.items())


@SETTINGS
@given(markets(), st.data())
def test_affordable_set_monotone(market, data):
    inst, _ = market
    values = st.integers(0, len(inst.student_ids) + 1)
    open_c = {s: data.draw(values) for s in inst.school_ids}
    res_c = {s.id: {t: (data.draw(values) if s.reserve(t) else INF) for t in inst.types}
             for s in inst.schools}
    low = CutoffProfile(open_c, res_c)
    s = data.draw(st.sampled_from(inst.school_ids))
    bump = data.draw(st.integers(1, 3))
    high = CutoffProfile(dict(open_c, **{s: open_c[s] + bump}), res_c)
    for i in inst.student_ids:
        assert affordable_set(i, high, inst) <= affordable_set(i, low, inst)


@SETTINGS
@given(single_school())
def test_rules_respect_quotas_and_q_acceptance(case):
    inst, s, pool = case
    q = inst.school(s).capacity
    for rule in (c_sim_ro, c_sim_oro, c_sim_or, c_backward_transfer):
        res = rule(s, pool, inst)
        assert res.selected <= pool and within_caps(res, inst)
        assert len(res.selected) == min(q, len(pool))


@SETTINGS
@given(single_school(), st.data())
def test_split_rules_and_expansion(case, data):
    inst, s, pool = case
    reserve_first = data.draw(st.sets(st.sampled_from(sorted(pool)))) if pool else set()
    split = SplitApplicants(pool - reserve_first, reserve_first)
    sep = c_sim_sep(s, split, inst)
    flex = c_sim_flex(s, split, inst)
    star = c_star(s, split, inst)
    for res in (sep, flex, star):
        assert res.selected <= pool and within_caps(res, inst)
    assert sep.selected <= flex.selected


@SETTINGS
@given(single_school())
def test_star_reduces_to_simple_rules(case):
    inst, s, pool = case
    assert c_star(s, SplitApplicants(pool, ()), inst) == c_sim_or(s, pool, inst)
    assert c_star(s, SplitApplicants((), pool), inst) == c_sim_ro(s, pool, inst)


@SETTINGS
@given(single_school())
def test_backward_transfer_matches_or_selection(case):
    inst, s, pool = case
    bt = c_backward_transfer(s, pool, inst)
    base = c_sim_or(s, pool, inst)
    assert bt.selected == base.selected
    assert base.reserved <= bt.reserved


@SETTINGS
@given(single_school(), st.randoms(use_true_random=False))
def test_precedence_respects_quotas(case, rnd):
    inst, s, pool = case
    sch = inst.school(s)
    seats = ["o"] * sch.open_quota + [t for t in inst.types for _ in range(sch.reserve(t))]
    rnd.shuffle(seats)
    res = c_precedence(s, PrecedenceSpec(seats), pool, inst)
    assert res.selected <= pool and within_caps(res, inst)
    assert len(res.selected) == min(sch.capacity, len(pool))


@settings(max_examples=25, deadline=None)
@given(single_school(max_students=7))
def test_single_school_oracle_characterizations(case):
    inst, s, pool = case
    assert oracle.ro_uniqueness_check(s, pool, inst)
    assert oracle.or_form_check(s, pool, inst).holds
    if pool:
        assert oracle.min_reserved_check(s, pool, inst).holds


@SETTINGS
@given(markets())
def test_da_rejections_are_final(market):
    inst, prefs = market
    _, trace = da_run(inst, prefs, c_sim_or, trace=True)
    rejected = {}
    for rnd in trace.rounds:
        for s, pool in rnd.pools.items():
            held = rnd.results[s].selected
            assert not (rejected.get(s, set()) & held)
            rejected.setdefault(s, set()).update(set(pool) - held)
    proposals = sum(len(p) for p in prefs.values())
    assert len(trace) <= proposals + 1


@SETTINGS
@given(markets())
def test_corrupted_or_matchings(market):
    # handing a reserved seat to a higher-priority open holder of the same type
    inst, prefs = market
    m = sim_or(inst, prefs).matching
    for s in inst.schools:
        for j in m.at_seat(s.id, Seat.RESERVED):
            for i in m.at_seat(s.id, Seat.OPEN):
                if inst.type_of(i) != inst.type_of(j) or inst.score(i, s.id) < inst.score(j, s.id):
                    continue
                a = dict(m.items())
                a[i], a[j] = (s.id, Seat.RESERVED), (s.id, Seat.OPEN)
                bad = Matching(a)
                reserved_sup = {x for x, (_, t) in a.items() if t is Seat.RESERVED} >= \
                    {x for x, (_, t) in m.items() if t is Seat.RESERVED}
                assert not is_or_verifiable(bad, prefs, inst).passed or (
                    to_standard(bad, inst) == to_standard(m, inst) and reserved_sup)


@SETTINGS
@given(markets())
def test_stable_report_consistency(market):
    inst, prefs = market
    rep = stability_report(sim_or(inst, prefs).matching, prefs, inst)
    assert rep.stable == (rep.individually_rational and rep.non_wasteful and rep.reserve_non_wasteful
                          and not rep.justified_envy_pairs)
    assert rep.stable


@SETTINGS
@given(markets())
def test_serialization_round_trip(market):
    inst, prefs = market
    assert instance_from_json(json.loads(json.dumps(instance_to_json(inst)))) == inst
    assert prefs_from_json(json.loads(json.dumps(prefs_to_json(prefs))), "simple") == prefs
