import pytest

from reservematch import fixtures, oracle
from reservematch.audit import is_or_verifiable, is_ro_verifiable
from reservematch.choice import (PrecedenceSpec, SplitApplicants, c_backward_transfer,
                                 c_precedence, c_sim_flex, c_sim_or, c_sim_oro, c_sim_ro,
                                 c_sim_sep, c_star, check_choice_properties, precedence_rule)
from reservematch.core import Seat

from conftest import ids, seats, single


def golden_seats(name, key):
    g = fixtures.golden(name, key)
    return set(g["open"]), set(g["reserved"])


def test_sim_ro_ex1_matches_first_row():
    inst, s, everyone = single("ex1")
    assert seats(c_sim_ro(s, everyone, inst)) == (ids(2, 3), ids(1, 4))


def test_sim_ro_ex5():
    inst, s, everyone = single("ex5")
    res = c_sim_ro(s, everyone, inst)
    assert seats(res) == (ids(3, 4, 6), ids(1, 2, 5, 9, 10))
    # the brute-force RO-verifiable set is exactly this assignment
    assert oracle.ro_verifiable_choice_set(s, everyone, inst) == [res]


def test_empty_applicants():
    inst, s, _ = single("ex1")
    for rule in (c_sim_ro, c_sim_oro, c_sim_or, c_backward_transfer):
        assert rule(s, [], inst).chosen == frozenset()
    assert c_star(s, SplitApplicants(), inst).chosen == frozenset()
    assert c_sim_sep(s, SplitApplicants(), inst).chosen == frozenset()


def test_sim_oro_ex6():
    inst, s, everyone = single("ex6")
    assert seats(c_sim_oro(s, everyone, inst)) == golden_seats("ex6", "c_sim_oro")
    assert seats(c_sim_oro(s, everyone, inst)) == (ids(1, 2, 3, 4, 6, 7), ids(5, 9))


def test_sim_oro_few_applicants_all_open():
    inst, s, _ = single("ex6")
    res = c_sim_oro(s, ids(5, 9, 10), inst)
    assert seats(res) == (ids(5, 9, 10), set())


def test_sim_oro_ex1():
    inst, s, everyone = single("ex1")
    assert seats(c_sim_oro(s, everyone, inst)) == (ids(1, 4), ids(2, 5))


def test_sim_sep_ex4_wastes_reserve():
    inst, s, _ = single("ex4")
    res = c_sim_sep(s, SplitApplicants(ids(1, 2, 5, 6), ids(3, 4)), inst)
    assert seats(res) == golden_seats("ex4", "c_sim_sep")
    assert len(res.selected) == 4 < inst.school(s).capacity


def test_sim_sep_without_reserve_applicants():
    inst, s, everyone = single("ex4")
    res = c_sim_sep(s, SplitApplicants(everyone, ()), inst)
    assert seats(res) == (ids(1, 2), set())


def test_sim_flex_open_only_fills_by_priority():
    inst, s, everyone = single("ex4")
    res = c_sim_flex(s, SplitApplicants(everyone, ()), inst)
    assert seats(res) == (ids(1, 2, 3, 4, 5), set())


def test_sim_flex_ex4():
    inst, s, _ = single("ex4")
    res = c_sim_flex(s, SplitApplicants(ids(1, 2, 5, 6), ids(3, 4)), inst)
    assert seats(res) == (ids(1, 2, 5), ids(3, 4))


def test_sim_flex_reserve_only():
    inst, s, everyone = single("ex4")
    res = c_sim_flex(s, SplitApplicants((), everyone), inst)
    assert seats(res) == (set(), ids(1, 2, 4))


def test_star_ex4():
    inst, s, _ = single("ex4")
    res = c_star(s, SplitApplicants(ids(1, 2, 5, 6), ids(3, 4)), inst)
    assert seats(res) == golden_seats("ex4", "c_star")
    m = res.as_matching(inst.student_ids)
    prefs = {i: [s] for i in inst.student_ids}
    assert not is_ro_verifiable(m, prefs, inst).passed
    assert not is_or_verifiable(m, prefs, inst).passed


def test_star_ex8_type_m3_open_first():
    inst, s, _ = single("ex8")
    split = fixtures.golden("ex8", "split")
    res = c_star(s, SplitApplicants(split["open_first"], split["reserve_first"]), inst)
    assert res.selected == set(fixtures.golden("ex8", "c_star_selected"))
    assert "i11" in res.selected


def test_star_with_empty_reserve_group_is_sim_or():
    inst, s, everyone = single("ex5")
    assert c_star(s, SplitApplicants(everyone, ()), inst) == c_sim_or(s, everyone, inst)


def test_star_with_empty_open_group_is_sim_ro():
    for name in ("ex1", "ex5", "ex6", "ex8"):
        inst, s, everyone = single(name)
        assert c_star(s, SplitApplicants((), everyone), inst) == c_sim_ro(s, everyone, inst)


def test_sim_or_ex5():
    inst, s, everyone = single("ex5")
    assert seats(c_sim_or(s, everyone, inst)) == golden_seats("ex5", "c_sim_or")


def test_sim_or_ex1_matches_fourth_row():
    inst, s, everyone = single("ex1")
    assert seats(c_sim_or(s, everyone, inst)) == (ids(1, 4), ids(2, 5))


def test_sim_or_capacity_covers_everyone():
    inst, s, _ = single("ex5")
    res = c_sim_or(s, ids(6, 7, 8, 10), inst)
    assert seats(res) == (ids(6, 7, 8, 10), set())


def test_precedence_open_seats_first():
    inst, s, everyone = single("ex7")
    spec = PrecedenceSpec(fixtures.golden("ex7", "precedence"))
    res = c_precedence(s, spec, everyone, inst)
    assert seats(res) == (ids(1, 2, 3, 4), ids(5, 7))
    assert res.selected == c_sim_or(s, everyone, inst).selected


def test_precedence_single_applicant_first_seat():
    inst, s, _ = single("ex7")
    spec = PrecedenceSpec(["m2", "o", "o", "o", "m1", "m3"])
    assert seats(c_precedence(s, spec, ["i5"], inst)) == (set(), {"i5"})
    assert seats(c_precedence(s, spec, ["i1"], inst)) == ({"i1"}, set())
    assert c_precedence(s, spec, [], inst).chosen == frozenset()


def test_precedence_spec_must_match_quotas():
    inst, s, everyone = single("ex7")
    with pytest.raises(ValueError):
        c_precedence(s, PrecedenceSpec(["o"] * 6), everyone, inst)
    with pytest.raises(ValueError):
        c_precedence(s, PrecedenceSpec(["o", "o", "o", "m1", "m2"]), everyone, inst)


def test_precedence_reserves_first_differs_from_sim_ro():
    inst, s, _ = single("ex9")
    a = fixtures.golden("ex9", "subset_a")
    b = fixtures.golden("ex9", "subset_b")
    assert c_sim_ro(s, a, inst).selected == set(fixtures.golden("ex9", "c_sim_ro_a"))
    assert c_sim_ro(s, b, inst).selected == set(fixtures.golden("ex9", "c_sim_ro_b"))
    spec = PrecedenceSpec(fixtures.golden("ex9", "precedence"))
    picked = c_precedence(s, spec, b, inst).selected
    assert "i6" in picked and picked != c_sim_ro(s, b, inst).selected


def test_backward_transfer_contrast():
    inst, s, everyone = single("ex-bt")
    bt = c_backward_transfer(s, everyone, inst)
    assert seats(bt) == golden_seats("ex-bt", "c_backward_transfer")
    assert seats(c_sim_or(s, everyone, inst)) == golden_seats("ex-bt", "c_sim_or")


def test_backward_transfer_ex6_selects_like_sim_or():
    inst, s, everyone = single("ex6")
    bt = c_backward_transfer(s, everyone, inst)
    sim_or = c_sim_or(s, everyone, inst)
    assert bt.selected == sim_or.selected
    assert sim_or.reserved <= bt.reserved


def test_backward_transfer_single_type_all_admitted():
    inst, s, _ = single("ex5")
    # q^o = 3 and q^{m1} = 2 leave room for all four type-m1 students
    assert c_backward_transfer(s, ids(1, 2, 3, 4), inst).selected == ids(1, 2, 3, 4)


def test_split_must_be_disjoint():
    with pytest.raises(ValueError):
        SplitApplicants({"i1"}, {"i1", "i2"})


def test_properties_sim_ro_ex1():
    inst, s, everyone = single("ex1")
    rep = check_choice_properties(c_sim_ro, s, everyone, inst)
    assert rep.as_dict() == {"substitutable": True, "q_acceptant": True, "stable": True,
                             "ro_verifiable": True, "or_verifiable": False}


def test_properties_sim_or_ex5():
    inst, s, everyone = single("ex5")
    rep = check_choice_properties(c_sim_or, s, everyone, inst)
    assert rep.as_dict() == {"substitutable": True, "q_acceptant": True, "stable": True,
                             "ro_verifiable": False, "or_verifiable": True}


def test_properties_sim_oro_ex6():
    inst, s, everyone = single("ex6")
    rep = check_choice_properties(c_sim_oro, s, everyone, inst)
    assert rep.stable and not rep.or_verifiable and not rep.ro_verifiable


def test_properties_guard():
    inst, s, _ = single("ex9")
    with pytest.raises(ValueError, match="guard"):
        check_choice_properties(c_sim_ro, s, [f"i{k}" for k in range(1, 14)], inst)


def test_precedence_rule_wrapper():
    inst, s, everyone = single("ex7")
    rule = precedence_rule(PrecedenceSpec(fixtures.golden("ex7", "precedence")))
    assert rule(s, everyone, inst) == c_precedence(s, PrecedenceSpec(fixtures.golden("ex7", "precedence")), everyone, inst)


def test_choice_result_problems():
    inst, s, everyone = single("ex1")
    res = c_sim_ro(s, everyone, inst)
    assert res.problems(inst, everyone) == []
    assert res.seats["i1"] is Seat.RESERVED
