"""The nine acceptance criteria, one test each, all with exact equality.

``conftest.py`` prints a PASS/FAIL line per criterion at the end of the run.
"""
import io
import random

import golden
from oracles import dyck_paths, involutions, motzkin2_paths, recurrence_terms
from successionrules.cli import run
from successionrules.compiler import (
    compile_generic,
    eliminate_jumps,
    positivity_check,
    to_extended_rule,
    to_ordinary_rule,
)
from successionrules.dsl import parse_parametric, parse_rule, print_parametric, print_rule
from successionrules.numseq import Recurrence, eval_sequence
from successionrules.parametric import (
    catalan_marked_rule,
    holonomic_to_level_indexed,
    involution_rule,
    motzkin2_rule,
    parametric_totals,
)
from successionrules.rulecore import RuleKind, classify, is_consistent
from successionrules.treeengine import production_matrix, totals


def cli_compile(*argv):
    out, err = io.StringIO(), io.StringIO()
    assert run(["compile", *argv], out, err) == 0, err.getvalue()
    return parse_rule(out.getvalue())


def test_criterion_1_golden_pipeline_first_example():
    extended = cli_compile("--coeffs", "3,2,-1", "--stage", "extended")
    jumpfree = cli_compile("--coeffs", "3,2,-1", "--stage", "jumpfree")
    assert extended == parse_rule(golden.EXTENDED_3_2_M1)
    assert jumpfree == parse_rule(golden.JUMPFREE_3_2_M1)
    expected = [1, 3, 11, 38, 133, 464, 1620, 5655]
    assert totals(extended, 7) == expected
    assert totals(jumpfree, 7) == expected


def test_criterion_2_golden_pipeline_second_example():
    jumpfree = cli_compile("--coeffs", "5,-6,2", "--stage", "jumpfree")
    ordinary = cli_compile("--coeffs", "5,-6,2", "--stage", "ordinary")
    assert jumpfree == parse_rule(golden.JUMPFREE_5_M6_2)
    assert ordinary == parse_rule(golden.ORDINARY_5_M6_2)
    comp = to_ordinary_rule(Recurrence((5, -6, 2)))
    assert (comp.qr.q, comp.qr.r) == ((1, 0), (4, 1))
    expected = [1, 5, 19, 67, 231, 791, 2703]
    assert totals(jumpfree, 6) == expected
    assert totals(ordinary, 6) == expected


def test_criterion_3_generic_initial_conditions():
    extended = cli_compile("--coeffs", "3,2,-1", "--init", "2,3", "--stage", "extended")
    ordinary = cli_compile("--coeffs", "3,2,-1", "--init", "2,3", "--stage", "ordinary")
    assert extended == parse_rule(golden.EXTENDED_GENERIC)
    assert ordinary == parse_rule(golden.ORDINARY_GENERIC)
    expected = [1, 2, 3, 12, 40, 141, 491, 1715]
    assert totals(extended, 7) == expected
    assert totals(ordinary, 7) == expected


def test_criterion_4_k2_discriminant_sweep():
    # a_2 = 0 leaves the order-1 recurrence f_n = a_1 f_{n-1}
    cases = 0
    wrong = []
    for a1 in range(1, 11):
        for a2 in range(-30, 31):
            rec = Recurrence((a1,) if a2 == 0 else (a1, a2))
            if (positivity_check(rec) is not None) != (a1 * a1 + 4 * a2 >= 0):
                wrong.append((a1, a2))
            cases += 1
    assert cases == 10 * 61
    assert wrong == []


def _random_vectors(count, seed=20240501):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        k = rng.randint(1, 5)
        coeffs = [rng.randint(1, 9)] + [rng.randint(-9, 9) for _ in range(k - 1)]
        if coeffs[-1] != 0:
            out.append(tuple(coeffs))
    return out


def test_criterion_5_oracle_equivalence_suite():
    vectors = _random_vectors(500)
    witnesses = negative_sequences = 0
    for coeffs in vectors:
        rec = Recurrence(coeffs)
        expected = eval_sequence(rec, 15)
        assert expected == recurrence_terms(coeffs, 15)
        assert totals(to_extended_rule(rec), 15) == expected, coeffs
        assert totals(eliminate_jumps(rec), 15) == expected, coeffs
        negative_sequences += min(expected) < 0
        w = positivity_check(rec)
        if w is None:
            continue
        witnesses += 1
        comp = to_ordinary_rule(rec, w.qr)
        rule = comp.rule
        assert comp.ordinary, coeffs
        assert not rule.has_marks(), coeffs
        assert all(b.multiplicity >= 0 for p in rule.productions.values() for b in p.branches)
        assert is_consistent(rule), coeffs
        got = totals(rule, 15)
        assert got == expected, coeffs
        assert min(got) >= 1, coeffs
    # the sample must exercise both sides of the test and signed counting
    assert witnesses > 0 and witnesses < len(vectors)
    assert negative_sequences > 0


def test_criterion_6_marked_rule_semantics():
    catalan = parametric_totals(catalan_marked_rule(), 4)
    assert classify(catalan_marked_rule()) is RuleKind.MARKED
    assert catalan == [dyck_paths(n + 1) for n in range(5)] == [1, 2, 5, 14, 42]
    assert parametric_totals(motzkin2_rule(), 6) == [motzkin2_paths(n) for n in range(7)]


def test_criterion_7_holonomic_example():
    expected = [1, 1, 2, 4, 10, 26, 76, 232]
    assert involutions(7) == expected
    jumping = parse_parametric(golden.INVOLUTIONS_JUMPING)
    assert parametric_totals(jumping, 7) == expected
    assert parametric_totals(involution_rule(), 7) == expected
    assert holonomic_to_level_indexed([[1], [-1, 1]]) == jumping


def test_criterion_8_transfer_matrix_agreement():
    for text in (golden.JUMPFREE_3_2_M1, golden.ORDINARY_5_M6_2, golden.POWERS_OF_TWO):
        rule = parse_rule(text)
        pm = production_matrix(rule)
        assert pm.level_totals(rule.axiom, 12) == totals(rule, 12)


def test_criterion_9_dsl_round_trip():
    finite = [
        to_extended_rule(Recurrence((3, 2, -1))),
        eliminate_jumps(Recurrence((3, 2, -1))),
        eliminate_jumps(Recurrence((5, -6, 2))),
        to_ordinary_rule(Recurrence((5, -6, 2))).rule,
        to_extended_rule(Recurrence((3, 2, -1), (2, 3))),
        compile_generic(Recurrence((3, 2, -1), (2, 3))),
    ]
    for rule in finite:
        assert parse_rule(print_rule(rule)) == rule
    for rule in (holonomic_to_level_indexed([[1], [-1, 1]]), involution_rule()):
        assert parse_parametric(print_parametric(rule)) == rule
