import pytest

from pwlmbqi.fragment import (FragmentSpec, enumerate_fragments, fragment, fragment_filename,
                              write_fragments)
from pwlmbqi.smtlib import parse_script, print_script
from pwlmbqi.terms import BOOL, INT

SCRIPT = """
(declare-sort U 0)
(declare-fun f (Int) Int)
(declare-fun g (Int) Int)
(declare-fun h (U) Bool)
(declare-fun c () Int)
(assert (forall ((x Int)) (> (f x) (g x))))
(assert (> (g 0) c))
(assert (> (f 1) 3))
(assert (= c 2))
"""

def test_chosen_pair_keeps_mixed_and_single():
    s = parse_script(SCRIPT)
    fr = fragment(s, {"f", "g"})
    assert len(fr.assertions) == 3
    assert {d.name for d in fr.declarations} == {"f", "g", "c"}

def test_constants_do_not_qualify():
    s = parse_script(SCRIPT)
    fr = fragment(s, {"f", "g", "h"})
    # (= c 2) mentions no function symbol
    assert len(fr.assertions) == 3

def test_single_symbol_drops_mixed_assertion():
    s = parse_script(SCRIPT)
    fr = fragment(s, {"g"})
    assert len(fr.assertions) == 1

def test_enumeration_counts():
    s = parse_script(SCRIPT)
    got = {c: len(fr.assertions) for c, fr in enumerate_fragments(s, 2)}
    assert got == {("f", "g"): 3, ("f", "h"): 1, ("g", "h"): 1}
    assert len(enumerate_fragments(s, 1)) == 2
    assert enumerate_fragments(s, 4) == []
    assert len(enumerate_fragments(s, 1, cap=1)) == 1
    with pytest.raises(ValueError):
        enumerate_fragments(s, 0)

def test_three_functions_three_pairs():
    s = parse_script("(declare-fun f (Int) Int)(declare-fun g (Int) Int)(declare-fun h (Int) Int)"
                     "(assert (> (f 0) (g 0)))(assert (> (g 0) (h 0)))(assert (> (h 0) (f 0)))")
    combos = [c for c, _ in enumerate_fragments(s, 2)]
    assert combos == [("f", "g"), ("f", "h"), ("g", "h")]

def test_sorts_relaxed_and_idempotent():
    s = parse_script(SCRIPT)
    fr = fragment(s, {"h"})
    assert fr.assertions == []
    fr = fragment(parse_script(SCRIPT + "(assert (forall ((u U)) (h u)))"), {"h"})
    again = parse_script(print_script(fr))
    for d in again.declarations:
        assert all(x in (INT, BOOL) for x in d.arg_sorts + (d.sort,))
    assert fragment(again, {"h"}).assertions == again.assertions

def test_unknown_symbol_rejected():
    with pytest.raises(ValueError):
        fragment(parse_script(SCRIPT), {"nope"})
    with pytest.raises(ValueError):
        fragment(parse_script(SCRIPT), {"c"})
    with pytest.raises(ValueError):
        FragmentSpec(2, frozenset({"f"}), parse_script(SCRIPT))

def test_write_fragments(tmp_path):
    paths = write_fragments(parse_script(SCRIPT), 1, tmp_path, "prob")
    assert [p.name for p in paths] == ["prob.f.smt2", "prob.g.smt2"]
    assert fragment_filename("a", ("f", "g")) == "a.f-g.smt2"
    for p in paths:
        parse_script(p.read_text())
