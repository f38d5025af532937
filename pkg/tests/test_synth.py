import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pbsdiagrams.diagram import Neg, Pbs, congruent, contains, identity
from pbsdiagrams.pathsem import Pol, path_table
from pbsdiagrams.synth import (
    Inadmissible,
    WordFamily,
    check_admissible,
    family_of_table,
    format_family,
    parse_family,
    synthesize,
)

H, V = Pol.H, Pol.V


def realises(d, f):
    t = path_table(d)
    return all(
        t[k].word == f.word(*k) and (t[k].out_pol, t[k].out_pos) == k for k in f.normalized()
    )


def test_abab():
    f = WordFamily.from_dict(1, {(V, 0): "abab"})
    assert realises(synthesize(f), f)


def test_all_empty_is_identity():
    for n in (1, 3):
        d = synthesize(WordFamily(n, {}))
        assert congruent(d, identity(n))


def test_single_letter():
    f = WordFamily.from_dict(2, {(V, 0): "a"})
    d = synthesize(f)
    assert realises(d, f) and contains(d, Pbs) and not contains(d, Neg)


def test_admissibility_examples():
    assert check_admissible(WordFamily.from_dict(1, {(V, 0): "abab"})) == (True, False)
    assert check_admissible(WordFamily.from_dict(1, {(V, 0): "ab", (H, 0): "ba"})) == (True, True)
    assert check_admissible(WordFamily.from_dict(1, {(V, 0): "aaa"})) == (False, False)


def test_inadmissible_reports_label():
    with pytest.raises(Inadmissible) as exc:
        synthesize(WordFamily.from_dict(2, {(V, 0): "ab", (H, 1): "bb"}))
    assert exc.value.label == "b"
    with pytest.raises(Inadmissible) as exc:
        synthesize(WordFamily.from_dict(1, {(V, 0): "abab"}), neg_free=True)
    assert exc.value.label == "a"


@pytest.mark.parametrize(
    "words",
    [
        {(V, 0): "aa"},
        {(H, 0): "aa"},
        {(H, 0): "abca"},
        {(V, 0): "a", (H, 0): "a"},
        {(H, 0): "a", (V, 0): "a"},
        {(V, 0): "ab", (V, 1): "ba"},
        {(H, 0): "ab", (H, 1): "ba"},
        {(V, 0): "ab", (H, 1): "ba"},
        {(H, 0): "ab", (V, 1): "cab"},
    ],
)
def test_gadget_cases(words):
    f = WordFamily.from_dict(2, words)
    assert realises(synthesize(f), f)
    if check_admissible(f)[1]:
        d = synthesize(f, neg_free=True)
        assert realises(d, f) and not contains(d, Neg)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_roundtrip(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    slots = [(c, p) for c in (H, V) for p in range(n)]
    words = {s: [] for s in slots}
    for i in range(int(rng.integers(0, 7))):
        for _ in range(int(rng.integers(1, 3))):
            w = words[slots[int(rng.integers(len(slots)))]]
            w.insert(int(rng.integers(len(w) + 1)), f"g{i}")
    f = WordFamily(n, {k: tuple(v) for k, v in words.items()})
    assert realises(synthesize(f), f)


def test_family_text_roundtrip():
    f = parse_family("V,0: abab\nH,0: -  # empty\n")
    assert f.n == 1 and f.word(V, 0) == tuple("abab")
    assert parse_family(format_family(f)).normalized() == f.normalized()
    d = synthesize(f)
    assert family_of_table(path_table(d)).normalized() == f.normalized()
    with pytest.raises(ValueError):
        parse_family("V,0: ab\nV,0: c\n")
    with pytest.raises(ValueError):
        parse_family("X0: ab\n")
