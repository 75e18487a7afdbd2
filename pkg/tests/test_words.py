import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pirough.errors import InvalidWordError
from pirough.words import (
    EMPTY,
    PiIndex,
    concat,
    degree,
    enumerate_words,
    parse_word,
    shuffle,
    theta,
    weight,
    word_to_str,
)


def test_degree_examples():
    assert degree(EMPTY, PiIndex((2.0, 1.0))) == 0
    assert degree((1, 2), PiIndex((2.0, 1.0))) == pytest.approx(1.5)
    assert degree((1, 1), PiIndex((2.0, 2.0))) == pytest.approx(1.0)


def test_degree_is_order_independent():
    ix = PiIndex((3.0, 7.0, 1.3))
    w = (1, 2, 3, 2, 1)
    assert all(degree(v, ix) == degree(w, ix) for v in itertools.permutations(w))


def test_weight_examples():
    ix = PiIndex.uniform(2.0, (1, 2))
    assert ix.p_list == (2.0, 1.0)
    assert weight((1, 2), ix) == 3
    assert weight(EMPTY, ix) == 0
    assert weight((1, 1), ix) == 2


def test_enumerate_examples():
    assert enumerate_words(PiIndex((2.0, 1.0)), 1.0) == [(), (1,), (2,), (1, 1)]
    assert set(enumerate_words(PiIndex.homogeneous(3.0, 1), 1.0)) == {(), (1,), (1, 1), (1, 1, 1)}
    assert set(enumerate_words(PiIndex.homogeneous(2.0, 2), 1.0)) == {(), (1,), (2,), (1, 1), (1, 2), (2, 1), (2, 2)}


def test_enumerate_includes_exact_cap_words():
    # 1/3 is not representable; three copies still have degree "1"
    ix = PiIndex.homogeneous(3.0, 2)
    assert all(len(w) <= 3 for w in enumerate_words(ix, 1.0))
    assert (1, 2, 1) in enumerate_words(ix, 1.0)


def test_canonical_order_is_grade_then_length_then_lex():
    ix = PiIndex.homogeneous(2.0, 2)
    ws = enumerate_words(ix, 1.5)
    keys = [(len(w), w) for w in ws]
    assert keys == sorted(keys)


def test_shuffle_examples():
    assert shuffle(EMPTY, (1, 2)) == {(1, 2): 1}
    assert shuffle((1,), (2,)) == {(1, 2): 1, (2, 1): 1}
    assert shuffle((1,), (1,)) == {(1, 1): 2}
    assert shuffle((1, 2), (3,)) == {(1, 2, 3): 1, (1, 3, 2): 1, (3, 1, 2): 1}


def test_theta_examples():
    assert theta(PiIndex.homogeneous(2.0, 2)) == pytest.approx(1.5)
    assert theta(PiIndex((2.0, 1.0))) == pytest.approx(1.5)
    assert theta(PiIndex((1.0, 1.0))) == pytest.approx(2.0)


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 2.5, 3.0, 4.0])
def test_theta_homogeneous_closed_form(p):
    assert theta(PiIndex.homogeneous(p, 2)) == pytest.approx((math.floor(p) + 1) / p)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        PiIndex((0.5,))
    with pytest.raises(ValueError):
        PiIndex.uniform(2.0, (3,))
    with pytest.raises(InvalidWordError):
        degree((3,), PiIndex.homogeneous(2.0, 2))
    with pytest.raises(InvalidWordError):
        degree((0,), PiIndex.homogeneous(2.0, 2))


def test_word_strings_roundtrip():
    for w in [EMPTY, (1,), (1, 2, 2)]:
        assert parse_word(word_to_str(w)) == w
    assert word_to_str(EMPTY) == "e"


words3 = st.lists(st.integers(1, 3), max_size=4).map(tuple)


@settings(max_examples=60, deadline=None)
@given(words3, words3, words3)
def test_shuffle_commutative_and_associative(a, b, c):
    assert shuffle(a, b) == shuffle(b, a)

    def sh_sum(left, right):
        out = {}
        for u, m in left.items():
            for v, n in right.items():
                for w, k in shuffle(u, v).items():
                    out[w] = out.get(w, 0) + m * n * k
        return out

    assert sh_sum(shuffle(a, b), {c: 1}) == sh_sum({a: 1}, shuffle(b, c))
    assert sum(shuffle(a, b).values()) == math.comb(len(a) + len(b), len(a))


@settings(max_examples=60, deadline=None)
@given(words3, words3, st.sampled_from([(1, 1, 1), (1, 2, 3), (2, 1, 1)]))
def test_grading_is_additive(u, v, k):
    ix = PiIndex.uniform(3.0, k)
    assert degree(concat(u, v), ix) == pytest.approx(degree(u, ix) + degree(v, ix), abs=1e-12)
    assert weight(concat(u, v), ix) == weight(u, ix) + weight(v, ix)


@pytest.mark.parametrize("ix", [PiIndex((2.0, 1.0)), PiIndex((2.5, 1.2, 3.0)), PiIndex.uniform(3.0, (1, 2))])
@pytest.mark.parametrize("cap", [0.5, 1.0, 1.7, 2.0])
def test_enumeration_closed_and_complete(ix, cap):
    ws = enumerate_words(ix, cap)
    s = set(ws)
    assert len(s) == len(ws)
    for w in ws:
        for m in range(len(w) + 1):
            assert w[:m] in s and w[m:] in s
    m_max = int(cap / ix.min_letter_degree + 1e-9)
    brute = {w for m in range(m_max + 1) for w in itertools.product(range(1, ix.d + 1), repeat=m) if degree(w, ix) <= cap + 1e-9}
    assert s == brute
    if ix.is_uniform:
        assert all(weight(w, ix) == round(ix.uniform_p * degree(w, ix)) for w in ws)
