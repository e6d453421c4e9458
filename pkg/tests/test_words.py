import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import words
from treefree.errors import ParseError
from treefree.words import (
    EMPTY,
    Alphabet,
    Word,
    concat,
    conjugate,
    cyclic_power_membership,
    cyclic_reduce,
    invert,
    is_conjugate,
    shortlex_compare,
    translation_length,
)

F = Alphabet(["x", "y", "z"])


def w(text):
    return F.parse(text)


def power_oracle(word, s):
    for k in range(-len(word), len(word) + 1):
        if s**k == word:
            return k
    return None


def conjugacy_oracle(a, b, max_len):
    return any(conjugate(a, h) == b for h in F.words_up_to(max_len))


@pytest.mark.parametrize(
    "a, b, expected",
    [("x y^-1", "y z^-1", "x z^-1"), ("x", "x^-1", "1"), ("x y^-1", "1", "x y^-1")],
)
def test_concat(a, b, expected):
    assert concat(w(a), w(b)) == w(expected)


@pytest.mark.parametrize("a, expected", [("x y^-1", "y x^-1"), ("1", "1"), ("y z^-1", "z y^-1")])
def test_invert(a, expected):
    assert invert(w(a)) == w(expected)


def test_conjugate_examples():
    assert conjugate(w("x y^-1"), EMPTY) == w("x y^-1")
    # y^-1 (x y^-1) y = y^-1 x
    assert conjugate(w("x y^-1"), w("y")) == w("y^-1 x")
    assert conjugate(EMPTY, w("x z")) == EMPTY


def test_cyclic_reduce_examples():
    assert cyclic_reduce(w("x y^-1")) == (EMPTY, w("x y^-1"))
    assert cyclic_reduce(w("z x y^-1 z^-1")) == (w("z"), w("x y^-1"))
    assert cyclic_reduce(EMPTY) == (EMPTY, EMPTY)


def test_is_conjugate_examples():
    assert not is_conjugate(w("x y^-1"), w("y z^-1"))
    assert is_conjugate(w("x y^-1"), w("y^-1 x"))


def test_translation_length_examples():
    assert translation_length(w("x y^-1")) == 2
    assert translation_length(EMPTY) == 0
    assert translation_length(w("z x y^-1 z^-1")) == 2


def test_cyclic_power_membership_examples():
    s = w("x y^-1")
    assert cyclic_power_membership(w("x y^-1 x y^-1"), s) == 2
    assert cyclic_power_membership(EMPTY, s) == 0
    assert cyclic_power_membership(w("x"), s) is None
    assert power_oracle(w("x"), s) is None
    with pytest.raises(ValueError):
        cyclic_power_membership(w("x"), EMPTY)


def test_shortlex_examples():
    assert shortlex_compare(EMPTY, w("x")) == -1
    assert shortlex_compare(w("x"), w("x")) == 0
    assert shortlex_compare(w("x"), w("x^-1")) == -1
    assert shortlex_compare(w("y"), w("x x")) == -1


def test_parse_and_format():
    assert w("x y^-1 z^3") == Word([1, -2, 3, 3, 3])
    assert F.format(w("x x^-1 y")) == "y"
    assert F.format(EMPTY) == "1"
    assert F.format(w("x x y^-1")) == "x^2 y^-1"
    with pytest.raises(ParseError):
        F.parse("x^0")
    with pytest.raises(ParseError):
        F.parse("x^a")
    with pytest.raises(ParseError):
        F.parse("q")


def test_alphabet_rejects_duplicates():
    with pytest.raises(ValueError):
        Alphabet(["x", "x"])
    with pytest.raises(ValueError):
        Alphabet([])


def test_words_up_to_is_shortlex_and_complete():
    got = list(F.words_up_to(2))
    assert len(got) == 1 + 6 + 30
    assert got == sorted(got, key=lambda v: (len(v), [(abs(c), c < 0) for c in v.codes]))
    assert len(set(got)) == len(got)


def test_letters_roundtrip():
    v = w("x y^-1")
    assert v.letters == ((0, 1), (1, -1))
    assert Word.from_letters(v.letters) == v


@given(words())
def test_reduction_idempotent(u):
    assert Word(u.codes) == u
    assert Word(u.codes).codes == u.codes
    assert all(u.codes[i] != -u.codes[i + 1] for i in range(len(u) - 1))


@given(words())
def test_inverse_cancels(u):
    assert concat(u, invert(u)) == EMPTY
    assert invert(invert(u)) == u


@given(words(), words())
def test_inverse_of_product(a, b):
    assert invert(concat(a, b)) == concat(invert(b), invert(a))


@given(words(), words(max_size=6))
def test_conjugates_are_conjugate(u, h):
    v = conjugate(u, h)
    assert is_conjugate(u, v)
    assert is_conjugate(v, u)
    assert translation_length(v) == translation_length(u)


@given(words(max_size=4), words(max_size=4))
def test_is_conjugate_matches_brute_force(a, b):
    # conjugating cyclic cores needs conjugators no longer than the inputs
    assert is_conjugate(a, b) == conjugacy_oracle(a, b, 4)


@given(words(max_size=8), words(max_size=8), words(max_size=8))
def test_conjugacy_is_transitive(a, b, c):
    if is_conjugate(a, b) and is_conjugate(b, c):
        assert is_conjugate(a, c)
    assert is_conjugate(a, a)


@given(words(max_size=8), st.integers(1, 4))
def test_translation_length_of_powers(u, n):
    assert translation_length(u**n) == n * translation_length(u)


@given(words(max_size=8))
def test_cyclic_decomposition_invariants(u):
    c, r = cyclic_reduce(u)
    assert concat(concat(c, r), invert(c)) == u
    if r:
        assert r.codes[0] != -r.codes[-1]
    assert translation_length(u) == len(r)
    assert (translation_length(u) == 0) == (not u)


@given(words(max_size=6), st.integers(-4, 4))
def test_power_membership_of_powers(s, k):
    assume(s)
    assert cyclic_power_membership(s**k, s) == k


@given(words(max_size=8), words(max_size=4))
def test_power_membership_matches_brute_force(u, s):
    assume(s)
    assert cyclic_power_membership(u, s) == power_oracle(u, s)
