import pytest

from dynlll.rng import DrawStream


def test_same_seed_same_stream():
    a = DrawStream(1234)
    b = DrawStream(1234)
    assert [a.word() for _ in range(100)] == [b.word() for _ in range(100)]


def test_different_seeds_differ():
    a = DrawStream(1)
    b = DrawStream(2)
    assert [a.word() for _ in range(8)] != [b.word() for _ in range(8)]


def test_below_range_and_word_count():
    rng = DrawStream(7)
    for bound in (1, 2, 3, 17, 1 << 40):
        for _ in range(50):
            assert 0 <= rng.below(bound) < bound
    assert rng.words_drawn == 5 * 50


def test_below_rejects_nonpositive():
    rng = DrawStream(0)
    with pytest.raises(ValueError):
        rng.below(0)


def test_choice_consumes_one_word():
    rng = DrawStream(9)
    seq = ["a", "b", "c"]
    before = rng.words_drawn
    assert rng.choice(seq) in seq
    assert rng.words_drawn == before + 1


def test_below_matches_word_mod():
    a = DrawStream(5)
    b = DrawStream(5)
    for bound in (3, 10, 1000):
        assert a.below(bound) == b.word() % bound
