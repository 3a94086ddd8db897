"""Dictionary loading, lookup and lemmatization fallbacks."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from okb.lexicon import (
    LexiconError,
    builtin_dictionary,
    load_lexicon,
)

GOOD_ROWS = [
    "мати\tмати\tNOUN\tcase=nom,number=sg,gender=f",
    "мати\tмати\tVERB",
    "синій\tсиній\tADJ\tcase=nom,number=sg,gender=m",
    "столу\tстіл\tNOUN\tcase=gen,number=sg,gender=m",
    "стіл\tстіл\tNOUN\tcase=nom,number=sg,gender=m",
]


def test_load_counts_and_sources():
    lex = load_lexicon(GOOD_ROWS, source="mini")
    assert len(lex) == 5
    assert lex.sources == ["mini"]
    assert lex.problems == []


def test_lookup_keeps_file_order_and_is_case_insensitive():
    lex = load_lexicon(GOOD_ROWS, source="mini")
    entries = lex.lookup("Мати")
    assert [e.pos for e in entries] == ["NOUN", "VERB"]
    assert entries[0].feature("gender") == "f"
    assert entries[0].feature("missing") is None


def test_lookup_returns_independent_list():
    lex = load_lexicon(GOOD_ROWS, source="mini")
    lex.lookup("мати").clear()
    assert len(lex.lookup("мати")) == 2


def test_lemmatize_prefers_first_entry():
    lex = load_lexicon(GOOD_ROWS, source="mini")
    assert lex.lemmatize("мати") == ("мати", "NOUN")
    assert lex.lemmatize("СТОЛУ") == ("стіл", "NOUN")


def test_lemmatize_unknown_abbreviation_keeps_casing():
    lex = load_lexicon(GOOD_ROWS, source="mini")
    assert lex.lemmatize("ПК") == ("ПК", "ABBR")
    assert lex.lemmatize("ЕОМ") == ("ЕОМ", "ABBR")
    assert lex.lemmatize("HTTPS") == ("HTTPS", "ABBR")


def test_lemmatize_unknown_word_casefolds_to_noun():
    lex = load_lexicon(GOOD_ROWS, source="mini")
    assert lex.lemmatize("Невідоме") == ("невідоме", "NOUN")
    # too long, too short, or not all-uppercase: not an abbreviation
    assert lex.lemmatize("АБВГДЕЖ") == ("абвгдеж", "NOUN")
    assert lex.lemmatize("Я") == ("я", "NOUN")
    assert lex.lemmatize("МіксКейс") == ("мікскейс", "NOUN")


def test_duplicate_rows_collapse():
    lex = load_lexicon(GOOD_ROWS + GOOD_ROWS, source="mini")
    assert len(lex) == 5


def test_blank_lines_and_comments_skipped():
    rows = ["", "# comment", "  ", "стіл\tстіл\tNOUN"]
    lex = load_lexicon(rows, source="mini")
    assert len(lex) == 1
    assert lex.problems == []


@pytest.mark.parametrize(
    "row,fragment",
    [
        ("одне_поле", "tab-separated fields"),
        ("а\tб\tNOPE", "pos tag"),
        ("а\tб\tNOUN\tcase=xyz", "feature"),
        ("а\tб\tNOUN\tfoo=bar", "feature"),
        ("а\tб\tNOUN\tcase", "feature"),
    ],
)
def test_malformed_rows_become_problems(row, fragment):
    lex = load_lexicon(["стіл\tстіл\tNOUN", row], source="bad")
    assert len(lex) == 1
    assert len(lex.problems) == 1
    problem = lex.problems[0]
    assert problem.source == "bad"
    assert problem.line == 2
    assert fragment in problem.message


def test_all_rows_bad_is_an_error():
    with pytest.raises(LexiconError, match="empty"):
        load_lexicon(["just-one-column"], source="bad")
    with pytest.raises(LexiconError, match="empty"):
        load_lexicon([], source="bad")


def test_find_form():
    lex = load_lexicon(GOOD_ROWS, source="mini")
    assert lex.find_form("стіл", "NOUN", case="gen") == "столу"
    assert lex.find_form("стіл", "NOUN", case="nom", number="sg") == "стіл"
    assert lex.find_form("стіл", "NOUN", case="dat") is None
    assert lex.find_form("немає", "NOUN", case="nom") is None


def test_merge_keeps_order_and_dedups():
    first = load_lexicon(["стіл\tстіл\tNOUN"], source="a")
    second = load_lexicon(["стіл\tстіл\tNOUN", "мати\tмати\tVERB"], source="b")
    merged = first.merge(second)
    assert len(merged) == 2
    assert merged.sources == ["a", "b"]
    assert merged.lemmatize("мати") == ("мати", "VERB")
    # the originals are untouched
    assert len(first) == 1


def test_merge_first_lexicon_wins_surface_order():
    first = load_lexicon(["мати\tмати\tVERB"], source="a")
    second = load_lexicon(["мати\tмати\tNOUN\tcase=nom"], source="b")
    assert first.merge(second).lemmatize("мати") == ("мати", "VERB")
    assert second.merge(first).lemmatize("мати") == ("мати", "NOUN")


def test_equality_covers_entries_and_problems():
    a = load_lexicon(GOOD_ROWS, source="mini")
    b = load_lexicon(GOOD_ROWS, source="mini")
    assert a == b
    c = load_lexicon(GOOD_ROWS[:-1], source="mini")
    assert a != c


def test_builtin_dictionary_is_clean():
    lex = builtin_dictionary()
    assert len(lex) > 50
    assert lex.problems == []
    assert lex.lemmatize("системи") == ("система", "NOUN")


@given(st.text(alphabet=st.characters(whitelist_categories=["Lu", "Ll"]), min_size=1, max_size=12))
def test_lemmatize_total_on_unknown_words(surface):
    lex = load_lexicon(["стіл\tстіл\tNOUN"], source="mini")
    lemma, pos = lex.lemmatize(surface)
    if surface.casefold() == "стіл":
        assert (lemma, pos) == ("стіл", "NOUN")
    elif 2 <= len(surface) <= 6 and surface.isalpha() and surface.isupper():
        assert (lemma, pos) == (surface, "ABBR")
    else:
        assert (lemma, pos) == (surface.casefold(), "NOUN")
