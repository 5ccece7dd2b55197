import random
import re

import pytest

from mytranslit.latin_analysis import (
    NonLatinInput,
    analyze,
    chunk,
    default_inventory,
    parse_inventory,
    tokenize,
)

from .strategies import random_latin


def texts(gs):
    return [g.text for g in gs]


def test_tokenize_theory():
    assert texts(tokenize("THEORY")) == ["TH", "E", "O", "R", "Y"]


def test_tokenize_single_letter():
    assert texts(tokenize("A")) == ["A"]


def test_tokenize_racket_keeps_ck():
    assert texts(tokenize("RACKET")) == ["R", "A", "CK", "E", "T"]


def test_tokenize_is_case_insensitive():
    assert texts(tokenize("theory")) == texts(tokenize("Theory"))


def test_tokenize_matches_regex_longest_match():
    inv = default_inventory()
    # independent oracle: an alternation of the inventory sorted longest first
    alts = sorted((m for m in inv.multigraphs if m not in inv.final_only), key=len, reverse=True)
    pattern = re.compile("|".join(map(re.escape, alts)) + "|.")
    for word in ["THEORY", "RACKET", "CHOCOLATE", "SHEEP", "BOOKKEEPER", "WHEAT", "QUICK"]:
        assert texts(tokenize(word)) == pattern.findall(word), word


def test_tokenize_rejects_non_latin():
    with pytest.raises(NonLatinInput) as exc:
        tokenize("CAFÉ")
    assert exc.value.char == "É"


def test_silent_final_e():
    gs = tokenize("JUNE")
    assert gs[-1].klass == "silent-final-E"
    assert tokenize("BE")[-1].klass == "vocalic"


def test_chunk_june():
    (c,) = analyze("JUNE")
    assert texts(c.onset) == ["J"]
    assert texts(c.nucleus) == ["U"]
    assert texts(c.coda) == ["N", "E"]
    assert "silent_E_final" in c.flags


def test_chunk_film_splits_the_sonorant_coda():
    first, second = analyze("FILM")
    assert (first.onset_text(), first.nucleus_text(), first.coda_text()) == ("F", "I", "")
    assert second.onset_text() == "L" and second.nucleus == [] and second.coda_text() == "M"
    assert "syllabic_L" in second.flags


def test_chunk_single_vowel():
    (c,) = analyze("A")
    assert c.onset == []
    assert {"word_initial", "word_final"} <= c.flags


def test_doubled_consonant_flag():
    chunks = analyze("BATTERY")
    assert "doubled_consonant_follows" in chunks[0].flags
    assert "doubled_consonant_follows" in analyze("RACKET")[0].flags


def test_before_r_flag():
    chunks = analyze("CAMERA")
    assert "before_R" in chunks[1].flags


def test_y_is_consonantal_word_initially():
    chunks = analyze("YALE")
    assert chunks[0].onset_text() == "Y"
    assert analyze("JURY")[-1].nucleus_text() == "Y"


def test_onset_whitelist_from_pack():
    inv = parse_inventory(["@onsets\tST TR", "@multigraph\tconsonantal\tTH"])
    chunks = chunk(tokenize("ASTRA", inv), inv)
    assert chunks[0].coda_text() == "S"
    assert chunks[1].onset_text() == "TR"


@pytest.mark.parametrize("seed", range(5))
def test_chunking_is_lossless_and_flags_empty_onsets(seed):
    rng = random.Random(seed)
    for _ in range(200):
        word = random_latin(rng)
        chunks = analyze(word)
        assert "".join(c.text for c in chunks) == word
        for i, c in enumerate(chunks):
            if not c.onset:
                assert "word_initial" in c.flags or "hiatus_start" in c.flags
            if not c.nucleus:
                assert c.flags & {"syllabic_L", "syllabic_R", "epenthetic"}
        assert analyze(word)[0].flags == chunks[0].flags
