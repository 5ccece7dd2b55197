import random

import pytest

from mytranslit.corpus import default_corpus
from mytranslit.script_model import (
    GLOTTAL_NUCLEI,
    NASAL_NUCLEI,
    AlignmentPair,
    BurmeseSyllable,
    GapInAlignment,
    InvalidSyllable,
    KillerCoda,
    OnsetUnit,
    Rhyme,
    UnparseableText,
    compose,
    decompose,
    render_alignment_notation,
    syllable,
    valid_rhymes,
)

from .strategies import random_syllables


def test_compose_empty():
    assert compose([]) == ""


def test_compose_meter():
    syls = [syllable("မ", "i", "open", "low"), syllable("တ", "a", "open", "low")]
    assert compose(syls) == "မီတာ"


def test_compose_web_killer_coda():
    assert compose([syllable("ဝ", "ɛ", "glottal", killers=["ဘ"])]) == "ဝက်ဘ်"


def test_decompose_empty():
    assert decompose("") == []


def test_decompose_june():
    (syl,) = decompose("ဇွန်")
    assert syl.onset.base_letter == OnsetUnit.from_text("ဇ").base_letter
    assert syl.onset.medials == ("wa",)
    assert (syl.rhyme.nucleus, syl.rhyme.ending, syl.rhyme.tone) == ("a", "nasal", "low")


def test_medials_are_stored_in_canonical_order():
    unit = OnsetUnit("ka", ("ha", "wa"))
    assert unit.medials == ("wa", "ha")
    with pytest.raises(InvalidSyllable):
        OnsetUnit("ka", ("ya", "ra"))


def test_glottal_rhyme_ignores_tone():
    assert Rhyme("a", "glottal", "high").tone == "low"


@pytest.mark.parametrize("nucleus", sorted({"e", "ɛ", "o", "ɔ"}))
def test_nasal_nucleus_restriction(nucleus):
    assert nucleus not in NASAL_NUCLEI
    with pytest.raises(InvalidSyllable):
        compose([BurmeseSyllable(OnsetUnit("ka"), Rhyme(nucleus, "nasal"))])


@pytest.mark.parametrize("nucleus", sorted({"u", "e", "ɔ"}))
def test_glottal_nucleus_restriction(nucleus):
    assert nucleus not in GLOTTAL_NUCLEI
    with pytest.raises(InvalidSyllable):
        compose([BurmeseSyllable(OnsetUnit("ka"), Rhyme(nucleus, "glottal"))])


def test_every_table_rhyme_respects_the_nucleus_lists():
    for r in valid_rhymes():
        if r.ending == "nasal":
            assert r.nucleus in NASAL_NUCLEI
        if r.ending == "glottal":
            assert r.nucleus in GLOTTAL_NUCLEI


def test_killed_nasal_cannot_nasalize_a_forbidden_nucleus():
    with pytest.raises(InvalidSyllable):
        compose([BurmeseSyllable(OnsetUnit("ka"), Rhyme("e"), KillerCoda((OnsetUnit("na"),)))])
    with pytest.raises(UnparseableText):
        decompose("ကေန်")


def test_round_trip_random_syllables():
    rng = random.Random(7)
    for _ in range(1000):
        syls = random_syllables(rng, rng.randint(1, 4))
        assert decompose(compose(syls)) == syls


def test_compose_is_stable():
    syls = [syllable("ဘ", "ɛ", "glottal"), syllable("ထ", "ə"), syllable("ရ", "i")]
    assert compose(syls) == compose(list(syls)) == "ဘက်ထရီ"


def test_unparseable_reports_byte_offset():
    with pytest.raises(UnparseableText) as exc:
        decompose("ကာx")
    assert exc.value.offset == len("ကာ".encode("utf-8"))


def test_decompose_leading_sign_is_rejected():
    with pytest.raises(UnparseableText) as exc:
        decompose("ာက")
    assert exc.value.offset == 0


def test_stacked_consonants_round_trip():
    text = "သမ္မန်"
    assert compose(decompose(text)) == text


def test_corpus_targets_decompose():
    for entry in default_corpus():
        if "verify" in entry.flags:
            continue
        syls = decompose(entry.target)
        assert compose(syls) == entry.target, entry.source


def test_alignment_notation_meter():
    pairs = [
        AlignmentPair(0, 1, "M", "onset", "မ", 0),
        AlignmentPair(1, 2, "E", "rhyme", "ီ", 0),
        AlignmentPair(2, 3, "T", "onset", "တ", 1),
        AlignmentPair(3, 5, "ER", "rhyme", "ာ", 1),
    ]
    assert render_alignment_notation(pairs).splitlines() == ["M→မ-", "E→+ီ", "T→တ-", "ER→+ာ"]


def test_alignment_notation_empty_source():
    assert render_alignment_notation([AlignmentPair(0, 0, "", "onset", "အ", 0)]) == "<>→အ-"


def test_alignment_notation_bare_inherent_vowel():
    pairs = [AlignmentPair(0, 1, "B", "onset", "ဘ", 0), AlignmentPair(1, 2, "A", "rhyme", "", 0)]
    assert render_alignment_notation(pairs).splitlines()[1] == "A→+"


def test_alignment_notation_single_pair():
    assert render_alignment_notation([AlignmentPair(0, 1, "P", "onset", "ပ", 0)]) == "P→ပ-"


def test_alignment_gap_is_an_error():
    pairs = [AlignmentPair(0, 1, "M", "onset", "မ", 0), AlignmentPair(2, 3, "T", "onset", "တ", 1)]
    with pytest.raises(GapInAlignment):
        render_alignment_notation(pairs)
