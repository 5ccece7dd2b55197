import pytest

from mytranslit.pinyin import (
    TONE_TABLE,
    InvalidPinyin,
    PinyinSyllable,
    parse_pinyin,
    pinyin_to_burmese,
    syllable_table,
    transliterate_pinyin,
)
from mytranslit.script_model import decompose


def spellings(text):
    return [s.text for s in parse_pinyin(text)]


def test_kunming_split():
    assert spellings("kunming") == ["kun", "ming"]


def test_yunnan_split():
    assert spellings("yunnan") == ["yun", "nan"]


def test_apostrophe_forces_boundary():
    assert spellings("xi'an") == ["xi", "an"]
    assert spellings("xian") == ["xian"]


def test_tone_digits_and_diacritics_agree():
    a = parse_pinyin("bei3jing1")
    b = parse_pinyin("Běijīng")
    assert [(s.text, s.tone) for s in a] == [(s.text, s.tone) for s in b] == [("bei", 3), ("jing", 1)]


def test_umlaut_spellings():
    (a,) = parse_pinyin("lǜ")
    (b,) = parse_pinyin("lv4")
    assert a.key == b.key and a.tone == b.tone == 4
    assert a.medial == "" and a.rime == "V"


def test_spelling_is_preserved():
    text = "Zhong1guo2"
    assert "".join(s.text for s in parse_pinyin(text)) == "zhongguo"


def test_underlying_finals():
    (you,) = parse_pinyin("you")
    assert (you.initial, you.medial, you.rime, you.final) == ("", "j", "OU", "IOU")
    (gui,) = parse_pinyin("gui")
    assert gui.final == "UEI"
    (jun,) = parse_pinyin("jun")
    assert jun.final == "VN"
    (wu,) = parse_pinyin("wu")
    assert wu.final == "U" and wu.glide == "W"


def test_invalid_remainder_offset():
    with pytest.raises(InvalidPinyin) as exc:
        parse_pinyin("nihaoq")
    assert exc.value.offset == 5


def test_invalid_character():
    with pytest.raises(InvalidPinyin) as exc:
        parse_pinyin("ni?")
    assert exc.value.offset == 2


def test_invalid_combination_rejected():
    with pytest.raises(InvalidPinyin):
        PinyinSyllable("b", "", "V", "")


def test_table_size():
    assert 400 <= len(syllable_table()) <= 430


def targets(text, mode="word", k=None):
    return [c.target for c in pinyin_to_burmese(parse_pinyin(text), mode, k=k)]


def test_yunnan_word_mode():
    assert "ယုနန်" in targets("yunnan", k=3)


def test_kunming_word_mode():
    assert "ကုမင်း" in targets("kunming", k=3)


def test_wu_uses_wa_onset():
    top = targets("wu")[0]
    assert top.startswith("ဝ") and not top.startswith("အ")


def test_nasal_drop_only_in_word_mode():
    assert "ယုနန်" not in targets("yunnan", mode="per_syllable")


def test_initial_table():
    expect = {"ba": "ပ", "pa": "ဖ", "fa": "ဖ", "ma": "မ", "ta": "ထ", "ka": "ခ", "ga": "က",
              "za": "ဇ", "ca": "ဆ", "sa": "စ", "zha": "ကျ", "cha": "ချ", "sha": "ရှ"}
    for text, letter in expect.items():
        assert targets(text, mode="per_syllable")[0].startswith(letter), text


def test_aspiration_is_kept():
    for s in sorted(syllable_table()):
        (syl,) = parse_pinyin(s)
        if syl.initial not in ("t", "k", "d", "g"):
            continue
        for c in pinyin_to_burmese([syl], "per_syllable"):
            first = c.target[0]
            if syl.initial in ("t", "k"):
                assert first in "ထခ", s
            else:
                assert first not in "ထခ", s


def test_tone_table_shape():
    assert len(TONE_TABLE[1]) == len(TONE_TABLE[3]) == len(TONE_TABLE[4]) == 1
    assert TONE_TABLE[2] == ("low", "high")
    assert TONE_TABLE[0] == ("low",)


def test_tone_two_gives_two_ordered_variants():
    cands = transliterate_pinyin("ma2", k=5)
    assert [c.target for c in cands] == ["မာ", "မား"]
    assert cands[0].score < cands[1].score


def test_every_syllable_maps_in_every_tone():
    for s in sorted(syllable_table()):
        for tone in range(5):
            cands = transliterate_pinyin(f"{s}{tone}", k=3, mode="per_syllable")
            assert cands, s
            for c in cands:
                decompose(c.target)


def test_lexicon_only_in_word_mode():
    assert targets("kunming", mode="per_syllable")[0] != "ကုမင်း"
