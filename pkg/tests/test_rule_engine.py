import random
from concurrent.futures import ThreadPoolExecutor

import pytest

from mytranslit.corpus import default_corpus
from mytranslit.rule_engine import (
    DuplicateRule,
    InvalidFragment,
    NoRuleApplicable,
    ParseError,
    default_ruleset,
    explain,
    load_rule_pack,
    parse_rule_pack,
    score_from_trace,
    transliterate,
)
from mytranslit.script_model import decompose, render_alignment_notation

from .strategies import random_latin


def targets(word, k=3, rs=None):
    return [c.target for c in transliterate(word, rs, k)]


def test_empty_pack_is_valid():
    assert len(parse_rule_pack([])) == 0


def test_th_override_line():
    rs = parse_rule_pack(["grapheme_override\tTH@onset\t*\tသ-\t0"])
    (rule,) = rs.rules
    assert rule.tier == "grapheme_override"
    assert rule.id == "grapheme_override:TH@onset:*"
    assert rule.outputs[0].units[0].text() == "သ"


def test_fragment_violating_nasal_restriction():
    with pytest.raises(InvalidFragment):
        parse_rule_pack(["default\tE.N@rhyme\t*\t+ေန်\t0"])


def test_duplicate_rule():
    with pytest.raises(DuplicateRule):
        parse_rule_pack(["default\tP@onset\t*\tပ-\t0", "default\tP@onset\t*\tဖ-\t0"])


def test_bad_tier_names_the_line():
    with pytest.raises(ParseError) as exc:
        parse_rule_pack(["# comment", "bogus\tP@onset\t*\tပ-\t0"])
    assert exc.value.line == 2


def test_weights_must_match_outputs(tmp_path):
    path = tmp_path / "bad.pack"
    path.write_text("default\tP@onset\t*\tပ-|ဖ-\t0|1|2\n", encoding="utf-8")
    with pytest.raises(ParseError):
        load_rule_pack(path)


def test_january_lexicon_first():
    (c,) = transliterate("JANUARY", k=1)
    assert c.target == "ဇန်နဝါရီ"
    assert c.score == 0 and c.is_lexicon


def test_tier_dominance_without_lexicon():
    rs = default_ruleset(with_lexicon=False)
    top = transliterate("JANUARY", rs, 3)[0]
    assert top.target.startswith("ဇ")
    assert top.rule_trace[0].startswith("grapheme_override:J@onset")
    for c in transliterate("JANUARY", rs, 3):
        if c.target.startswith("ဂျ"):
            assert c.score > top.score


@pytest.mark.parametrize("word,target", [
    ("SALAD", "ဆလတ်"),
    ("BUS", "ဘတ်စ်"),
    ("THEORY", "သီအိုရီ"),
    ("CHRIST", "ခရစ်"),
    ("HOTEL", "ဟိုတယ်"),
    ("METER", "မီတာ"),
    ("WEB", "ဝက်ဘ်"),
    ("HORN", "ဟွန်း"),
])
def test_paper_examples_in_top3(word, target):
    assert target in targets(word)


def test_obstruent_coda_default_and_killer_variant():
    cands = transliterate("BUS", k=3)
    assert cands[0].target == "ဘတ်"
    killer = next(c for c in cands if c.target == "ဘတ်စ်")
    assert killer.score > cands[0].score


@pytest.mark.parametrize("word,onset", [("PEN", "ပ"), ("TEN", "တ"), ("BEN", "ဘ"), ("DEN", "ဒ"),
                                        ("ZEN", "ဇ"), ("FEN", "ဖ"), ("VEN", "ဗ"), ("JET", "ဂျ")])
def test_onset_table(word, onset):
    assert targets(word, 1)[0].startswith(onset)


def test_cluster_tier():
    assert targets("TRIP", 1)[0].startswith("ထရ")
    assert targets("STOP", 1)[0].startswith("စတ")
    assert targets("CHRIST", 1)[0].startswith("ခရ")


def test_sorted_by_score_then_target():
    cands = transliterate("ELECTRON", k=10)
    keys = [(c.score, c.target) for c in cands]
    assert keys == sorted(keys)


def test_monotone_k():
    for word in ["CAMERA", "ELECTRON", "HORN", "LOGARITHM"]:
        small = targets(word, 3)
        assert targets(word, 4)[:3] == small


def test_score_reproducible_from_trace():
    rs = default_ruleset()
    for word in ["CAMERA", "WEB", "BATTERY", "JANUARY", "POWER"]:
        for c in transliterate(word, rs, 5):
            assert score_from_trace(c.rule_trace, rs) == pytest.approx(c.score)


def test_alignment_covers_the_source():
    for word in ["ELECTRON", "THEORY", "BATTERY", "FILM"]:
        for c in transliterate(word, k=3):
            assert c.alignment[0].src_start == 0
            assert c.alignment[-1].src_end == len(word)
            render_alignment_notation(c.alignment)


def test_explain_lexicon():
    assert explain(transliterate("JANUARY", k=1)[0]) == "lexicon: JANUARY"


def test_explain_meter_alignment():
    c = transliterate("METER", k=1)[0]
    lines = explain(c).splitlines()
    assert lines[-4:] == ["M→မ-", "E→+ီ", "T→တ-", "ER→+ာ"]


def test_explain_web_shows_killer_rule():
    c = next(c for c in transliterate("WEB", k=3) if c.target == "ဝက်ဘ်")
    text = explain(c)
    assert "B@coda" in text and "B→ဘ်" in text


def test_every_corpus_word_has_a_candidate():
    for entry in default_corpus():
        if entry.lang == "en":
            assert transliterate(entry.source, k=1), entry.source


def test_no_rule_applicable_is_raised_for_gaps():
    rs = parse_rule_pack(["default\tP@onset\t*\tပ-\t0"])
    with pytest.raises(NoRuleApplicable):
        transliterate("PA", rs, 1)


def test_determinism_across_threads():
    words = ["CAMERA", "ELECTRON", "HORN", "CIRCUS", "GEOMETRY", "TRANSISTOR"]
    serial = [[(c.target, c.score, tuple(c.rule_trace)) for c in transliterate(w, k=5)] for w in words]
    with ThreadPoolExecutor(4) as pool:
        parallel = list(pool.map(lambda w: [(c.target, c.score, tuple(c.rule_trace))
                                            for c in transliterate(w, k=5)], words))
    assert serial == parallel


def test_candidates_decompose_on_random_words():
    rng = random.Random(11)
    for _ in range(200):
        word = random_latin(rng)
        for c in transliterate(word, k=3):
            decompose(c.target)


def test_k_must_be_positive():
    with pytest.raises(ValueError):
        transliterate("HOTEL", k=0)
