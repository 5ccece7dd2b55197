"""Pinyin segmentation and Pinyin -> Burmese mapping.

Syllables are parsed against a closed table of valid Mandarin syllables and
mapped with the initial/final rules of ``data/pinyin.pack``.  Tones come from
digits (``ni3``) or diacritics (``nǐ``); unmarked syllables get tone 0.
"""

from __future__ import annotations

import itertools
import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .rule_engine import (
    Application,
    Candidate,
    RuleSet,
    data_path,
    load_lexicon,
    load_rule_pack,
)
from .script_model import (
    AlignmentPair,
    BurmeseSyllable,
    InvalidSyllable,
    KillerCoda,
    Rhyme,
    compose,
)

INITIALS = ("zh", "ch", "sh", "b", "p", "m", "f", "d", "t", "n", "l", "g", "k", "h",
            "j", "q", "x", "r", "z", "c", "s")
MEDIALS = ("", "j", "w", "ɥ")
NASALS = ("", "n", "ng")
MODES = ("per_syllable", "word")

# Burmese tone choices per Pinyin tone, in preference order; the second entry
# of a pair costs the pack's tone_variant_weight.
TONE_TABLE = {
    1: ("high",),
    2: ("low", "high"),
    3: ("low",),
    4: ("creaky",),
    0: ("low",),
}

_TONE_MARKS = {"̄": 1, "́": 2, "̌": 3, "̀": 4}
_DIAERESIS = "̈"
_MEDIAL_LETTER = {"": "", "j": "I", "w": "U", "ɥ": "V"}
_BEAM = 256


class InvalidPinyin(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


@dataclass(frozen=True)
class PinyinSyllable:
    initial: str = ""
    medial: str = ""
    rime: str = "A"
    nasal: str = ""
    tone: int = 0
    text: str = ""  # spelling as written, without tone marks
    glide: str = ""  # "Y" or "W" when the empty initial was spelled with one

    def __post_init__(self):
        if self.initial not in INITIALS and self.initial != "":
            raise InvalidPinyin(f"unknown initial {self.initial!r}", 0)
        if self.medial not in MEDIALS or self.nasal not in NASALS:
            raise InvalidPinyin(f"bad medial/nasal in {self.text!r}", 0)
        if not 0 <= self.tone <= 4:
            raise InvalidPinyin(f"tone {self.tone} out of range", 0)
        if self.key not in valid_combinations():
            raise InvalidPinyin(f"{self.key} is not a Mandarin syllable", 0)

    @property
    def key(self) -> tuple:
        return (self.initial, self.medial, self.rime, self.nasal)

    @property
    def final(self) -> str:
        """Underlying final as used in rule patterns, e.g. ``IAN`` for yan."""
        return _MEDIAL_LETTER[self.medial] + self.rime + self.nasal.upper()

    def __str__(self):
        return self.text + (str(self.tone) if self.tone else "")


# ---------------------------------------------------------------------------
# syllable table


def analyse_spelling(spelling: str) -> tuple:
    """Split a toneless syllable spelling (``v`` or ``ü`` for u-umlaut) into
    (initial, medial, rime, nasal, glide)."""
    s = spelling.lower().replace("ü", "v")
    initial = next((i for i in INITIALS if s.startswith(i) and len(s) > len(i)), "")
    rest = s[len(initial):]
    glide = ""
    if not initial and rest[:1] in ("y", "w"):
        glide = rest[0].upper()
        rest = _unglide(rest)
    elif initial in ("j", "q", "x") and rest.startswith("u"):
        rest = "v" + rest[1:]
    if initial:
        rest = {"ui": "uei", "iu": "iou", "un": "uen"}.get(rest, rest)
    nasal = "ng" if rest.endswith("ng") else ("n" if rest.endswith("n") and rest != "n" else "")
    core = rest[:len(rest) - len(nasal)]
    medial = ""
    if len(core) > 1 and core[0] in "iuv" and core != "ou":
        medial = {"i": "j", "u": "w", "v": "ɥ"}[core[0]]
        core = core[1:]
    return initial, medial, core.upper(), nasal, glide


def _unglide(rest: str) -> str:
    if rest[0] == "y":
        special = {"yi": "i", "yin": "in", "ying": "ing", "yu": "v", "yue": "ve",
                   "yuan": "van", "yun": "vn", "you": "iou", "yong": "iong"}
        return special.get(rest, "i" + rest[1:])
    special = {"wu": "u", "wei": "uei", "wen": "uen", "weng": "ueng", "wong": "ueng"}
    return special.get(rest, "u" + rest[1:])


def parse_syllable_table(lines: Iterable[str]) -> frozenset:
    out = set()
    for line in lines:
        parts = line.rstrip("\n").split("\t")
        if parts[0] == "@syllables" and len(parts) > 1:
            out.update(p.replace("ü", "v") for p in parts[1].split())
    return frozenset(out)


@lru_cache(maxsize=None)
def syllable_table() -> frozenset:
    """The shipped closed table of toneless syllables (``v`` spells u-umlaut)."""
    return parse_syllable_table(data_path("pinyin.pack").read_text("utf-8").splitlines())


@lru_cache(maxsize=None)
def valid_combinations() -> frozenset:
    return frozenset(analyse_spelling(s)[:4] for s in syllable_table())


@lru_cache(maxsize=None)
def default_pinyin_ruleset() -> RuleSet:
    rs = load_rule_pack(data_path("pinyin.pack"))
    return rs.with_lexicon(load_lexicon(data_path("pinyin_lexicon.tsv")))


# ---------------------------------------------------------------------------
# parsing


def _normalise(text: str) -> list:
    """Flatten *text* into ``(char, offset, tone)`` triples; char is a lower-case
    letter (``v`` for u-umlaut), a separator, or a tone digit."""
    out: list = []
    for offset, ch in enumerate(text):
        for part in unicodedata.normalize("NFD", ch):
            if part in _TONE_MARKS:
                if not out or not out[-1][0].isalpha():
                    raise InvalidPinyin(f"stray tone mark in {text!r}", offset)
                c, o, _ = out[-1]
                out[-1] = (c, o, _TONE_MARKS[part])
            elif part == _DIAERESIS:
                if not out or out[-1][0] != "u":
                    raise InvalidPinyin(f"stray diaeresis in {text!r}", offset)
                out[-1] = ("v", out[-1][1], out[-1][2])
            elif part.isascii() and part.isalpha():
                out.append((part.lower(), offset, 0))
            elif part in "01234":
                out.append((part, offset, 0))
            elif part in "'’- \t":
                out.append(("'", offset, 0))
            else:
                raise InvalidPinyin(f"unexpected character {part!r}", offset)
    return out


def _segment(letters: str, table: frozenset) -> list[int] | int:
    """Greedy longest-match split with backtracking.  Returns the syllable
    lengths, or the furthest index reached when no split exists."""
    longest = max(len(s) for s in table)
    furthest = 0

    def go(i: int):
        nonlocal furthest
        furthest = max(furthest, i)
        if i == len(letters):
            return []
        for size in range(min(longest, len(letters) - i), 0, -1):
            if letters[i:i + size] in table:
                tail = go(i + size)
                if tail is not None:
                    return [size] + tail
        return None

    result = go(0)
    return furthest if result is None else result


def parse_pinyin(text: str) -> list[PinyinSyllable]:
    chars = _normalise(text)
    table = syllable_table()
    syllables: list[PinyinSyllable] = []
    i = 0
    while i < len(chars):
        c = chars[i][0]
        if c == "'":
            i += 1
            continue
        if c.isdigit():
            if not syllables or chars[i - 1][0] == "'" or chars[i - 1][0].isdigit():
                raise InvalidPinyin("tone digit without a syllable", chars[i][1])
            last = syllables[-1]
            syllables[-1] = PinyinSyllable(*last.key, tone=int(c), text=last.text, glide=last.glide)
            i += 1
            continue
        j = i
        while j < len(chars) and chars[j][0].isalpha():
            j += 1
        run = chars[i:j]
        letters = "".join(ch for ch, _, _ in run)
        split = _segment(letters, table)
        if isinstance(split, int):
            raise InvalidPinyin(f"cannot segment {letters[split:]!r}", run[min(split, len(run) - 1)][1])
        pos = 0
        for size in split:
            piece = run[pos:pos + size]
            tones = [t for _, _, t in piece if t]
            spelling = "".join(text[o].lower() if text[o].isascii() else ch for ch, o, _ in piece)
            spelling = unicodedata.normalize("NFC", "".join(
                p for p in unicodedata.normalize("NFD", spelling) if p not in _TONE_MARKS))
            initial, medial, rime, nasal, glide = analyse_spelling("".join(ch for ch, _, _ in piece))
            syllables.append(PinyinSyllable(initial, medial, rime, nasal, tones[0] if tones else 0,
                                            spelling, glide))
            pos += size
        i = j
    return syllables


# ---------------------------------------------------------------------------
# mapping


def _context_ok(rule, syl: PinyinSyllable, drop: bool) -> bool:
    for p in rule.predicates:
        if not p.values:
            hit = drop if p.key == "drop" else False
        else:
            if p.key == "initial":
                vals = {syl.initial.upper()}
            elif p.key == "medial":
                vals = {syl.medial or "none"}
            elif p.key == "spelled":
                vals = {syl.glide}
            else:
                vals = set()
            hit = bool(vals & p.values)
        if hit == p.negate:
            return False
    return True


def _is_drop_rule(rule) -> bool:
    return any(p.key == "drop" and not p.values and not p.negate for p in rule.predicates)


def _contract(onset, medials: Sequence[str]):
    """Merge final medials into the initial's letter (ကျ + ျ stays ကျ, ya is
    dropped after ရှ, a glide letter absorbs its own medial)."""
    meds = set(medials)
    if "ya" in meds and (onset.base_letter == "ya" or "ra" in onset.medials
                         or (onset.base_letter == "ra" and "ha" in onset.medials)):
        meds.discard("ya")
    if "wa" in meds and onset.base_letter == "wa":
        meds.discard("wa")
    return onset.with_medials(meds)


def _toned(rhyme: Rhyme, tone: int, keep: bool) -> list[tuple[Rhyme, int]]:
    if keep or rhyme.ending == "glottal" or rhyme.nucleus == "ə":
        return [(rhyme, 0)]
    out = []
    for rank, name in enumerate(TONE_TABLE[tone]):
        r = Rhyme(rhyme.nucleus, rhyme.ending, name, rhyme.variant)
        if not r.is_valid():
            if name == "creaky" and rhyme.nucleus == "a" and rhyme.ending == "open":
                r = Rhyme("ə")  # short creaky /a/ is the bare letter
            else:
                r = Rhyme(rhyme.nucleus, rhyme.ending, "low", rhyme.variant)
        out.append((r, rank))
    return out


def _options(syl: PinyinSyllable, rs: RuleSet, start: int, index: int, drop_allowed: bool):
    """All (cost, syllable, trace, alignment) choices for one Pinyin syllable."""
    onset_rules = [r for r in rs.by_position["onset"]
                   if (r.pattern.empty if not syl.initial else r.pattern.tokens == (syl.initial.upper(),))
                   and _context_ok(r, syl, False)]
    rhyme_rules = [r for r in rs.by_position["rhyme"] if r.pattern.nucleus == syl.final]
    if not onset_rules or not rhyme_rules:
        raise InvalidPinyin(f"no mapping for {syl.text!r}", start)
    init_len = len(syl.initial) if syl.initial else 0
    tone_w = rs.params["tone_variant_weight"]
    out = []
    for orule in onset_rules:
        for oi, (ofrag, ow) in enumerate(zip(orule.outputs, orule.weights)):
            unit = ofrag.units[-1]
            for rrule in rhyme_rules:
                drop = _is_drop_rule(rrule)
                if drop and not drop_allowed:
                    continue
                if not _context_ok(rrule, syl, drop):
                    continue
                for ri, (rfrag, rw) in enumerate(zip(rrule.outputs, rrule.weights)):
                    try:
                        onset = _contract(unit, rfrag.medials)
                    except InvalidSyllable:
                        continue
                    for rhyme, rank in _toned(rfrag.rhyme, syl.tone, keep=drop):
                        bs = BurmeseSyllable(onset, rhyme, KillerCoda(rfrag.killers))
                        try:
                            body = bs.body_text()
                        except InvalidSyllable:
                            continue
                        trace = (f"{orule.id}#{oi}", f"{rrule.id}#{ri}") + (("variant:tone",) if rank else ())
                        align = (
                            AlignmentPair(start, start + init_len, syl.text[:init_len], "onset",
                                          onset.text() if not init_len else unit.text(), index),
                            AlignmentPair(start + init_len, start + len(syl.text), syl.text[init_len:],
                                          "rhyme", body[len(onset.text()):], index),
                        )
                        apps = (Application(orule.id, oi, syl.text[:init_len], ofrag.text),
                                Application(rrule.id, ri, syl.text[init_len:], rfrag.text))
                        out.append((ow + rw + rank * tone_w, (bs,) + tuple(rfrag.extra), trace, align, apps))
    return out


def pinyin_to_burmese(syllables: Sequence[PinyinSyllable], mode: str = "word",
                      ruleset: RuleSet | None = None, k: int | None = None) -> list[Candidate]:
    """Ranked Burmese candidates for parsed Pinyin syllables.

    In ``word`` mode a lexicon of fixed forms is consulted first, and for
    words of two or more syllables the first syllable may also lose its nasal
    ending.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if not syllables:
        return []
    rs = ruleset if ruleset is not None else default_pinyin_ruleset()
    source = "".join(s.text for s in syllables)
    results: list[Candidate] = []
    if mode == "word":
        lex = rs.lexicon.get(source.upper().replace("Ü", "V"))
        if lex is not None:
            frag = lex.outputs[0]
            syls = list(frag.extra)
            results.append(Candidate(source, compose(syls), syls, 0,
                                     [AlignmentPair(0, len(source), source, "literal", frag.text, 0)],
                                     [f"{lex.id}#0"], [Application(lex.id, 0, source, frag.text)]))

    partial = [(0, (), (), (), ())]
    pos = 0
    for index, syl in enumerate(syllables):
        drop_allowed = mode == "word" and index == 0 and len(syllables) >= 2
        opts = _options(syl, rs, pos, index, drop_allowed)
        merged = []
        for (s1, b1, t1, a1, p1), (s2, b2, t2, a2, p2) in itertools.product(partial, opts):
            merged.append((s1 + s2, b1 + b2, t1 + t2, a1 + a2, p1 + p2))
        merged.sort(key=lambda x: (x[0], compose(x[1])))
        partial = merged[:_BEAM]
        pos += len(syl.text)

    seen = {c.target for c in results}
    derived = []
    for score, built, trace, align, apps in partial:
        target = compose(built)
        if target in seen:
            continue
        seen.add(target)
        derived.append(Candidate(source, target, list(built), score, list(align), list(trace), list(apps)))
    derived.sort(key=lambda c: (c.score, c.target))
    results.extend(derived)
    return results[:k] if k else results


def transliterate_pinyin(text: str, k: int = 3, mode: str = "word",
                         ruleset: RuleSet | None = None) -> list[Candidate]:
    if k < 1:
        raise ValueError("k must be a positive integer")
    return pinyin_to_burmese(parse_pinyin(text), mode, ruleset, k)
