"""Burmese syllable grammar: structured syllables, composition and decomposition.

The model is abstract.  Letters, medials and rhymes are identifiers; every
code point comes from ``data/script_tables.tsv``, so the canonical sign
order lives in one place (the rhyme sequences of that table).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence

MEDIAL_ORDER = ("ya", "ra", "wa", "ha")
NUCLEI = ("a", "i", "u", "e", "ɛ", "o", "ɔ", "ə", "ai", "au", "ei", "ou")
ENDINGS = ("open", "nasal", "glottal")
TONES = ("low", "high", "creaky")

NASAL_NUCLEI = frozenset({"a", "i", "u", "ai", "au", "ei", "ou"})
GLOTTAL_NUCLEI = frozenset({"a", "ɛ", "i", "o", "ai", "au", "ei", "ou"})
OPEN_NUCLEI = frozenset({"a", "i", "u", "e", "ɛ", "o", "ɔ", "ə"})


class ScriptError(ValueError):
    pass


class InvalidSyllable(ScriptError):
    pass


class UnparseableText(ScriptError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte offset {offset}")
        self.offset = offset


class GapInAlignment(ScriptError):
    pass


# ---------------------------------------------------------------------------
# tables


@dataclass(frozen=True)
class ScriptTables:
    letters: dict  # id -> char
    medials: dict  # id -> char
    signs: dict
    tall: frozenset  # letter ids taking the tall aa sign
    independent: dict
    rhymes: dict  # (nucleus, ending, tone, variant) -> str
    version: str = "1"

    def __post_init__(self):
        object.__setattr__(self, "letter_ids", {c: k for k, c in self.letters.items()})
        object.__setattr__(self, "medial_ids", {c: k for k, c in self.medials.items()})
        object.__setattr__(self, "independent_chars", frozenset(self.independent.values()))
        by_text = {}
        for key, text in self.rhymes.items():
            if text in by_text:
                raise ScriptError(f"rhyme spelling {text!r} listed twice ({by_text[text]} and {key})")
            by_text[text] = key
        object.__setattr__(self, "rhyme_by_text", by_text)
        # longest first, so decomposition is a plain longest-match scan
        object.__setattr__(self, "rhyme_texts", sorted(by_text, key=len, reverse=True))


def _parse_codepoints(field_text: str) -> str:
    if field_text.strip() in ("", "-"):
        return ""
    return "".join(chr(int(h, 16)) for h in field_text.split())


def parse_script_tables(lines: Iterable[str]) -> ScriptTables:
    letters, medials, signs, independent, rhymes = {}, {}, {}, {}, {}
    tall = set()
    version = "1"
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ScriptError(f"script table line {lineno}: expected 3 tab-separated fields")
        kind, key, cps = parts
        if kind == "version":
            version = cps.strip()
            continue
        text = _parse_codepoints(cps)
        if kind == "letter":
            letters[key] = text
        elif kind == "medial":
            medials[key] = text
        elif kind == "sign":
            signs[key] = text
        elif kind == "tall":
            tall.add(key)
        elif kind == "independent":
            independent[key] = text
        elif kind == "rhyme":
            nucleus, ending, tone, variant = key.split("/")
            rhymes[(nucleus, ending, tone, int(variant))] = text
        else:
            raise ScriptError(f"script table line {lineno}: unknown kind {kind!r}")
    return ScriptTables(letters, medials, signs, frozenset(tall), independent, rhymes, version)


@lru_cache(maxsize=None)
def default_tables() -> ScriptTables:
    text = resources.files("mytranslit.data").joinpath("script_tables.tsv").read_text("utf-8")
    return parse_script_tables(text.splitlines())


def _tables() -> ScriptTables:
    return default_tables()


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class OnsetUnit:
    base_letter: str
    medials: tuple = ()
    is_stacked: bool = False

    def __post_init__(self):
        t = _tables()
        if self.base_letter not in t.letters:
            raise InvalidSyllable(f"unknown base letter {self.base_letter!r}")
        meds = tuple(self.medials)
        for m in meds:
            if m not in MEDIAL_ORDER:
                raise InvalidSyllable(f"unknown medial {m!r}")
        if len(set(meds)) != len(meds):
            raise InvalidSyllable(f"repeated medial in {meds}")
        if "ya" in meds and "ra" in meds:
            raise InvalidSyllable("medials ya and ra cannot combine")
        object.__setattr__(self, "medials", tuple(sorted(meds, key=MEDIAL_ORDER.index)))

    @classmethod
    def from_text(cls, text: str, is_stacked: bool = False) -> "OnsetUnit":
        """Build from a letter plus medial signs, e.g. ``"ဂျ"``."""
        t = _tables()
        if not text or text[0] not in t.letter_ids:
            raise InvalidSyllable(f"{text!r} does not start with a consonant letter")
        meds = []
        for ch in text[1:]:
            if ch not in t.medial_ids:
                raise InvalidSyllable(f"{text!r} is not a letter with medials")
            meds.append(t.medial_ids[ch])
        return cls(t.letter_ids[text[0]], tuple(meds), is_stacked)

    def text(self) -> str:
        t = _tables()
        return t.letters[self.base_letter] + "".join(t.medials[m] for m in self.medials)

    def with_medials(self, extra: Iterable[str]) -> "OnsetUnit":
        meds = set(self.medials) | set(extra)
        return OnsetUnit(self.base_letter, tuple(meds), self.is_stacked)


@dataclass(frozen=True)
class Rhyme:
    nucleus: str = "ə"
    ending: str = "open"
    tone: str = "low"
    variant: int = 0

    def __post_init__(self):
        if self.nucleus not in NUCLEI:
            raise InvalidSyllable(f"unknown nucleus {self.nucleus!r}")
        if self.ending not in ENDINGS:
            raise InvalidSyllable(f"unknown ending {self.ending!r}")
        if self.tone not in TONES:
            raise InvalidSyllable(f"unknown tone {self.tone!r}")
        # checked syllables and the bare inherent vowel carry no tone mark
        if self.ending == "glottal" or self.nucleus == "ə":
            object.__setattr__(self, "tone", "low")

    @property
    def key(self) -> tuple:
        return (self.nucleus, self.ending, self.tone, self.variant)

    def check(self) -> None:
        if self.ending == "nasal" and self.nucleus not in NASAL_NUCLEI:
            raise InvalidSyllable(f"nucleus {self.nucleus} cannot take a nasal ending")
        if self.ending == "glottal" and self.nucleus not in GLOTTAL_NUCLEI:
            raise InvalidSyllable(f"nucleus {self.nucleus} cannot take a glottal ending")
        if self.ending == "open" and self.nucleus not in OPEN_NUCLEI:
            raise InvalidSyllable(f"nucleus {self.nucleus} needs a nasal or glottal ending")
        if self.key not in _tables().rhymes:
            raise InvalidSyllable(f"no spelling for rhyme {'/'.join(map(str, self.key))}")

    def text(self) -> str:
        self.check()
        return _tables().rhymes[self.key]

    def is_valid(self) -> bool:
        try:
            self.check()
        except InvalidSyllable:
            return False
        return True


@dataclass(frozen=True)
class KillerCoda:
    letters: tuple = ()  # of OnsetUnit; each renders as letter + medials + asat

    def text(self) -> str:
        asat = _tables().signs["asat"]
        return "".join(u.text() + asat for u in self.letters)


@dataclass(frozen=True)
class BurmeseSyllable:
    onset: OnsetUnit = field(default_factory=lambda: OnsetUnit("a"))
    rhyme: Rhyme = field(default_factory=Rhyme)
    killer_coda: KillerCoda = field(default_factory=KillerCoda)
    literal_override: str | None = None

    def body_text(self) -> str:
        """Render without regard to neighbours (stacking is resolved by compose)."""
        if self.literal_override is not None:
            return self.literal_override
        t = _tables()
        rhyme_text = self.rhyme.text()
        if self.onset.base_letter in t.tall and not self.onset.medials:
            rhyme_text = rhyme_text.replace(t.signs["aa"], t.signs["tall_aa"], 1)
        killers = self.killer_coda.text()
        if killers:
            _check_killers(self.rhyme, killers)
        return self.onset.text() + rhyme_text + killers


# killed nasal letters spell nasalization, so they obey the nasal-nucleus limits
_NASAL_LETTERS = frozenset({"nga", "nnya", "nya", "nna", "na", "ma"})


def _check_killers(rhyme: Rhyme, killers: str) -> None:
    t = _tables()
    first = t.letter_ids.get(killers[0])
    if (first in _NASAL_LETTERS and killers[1:2] == t.signs["asat"] and rhyme.ending == "open"
            and rhyme.nucleus not in NASAL_NUCLEI | {"ə"}):
        raise InvalidSyllable(f"killed nasal {killers[:2]!r} would nasalize nucleus {rhyme.nucleus}")
    base = t.rhymes[rhyme.key]
    tail = base + killers
    for cand in t.rhyme_texts:
        if len(cand) <= len(base):
            break
        if tail.startswith(cand):
            raise InvalidSyllable(
                f"killer coda {killers!r} after rhyme {base!r} would read as rhyme {cand!r}")


def syllable(onset: str = "အ", nucleus: str = "ə", ending: str = "open", tone: str = "low",
             killers: Sequence[str] = (), variant: int = 0) -> BurmeseSyllable:
    """Convenience constructor taking Burmese characters for onset and killers."""
    return BurmeseSyllable(
        OnsetUnit.from_text(onset),
        Rhyme(nucleus, ending, tone, variant),
        KillerCoda(tuple(OnsetUnit.from_text(k) for k in killers)),
    )


# ---------------------------------------------------------------------------
# compose / decompose


def compose(syllables: Sequence[BurmeseSyllable]) -> str:
    t = _tables()
    asat, virama = t.signs["asat"], t.signs["virama"]
    out: list[str] = []
    prev_literal = True
    for i, syl in enumerate(syllables):
        body = syl.body_text()
        if syl.literal_override is None and syl.onset.is_stacked:
            if i == 0 or prev_literal or not out[-1].endswith(asat):
                raise InvalidSyllable("stacked onset must follow a syllable ending in a killed letter")
            out[-1] = out[-1][:-1] + virama
        out.append(body)
        prev_literal = syl.literal_override is not None
    return "".join(out)


def decompose(text: str) -> list[BurmeseSyllable]:
    t = _tables()
    asat, virama = t.signs["asat"], t.signs["virama"]
    view = text.replace(t.signs["tall_aa"], t.signs["aa"]).replace(virama, asat)
    n = len(view)
    out: list[BurmeseSyllable] = []
    stacked = False
    i = 0

    def fail(msg: str, pos: int):
        raise UnparseableText(msg, len(text[:pos].encode("utf-8")))

    def read_unit(pos: int):
        j = pos + 1
        meds = []
        while j < n and view[j] in t.medial_ids:
            meds.append(t.medial_ids[view[j]])
            j += 1
        if [MEDIAL_ORDER.index(m) for m in meds] != sorted(MEDIAL_ORDER.index(m) for m in set(meds)):
            fail("medials out of canonical order", pos)
        return meds, j

    trailing = {t.signs["asat"], t.signs["dot_below"], t.signs["visarga"], "ံ", "ီ"}
    while i < n:
        ch = view[i]
        if ch in t.independent_chars:
            if stacked:
                fail("stacked letter expected", i)
            j = i + 1
            while j < n and view[j] in trailing:
                j += 1
            out.append(BurmeseSyllable(literal_override=text[i:j]))
            i = j
            continue
        if ch not in t.letter_ids:
            fail(f"unexpected character {ch!r}", i)
        meds, i2 = read_unit(i)
        try:
            onset = OnsetUnit(t.letter_ids[ch], tuple(meds), stacked)
        except InvalidSyllable as exc:
            fail(str(exc), i)
        stacked = False
        i = i2
        rtext = ""
        for cand in t.rhyme_texts:
            if view.startswith(cand, i):
                rtext = cand
                break
        rhyme = Rhyme(*_key_fields(t.rhyme_by_text[rtext]))
        i += len(rtext)
        if rtext.endswith(asat) and text[i - 1] == virama:
            stacked = True
        killers = []
        while not stacked and i < n and view[i] in t.letter_ids:
            kmeds, j = read_unit(i)
            if j < n and view[j] == asat:
                killers.append(OnsetUnit(t.letter_ids[view[i]], tuple(kmeds)))
                if text[j] == virama:
                    stacked = True
                i = j + 1
            else:
                break
        if i < n and view[i] not in t.letter_ids and view[i] not in t.independent_chars:
            fail(f"unexpected sign {view[i]!r}", i)
        syl = BurmeseSyllable(onset, rhyme, KillerCoda(tuple(killers)))
        if killers:
            try:
                _check_killers(rhyme, syl.killer_coda.text())
            except InvalidSyllable as exc:
                fail(str(exc), i)
        out.append(syl)
    if stacked:
        fail("text ends inside a stacked cluster", n)
    return out


def _key_fields(key):
    nucleus, ending, tone, variant = key
    return nucleus, ending, tone, variant


def is_valid_text(text: str) -> bool:
    try:
        decompose(text)
    except UnparseableText:
        return False
    return True


def valid_rhymes() -> list[Rhyme]:
    """Every rhyme with a spelling in the table, in table order."""
    return [Rhyme(*k) for k in _tables().rhymes]


# ---------------------------------------------------------------------------
# alignment notation


@dataclass(frozen=True)
class AlignmentPair:
    """One source span aligned to one target fragment.

    ``kind`` is ``onset`` (rendered with a trailing "-"), ``rhyme`` (rendered
    with a leading "+"), ``coda`` or ``literal`` (rendered as is).
    ``syllable`` is the index of the target syllable the fragment starts in.
    """

    src_start: int
    src_end: int
    source: str
    kind: str
    target: str
    syllable: int = 0


def render_fragment(pair: AlignmentPair) -> str:
    if pair.kind == "onset":
        return pair.target + "-"
    if pair.kind == "rhyme":
        return "+" + pair.target
    return pair.target


def render_alignment_notation(alignment: Sequence[AlignmentPair]) -> str:
    pos = alignment[0].src_start if alignment else 0
    if alignment and pos != 0:
        raise GapInAlignment(f"alignment starts at source offset {pos}")
    last_syl = 0
    lines = []
    for pair in alignment:
        if pair.src_start != pos:
            raise GapInAlignment(f"source gap or overlap at offset {pos} (next span starts at {pair.src_start})")
        if pair.syllable < last_syl:
            raise GapInAlignment(f"target fragments out of order at {pair.source!r}")
        pos = pair.src_end
        last_syl = pair.syllable
        lines.append(f"{pair.source or '<>'}→{render_fragment(pair)}")
    return "\n".join(lines)
