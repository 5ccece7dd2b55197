"""Grapheme tokenization and syllable chunking of Latin-spelled words.

The multigraph inventory and the list of legal onset clusters come from the
rule pack (``@multigraph`` and ``@onsets`` directives), so they can be edited
without touching code.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence

VOWEL_LETTERS = frozenset("AEIOU")
NASAL_LETTERS = frozenset({"M", "N", "NG"})

KLASSES = ("consonantal", "vocalic", "silent-final-E", "ambiguous-Y", "separator")

FLAGS = (
    "word_initial",
    "word_final",
    "doubled_consonant_follows",
    "before_R",
    "before_L",
    "silent_E_final",
    "syllabic_R",
    "syllabic_L",
    "hiatus_start",
    "nasal_follows",
    "epenthetic",
)

_WORD_RE = re.compile(r"[A-Za-z'-]+")


class NonLatinInput(ValueError):
    def __init__(self, char: str, word: str):
        super().__init__(f"non-Latin character {char!r} in {word!r}")
        self.char = char


@dataclass(frozen=True)
class Grapheme:
    text: str
    klass: str
    start: int = 0

    @property
    def end(self) -> int:
        return self.start + len(self.text)

    @property
    def is_vowel(self) -> bool:
        return self.klass == "vocalic"

    def __repr__(self):
        return self.text


@dataclass
class Inventory:
    """Multigraphs (text -> klass, optional word-final anchor) and legal onsets."""

    multigraphs: dict = field(default_factory=dict)
    final_only: frozenset = frozenset()
    onsets: frozenset = frozenset()
    coda_only: frozenset = frozenset()

    @property
    def max_len(self) -> int:
        return max((len(m) for m in self.multigraphs), default=1)


def parse_inventory(lines: Iterable[str]) -> Inventory:
    multigraphs: dict = {}
    final_only = set()
    onsets = set()
    coda_only = set()
    for line in lines:
        if not line.startswith("@"):
            continue
        parts = line.rstrip("\n").split("\t")
        if parts[0] == "@multigraph" and len(parts) >= 3:
            klass = parts[1]
            for item in parts[2].split():
                text = item.rstrip("$")
                multigraphs[text] = klass
                if item.endswith("$"):
                    final_only.add(text)
        elif parts[0] == "@onsets" and len(parts) >= 2:
            onsets.update(parts[1].split())
        elif parts[0] == "@coda_only" and len(parts) >= 2:
            coda_only.update(parts[1].split())
    return Inventory(multigraphs, frozenset(final_only), frozenset(onsets - coda_only), frozenset(coda_only))


@lru_cache(maxsize=None)
def default_inventory() -> Inventory:
    text = resources.files("mytranslit.data").joinpath("en.pack").read_text("utf-8")
    return parse_inventory(text.splitlines())


def normalize_word(word: str) -> str:
    w = word.strip().strip("'-")
    if not w:
        raise NonLatinInput("", word)
    for ch in w:
        if not _WORD_RE.fullmatch(ch):
            raise NonLatinInput(ch, word)
    return w.upper()


def tokenize(word: str, inventory: Inventory | None = None) -> list[Grapheme]:
    inv = inventory or default_inventory()
    w = normalize_word(word)
    out: list[Grapheme] = []
    i = 0
    while i < len(w):
        for size in range(min(inv.max_len, len(w) - i), 1, -1):
            piece = w[i:i + size]
            if piece in inv.multigraphs and (piece not in inv.final_only or i + size == len(w)):
                out.append(Grapheme(piece, inv.multigraphs[piece], i))
                i += size
                break
        else:
            ch = w[i]
            if ch in "'-":
                klass = "separator"
            elif ch in VOWEL_LETTERS:
                klass = "vocalic"
            elif ch == "Y":
                klass = "ambiguous-Y"
            else:
                klass = "consonantal"
            out.append(Grapheme(ch, klass, i))
            i += 1
    return _mark_silent_e(out)


def _mark_silent_e(gs: list[Grapheme]) -> list[Grapheme]:
    if len(gs) < 3 or gs[-1].text != "E" or gs[-1].klass != "vocalic":
        return gs
    if gs[-2].klass != "consonantal":
        return gs
    # a word-initial Y is consonantal, so it cannot carry the vowel
    if not any(g.klass == "vocalic" or (g.klass == "ambiguous-Y" and i > 0) for i, g in enumerate(gs[:-2])):
        return gs
    return gs[:-1] + [Grapheme("E", "silent-final-E", gs[-1].start)]


@dataclass
class LatinChunk:
    onset: list = field(default_factory=list)
    nucleus: list = field(default_factory=list)
    coda: list = field(default_factory=list)
    flags: set = field(default_factory=set)

    @property
    def graphemes(self) -> list:
        return self.onset + self.nucleus + self.coda

    @property
    def text(self) -> str:
        return "".join(g.text for g in self.graphemes)

    @property
    def start(self) -> int:
        gs = self.graphemes
        return gs[0].start if gs else 0

    def onset_text(self) -> str:
        return "".join(g.text for g in self.onset)

    def nucleus_text(self) -> str:
        return "".join(g.text for g in self.nucleus)

    def coda_text(self, with_silent: bool = False) -> str:
        return "".join(g.text for g in self.coda if with_silent or g.klass != "silent-final-E")

    def __repr__(self):
        return f"[{self.onset_text()}|{self.nucleus_text()}|{self.coda_text(True)}]"


def _resolve_y(gs: list[Grapheme]) -> list[Grapheme]:
    out = []
    for i, g in enumerate(gs):
        if g.klass == "ambiguous-Y":
            prev_v = i > 0 and gs[i - 1].klass == "vocalic"
            next_v = i + 1 < len(gs) and gs[i + 1].klass in ("vocalic", "ambiguous-Y")
            consonant = i == 0 or (prev_v and next_v) or (not prev_v and next_v and i > 0 and gs[i - 1].klass == "separator")
            g = Grapheme(g.text, "consonantal" if consonant else "vocalic", g.start)
        out.append(g)
    return out


def _is_doubled(a: Grapheme, b: Grapheme) -> bool:
    return a.klass == "consonantal" and a.text == b.text and len(a.text) == 1


def _split_run(run: list[Grapheme], inv: Inventory) -> tuple[list, list, bool]:
    """Split an intervocalic consonant run into (coda, onset, doubled)."""
    if not run:
        return [], [], False
    for k, g in enumerate(run):
        if g.klass == "separator":
            return run[:k + 1], run[k + 1:], False
    for k, g in enumerate(run):
        if g.text == "CK":
            return run[:k], run[k:], True
        if k + 1 < len(run) and _is_doubled(g, run[k + 1]):
            return run[:k + 1], run[k + 1:], True
    for k in range(len(run)):
        suffix = run[k:]
        text = "".join(g.text for g in suffix)
        if len(suffix) == 1 and suffix[0].text not in inv.coda_only:
            return run[:k], suffix, False
        if text in inv.onsets:
            return run[:k], suffix, False
    return run, [], False


def chunk(graphemes: Sequence[Grapheme], inventory: Inventory | None = None) -> list[LatinChunk]:
    inv = inventory or default_inventory()
    gs = _resolve_y(list(graphemes))
    n = len(gs)
    if n == 0:
        return []

    # nucleus slots: (start, end); a syllabic L/R slot is (i, i) with the
    # liquid kept for the coda
    slots: list[tuple[int, int, str | None]] = []
    syllabic_at = None
    if (n >= 3 and gs[-1].klass == "silent-final-E" and gs[-2].text in ("L", "R")
            and gs[-3].klass == "consonantal" and gs[-3].text != gs[-2].text):
        syllabic_at = n - 2
    for i, g in enumerate(gs):
        if g.klass == "vocalic":
            slots.append((i, i + 1, None))
    if syllabic_at is not None:
        slots.append((syllabic_at, syllabic_at, gs[syllabic_at].text))

    if not slots:
        return [LatinChunk(onset=gs, flags={"word_initial", "word_final", "epenthetic"})]

    chunks: list[LatinChunk] = []
    first_start = slots[0][0]
    onset = gs[:first_start]
    for idx, (s, e, syl) in enumerate(slots):
        c = LatinChunk(onset=list(onset), nucleus=gs[s:e])
        if syl:
            c.flags.add("syllabic_L" if syl == "L" else "syllabic_R")
        if idx + 1 < len(slots):
            nxt = slots[idx + 1][0]
            coda, onset, dbl = _split_run(gs[e:nxt], inv)
            c.coda = coda
            if dbl:
                c.flags.add("doubled_consonant_follows")
        else:
            c.coda = gs[e:]
        chunks.append(c)

    chunks = _split_sonorant_codas(chunks)

    for i, c in enumerate(chunks):
        if i == 0:
            c.flags.add("word_initial")
        elif not c.onset:
            c.flags.add("hiatus_start")
        if i == len(chunks) - 1:
            c.flags.add("word_final")
        else:
            nxt = chunks[i + 1].onset
            if nxt:
                if nxt[0].text == "R":
                    c.flags.add("before_R")
                elif nxt[0].text == "L":
                    c.flags.add("before_L")
                if nxt[0].text in NASAL_LETTERS:
                    c.flags.add("nasal_follows")
        if any(g.klass == "silent-final-E" for g in c.coda):
            c.flags.add("silent_E_final")
    return chunks


def _split_sonorant_codas(chunks: list[LatinChunk]) -> list[LatinChunk]:
    out = []
    for c in chunks:
        coda = c.coda
        if (len(coda) >= 2 and coda[0].text == "L" and coda[1].text in NASAL_LETTERS and c.nucleus):
            rest = LatinChunk(onset=[coda[0]], nucleus=[], coda=coda[1:], flags={"syllabic_L"})
            c.coda = []
            out.extend([c, rest])
        else:
            out.append(c)
    return out


def analyze(word: str, inventory: Inventory | None = None) -> list[LatinChunk]:
    return chunk(tokenize(word, inventory), inventory)
