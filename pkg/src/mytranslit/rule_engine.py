"""Tiered contextual rewrite rules and best-first candidate search.

Rule-pack lines are ``tier<TAB>pattern<TAB>context<TAB>outputs<TAB>weight``.
Patterns carry a position class after ``@`` (``onset``, ``rhyme``, ``coda``
or ``word``).  Outputs are ``|``-separated Burmese fragments in the
"-"/"+" notation; ``_`` is the empty fragment.  See ``docs/rule_pack.md``.
"""

from __future__ import annotations

import heapq
import itertools
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from . import latin_analysis as la
from .script_model import (
    AlignmentPair,
    BurmeseSyllable,
    InvalidSyllable,
    KillerCoda,
    OnsetUnit,
    Rhyme,
    ScriptError,
    compose,
    decompose,
    render_alignment_notation,
)

TIERS = ("lexicon", "grapheme_override", "cluster", "default")
TIER_RANK = {t: i for i, t in enumerate(TIERS)}
POSITIONS = ("onset", "rhyme", "coda", "word")

DEFAULT_PARAMS = {"tone_variant_weight": 1, "dominance_penalty": 1}

_FLAG_ALIASES = {"dbl": "doubled_consonant_follows", "silentE": "silent_E_final"}


class RulePackError(ValueError):
    pass


class ParseError(RulePackError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DuplicateRule(RulePackError):
    pass


class InvalidFragment(RulePackError):
    pass


class NoRuleApplicable(RuntimeError):
    def __init__(self, word: str, chunk: la.LatinChunk, slot: str):
        super().__init__(f"no {slot} rule applies to chunk {chunk!r} of {word!r}")
        self.word = word
        self.chunk = chunk
        self.slot = slot


# ---------------------------------------------------------------------------
# fragments


@dataclass(frozen=True)
class Fragment:
    """A parsed rule output."""

    text: str
    units: tuple = ()  # onset fragments
    medials: tuple = ()  # rhyme fragments: medials merged into the onset
    rhyme: Rhyme | None = None
    killers: tuple = ()  # rhyme or coda fragments
    extra: tuple = ()  # whole syllables following the fragment's own

    @property
    def is_empty(self) -> bool:
        return self.text == "_"


_PROBE = "က"


def parse_killer_text(text: str) -> tuple:
    units = []
    i = 0
    while i < len(text):
        j = i + 1
        while j < len(text) and text[j] in "ျြွှ":
            j += 1
        if j >= len(text) or text[j] != "်":
            raise InvalidFragment(f"{text!r} is not a sequence of killed letters")
        units.append(OnsetUnit.from_text(text[i:j]))
        i = j + 1
    return tuple(units)


def parse_fragment(text: str, position: str) -> Fragment:
    try:
        return _parse_fragment(text, position)
    except ScriptError as exc:
        raise InvalidFragment(f"{text!r}: {exc}") from exc


def _parse_fragment(text: str, position: str) -> Fragment:
    if text == "_":
        if position == "onset":
            raise InvalidFragment("onset fragments cannot be empty")
        return Fragment(text)
    if position == "onset":
        if not text.endswith("-"):
            raise InvalidFragment(f"onset fragment {text!r} must end with '-'")
        syls = decompose(text[:-1])
        if not syls or any(s.literal_override or s.rhyme.nucleus != "ə" or s.killer_coda.letters
                           for s in syls):
            raise InvalidFragment(f"onset fragment {text!r} must be bare consonant letters")
        return Fragment(text, units=tuple(s.onset for s in syls))
    if position == "rhyme":
        if not text.startswith("+"):
            raise InvalidFragment(f"rhyme fragment {text!r} must start with '+'")
        syls = decompose(_PROBE + text[1:])
        head = syls[0]
        head.rhyme.check()
        compose(syls)
        return Fragment(text, medials=head.onset.medials, rhyme=head.rhyme,
                        killers=head.killer_coda.letters, extra=tuple(syls[1:]))
    if position == "coda":
        if text.endswith("်") and not text.startswith("+"):
            try:
                return Fragment(text, killers=parse_killer_text(text))
            except InvalidFragment:
                pass
        syls = decompose(text)
        compose(syls)
        return Fragment(text, extra=tuple(syls))
    if position == "word":
        try:
            syls = tuple(decompose(text))
        except ScriptError:
            syls = (BurmeseSyllable(literal_override=text),)
        return Fragment(text, extra=syls)
    raise InvalidFragment(f"unknown position {position!r}")


# ---------------------------------------------------------------------------
# patterns and contexts


_TOKEN_RE = re.compile(r"\{\w+\}|[A-Z'\-]+")


@dataclass(frozen=True)
class Pattern:
    position: str
    nucleus: str = ""  # rhyme
    tokens: tuple = ()  # onset / coda / rhyme-coda tokens
    empty: bool = False  # "_" onset: matches an empty onset

    @classmethod
    def parse(cls, text: str) -> "Pattern":
        if "@" not in text:
            raise RulePackError(f"pattern {text!r} lacks a @position")
        body, position = text.rsplit("@", 1)
        if position not in POSITIONS:
            raise RulePackError(f"unknown position {position!r}")
        if position == "word":
            return cls(position, tokens=(body.upper(),))
        if position == "onset" and body == "_":
            return cls(position, empty=True)
        if position == "rhyme":
            nucleus, _, coda = body.partition(".")
            toks = tuple(_TOKEN_RE.findall(coda))
            if "".join(toks) != coda:
                raise RulePackError(f"bad coda pattern in {text!r}")
            return cls(position, nucleus=nucleus, tokens=toks)
        toks = tuple(_TOKEN_RE.findall(body))
        if not toks or "".join(toks) != body:
            raise RulePackError(f"bad pattern {text!r}")
        return cls(position, tokens=toks)


@dataclass(frozen=True)
class Predicate:
    key: str
    values: frozenset = frozenset()
    negate: bool = False


def parse_context(text: str) -> tuple:
    text = text.strip()
    if text in ("", "*"):
        return ()
    preds = []
    for item in text.split(","):
        item = item.strip()
        if "!=" in item:
            k, v = item.split("!=", 1)
            preds.append(Predicate(k, frozenset(v.split("|")), True))
        elif "=" in item:
            k, v = item.split("=", 1)
            preds.append(Predicate(k, frozenset(v.split("|")), False))
        elif item.startswith("!"):
            preds.append(Predicate(_FLAG_ALIASES.get(item[1:], item[1:]), negate=True))
        else:
            preds.append(Predicate(_FLAG_ALIASES.get(item, item)))
    return tuple(preds)


# ---------------------------------------------------------------------------
# rules


@dataclass(frozen=True)
class RewriteRule:
    tier: str
    pattern_text: str
    context_text: str
    outputs: tuple  # of Fragment
    weights: tuple
    line: int = 0
    note: str = ""

    def __post_init__(self):
        object.__setattr__(self, "pattern", Pattern.parse(self.pattern_text))
        object.__setattr__(self, "predicates", parse_context(self.context_text))

    @property
    def id(self) -> str:
        return f"{self.tier}:{self.pattern_text}:{self.context_text or '*'}"

    @property
    def position(self) -> str:
        return self.pattern.position


@dataclass
class RuleSet:
    rules: list = field(default_factory=list)
    inventory: la.Inventory = field(default_factory=la.Inventory)
    classes: dict = field(default_factory=dict)  # class name -> frozenset of grapheme texts
    params: dict = field(default_factory=lambda: dict(DEFAULT_PARAMS))

    def __post_init__(self):
        self._index()

    def _index(self):
        self.by_position = {p: [r for r in self.rules if r.position == p] for p in POSITIONS}
        self.by_id = {r.id: r for r in self.rules}
        self.lexicon = {}
        for r in self.by_position["word"]:
            self.lexicon.setdefault(r.pattern.tokens[0], r)

    def without(self, predicate) -> "RuleSet":
        """A copy with the rules for which ``predicate(rule)`` holds removed."""
        return RuleSet([r for r in self.rules if not predicate(r)], self.inventory,
                       dict(self.classes), dict(self.params))

    def with_lexicon(self, entries: Iterable) -> "RuleSet":
        extra = []
        for e in entries:
            frag = parse_fragment(e.target, "word")
            extra.append(RewriteRule("lexicon", f"{e.source.upper()}@word", "*", (frag,), (0,), note=e.note))
        rules = [r for r in self.rules if not (r.position == "word" and r.pattern.tokens[0] in
                                                {x.pattern.tokens[0] for x in extra})]
        return RuleSet(rules + extra, self.inventory, dict(self.classes), dict(self.params))

    def __len__(self):
        return len(self.rules)


def _number(text: str, lineno: int):
    try:
        v = float(text)
    except ValueError:
        raise ParseError(lineno, f"weight {text!r} is not a number") from None
    if v < 0:
        raise ParseError(lineno, "weights must be non-negative")
    return int(v) if v.is_integer() else v


def parse_rule_pack(lines: Iterable[str], source: str = "<pack>") -> RuleSet:
    rules: list[RewriteRule] = []
    seen = {}
    raw_lines = list(lines)
    classes: dict = {}
    params = dict(DEFAULT_PARAMS)
    for lineno, raw in enumerate(raw_lines, 1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if line.startswith("@"):
            head = parts[0]
            if head == "@class":
                if len(parts) < 3:
                    raise ParseError(lineno, "@class needs a name and members")
                classes[parts[1]] = frozenset(parts[2].split())
            elif head == "@param":
                if len(parts) < 3:
                    raise ParseError(lineno, "@param needs a name and a value")
                params[parts[1]] = _number(parts[2], lineno)
            elif head not in ("@multigraph", "@onsets", "@coda_only", "@syllables"):
                raise ParseError(lineno, f"unknown directive {head}")
            continue
        if len(parts) < 5:
            raise ParseError(lineno, f"expected 5 tab-separated fields, got {len(parts)}")
        tier, pattern, context, outputs, weight = (p.strip() for p in parts[:5])
        note = parts[5].strip() if len(parts) > 5 else ""
        if tier not in TIERS:
            raise ParseError(lineno, f"unknown tier {tier!r}")
        try:
            pat = Pattern.parse(pattern)
        except RulePackError as exc:
            raise ParseError(lineno, str(exc)) from None
        outs = [o.strip() for o in outputs.split("|")]
        if not outputs or any(not o for o in outs):
            raise ParseError(lineno, "outputs must be a non-empty list")
        frags = []
        for o in outs:
            try:
                frags.append(parse_fragment(o, pat.position))
            except InvalidFragment as exc:
                raise InvalidFragment(f"line {lineno}: {exc}") from None
        ws = [_number(w, lineno) for w in weight.split("|")]
        if len(ws) == 1:
            ws = ws * len(frags)
        if len(ws) != len(frags):
            raise ParseError(lineno, "weight count does not match output count")
        key = (tier, pattern, context or "*")
        if key in seen:
            raise DuplicateRule(f"line {lineno}: rule {':'.join(key)} already defined on line {seen[key]}")
        seen[key] = lineno
        rules.append(RewriteRule(tier, pattern, context or "*", tuple(frags), tuple(ws), lineno, note))
    return RuleSet(rules, la.parse_inventory(raw_lines), classes, params)


def load_rule_pack(file) -> RuleSet:
    path = Path(file)
    return parse_rule_pack(path.read_text("utf-8").splitlines(), str(path))


@dataclass(frozen=True)
class LexiconEntry:
    source: str
    target: str
    note: str = ""


def parse_lexicon(lines: Iterable[str]) -> list[LexiconEntry]:
    out = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 2:
            raise ParseError(lineno, "lexicon lines need source and target")
        out.append(LexiconEntry(parts[0].strip().upper(), parts[1].strip(),
                                parts[2].strip() if len(parts) > 2 else ""))
    return out


def load_lexicon(file) -> list[LexiconEntry]:
    return parse_lexicon(Path(file).read_text("utf-8").splitlines())


def data_path(name: str) -> Path:
    return Path(str(resources.files("mytranslit.data").joinpath(name)))


@lru_cache(maxsize=None)
def default_ruleset(with_lexicon: bool = True) -> RuleSet:
    rs = load_rule_pack(data_path("en.pack"))
    if with_lexicon:
        rs = rs.with_lexicon(load_lexicon(data_path("lexicon.tsv")))
    return rs


# ---------------------------------------------------------------------------
# context evaluation


@dataclass
class _Site:
    chunks: list
    index: int
    rest: list = field(default_factory=list)  # rhyme: coda graphemes left after the pattern
    grapheme: la.Grapheme | None = None  # coda: current grapheme
    coda_index: int = 0
    onset_pos: int = 0
    onset_end: int = 0

    @property
    def chunk(self) -> la.LatinChunk:
        return self.chunks[self.index]


def _classes_of(text: str, classes: dict) -> set:
    return {name for name, members in classes.items() if text in members}


def _real_coda(c: la.LatinChunk) -> list:
    return [g for g in c.coda if g.klass != "silent-final-E"]


def _eval(pred: Predicate, site: _Site, rs: RuleSet) -> bool:
    c = site.chunk
    k = pred.key
    if not pred.values:
        if k == "prevdbl":
            hit = site.index > 0 and "doubled_consonant_follows" in site.chunks[site.index - 1].flags
        elif k == "gem":
            g = site.grapheme
            nxt = site.chunks[site.index + 1].onset if site.index + 1 < len(site.chunks) else []
            real = _real_coda(c)
            hit = bool(g is not None and nxt and real and g is real[-1]
                       and "doubled_consonant_follows" in c.flags and nxt[0].text[0] == g.text[-1])
        elif k == "last":
            real = _real_coda(c)
            if site.grapheme is not None:
                hit = bool(real) and site.grapheme is real[-1]
            else:
                hit = site.onset_end == len(c.onset)
        elif k == "first":
            hit = site.onset_pos == 0
        elif k == "silent":
            hit = site.grapheme is not None and site.grapheme.klass == "silent-final-E"
        else:
            hit = k in c.flags
        return hit != pred.negate
    if k == "rest":
        real = [g for g in site.rest if g.klass != "silent-final-E"]
        vals = {"none"} if not real else _classes_of(real[0].text, rs.classes) | {"any", real[0].text}
    elif k == "after":
        real = _real_coda(c)
        after = real[site.coda_index + 1:] if site.grapheme is not None else []
        if site.grapheme is not None and site.grapheme in real:
            after = real[real.index(site.grapheme) + 1:]
        vals = {"none"} if not after else _classes_of(after[0].text, rs.classes) | {"any", after[0].text}
    elif k == "nuc":
        vals = {c.nucleus_text()}
    elif k == "onset":
        vals = {c.onset_text()}
    elif k == "coda":
        vals = {c.coda_text()}
    elif k == "prev":
        vals = {site.chunks[site.index - 1].nucleus_text() if site.index > 0 else ""}
    elif k == "prevcoda":
        vals = {site.chunks[site.index - 1].coda_text() if site.index > 0 else ""}
    elif k == "next":
        vals = {site.chunks[site.index + 1].onset_text() if site.index + 1 < len(site.chunks) else ""}
    elif k == "nextnuc":
        vals = {site.chunks[site.index + 1].nucleus_text() if site.index + 1 < len(site.chunks) else ""}
    elif k == "word":
        vals = {"".join(ch.text for ch in site.chunks)}
    elif k == "prevflag":
        vals = set(site.chunks[site.index - 1].flags) if site.index > 0 else set()
    elif k == "nextflag":
        vals = set(site.chunks[site.index + 1].flags) if site.index + 1 < len(site.chunks) else set()
    else:
        raise RulePackError(f"unknown context key {k!r}")
    hit = bool(vals & pred.values)
    return hit != pred.negate


def _context_ok(rule: RewriteRule, site: _Site, rs: RuleSet) -> bool:
    return all(_eval(p, site, rs) for p in rule.predicates)


def _match_tokens(tokens: Sequence[str], gs: Sequence[la.Grapheme], start: int, rs: RuleSet) -> int | None:
    """Number of graphemes consumed from ``gs[start:]`` by ``tokens``, or None."""
    i = start
    for tok in tokens:
        if tok.startswith("{"):
            name = tok[1:-1]
            if i >= len(gs) or gs[i].klass == "silent-final-E" or gs[i].text not in rs.classes.get(name, ()):
                return None
            i += 1
            continue
        acc = ""
        while acc != tok:
            if i >= len(gs) or not tok.startswith(acc + gs[i].text):
                return None
            acc += gs[i].text
            i += 1
    return i - start


# ---------------------------------------------------------------------------
# candidates and search


@dataclass(frozen=True)
class Application:
    rule_id: str
    output: int
    source: str
    fragment: str


@dataclass
class Candidate:
    source: str
    target: str
    syllables: list
    score: float
    alignment: list
    rule_trace: list
    applications: list = field(default_factory=list)

    @property
    def is_lexicon(self) -> bool:
        return bool(self.rule_trace) and self.rule_trace[0].startswith("lexicon:")


def score_from_trace(trace: Sequence[str], rs: RuleSet) -> float:
    total = 0
    for entry in trace:
        if entry == "variant:tone":
            total += rs.params["tone_variant_weight"]
        elif entry.startswith("penalty:dominated"):
            total += rs.params["dominance_penalty"]
        else:
            rid, _, k = entry.rpartition("#")
            total += rs.by_id[rid].weights[int(k)]
    return total


@dataclass(frozen=True)
class _State:
    chunk: int
    phase: int  # 0 onset, 1 rhyme, 2 coda
    pos: int
    built: tuple  # BurmeseSyllable
    pending: tuple  # OnsetUnit
    trace: tuple
    align: tuple
    apps: tuple


def _tone_swapped(r: Rhyme) -> Rhyme | None:
    if r.nucleus == "ə" or r.ending == "glottal" or r.tone == "creaky":
        return None
    alt = Rhyme(r.nucleus, r.ending, "high" if r.tone == "low" else "low", r.variant)
    return alt if alt.is_valid() else None


def _rhyme_fragment_text(medials, rhyme: Rhyme, killers, extra) -> str:
    head = BurmeseSyllable(OnsetUnit("ka", tuple(medials)), rhyme, KillerCoda(tuple(killers)))
    text = compose([head, *extra])
    return text[1:]


def _best_tiers(matches) -> int:
    return min((TIER_RANK[r.tier] for r, _ in matches), default=len(TIERS))


def transliterate(word: str, ruleset: RuleSet | None = None, k: int = 3) -> list[Candidate]:
    if k < 1:
        raise ValueError("k must be a positive integer")
    rs = ruleset if ruleset is not None else default_ruleset()
    graphemes = la.tokenize(word, rs.inventory)
    source = "".join(g.text for g in graphemes)
    results: list[Candidate] = []
    lex = rs.lexicon.get(source)
    if lex is not None:
        frag = lex.outputs[0]
        syls = list(frag.extra)
        results.append(Candidate(
            source, compose(syls), syls, 0,
            [AlignmentPair(0, len(source), source, "literal", frag.text, 0)],
            [f"{lex.id}#0"], [Application(lex.id, 0, source, frag.text)]))
        if k == 1:
            return results
    chunks = la.chunk(graphemes, rs.inventory)
    derived = _search(source, chunks, rs, k + len(results))
    seen = {c.target for c in results}
    for cand in derived:
        if cand.target not in seen:
            results.append(cand)
            seen.add(cand.target)
        if len(results) == k:
            break
    return results


def _search(word: str, chunks: list, rs: RuleSet, k: int) -> list[Candidate]:
    counter = itertools.count()
    start = _State(0, 0, 0, (), (), (), (), ())
    heap = [(0, 0, next(counter), start, None)]
    visited = set()
    found: dict = {}
    threshold = None
    tone_w = rs.params["tone_variant_weight"]
    penalty = rs.params["dominance_penalty"]
    progressed = False

    while heap:
        score, done, _, st, target = heapq.heappop(heap)
        if threshold is not None and score > threshold:
            break
        if done:
            if target not in found:
                found[target] = Candidate(
                    word, target, list(st.built), score, list(st.align), list(st.trace), list(st.apps))
                if len(found) >= k:
                    ranked = sorted(found.values(), key=_order_key)
                    threshold = ranked[k - 1].score
            continue
        key = (st.chunk, st.phase, st.pos, st.built, st.pending)
        if key in visited:
            continue
        visited.add(key)

        if st.chunk == len(chunks):
            try:
                text = compose(st.built)
            except InvalidSyllable:
                continue
            heapq.heappush(heap, (score, 1, next(counter), st, text))
            continue

        expansions = list(_expand(st, chunks, rs, word, tone_w, penalty))
        if expansions:
            progressed = True
        for cost, nst in expansions:
            heapq.heappush(heap, (score + cost, 0, next(counter), nst, None))

    if not found and not progressed and chunks:
        raise NoRuleApplicable(word, chunks[0], "any")
    return sorted(found.values(), key=_order_key)[:k]


def _order_key(c: Candidate):
    return (c.score, c.target)


def _expand(st: _State, chunks, rs: RuleSet, word: str, tone_w, penalty):
    c = chunks[st.chunk]
    site = _Site(chunks, st.chunk)
    if st.phase == 0:
        yield from _expand_onset(st, c, site, rs, word, penalty)
    elif st.phase == 1:
        yield from _expand_rhyme(st, c, site, rs, word, tone_w, penalty)
    else:
        yield from _expand_coda(st, c, site, rs, word, penalty)


def _span(gs: Sequence[la.Grapheme], default: int) -> tuple[int, int, str]:
    if not gs:
        return default, default, ""
    return gs[0].start, gs[-1].end, "".join(g.text for g in gs)


def _chunk_start(chunks, i: int) -> int:
    for c in chunks[i:]:
        if c.graphemes:
            return c.start
    return sum(len(ch.text) for ch in chunks)


def _expand_onset(st, c, site, rs, word, penalty):
    matches = []
    if not c.onset:
        for r in rs.by_position["onset"]:
            if r.pattern.empty and _context_ok(r, site, rs):
                matches.append((r, 0))
    else:
        for r in rs.by_position["onset"]:
            if r.pattern.empty:
                continue
            n = _match_tokens(r.pattern.tokens, c.onset, st.pos, rs)
            if not n:
                continue
            site.onset_pos, site.onset_end = st.pos, st.pos + n
            if _context_ok(r, site, rs):
                matches.append((r, n))
    if not matches:
        raise NoRuleApplicable(word, c, "onset")
    # within the best tier a longer match (STR over ST) dominates too
    best = min((TIER_RANK[r.tier], -n) for r, n in matches)
    here = _chunk_start(site.chunks, st.chunk)
    for r, n in matches:
        extra = penalty if (TIER_RANK[r.tier], -n) > best else 0
        s, e, src = _span(c.onset[st.pos:st.pos + n], here)
        for idx, (frag, w) in enumerate(zip(r.outputs, r.weights)):
            pending = st.pending + frag.units
            trace = st.trace + (f"{r.id}#{idx}",) + (("penalty:dominated@" + r.id,) if extra else ())
            syl_index = len(st.built) + len(st.pending)
            unit_text = "".join(u.text() for u in frag.units)
            pair = AlignmentPair(s, e, src, "onset", unit_text, syl_index)
            pos = st.pos + n
            phase = 1 if pos >= len(c.onset) else 0
            yield w + extra, _State(st.chunk, phase, pos if phase == 0 else 0, st.built, pending, trace,
                                    st.align + (pair,), st.apps + (Application(r.id, idx, src, frag.text),))


def _expand_rhyme(st, c, site, rs, word, tone_w, penalty):
    nuc = c.nucleus_text()
    matches = []
    for r in rs.by_position["rhyme"]:
        if r.pattern.nucleus != nuc:
            continue
        n = _match_tokens(r.pattern.tokens, c.coda, 0, rs)
        if n is None:
            continue
        site.rest = c.coda[n:]
        if _context_ok(r, site, rs):
            matches.append((r, n))
    if not matches:
        raise NoRuleApplicable(word, c, "rhyme")
    best = _best_tiers(matches)
    here = c.nucleus[0].start if c.nucleus else (c.onset[-1].end if c.onset else _chunk_start(site.chunks, st.chunk))
    if not st.pending:
        return
    for r, n in matches:
        extra_pen = penalty if TIER_RANK[r.tier] > best else 0
        gs = c.nucleus + c.coda[:n]
        s, e, src = _span(gs, here)
        for idx, (frag, w) in enumerate(zip(r.outputs, r.weights)):
            variants = [(frag.rhyme, 0, ())]
            alt = _tone_swapped(frag.rhyme)
            if alt is not None:
                variants.append((alt, tone_w, ("variant:tone",)))
            for rhyme, vw, vtrace in variants:
                try:
                    main = st.pending[-1].with_medials(frag.medials)
                except InvalidSyllable:
                    continue
                bare = tuple(BurmeseSyllable(u, Rhyme()) for u in st.pending[:-1])
                head = BurmeseSyllable(main, rhyme, KillerCoda(frag.killers))
                built = st.built + bare + (head,) + frag.extra
                trace = st.trace + (f"{r.id}#{idx}",) + vtrace + (
                    ("penalty:dominated@" + r.id,) if extra_pen else ())
                try:
                    ftext = _rhyme_fragment_text(frag.medials, rhyme, frag.killers, frag.extra)
                except InvalidSyllable:
                    continue
                pair = AlignmentPair(s, e, src, "rhyme", ftext, len(st.built) + len(bare))
                yield w + vw + extra_pen, _State(
                    st.chunk, 2, n, built, (), trace, st.align + (pair,),
                    st.apps + (Application(r.id, idx, src, "+" + ftext),))


def _expand_coda(st, c, site, rs, word, penalty):
    if st.pos >= len(c.coda):
        yield 0, _State(st.chunk + 1, 0, 0, st.built, (), st.trace, st.align, st.apps)
        return
    matches = []
    for r in rs.by_position["coda"]:
        n = _match_tokens(r.pattern.tokens, c.coda, st.pos, rs) if not _is_silent_tok(r) else None
        if _is_silent_tok(r):
            n = 1 if c.coda[st.pos].klass == "silent-final-E" else None
        if not n:
            continue
        site.grapheme = c.coda[st.pos]
        site.coda_index = st.pos
        if _context_ok(r, site, rs):
            matches.append((r, n))
    if not matches:
        raise NoRuleApplicable(word, c, "coda")
    best = _best_tiers(matches)
    for r, n in matches:
        extra_pen = penalty if TIER_RANK[r.tier] > best else 0
        s, e, src = _span(c.coda[st.pos:st.pos + n], 0)
        for idx, (frag, w) in enumerate(zip(r.outputs, r.weights)):
            built = st.built
            if frag.killers:
                last = built[-1]
                if last.literal_override is not None:
                    continue
                built = built[:-1] + (BurmeseSyllable(
                    last.onset, last.rhyme, KillerCoda(last.killer_coda.letters + frag.killers)),)
            built = built + frag.extra
            trace = st.trace + (f"{r.id}#{idx}",) + (("penalty:dominated@" + r.id,) if extra_pen else ())
            align = st.align
            if frag.is_empty and align:
                p = align[-1]
                align = align[:-1] + (AlignmentPair(p.src_start, e, p.source + src, p.kind, p.target, p.syllable),)
            else:
                ftext = frag.text if not frag.is_empty else ""
                align = align + (AlignmentPair(s, e, src, "coda", ftext, max(len(st.built) - 1, 0)),)
            yield w + extra_pen, _State(st.chunk, 2, st.pos + n, built, (), trace, align,
                                        st.apps + (Application(r.id, idx, src, frag.text),))


def _is_silent_tok(r: RewriteRule) -> bool:
    return r.pattern.tokens == ("{silent}",)


# ---------------------------------------------------------------------------
# explanation


def explain(candidate: Candidate) -> str:
    if candidate.is_lexicon:
        return f"lexicon: {candidate.source}"
    lines = [f"{candidate.source} -> {candidate.target}  (score {_fmt(candidate.score)})"]
    for app in candidate.applications:
        frag = "" if app.fragment == "_" else app.fragment
        lines.append(f"  {app.rule_id}#{app.output}  {app.source or '<>'}→{frag}")
    extras = [t for t in candidate.rule_trace if t.startswith(("variant:", "penalty:"))]
    for t in extras:
        lines.append(f"  {t}")
    lines.append(render_alignment_notation(candidate.alignment))
    return "\n".join(lines)


def _fmt(x) -> str:
    return str(int(x)) if float(x).is_integer() else f"{x:g}"
