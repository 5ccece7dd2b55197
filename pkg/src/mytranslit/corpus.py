"""Gold corpus loading and top-k evaluation.

The corpus is a UTF-8 TSV with columns ``source target origin lang flags``.
Entries flagged ``verify`` are loaded but left out of every metric.
"""

from __future__ import annotations

import difflib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import latin_analysis as la
from . import pinyin as py
from .rule_engine import NoRuleApplicable, RuleSet, data_path, default_ruleset, transliterate
from .script_model import ScriptError, compose, decompose

ORIGINS = ("M", "W")
LANGS = ("en", "zh")
ENTRY_FLAGS = ("verify", "lexicon", "modern_killer_style")

# flags every chunk carries trivially; never reported as rule gaps
_POSITIONAL = {"word_initial", "word_final"}
# how far down the list to look for the gold target when attributing a miss
_ATTRIBUTION_DEPTH = 25


class CorpusError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ParseError(CorpusError):
    pass


class InvalidTarget(CorpusError):
    pass


@dataclass(frozen=True)
class CorpusEntry:
    source: str
    target: str
    origin: str = "M"
    lang: str = "en"
    flags: frozenset = frozenset()
    line: int = 0

    @property
    def excluded(self) -> bool:
        return "verify" in self.flags


def parse_corpus(lines: Iterable[str]) -> list[CorpusEntry]:
    entries = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) < 4 or len(cols) > 5:
            raise ParseError(lineno, f"expected 4 or 5 tab-separated columns, got {len(cols)}")
        source, target, origin, lang = (c.strip() for c in cols[:4])
        flag_text = cols[4].strip() if len(cols) == 5 else ""
        flags = frozenset(f.strip() for f in flag_text.split(",") if f.strip() and f.strip() != "-")
        if not source or not target:
            raise ParseError(lineno, "empty source or target")
        if origin not in ORIGINS:
            raise ParseError(lineno, f"origin must be M or W, not {origin!r}")
        if lang not in LANGS:
            raise ParseError(lineno, f"lang must be en or zh, not {lang!r}")
        unknown = flags - set(ENTRY_FLAGS)
        if unknown:
            raise ParseError(lineno, f"unknown flags {sorted(unknown)}")
        if "verify" not in flags:
            try:
                decompose(target)
            except ScriptError as exc:
                raise InvalidTarget(lineno, f"{target!r} is not well-formed Burmese: {exc}") from None
        entries.append(CorpusEntry(source, target, origin, lang, flags, lineno))
    return entries


def load_corpus(file) -> list[CorpusEntry]:
    return parse_corpus(Path(file).read_text(encoding="utf-8").splitlines())


def default_corpus() -> list[CorpusEntry]:
    return load_corpus(data_path("corpus.tsv"))


# ---------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class Failure:
    entry: CorpusEntry
    candidates: tuple  # (target, score) pairs, best first
    divergent_rules: tuple = ()
    flag_gaps: tuple = ()  # chunk flags no applied rule conditioned on
    error: str = ""


@dataclass
class LangStats:
    n: int = 0
    top1: int = 0
    topk: int = 0
    syllables: float = 0.0


@dataclass
class Report:
    k: int
    n: int
    excluded: int
    top1: float | None
    topk: float | None
    syllable_accuracy: float | None
    per_lang: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def render_text(self) -> str:
        lines = [
            f"entries evaluated: {self.n} (excluded: {self.excluded})",
            f"top-1 accuracy: {_pct(self.top1)}",
            f"top-{self.k} accuracy: {_pct(self.topk)}",
            f"syllable accuracy: {_pct(self.syllable_accuracy)}",
        ]
        for lang, st in sorted(self.per_lang.items()):
            lines.append(f"  {lang}: n={st.n} top-1 {_pct(_ratio(st.top1, st.n))} "
                         f"top-{self.k} {_pct(_ratio(st.topk, st.n))}")
        if self.failures:
            lines.append("")
            lines.append("failures:")
        for f in self.failures:
            got = ", ".join(f"{t} ({_num(s)})" for t, s in f.candidates) or "-"
            lines.append(f"  {f.entry.source} -> {f.entry.target}  got: {got}")
            if f.error:
                lines.append(f"    error: {f.error}")
            if f.divergent_rules:
                lines.append(f"    rules: {'; '.join(f.divergent_rules)}")
            if f.flag_gaps:
                lines.append(f"    unhandled flags: {', '.join(f.flag_gaps)}")
        return "\n".join(lines) + "\n"

    def render_tsv(self) -> str:
        rows = [
            ("metric", "value"),
            ("n", str(self.n)),
            ("excluded", str(self.excluded)),
            ("k", str(self.k)),
            ("top1", _fmt(self.top1)),
            (f"top{self.k}", _fmt(self.topk)),
            ("syllable_accuracy", _fmt(self.syllable_accuracy)),
        ]
        for lang, st in sorted(self.per_lang.items()):
            rows.append((f"{lang}.n", str(st.n)))
            rows.append((f"{lang}.top1", _fmt(_ratio(st.top1, st.n))))
            rows.append((f"{lang}.top{self.k}", _fmt(_ratio(st.topk, st.n))))
        out = ["\t".join(r) for r in rows]
        out.append("")
        out.append("\t".join(("source", "target", "lang", "candidates", "divergent_rules", "flag_gaps", "error")))
        for f in self.failures:
            out.append("\t".join((
                f.entry.source, f.entry.target, f.entry.lang,
                " ".join(f"{t}:{_num(s)}" for t, s in f.candidates) or "-",
                " ".join(f.divergent_rules) or "-",
                " ".join(f.flag_gaps) or "-",
                f.error or "-",
            )))
        return "\n".join(out) + "\n"


def _ratio(a, n):
    return a / n if n else None


def _pct(x) -> str:
    return "N/A" if x is None else f"{100 * x:.1f}%"


def _fmt(x) -> str:
    return "N/A" if x is None else f"{x:.4f}"


def _num(x) -> str:
    return str(int(x)) if float(x).is_integer() else f"{x:g}"


def syllable_match(gold: str, predicted: str) -> float:
    """Fraction of syllables shared by two Burmese strings, aligned by
    longest matching blocks over their decompositions."""
    try:
        a = [compose([s]) for s in decompose(gold)]
        b = [compose([s]) for s in decompose(predicted)]
    except ScriptError:
        return 0.0
    if not a and not b:
        return 1.0
    matcher = difflib.SequenceMatcher(None, a, b, autojunk=False)
    same = sum(block.size for block in matcher.get_matching_blocks())
    return same / max(len(a), len(b))


def _candidates(entry: CorpusEntry, k: int, rs: RuleSet | None, prs: RuleSet | None):
    if entry.lang == "zh":
        return py.transliterate_pinyin(entry.source, k=k, ruleset=prs)
    return transliterate(entry.source, rs, k)


def _flag_gaps(entry: CorpusEntry, cand, rs: RuleSet) -> tuple:
    try:
        chunks = la.chunk(la.tokenize(entry.source, rs.inventory), rs.inventory)
    except la.NonLatinInput:
        return ()
    present = set()
    for c in chunks:
        present |= set(c.flags)
    looked_at = set()
    for entry_id in cand.rule_trace:
        rule = rs.by_id.get(entry_id.rpartition("#")[0])
        if rule is None:
            continue
        for p in rule.predicates:
            if p.negate:
                continue
            if not p.values:
                looked_at.add(p.key)
            elif p.key in ("prevflag", "nextflag"):
                looked_at |= set(p.values)
    return tuple(sorted(present - looked_at - _POSITIONAL))


def _divergent(top, gold, target: str) -> tuple:
    """Rules in the top candidate's derivation that the gold derivation does
    not share; when the gold was never derived, rules whose output does not
    appear in the target."""
    if gold is not None:
        keep = set(gold.rule_trace)
        out = [t for t in top.rule_trace if t not in keep]
    else:
        out = []
        for app in top.applications:
            body = app.fragment.strip("+-_")
            if body and body not in target:
                out.append(f"{app.rule_id}#{app.output}")
    seen = []
    for t in out:
        if t not in seen:
            seen.append(t)
    return tuple(seen)


def _score_entry(entry: CorpusEntry, k: int, rs: RuleSet | None, prs: RuleSet | None):
    """(top1 hit, topk hit, syllable fraction, Failure or None)."""
    try:
        cands = _candidates(entry, k, rs, prs)
    except (NoRuleApplicable, py.InvalidPinyin, la.NonLatinInput) as exc:
        return False, False, 0.0, Failure(entry, (), error=str(exc))
    targets = [c.target for c in cands]
    hit1 = bool(targets) and targets[0] == entry.target
    hitk = entry.target in targets
    syl = syllable_match(entry.target, targets[0]) if targets else 0.0
    if hit1:
        return hit1, hitk, syl, None
    deep = _candidates(entry, max(k, _ATTRIBUTION_DEPTH), rs, prs)
    gold = next((c for c in deep if c.target == entry.target), None)
    top = cands[0]
    gaps = ()
    if entry.lang == "en":
        gaps = _flag_gaps(entry, top, rs if rs is not None else default_ruleset())
    failure = Failure(entry, tuple((c.target, c.score) for c in cands),
                      _divergent(top, gold, entry.target), gaps)
    return hit1, hitk, syl, failure


_WORKER_STATE: dict = {}


def _init_worker(k, rs, prs):
    _WORKER_STATE.update(k=k, rs=rs, prs=prs)


def _score_in_worker(entry):
    s = _WORKER_STATE
    return _score_entry(entry, s["k"], s["rs"], s["prs"])


def evaluate(corpus: Sequence[CorpusEntry], ruleset: RuleSet | None = None, k: int = 3,
             pinyin_ruleset: RuleSet | None = None, workers: int = 1) -> Report:
    """Score *corpus* against the engine.

    English entries use *ruleset* (the shipped pack plus lexicon when None),
    Pinyin entries use *pinyin_ruleset*.  With ``workers > 1`` entries are
    scored in a process pool; the report is identical either way.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    included = sorted((e for e in corpus if not e.excluded),
                      key=lambda e: (e.lang, e.source, e.target, e.origin))
    if workers > 1 and len(included) > 1:
        with ProcessPoolExecutor(workers, initializer=_init_worker,
                                 initargs=(k, ruleset, pinyin_ruleset)) as pool:
            results = list(pool.map(_score_in_worker, included, chunksize=8))
    else:
        results = [_score_entry(e, k, ruleset, pinyin_ruleset) for e in included]

    per_lang: dict = {}
    top1 = topk = 0
    syl_total = 0.0
    failures = []
    for entry, (h1, hk, syl, failure) in zip(included, results):
        st = per_lang.setdefault(entry.lang, LangStats())
        st.n += 1
        st.top1 += h1
        st.topk += hk
        st.syllables += syl
        top1 += h1
        topk += hk
        syl_total += syl
        if failure is not None:
            failures.append(failure)
    n = len(included)
    return Report(k, n, len(corpus) - n, _ratio(top1, n), _ratio(topk, n), _ratio(syl_total, n),
                  per_lang, failures)
