"""Command-line front end.

    mytranslit en2my HOTEL
    mytranslit py2my kunming
    mytranslit explain CAMERA
    mytranslit eval --corpus corpus.tsv --figures out/

Exit codes: 0 success, 1 usage error, 2 data-file error, 3 no rule applies.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import corpus as corpus_mod
from . import latin_analysis as la
from . import pinyin as py
from .rule_engine import (
    NoRuleApplicable,
    RulePackError,
    data_path,
    explain,
    load_lexicon,
    load_rule_pack,
    transliterate,
)

PACK_ENV = "MYTRANSLIT_PACK"
EXIT_USAGE, EXIT_DATA, EXIT_NO_RULE = 1, 2, 3


class UsageError(Exception):
    pass


class DataFileError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class CliConfig:
    mode: str
    rule_pack_path: Path | None = None
    lexicon_path: Path | None = None
    k: int = 3
    output: str = "plain"

    def __post_init__(self):
        if self.k < 1:
            raise UsageError("--k must be at least 1")
        for p in (self.rule_pack_path, self.lexicon_path):
            if p is not None and not p.is_file():
                raise DataFileError(f"no such file: {p}")


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=_positive, default=3, help="number of candidates (default 3)")
    common.add_argument("--pack", type=Path, help=f"rule pack file (English default: ${PACK_ENV} or the shipped pack)")
    common.add_argument("--lexicon", type=Path, help="lexicon TSV (default: the shipped lexicon)")
    common.add_argument("--no-lexicon", action="store_true", help="disable lexicon lookup")
    common.add_argument("--tsv", action="store_true", help="tab-separated output only")

    parser = _Parser(prog="mytranslit", description="Rule-based Latin/Pinyin to Burmese transliteration.")
    sub = parser.add_subparsers(dest="mode", parser_class=_Parser)

    p = sub.add_parser("en2my", parents=[common], help="transliterate English words")
    p.add_argument("words", nargs="*", help="words, or - to read one per line from stdin")

    p = sub.add_parser("py2my", parents=[common], help="transliterate Pinyin")
    p.add_argument("words", nargs="*", help="Pinyin words, or - for stdin")
    p.add_argument("--per-syllable", action="store_true", help="map each syllable on its own")

    p = sub.add_parser("explain", parents=[common], help="show the rule derivation of the top candidates")
    p.add_argument("words", nargs="*")
    p.add_argument("--pinyin", action="store_true", help="treat the words as Pinyin")

    p = sub.add_parser("eval", parents=[common], help="evaluate against a gold corpus")
    p.add_argument("--corpus", type=Path, help="corpus TSV (default: the shipped corpus)")
    p.add_argument("--figures", type=Path, metavar="DIR", help="write report figures to DIR")
    p.add_argument("--workers", type=_positive, default=1, help="evaluate in N processes")
    return parser


def _words(args) -> list[str]:
    words = []
    for w in args.words:
        if w == "-":
            words.extend(line.strip() for line in sys.stdin if line.strip())
        else:
            words.append(w)
    if not words:
        raise UsageError(f"{args.mode} needs at least one word")
    return words


def _english_ruleset(cfg: CliConfig, no_lexicon: bool):
    pack = cfg.rule_pack_path or data_path("en.pack")
    rs = load_rule_pack(pack)
    if not no_lexicon:
        rs = rs.with_lexicon(load_lexicon(cfg.lexicon_path or data_path("lexicon.tsv")))
    return rs


def _pinyin_ruleset(cfg: CliConfig, no_lexicon: bool):
    rs = load_rule_pack(cfg.rule_pack_path or data_path("pinyin.pack"))
    if not no_lexicon:
        rs = rs.with_lexicon(load_lexicon(cfg.lexicon_path or data_path("pinyin_lexicon.tsv")))
    return rs


def _fmt(x) -> str:
    return str(int(x)) if float(x).is_integer() else f"{x:g}"


def _print_candidates(word, cands, cfg: CliConfig, many: bool, out):
    if many and cfg.output == "plain":
        out.write(f"{word}\n")
    for rank, c in enumerate(cands, 1):
        row = [str(rank), c.target, _fmt(c.score)]
        if cfg.output == "tsv" and many:
            row.insert(0, word)
        out.write("\t".join(row) + "\n")


def _run_translit(args, cfg: CliConfig, out, err) -> int:
    words = _words(args)
    pinyin_mode = args.mode == "py2my" or getattr(args, "pinyin", False)
    rs = _pinyin_ruleset(cfg, args.no_lexicon) if pinyin_mode else _english_ruleset(cfg, args.no_lexicon)
    status = 0
    for word in words:
        try:
            if pinyin_mode:
                mode = "per_syllable" if getattr(args, "per_syllable", False) else "word"
                cands = py.transliterate_pinyin(word, cfg.k, mode, rs)
            else:
                cands = transliterate(word, rs, cfg.k)
        except NoRuleApplicable as exc:
            err.write(f"{word}\t{exc}\n")
            status = EXIT_NO_RULE
            continue
        except (py.InvalidPinyin, la.NonLatinInput) as exc:
            err.write(f"{word}\t{exc}\n")
            status = status or EXIT_USAGE
            continue
        if args.mode == "explain":
            for i, c in enumerate(cands):
                if i:
                    out.write("\n")
                out.write(explain(c) + "\n")
        else:
            _print_candidates(word, cands, cfg, len(words) > 1, out)
    return status


def _run_eval(args, cfg: CliConfig, out, err) -> int:
    corpus_path = args.corpus or data_path("corpus.tsv")
    if not Path(corpus_path).is_file():
        raise DataFileError(f"no such file: {corpus_path}")
    try:
        entries = corpus_mod.load_corpus(corpus_path)
    except corpus_mod.CorpusError as exc:
        raise DataFileError(f"{corpus_path}: {exc}") from None
    rs = _english_ruleset(cfg, args.no_lexicon)
    report = corpus_mod.evaluate(entries, rs, cfg.k, workers=args.workers)
    out.write(report.render_tsv() if cfg.output == "tsv" else report.render_text())
    if args.figures:
        from .plotting import write_figures

        for path in write_figures(report, args.figures):
            err.write(f"wrote {path}\n")
    return 0


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.mode is None:
        parser.print_usage(err)
        return EXIT_USAGE
    try:
        pack = args.pack
        pinyin_mode = args.mode == "py2my" or getattr(args, "pinyin", False)
        if pack is None and not pinyin_mode and os.environ.get(PACK_ENV):
            # the environment default names an English pack
            pack = Path(os.environ[PACK_ENV])
        cfg = CliConfig(args.mode, pack, args.lexicon, args.k, "tsv" if args.tsv else "plain")
        if args.mode == "eval":
            return _run_eval(args, cfg, out, err)
        return _run_translit(args, cfg, out, err)
    except UsageError as exc:
        parser.print_usage(err)
        err.write(f"mytranslit: error: {exc}\n")
        return EXIT_USAGE
    except (DataFileError, RulePackError, OSError) as exc:
        err.write(f"mytranslit: data file error: {exc}\n")
        return EXIT_DATA


def main() -> None:
    for stream in (sys.stdout, sys.stderr):
        if hasattr(stream, "reconfigure"):
            stream.reconfigure(encoding="utf-8")
    sys.exit(run())


if __name__ == "__main__":
    main()
