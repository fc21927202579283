"""Command-line entry point: ``gendermt <subcommand> ...``.

Exit codes: 0 success, 1 input or config error, 2 internal invariant violation.
Outputs are written to temporary files and moved into place only when the
whole subcommand succeeds.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys
import tempfile
from pathlib import Path

from . import alignment_filter as af
from . import corpus_io as cio
from .annotator import Lexicons, annotate_corpus
from .codec import ALL, LABELED_ONLY, GenderTokenScheme, build_training_set
from .config import ConfigError, load_config
from .evaluation import compare_systems, corpus_bleu, dependence_stats, format_bleu, score_annotations
from .triggers import DEFAULT_PATTERNS, parse_pattern_file, route_corpus

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INTERNAL = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


@contextlib.contextmanager
def staged_outputs():
    """Yield ``stage(path) -> tmp_path``; staged files are committed only on success."""
    staged: list[tuple[str, Path]] = []

    def stage(path) -> str:
        path = Path(path)
        if str(path.parent):
            path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
        os.close(fd)
        staged.append((tmp, path))
        return tmp

    try:
        yield stage
    except BaseException:
        for tmp, _ in staged:
            with contextlib.suppress(OSError):
                os.unlink(tmp)
        raise
    for tmp, final in staged:
        os.replace(tmp, final)


def _write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj, f, ensure_ascii=False, indent=2, sort_keys=False)
        f.write("\n")


def _require_file(path) -> None:
    if path is not None and not os.path.isfile(path):
        raise UsageError(f"no such file: {path}")


def _config(args, overrides=None) -> dict:
    _require_file(args.config)
    extra = dict(overrides or {})
    for item in args.set or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        extra[key.strip()] = value.strip()
    return load_config(args.config, extra)


def _lexicons(config) -> Lexicons:
    for key in ("lex.doubly_transitive", "lex.incomplete_verbs", "lex.call_particles"):
        _require_file(config[key])
    return Lexicons.from_files(config["lex.doubly_transitive"], config["lex.incomplete_verbs"],
                               config["lex.call_particles"])


def _scheme(config) -> GenderTokenScheme:
    return GenderTokenScheme(config["tokens.speaker_m"], config["tokens.speaker_f"],
                             config["tokens.listener_m"], config["tokens.listener_f"])


def _patterns(config):
    path = config["trigger.patterns"]
    if path is None:
        return DEFAULT_PATTERNS
    _require_file(path)
    patterns = list(DEFAULT_PATTERNS) + parse_pattern_file(path)
    ids = [p.pattern_id for p in patterns]
    if len(ids) != len(set(ids)):
        raise ConfigError(f"duplicate pattern ids in {path}")
    return tuple(patterns)


def _read_pairs(args):
    for path in (args.src, args.tgt, args.align, getattr(args, "scores", None)):
        _require_file(path)
    return cio.read_parallel_corpus(args.src, args.tgt, args.align, getattr(args, "scores", None))


def _read_token_lines(path) -> list[list[str]]:
    _require_file(path)
    return [s.surfaces for s in cio.read_text_corpus(path, cio.Lang.AR)]


# ---------------------------------------------------------------------------
# subcommands

def cmd_filter(args) -> int:
    config = _config(args, {
        "filter.min_score": args.min_score,
        "filter.max_unaligned": args.max_unaligned,
        "filter.min_one_to_one": args.min_one_to_one,
        "filter.tree": args.tree,
    })
    pairs = _read_pairs(args)
    if config["filter.tree"] is not None:
        _require_file(config["filter.tree"])
        criterion = af.DecisionTree.load(config["filter.tree"])
    else:
        criterion = af.Thresholds(config["filter.min_score"], config["filter.max_unaligned"],
                                  config["filter.min_one_to_one"])
    kept, report = af.filter_corpus(pairs, criterion)

    out_dir = Path(args.out_dir)
    inputs = {Path(p).resolve() for p in (args.src, args.tgt, args.align, args.scores) if p}
    names = {"src": Path(args.src).name, "tgt": Path(args.tgt).name, "align": Path(args.align).name}
    if args.scores:
        names["scores"] = Path(args.scores).name
    targets = {k: out_dir / v for k, v in names.items()}
    if len(set(targets.values())) != len(targets):
        raise UsageError("input files must have distinct names")
    for target in targets.values():
        if target.resolve() in inputs:
            raise UsageError(f"refusing to overwrite input file {target}")

    with staged_outputs() as stage:
        tmp = {k: stage(v) for k, v in targets.items()}
        cio.write_parallel_corpus(
            kept, tmp["src"], tmp["tgt"], tmp["align"], tmp.get("scores"),
            src_tagged=cio.is_tagged_path(args.src), tgt_tagged=cio.is_tagged_path(args.tgt),
        )
        _write_json(report.to_json(), stage(out_dir / "report.json"))
    print(f"kept {report.kept} of {report.total} pairs ({report.dropped} dropped, {report.mode} mode)")
    return EXIT_OK


def _read_class_labels(path) -> list[str]:
    _require_file(path)
    labels = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            label = line.strip()
            if label not in af.CLASSES:
                raise cio.CorpusError(f"expected keep or drop, got {label!r}", path, lineno)
            labels.append(label)
    return labels


def cmd_train_tree(args) -> int:
    pairs = _read_pairs(args)
    labels = _read_class_labels(args.labels)
    if len(labels) != len(pairs):
        raise cio.LineCountMismatch(args.src, len(pairs), args.labels, len(labels))
    samples = [(af.extract_features(p), lab) for p, lab in zip(pairs, labels)]
    tree = af.train_tree(samples, args.max_depth, args.min_leaf)
    correct = sum(af.classify(tree, f) == lab for f, lab in samples)
    with staged_outputs() as stage:
        tree.save(stage(args.out))
    print(f"tree depth {tree.depth()}, training accuracy {correct}/{len(samples)}")
    return EXIT_OK


def cmd_annotate(args) -> int:
    config = _config(args)
    lex = _lexicons(config)
    for path in (args.src, args.tgt, args.align, args.scores):
        _require_file(path)
    pairs = cio.read_parallel_corpus(args.src, args.tgt, args.align, args.scores, tgt_tagged=True)
    records, summary = annotate_corpus(pairs, lex, use_alignment=not args.arabic_only)
    with staged_outputs() as stage:
        cio.write_annotations(records, stage(args.out))
        if args.summary:
            _write_json(summary.to_json(), stage(args.summary))
    counts = ", ".join(f"{k}={v}" for k, v in summary.to_json()["per_class"].items())
    print(f"labeled {summary.labeled} of {summary.total} ({summary.fraction:.4f}); {counts}")
    return EXIT_OK


def cmd_inject(args) -> int:
    config = _config(args)
    scheme = _scheme(config)
    for path in (args.src, args.tgt, args.annotations):
        _require_file(path)
    pairs = cio.read_parallel_corpus(args.src, args.tgt, None)
    records = cio.read_annotations(args.annotations)
    src_lines, tgt_lines = build_training_set(pairs, records, args.mode, scheme)
    with staged_outputs() as stage:
        cio.write_lines(stage(args.out_src), src_lines)
        cio.write_lines(stage(args.out_tgt), tgt_lines)
    print(f"wrote {len(src_lines)} training pairs ({args.mode})")
    return EXIT_OK


def cmd_trigger(args) -> int:
    config = _config(args, {"trigger.patterns": args.patterns})
    patterns = _patterns(config)
    _require_file(args.src)
    sentences = cio.read_sentences(args.src, cio.Lang.EN, tagged=True)
    routes, counts = route_corpus(sentences, patterns)
    with staged_outputs() as stage:
        cio.write_jsonl((r.to_json(k) for k, r in enumerate(routes)), stage(args.out))
    print(f"base {counts['base']}, adapted {counts['adapted']}")
    return EXIT_OK


def _read_routes(path, n) -> list[str]:
    _require_file(path)
    records = cio.read_jsonl(path)
    routes = []
    for k, rec in enumerate(records):
        if not isinstance(rec, dict) or rec.get("id") != k or rec.get("route") not in ("base", "adapted"):
            raise cio.CorpusError(f"route record {k} is malformed or out of order", path)
        routes.append(rec["route"])
    if len(routes) != n:
        raise cio.CorpusError(f"{len(routes)} routes for {n} sentences", path)
    return routes


def cmd_eval(args) -> int:
    if args.predicted or args.gold:
        if not (args.predicted and args.gold):
            raise UsageError("--predicted and --gold go together")
        for path in (args.predicted, args.gold):
            _require_file(path)
        pred = cio.read_annotations(args.predicted)
        gold = cio.read_annotations(args.gold)
        if [r.id for r in pred] != [r.id for r in gold]:
            raise UsageError("predicted and gold annotation ids differ")
        report = score_annotations([r.labels for r in pred], [r.labels for r in gold])
    elif args.reference is None:
        raise UsageError("--reference is required for BLEU evaluation")
    elif args.baseline or args.adapted or args.routes:
        if not (args.baseline and args.adapted and args.routes):
            raise UsageError("--baseline, --adapted and --routes go together")
        refs = _read_token_lines(args.reference)
        base = _read_token_lines(args.baseline)
        adapted = _read_token_lines(args.adapted)
        routes = _read_routes(args.routes, len(refs))
        report = compare_systems(base, adapted, refs, routes)
    elif args.candidate:
        report = corpus_bleu(_read_token_lines(args.candidate), _read_token_lines(args.reference))
    else:
        raise UsageError("give --candidate, or --baseline/--adapted/--routes, or --predicted/--gold")

    if args.json:
        with staged_outputs() as stage:
            _write_json(report.to_json(), stage(args.json))
    if hasattr(report, "score"):
        print(f"BLEU {format_bleu(report.score)}")
    else:
        print(report.render())
    return EXIT_OK


def cmd_stats(args) -> int:
    _require_file(args.annotations)
    records = cio.read_annotations(args.annotations)
    if not records:
        raise UsageError(f"no annotation records in {args.annotations}")
    stats = dependence_stats(records)
    if args.json:
        with staged_outputs() as stage:
            _write_json(stats.to_json(), stage(args.json))
    print(stats.render())
    return EXIT_OK


# ---------------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one config key")


def _add_corpus(p, align_required=True):
    p.add_argument("--src", required=True, help="English side (.tags/.conll = tagged)")
    p.add_argument("--tgt", required=True, help="Arabic side (.tags/.conll = tagged)")
    p.add_argument("--align", required=align_required, help="Pharaoh alignment file")
    p.add_argument("--scores", help="alignment scores, one per line")


def _probability(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gendermt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("filter", help="drop poorly aligned pairs")
    _add_common(p)
    _add_corpus(p)
    p.add_argument("--min-score", type=_probability)
    p.add_argument("--max-unaligned", type=_probability)
    p.add_argument("--min-one-to-one", type=_probability)
    p.add_argument("--tree", help="trained tree JSON; overrides thresholds")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("train-tree", help="train the keep/drop decision tree")
    _add_corpus(p)
    p.add_argument("--labels", required=True, help="keep/drop per line")
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--min-leaf", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_tree)

    p = sub.add_parser("annotate", help="label pairs with speaker/listener gender")
    _add_common(p)
    _add_corpus(p, align_required=False)
    p.add_argument("--arabic-only", action="store_true",
                   help="skip the alignment-gated rules (Arabic evidence only)")
    p.add_argument("--out", required=True, help="annotation JSON Lines")
    p.add_argument("--summary", help="summary JSON")
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("inject", help="append gender tokens to the English side")
    _add_common(p)
    p.add_argument("--src", required=True)
    p.add_argument("--tgt", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--mode", choices=(ALL, LABELED_ONLY), default=ALL)
    p.add_argument("--out-src", required=True)
    p.add_argument("--out-tgt", required=True)
    p.set_defaults(func=cmd_inject)

    p = sub.add_parser("trigger", help="route tagged English sentences to base/adapted")
    _add_common(p)
    p.add_argument("--src", required=True, help="tagged English corpus")
    p.add_argument("--patterns", help="extra trigger patterns")
    p.add_argument("--out", required=True, help="routes JSON Lines")
    p.set_defaults(func=cmd_trigger)

    p = sub.add_parser("eval", help="BLEU, system comparison, or annotation P/R")
    p.add_argument("--candidate")
    p.add_argument("--reference")
    p.add_argument("--baseline")
    p.add_argument("--adapted")
    p.add_argument("--routes")
    p.add_argument("--predicted")
    p.add_argument("--gold")
    p.add_argument("--json", help="also write the report as JSON")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("stats", help="gender dependence distribution")
    p.add_argument("--annotations", required=True)
    p.add_argument("--json")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError, ValueError, OSError) as exc:
        print(f"gendermt {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"gendermt {args.command}: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
