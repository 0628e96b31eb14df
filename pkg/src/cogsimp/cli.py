"""Command-line entry point: ``cogsimp {tag,annotate,score,agree,compare,stats}``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from collections import Counter
from pathlib import Path

from . import annotator, compare, ingest, metrics, tagger
from .core import ALL_OPS, OperationSet
from .text import resolve_tokenizer

log = logging.getLogger("cogsimp")


class CliError(Exception):
    pass


def _open(path):
    return open(path, encoding="utf-8")


def _require(path, what):
    if path is None:
        raise CliError(f"missing required resource: {what}")
    if not Path(path).exists():
        raise CliError(f"{what} not found: {path}")
    return path


def _read_lines(path) -> list[str]:
    with _open(_require(path, "input file")) as fh:
        return [line.rstrip("\n").rstrip("\r") for line in fh]


def _write(path, text: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _load_instances(args, filter_degenerate: bool):
    with _open(_require(args.corpus, "corpus")) as fh:
        instances = ingest.load_corpus(fh, filter_degenerate=filter_degenerate)
    if getattr(args, "parses", None):
        for p in args.parses:
            _require(p, "parse sidecar")
        instances = ingest.attach_parses(instances, ingest.load_parse_sidecars(args.parses))
    return instances


# ---------------------------------------------------------------------------


def cmd_tag(args) -> int:
    config = tagger.TaggerConfig(
        del_ratio_threshold=args.del_ratio,
        del_pct_threshold=args.del_pct,
        add_ratio_threshold=args.add_ratio,
        clause_match_jaccard=args.clause_jaccard,
        max_phrase_len=args.max_phrase_len,
    )
    with _open(_require(args.ppdb, "paraphrase table (--ppdb)")) as fh:
        db = ingest.load_paraphrase_db(fh, args.max_phrase_len, args.min_score)
    coref = None
    if args.coref:
        with _open(_require(args.coref, "coreference layer")) as fh:
            coref = ingest.load_coref(fh)
    cues = tagger.DEFAULT_EXAMPLE_CUES
    if args.cues:
        cues = tuple(line.strip() for line in _read_lines(args.cues) if line.strip())
    resources = tagger.TaggerResources(db, coref, cues, config)

    instances = _load_instances(args, filter_degenerate=not args.keep_degenerate)
    if not instances:
        raise CliError("corpus contains no instances to tag")

    tagged = tagger.tag_corpus(instances, resources, threads=args.threads)
    if args.multi_reference:
        by_id = {si.id: si for si in instances}
        rebuilt = []
        for t in tagged:
            si = by_id[t.id]
            if si.references:
                ops = tagger.tag_multi_reference(si, resources, args.majority)
                ev = {op: (f"fired in more than {args.majority:.0%} of {len(si.references)} references",)
                      for op in ops}
                t = tagger.TaggedInstance(si, ops, ev)
            rebuilt.append(t)
        tagged = rebuilt

    _write(args.out, "".join(json.dumps(t.to_record(), ensure_ascii=False) + "\n" for t in tagged))

    counts = Counter(op for t in tagged for op in t.ops)
    skipped = sum(
        any(tagger.SKIPPED_NO_PARSES in notes for notes in t.evidence.values()) for t in tagged)
    print(f"tagged {len(tagged)} instances -> {args.out}")
    for op in ALL_OPS:
        print(f"  {op.surface:<11} {counts.get(op, 0)}")
    print(f"  parse-dependent rules skipped on {skipped / len(tagged):.1%} of instances")
    return 0


def cmd_annotate(args) -> int:
    style = annotator.AnnotationStyle.parse(args.style)
    with _open(_require(args.tagged, "tagged file")) as fh:
        tagged = {t.id: t.ops for t in ingest.load_tagged(fh)}
    instances = _load_instances(args, filter_degenerate=False)
    usable = [si for si in instances if not si.alignment.degenerate]
    excluded = len(instances) - len(usable)
    corpus_ids = {si.id for si in instances}
    missing = sorted(si.id for si in usable if si.id not in tagged)
    unknown = sorted(set(tagged) - corpus_ids)
    if missing or unknown:
        parts = []
        if missing:
            parts.append(f"untagged corpus ids: {', '.join(missing)}")
        if unknown:
            parts.append(f"tagged ids not in corpus: {', '.join(unknown)}")
        raise CliError("id mismatch between tagged file and corpus; " + "; ".join(parts))

    fmt = args.format or ("jsonl" if str(args.out).endswith(".jsonl") else "tsv")
    lines = []
    for si in sorted(usable, key=lambda s: s.id):
        src, tgt = annotator.emit(si, tagged[si.id], style)
        if fmt == "jsonl":
            lines.append(json.dumps({"id": si.id, "source": src, "target": tgt}, ensure_ascii=False))
        else:
            if "\t" in src or "\t" in tgt or "\n" in src or "\n" in tgt:
                raise CliError(f"instance {si.id!r} contains a tab or newline; use --format jsonl")
            lines.append(f"{src}\t{tgt}")
    _write(args.out, "".join(line + "\n" for line in lines))
    print(f"wrote {len(lines)} {style.value} pairs -> {args.out}; excluded {excluded} degenerate instances")
    return 0


def cmd_score(args) -> int:
    sources = _read_lines(args.sources)
    outputs = _read_lines(args.outputs)
    ref_files = [_read_lines(r) for r in args.refs]
    for name, seq in [("outputs", outputs)] + [(f"refs[{i}]", r) for i, r in enumerate(ref_files)]:
        if len(seq) != len(sources):
            raise CliError(f"line-count mismatch: {len(sources)} sources vs {len(seq)} {name}")
    refs = [list(r) for r in zip(*ref_files)]
    sari = metrics.sari(sources, outputs, refs)
    report = {
        "n": len(sources),
        "sari": sari.as_dict(per_sentence=args.per_sentence),
        "bleu": metrics.bleu(outputs, refs),
        "identical_pct": metrics.identical_pct(sources, outputs),
    }
    if args.compare:
        other = _read_lines(args.compare)
        if len(other) != len(sources):
            raise CliError(f"line-count mismatch: {len(sources)} sources vs {len(other)} compared outputs")
        other_sari = metrics.sari(sources, other, refs)
        xs = [s.sari for s in sari.per_sentence]
        ys = [s.sari for s in other_sari.per_sentence]
        w, p = metrics.wilcoxon_signed_rank(xs, ys)
        report["compare"] = {"sari": other_sari.as_dict(), "wilcoxon": {"W": w, "p_two_sided": p}}
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        _write(args.out, text)
        print(f"SARI {sari.sari:.2f}  BLEU {report['bleu']:.3f}  identical {report['identical_pct']:.2f}%")
    else:
        sys.stdout.write(text)
    return 0


def cmd_agree(args) -> int:
    with _open(_require(args.pred, "prediction labels")) as fh:
        pred = ingest.load_gold_labels(fh)
    with _open(_require(args.gold, "gold labels")) as fh:
        gold = ingest.load_gold_labels(fh)
    if not pred.keys() & gold.keys():
        raise CliError("prediction and gold label files share no ids")
    report = metrics.agreement(pred, gold)
    print(report.table())
    if args.out:
        _write(args.out, json.dumps(report.as_dict(), indent=2) + "\n")
    return 0


def cmd_compare(args) -> int:
    if len(args.inputs) < 2:
        raise CliError("compare needs at least two tagged files")
    names = args.names.split(",") if args.names else [Path(p).stem for p in args.inputs]
    if len(names) != len(args.inputs):
        raise CliError("--names must list one name per input")
    profiles = []
    for name, path in zip(names, args.inputs):
        with _open(_require(path, "tagged file")) as fh:
            profiles.append(compare.build_profile(ingest.load_tagged(fh), name))
    jsd = compare.pairwise_distances(profiles, "mean_jsd")
    l2 = compare.pairwise_distances(profiles, "l2")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write(out / "distances_jsd.csv", jsd.to_csv())
    _write(out / "distances_l2.csv", l2.to_csv())
    _write(out / "histograms.csv", compare.histograms_csv(profiles))
    payload = {
        "profiles": [compare.profile_to_json(p) for p in profiles],
        "distances": {"mean_jsd": jsd.to_json(), "l2": l2.to_json()},
    }
    _write(out / "profiles.json", json.dumps(payload, indent=2) + "\n")
    print(f"compared {len(profiles)} subsets -> {out}")
    return 0


def cmd_stats(args) -> int:
    instances = _load_instances(args, filter_degenerate=not args.keep_degenerate)
    freq = None
    if args.freq:
        with _open(_require(args.freq, "frequency table")) as fh:
            freq = ingest.load_frequency_table(fh)
    report = metrics.corpus_stats(instances, freq, resolve_tokenizer(args.tokenizer))
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cogsimp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tag", help="assign operation tokens to a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--ppdb", help="paraphrase TSV (required)")
    p.add_argument("--parses", action="append", help="CoNLL-U file or directory (repeatable)")
    p.add_argument("--coref")
    p.add_argument("--cues", help="file with one example cue phrase per line")
    p.add_argument("--keep-degenerate", action="store_true")
    p.add_argument("--del-ratio", type=float, default=1.2)
    p.add_argument("--del-pct", type=float, default=0.30)
    p.add_argument("--add-ratio", type=float, default=1.0)
    p.add_argument("--clause-jaccard", type=float, default=0.3)
    p.add_argument("--max-phrase-len", type=int, default=ingest.DEFAULT_MAX_PHRASE_LEN)
    p.add_argument("--min-score", type=float, default=None)
    p.add_argument("--multi-reference", action="store_true",
                   help="tag against each reference and keep majority operations")
    p.add_argument("--majority", type=float, default=0.5)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tag)

    p = sub.add_parser("annotate", help="emit operation-annotated training pairs")
    p.add_argument("--tagged", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--style", choices=["t5", "bart"], required=True)
    p.add_argument("--format", choices=["tsv", "jsonl"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("score", help="SARI, BLEU and identical-output rate")
    p.add_argument("--sources", required=True)
    p.add_argument("--outputs", required=True)
    p.add_argument("--refs", action="append", required=True, help="reference file (repeatable)")
    p.add_argument("--compare", help="second system's outputs for a Wilcoxon test on per-sentence SARI")
    p.add_argument("--per-sentence", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("agree", help="agreement between predicted and gold operation labels")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_agree)

    p = sub.add_parser("compare", help="compare operation profiles of tagged subsets")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--names", help="comma-separated subset names")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("stats", help="corpus statistics")
    p.add_argument("--corpus", required=True)
    p.add_argument("--parses", action="append")
    p.add_argument("--freq")
    p.add_argument("--tokenizer", default="default",
                   help="'default', 'whitespace' or module:function")
    p.add_argument("--keep-degenerate", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    level = getattr(logging, os.environ.get("COGSIMP_LOG", "WARNING").upper(), None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (CliError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
