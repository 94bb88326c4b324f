"""Operator surface for the evaluation pipeline.

Subcommands mirror the recommended evaluation steps: ingest a gazetteer,
run a baseline tagger/resolver, score geotagging with F-score (McNemar
for paired comparison), score geocoding with accuracy@X km / AUC / mean
error (Wilcoxon for paired comparison), align foreign coordinates, build
cross-validation folds and generate augmented training data.

Exit codes: 0 success, 1 input error, 2 internal error. All randomness
flows from explicit --seed flags.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import traceback
from typing import Optional, Sequence

from . import augment as augment_mod
from . import corpus, gazetteer, metrics, resolver, stats, tagger
from .geodesy import great_circle_distance

PROG = "geoeval"

_DEFAULTS = {
    "mode": "exact",
    "thresholds": "161",
    "k": 5,
    "seed": 13,
    "max_ngram": tagger.DEFAULT_MAX_NGRAM,
    "max_per_source": 3,
}


class InputError(Exception):
    """Bad file, flag or data supplied by the operator."""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description=__doc__)
    parser.add_argument("--config", help="JSON file with default values for any flag")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build and cache a gazetteer index")
    p.add_argument("--dump", required=True, help="Geonames-format tab-separated dump")
    p.add_argument("--cache", required=True, help="binary cache file to write/reuse")
    p.add_argument("--feature-classes", help="comma-separated feature classes to keep (default all)")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("eval-tagging", help="score span extraction with precision/recall/F")
    p.add_argument("--gold", required=True, help="directory of BRAT .txt/.ann pairs")
    p.add_argument("--pred", required=True, help="prediction file")
    p.add_argument("--pred-b", help="second prediction file: adds a McNemar comparison")
    p.add_argument("--mode", choices=["exact", "overlap"], default=None)
    p.add_argument("--cache", help="gazetteer cache; enables the exclusion policy")
    p.add_argument("--out", required=True, help="report file to write")
    p.add_argument("--csv", help="CSV file to append a summary row to")
    p.add_argument("--dataset-id", default=None)
    p.add_argument("--lenient", action="store_true", help="skip malformed prediction lines")
    p.set_defaults(func=cmd_eval_tagging)

    p = sub.add_parser("eval-geocoding", help="score resolution with acc@X km, AUC, mean error")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--pred-b", help="second prediction file: adds a Wilcoxon comparison")
    p.add_argument("--thresholds", default=None, help="comma-separated km thresholds (default 161)")
    p.add_argument("--mode", choices=["exact", "overlap"], default=None)
    p.add_argument("--cache", help="gazetteer cache; enables exclusion and coordinate fill")
    p.add_argument("--out", required=True)
    p.add_argument("--csv", help="CSV file to append a summary row to")
    p.add_argument("--dataset-id", default=None)
    p.add_argument("--lenient", action="store_true")
    p.set_defaults(func=cmd_eval_geocoding)

    p = sub.add_parser("baseline", help="run a baseline tagger plus the population resolver")
    p.add_argument("--gold", required=True)
    p.add_argument("--cache", required=True, help="gazetteer cache built by ingest")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--oracle-ner", action="store_true", help="copy gold spans (post-exclusion)")
    mode.add_argument("--dictionary-ner", action="store_true", help="gazetteer n-gram tagger")
    p.add_argument("--lexicon", help="normalization lexicon (surface<TAB>canonical)")
    p.add_argument("--blocklist", help="file of surfaces to suppress, one per line")
    p.add_argument("--max-ngram", type=int, default=None)
    p.add_argument("--populated-only", action="store_true")
    p.add_argument("--out", required=True, help="prediction file to write")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("align", help="snap predicted coordinates to gazetteer entries")
    p.add_argument("--pred", required=True)
    p.add_argument("--cache", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--lenient", action="store_true")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("folds", help="deal documents into cross-validation folds")
    p.add_argument("--gold", required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="JSON fold plan to write")
    p.set_defaults(func=cmd_folds)

    p = sub.add_parser("augment", help="generate augmented training sentences")
    p.add_argument("--gold", required=True)
    p.add_argument("--max-per-source", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="token/tag column file to write")
    p.set_defaults(func=cmd_augment)

    return parser


def _apply_config(args: argparse.Namespace) -> None:
    config = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(config, dict):
            raise InputError(f"config {args.config} must be a JSON object")
        config = {str(k).replace("-", "_"): v for k, v in config.items()}
    for dest, value in vars(args).items():
        if value is None:
            if dest in config:
                setattr(args, dest, config[dest])
            elif dest in _DEFAULTS:
                setattr(args, dest, _DEFAULTS[dest])


def _load_gold(path: str) -> list[corpus.Document]:
    if not os.path.isdir(path):
        raise InputError(f"gold directory not found: {path}")
    docs = corpus.load_directory(path)
    if not docs:
        raise InputError(f"no .txt/.ann document pairs under {path}")
    return docs


def _load_index(path: str) -> gazetteer.GazetteerIndex:
    if not os.path.exists(path):
        raise InputError(f"gazetteer cache not found: {path} (run `{PROG} ingest` first)")
    return gazetteer.load_cache(path)


def _load_predictions(path: str, lenient: bool) -> list[corpus.PredictionRecord]:
    try:
        with open(path, encoding="utf-8") as fh:
            records, errors = corpus.load_predictions(fh)
    except OSError as exc:
        raise InputError(f"cannot read predictions {path}: {exc}") from exc
    if errors:
        for err in errors[:10]:
            print(f"{path}:{err.line_no}: {err.message}", file=sys.stderr)
        if not lenient:
            raise InputError(
                f"{len(errors)} malformed prediction line(s) in {path}; use --lenient to skip them"
            )
    return records


def _gold_spans_for_eval(
    docs: list[corpus.Document],
    index: Optional[gazetteer.GazetteerIndex],
    need_coords: bool,
    warnings: list[str],
) -> list[metrics.GoldSpan]:
    if index is not None:
        result = corpus.apply_exclusion_policy(docs, index)
        if result.excluded:
            warnings.append(f"excluded {len(result.excluded)} gold annotations by policy")
        return result.kept
    spans = corpus.gold_spans(docs)
    if need_coords:
        with_coords = [(d, a) for d, a in spans if a.coord is not None]
        dropped = len(spans) - len(with_coords)
        if dropped:
            warnings.append(
                f"{dropped} gold annotations without coordinates ignored (no --cache supplied)"
            )
        return with_coords
    return spans


def _write_report(report: metrics.EvalReport, out_path: str, csv_path: Optional[str]) -> None:
    rendered = metrics.render_report(report)
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(rendered)
    if csv_path:
        thresholds = (
            tuple(sorted(report.geocoding.accuracy_at_km))
            if report.geocoding is not None
            else (metrics.DEFAULT_THRESHOLD_KM,)
        )
        need_header = not os.path.exists(csv_path)
        with open(csv_path, "a", encoding="utf-8") as fh:
            if need_header:
                fh.write(metrics.report_csv_header(thresholds) + "\n")
            fh.write(metrics.report_csv_row(report) + "\n")
    sys.stdout.write(rendered)


def _significance_summary(p_value: float) -> str:
    verdicts = []
    for alpha in stats.REPORTING_ALPHAS:
        verdict = "significant" if p_value < alpha else "not significant"
        verdicts.append(f"{verdict} at {alpha}")
    return "; ".join(verdicts)


def _gold_key(pair: metrics.MatchedPair) -> tuple[str, int, int]:
    (doc_id, ann), _ = pair
    return (doc_id, ann.start, ann.end)


def cmd_ingest(args: argparse.Namespace) -> int:
    if not os.path.exists(args.dump):
        raise InputError(f"dump file not found: {args.dump}")
    classes = None
    if args.feature_classes:
        classes = {c.strip() for c in args.feature_classes.split(",") if c.strip()}
    index, cache_hit = gazetteer.load_or_ingest(args.dump, args.cache, feature_classes=classes)
    s = index.summary
    source = "cache hit, dump not re-parsed" if cache_hit else "parsed from dump"
    print(f"gazetteer version: {index.version} ({source})")
    print(f"records: {s.ingested} ingested, {s.skipped} skipped, {s.filtered} filtered")
    return 0


def cmd_eval_tagging(args: argparse.Namespace) -> int:
    docs = _load_gold(args.gold)
    index = _load_index(args.cache) if args.cache else None
    warnings: list[str] = []
    gold = _gold_spans_for_eval(docs, index, need_coords=False, warnings=warnings)
    records = _load_predictions(args.pred, args.lenient)
    mode = metrics.MatchMode(args.mode)
    match = metrics.match_spans(gold, records, mode)

    report = metrics.EvalReport(
        dataset_id=args.dataset_id or os.path.basename(os.path.normpath(args.gold)),
        gazetteer_version=index.version if index else "none",
        n_gold=len(gold),
        n_predicted=len(records),
        n_resolved=sum(1 for r in records if r.predicted_coord is not None),
        tagging=metrics.tagging_metrics(match.counts),
        warnings=warnings,
    )

    if args.pred_b:
        records_b = _load_predictions(args.pred_b, args.lenient)
        match_b = metrics.match_spans(gold, records_b, mode)
        correct_a = {_gold_key(p) for p in match.pairs}
        correct_b = {_gold_key(p) for p in match_b.pairs}
        table = stats.McNemarTable(
            b=len(correct_a - correct_b),
            c=len(correct_b - correct_a),
        )
        result = stats.mcnemar(table)
        report.stat_tests.append(
            stats.StatTestResult("mcnemar", result.statistic, result.p_value, table.b + table.c)
        )
        if result.unreliable:
            warnings.append(
                f"mcnemar: only {table.b + table.c} disagreements; "
                f"chi-squared approximation unreliable below {stats.MCNEMAR_RELIABLE_MIN}"
            )
        print(
            f"mcnemar: statistic={result.statistic:.4f} p={result.p_value:.6g} "
            f"({_significance_summary(result.p_value)})"
        )

    _write_report(report, args.out, args.csv)
    return 0


def cmd_eval_geocoding(args: argparse.Namespace) -> int:
    docs = _load_gold(args.gold)
    index = _load_index(args.cache) if args.cache else None
    warnings: list[str] = []
    gold = _gold_spans_for_eval(docs, index, need_coords=True, warnings=warnings)
    records = _load_predictions(args.pred, args.lenient)
    try:
        if isinstance(args.thresholds, (list, tuple)):
            thresholds = [float(t) for t in args.thresholds]
        else:
            thresholds = [float(t) for t in str(args.thresholds).split(",") if t.strip()]
        if not thresholds:
            raise ValueError("empty threshold list")
    except ValueError as exc:
        raise InputError(f"bad --thresholds value {args.thresholds!r}") from exc
    mode = metrics.MatchMode(args.mode)

    match = metrics.match_spans(gold, records, mode)
    dist, unresolved = metrics.geocoding_errors(match.pairs)
    n_tagged = len(match.pairs)
    if n_tagged:
        resolved_fraction = dist.n / n_tagged
        if resolved_fraction < resolver.MIN_RESOLVED_FRACTION:
            warnings.append(
                f"only {resolved_fraction:.0%} of geotagged toponyms were resolved; "
                f"below the {resolver.MIN_RESOLVED_FRACTION:.0%} representativeness minimum"
            )
    if unresolved:
        warnings.append(f"{unresolved} matched toponyms had no predicted coordinates")

    report = metrics.EvalReport(
        dataset_id=args.dataset_id or os.path.basename(os.path.normpath(args.gold)),
        gazetteer_version=index.version if index else "none",
        n_gold=len(gold),
        n_predicted=len(records),
        n_resolved=dist.n,
        geocoding=metrics.geocoding_metrics(dist, thresholds) if dist.n else None,
        warnings=warnings,
    )
    if dist.n == 0:
        warnings.append("no resolved true positives; geocoding metrics undefined")

    if args.pred_b:
        records_b = _load_predictions(args.pred_b, args.lenient)
        match_b = metrics.match_spans(gold, records_b, mode)
        errors_a = _errors_by_gold_key(match.pairs)
        errors_b = _errors_by_gold_key(match_b.pairs)
        common = sorted(set(errors_a) & set(errors_b))
        if not common:
            warnings.append("wilcoxon: no toponyms resolved by both systems")
        else:
            result = stats.wilcoxon_signed_rank(
                [errors_a[k] for k in common], [errors_b[k] for k in common]
            )
            report.stat_tests.append(
                stats.StatTestResult("wilcoxon", result.z, result.p_value, result.n)
            )
            if result.note:
                warnings.append(f"wilcoxon: {result.note}")
            print(
                f"wilcoxon: z={result.z:.4f} p={result.p_value:.6g} n={result.n} "
                f"({_significance_summary(result.p_value)})"
            )

    _write_report(report, args.out, args.csv)
    return 0


def _errors_by_gold_key(pairs: list[metrics.MatchedPair]) -> dict[tuple[str, int, int], float]:
    out = {}
    for pair in pairs:
        (_, ann), rec = pair
        if ann.coord is None or rec.predicted_coord is None:
            continue
        out[_gold_key(pair)] = great_circle_distance(rec.predicted_coord, ann.coord)
    return out


def cmd_baseline(args: argparse.Namespace) -> int:
    docs = _load_gold(args.gold)
    index = _load_index(args.cache)
    excl = corpus.apply_exclusion_policy(docs, index)

    if args.oracle_ner:
        records = tagger.oracle_spans(excl.documents)
    else:
        blocklist = tagger.DEFAULT_BLOCKLIST
        if args.blocklist:
            try:
                with open(args.blocklist, encoding="utf-8") as fh:
                    blocklist = frozenset(
                        line.strip().casefold() for line in fh if line.strip()
                    )
            except OSError as exc:
                raise InputError(f"cannot read blocklist {args.blocklist}: {exc}") from exc
        records = []
        for doc in docs:
            records.extend(tagger.gazetteer_tag(doc, index, blocklist, args.max_ngram))

    lexicon = None
    if args.lexicon:
        try:
            lexicon = resolver.load_lexicon_path(args.lexicon)
        except OSError as exc:
            raise InputError(f"cannot read lexicon {args.lexicon}: {exc}") from exc

    result = resolver.resolve_population(
        records, index, lexicon=lexicon, populated_only=args.populated_only
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        corpus.write_predictions(result.records, fh)

    total = len(result.records)
    print(f"gold annotations: {len(corpus.gold_spans(docs))} total, {len(excl.kept)} kept")
    print(f"predictions: {total} spans, {result.n_resolved} resolved, {result.n_unresolved} unresolved")
    if total and result.n_resolved / total < resolver.MIN_RESOLVED_FRACTION:
        print(
            f"warning: resolved fraction {result.n_resolved / total:.0%} below "
            f"{resolver.MIN_RESOLVED_FRACTION:.0%}; geocoding sample may be unrepresentative",
            file=sys.stderr,
        )
    return 0


def cmd_align(args: argparse.Namespace) -> int:
    index = _load_index(args.cache)
    records = _load_predictions(args.pred, args.lenient)
    result = resolver.align_to_gazetteer(records, index)
    with open(args.out, "w", encoding="utf-8") as fh:
        corpus.write_predictions(result.records, fh)
    print(f"aligned {result.n_aligned} of {len(records)} records to gazetteer {index.version}")
    if result.flagged:
        print(f"flagged {len(result.flagged)} records with no same-name candidate")
    return 0


def cmd_folds(args: argparse.Namespace) -> int:
    docs = _load_gold(args.gold)
    plan = stats.make_folds([doc.doc_id for doc in docs], args.k, args.seed)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump({"k": plan.k, "seed": plan.seed, "folds": plan.folds}, fh, indent=2)
        fh.write("\n")
    sizes = ", ".join(str(len(f)) for f in plan.folds)
    print(f"{len(docs)} documents dealt into {plan.k} folds of sizes [{sizes}] (seed {plan.seed})")
    return 0


def cmd_augment(args: argparse.Namespace) -> int:
    docs = _load_gold(args.gold)
    expressions = [expr for doc in docs for expr in doc.expressions]
    if not expressions:
        raise InputError(f"no expression annotations found under {args.gold}")
    sentences = augment_mod.generate_augmented(docs, expressions, args.max_per_source, args.seed)
    with open(args.out, "w", encoding="utf-8") as fh:
        augment_mod.write_tagged(sentences, fh)
    counts = augment_mod.expression_counts(expressions)
    for role in corpus.ExpressionRole:
        per_kind = ", ".join(
            f"{kind.value}={counts.get((role, kind), 0)}" for kind in corpus.ExpressionKind
        )
        print(f"{role.value.lower()}s: {per_kind}")
    print(f"wrote {len(sentences)} tagged sentences (seed {args.seed})")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        return args.func(args)
    except InputError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1
    except (corpus.BratParseError, gazetteer.GazetteerError, OSError, ValueError) as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
