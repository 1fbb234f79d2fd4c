"""``prosody-score`` command line: extract, train, score, validate-text.

Errors go to stderr as one JSON object ``{"error": category, "message": ...}``
and map to exit codes: 1 usage, 2 missing input, 3 validation, 4 schema.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .config import Config, load_config
from .errors import InputMissingError, ProsodyScoreError, ValidationError
from .intonation import ProfileStore, train_profile
from .pipeline import analyze_files, default_sentence_id, feature_details, run_manifest
from .prosody import load_filler_lexicon
from .scoring.features import FEATURE_NAMES, SCHEMA_VERSION, split_dataset, vectors_from_csv, vectors_to_csv
from .scoring.model import LinearModel, feature_significance, fit_linear_model, predict_score, rmse
from .serialize import dumps, write_atomic
from .text_metrics import compare_reports, difficulty_report, format_table, read_sentence_file

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MISSING = 2
EXIT_VALIDATION = 3
EXIT_SCHEMA = 4

EXIT_CODES = {
    "usage": EXIT_USAGE,
    "input-missing": EXIT_MISSING,
    "validation": EXIT_VALIDATION,
    "insufficient-data": EXIT_VALIDATION,
    "empty-set": EXIT_VALIDATION,
    "profile-mismatch": EXIT_VALIDATION,
    "schema-mismatch": EXIT_SCHEMA,
}


def report_error(category: str, message: str) -> None:
    print(json.dumps({"error": category, "message": message}), file=sys.stderr)


def build_config(args) -> Config:
    cfg = load_config(args.config)
    fillers = None
    if getattr(args, "fillers", None):
        if not os.path.exists(args.fillers):
            raise InputMissingError(f"filler lexicon not found: {args.fillers}")
        fillers = tuple(sorted(load_filler_lexicon(args.fillers)))
    return cfg.with_overrides(
        seed=getattr(args, "seed", None),
        min_pause_s=getattr(args, "min_pause_s", None),
        long_pause_s=getattr(args, "long_pause_s", None),
        ridge_lambda=getattr(args, "ridge_lambda", None),
        fillers=fillers,
    )


def _load_profiles(path) -> ProfileStore | None:
    if path is None or not os.path.exists(path):
        return None
    return ProfileStore.load(path)


def _feature_document(kind: str, analysis, config: Config, manifest: dict) -> dict:
    v = analysis.vector
    return {
        "kind": kind,
        "schema_version": SCHEMA_VERSION,
        "candidate_id": v.candidate_id,
        "sentence_id": analysis.sentence_id,
        "features": {name: v.features[name] for name in FEATURE_NAMES},
        "details": feature_details(analysis, config),
        "manifest": manifest,
    }


def cmd_extract(args) -> int:
    config = build_config(args)
    profiles = _load_profiles(args.profiles)
    analysis = analyze_files(args.audio, args.asr, args.ref_text, config, args.sentence_id, profiles, args.candidate_id)
    manifest = run_manifest(
        config,
        {"audio": args.audio, "asr": args.asr, "reference_text": args.ref_text,
         "profiles": args.profiles if profiles is not None else None},
    )
    doc = _feature_document("features", analysis, config, manifest)
    text = dumps(doc)
    if args.csv:
        write_atomic(args.csv, vectors_to_csv([analysis.vector]))
    write_atomic(args.out, text)
    return EXIT_OK


def cmd_train_profile(args) -> int:
    config = build_config(args)
    store = _load_profiles(args.profiles) or ProfileStore()
    failures = 0
    trained = []
    for audio, asr, ref_text in args.item:
        sentence_id = default_sentence_id(ref_text)
        try:
            analysis = analyze_files(audio, asr, ref_text, config, sentence_id)
            current = store.get(sentence_id)
            store.profiles[sentence_id] = train_profile(current, analysis.pitch_vector)
            trained.append(sentence_id)
        except ProsodyScoreError as exc:
            failures += 1
            report_error(exc.category, f"{audio}: {exc}")
    write_atomic(args.profiles, dumps(store.to_dict()))
    print(f"trained {len(trained)} item(s) into {args.profiles}; {failures} failed")
    return EXIT_VALIDATION if failures else EXIT_OK


def _significance_table(rows) -> str:
    lines = [f"{'feature':<28} {'n':>5} {'r':>8} {'t':>9} {'p':>9}  sig"]
    for row in rows:
        if row.r is None:
            lines.append(f"{row.feature:<28} {row.n:>5} {'-':>8} {'-':>9} {'-':>9}  undefined")
        else:
            lines.append(
                f"{row.feature:<28} {row.n:>5} {row.r:>8.4f} {row.t:>9.4f} {row.p_value:>9.4g}  "
                f"{'yes' if row.significant else 'no'}"
            )
    return "\n".join(lines)


def cmd_train_model(args) -> int:
    config = build_config(args)
    vectors = []
    for path in args.features:
        if not os.path.exists(path):
            raise InputMissingError(f"feature CSV not found: {path}")
        with open(path, encoding="utf-8") as fh:
            vectors.extend(vectors_from_csv(fh.read()))
    scored = [v for v in vectors if v.manual_score is not None]
    ids = [v.candidate_id for v in scored]
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate candidate_id in feature CSV")

    split = split_dataset(ids, config.seed)
    by_id = {v.candidate_id: v for v in scored}
    train = [by_id[i] for i in split.train]
    val = [by_id[i] for i in split.validation]
    test = [by_id[i] for i in split.test]
    subset = tuple(args.feature_subset.split(",")) if args.feature_subset else FEATURE_NAMES

    lambdas = [float(x) for x in args.lambda_grid.split(",")] if args.lambda_grid else [config.ridge_lambda]
    candidates = []
    for lam in lambdas:
        model = fit_linear_model(train, subset, lam, seed=config.seed)
        candidates.append((rmse(model, val), lam, model))
    val_rmse, lam, model = min(candidates, key=lambda c: (c[0], c[1]))

    significance = feature_significance(train, subset, args.alpha)
    training = {
        **model.training,
        "validation_rmse": val_rmse,
        "test_rmse": rmse(model, test),
        "split_sizes": [len(split.train), len(split.validation), len(split.test)],
        "alpha": args.alpha,
        "significance": [
            {"feature": s.feature, "n": s.n, "r": s.r, "t": s.t, "p_value": s.p_value, "significant": s.significant}
            for s in significance
        ],
    }
    model = LinearModel(model.features, model.weights, model.intercept, model.feature_means,
                        model.feature_stds, lam, model.schema_version, training)
    doc = {**model.to_dict(), "manifest": run_manifest(config, {f"features_{i}": p for i, p in enumerate(args.features)})}
    write_atomic(args.model, dumps(doc))

    print(f"lambda {lam:g}  train RMSE {training['rmse']:.4f}  validation RMSE {val_rmse:.4f}  "
          f"test RMSE {training['test_rmse']:.4f}")
    print(_significance_table(significance))
    return EXIT_OK


def cmd_score(args) -> int:
    config = build_config(args)
    if not os.path.exists(args.model):
        raise InputMissingError(f"model file not found: {args.model}")
    model = LinearModel.load(args.model)
    profiles = _load_profiles(args.profiles)
    analysis = analyze_files(args.audio, args.asr, args.ref_text, config, args.sentence_id, profiles, args.candidate_id)
    prediction = predict_score(model, analysis.vector)

    manifest = run_manifest(
        config,
        {"audio": args.audio, "asr": args.asr, "reference_text": args.ref_text, "model": args.model,
         "profiles": args.profiles if profiles is not None else None},
    )
    doc = _feature_document("score", analysis, config, manifest)
    doc["score"] = prediction.score
    doc["raw_score"] = prediction.raw
    doc["imputed_features"] = list(prediction.imputed)
    text = dumps(doc)
    write_atomic(args.out, text)

    sim = analysis.sim
    print(f"score {prediction.score:.2f}  (raw {prediction.raw:.3f})")
    print(f"sim_intonation {'absent' if sim is None else f'{sim:.4f}'}")
    if prediction.imputed:
        print("imputed: " + ", ".join(prediction.imputed))
    return EXIT_OK


def cmd_validate_text(args) -> int:
    for path in filter(None, (args.set_a, args.set_b)):
        if not os.path.exists(path):
            raise InputMissingError(f"sentence file not found: {path}")
    report_a = difficulty_report(read_sentence_file(args.set_a))
    doc = {"kind": "difficulty", "set_a": {"file": Path(args.set_a).name, **report_a.to_dict()}}
    print(format_table(report_a))
    if args.set_b:
        report_b = difficulty_report(read_sentence_file(args.set_b))
        tolerances = dict(_parse_tolerance(t) for t in args.tolerance or [])
        comparison = compare_reports(report_a, report_b, tolerances)
        doc["set_b"] = {"file": Path(args.set_b).name, **report_b.to_dict()}
        doc["comparison"] = comparison
        print()
        print(format_table(report_b))
        print()
        for metric, delta in comparison["deltas"].items():
            print(f"{metric:<20} delta {delta:.4f}  (tolerance {comparison['tolerances'][metric]:g})")
        print(f"verdict: {comparison['verdict']}")
    if args.out:
        write_atomic(args.out, dumps(doc))
    return EXIT_OK


def _parse_tolerance(text: str) -> tuple[str, float]:
    name, _, value = text.partition("=")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad tolerance {text!r}; expected metric=value") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        report_error("usage", message)
        self.exit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="prosody-score", description="Feature extraction and scoring for read-aloud English.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its keys")
    common.add_argument("--seed", type=int)
    common.add_argument("--min-pause-s", type=float, dest="min_pause_s")
    common.add_argument("--long-pause-s", type=float, dest="long_pause_s")
    common.add_argument("--fillers", help="filler lexicon, one token per line")

    reading = _Parser(add_help=False)
    reading.add_argument("--audio", required=True)
    reading.add_argument("--asr", required=True)
    reading.add_argument("--ref-text", required=True, dest="ref_text")
    reading.add_argument("--sentence-id", dest="sentence_id", help="default: reference file stem")
    reading.add_argument("--candidate-id", dest="candidate_id", help="default: ASR source_id")
    reading.add_argument("--profiles", help="intonation profile store (JSON)")

    p = sub.add_parser("extract", parents=[common, reading], help="compute a feature vector")
    p.add_argument("--out", required=True)
    p.add_argument("--csv", help="also write the vector as a one-row CSV")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="train intonation profiles or the scoring model")
    modes = p.add_subparsers(dest="mode", required=True, parser_class=_Parser)
    pp = modes.add_parser("profile", parents=[common], help="merge readings into the profile store")
    pp.add_argument("--item", nargs=3, action="append", required=True, metavar=("AUDIO", "ASR", "REF_TEXT"),
                    help="one training reading; the sentence id is the reference file stem")
    pp.add_argument("--profiles", required=True)
    pp.set_defaults(func=cmd_train_profile)
    pm = modes.add_parser("model", parents=[common], help="fit the ridge scorer on a feature CSV")
    pm.add_argument("--features", nargs="+", required=True, help="feature CSV(s) with manual_score")
    pm.add_argument("--model", required=True, help="output model file")
    pm.add_argument("--lambda", type=float, dest="ridge_lambda")
    pm.add_argument("--lambda-grid", dest="lambda_grid", help="comma list; best on the validation split wins")
    pm.add_argument("--feature-subset", dest="feature_subset", help="comma list of feature names")
    pm.add_argument("--alpha", type=float, default=0.05)
    pm.set_defaults(func=cmd_train_model)

    p = sub.add_parser("score", parents=[common, reading], help="score one reading with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("validate-text", help="difficulty metrics for sentence sets")
    p.add_argument("set_a")
    p.add_argument("set_b", nargs="?")
    p.add_argument("--out")
    p.add_argument("--tolerance", action="append", metavar="METRIC=VALUE")
    p.set_defaults(func=cmd_validate_text)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except ProsodyScoreError as exc:
        report_error(exc.category, str(exc))
        return EXIT_CODES.get(exc.category, EXIT_VALIDATION)
    except argparse.ArgumentTypeError as exc:
        report_error("usage", str(exc))
        return EXIT_USAGE
    except (FileNotFoundError, IsADirectoryError) as exc:
        report_error("input-missing", str(exc))
        return EXIT_MISSING


if __name__ == "__main__":
    sys.exit(main())
