"""Command-line pipeline: synth, train-tagger, tag, analyze, train-eval, explain.

Every command writes its outputs plus a manifest.json (configuration echo
and sha256 content hashes) into --out-dir, and is deterministic given its
inputs and seed.  Errors exit nonzero with a single `error: ...` line.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .corpus import (
    Corpus,
    Label,
    TaggedDocument,
    load_conllu,
    load_erisk_xml,
    load_jsonl,
    save_conllu,
    save_jsonl,
)
from .explain import shap_summary
from .features import (
    FEATURE_NAMES,
    extract_features,
    read_feature_csv,
    summarize_matrix,
    write_feature_csv,
)
from .forest import RandomForest, evaluate
from .perceptron import PerceptronTagger, tag_corpus
from .stats import keyness, welch_t, word_counts
from .synth import CONTROL_DEFAULT, TARGET_DEFAULT, GroupProfile, SynthConfig, generate_corpus, generate_treebank
from .tags import analyze_morphology

_FEATURE_FAMILIES = {
    "content_pos": ("upos_adj", "upos_adv", "upos_noun", "upos_propn", "upos_verb"),
    "functional_pos": (
        "upos_adp", "upos_cconj", "upos_det", "upos_part", "upos_sconj",
        "upos_aux", "upos_pron",
    ),
    "tenses": ("tense_past", "tense_present", "tense_future"),
    "pronouns": (
        "person_first", "person_second", "person_third",
        "first_singular", "first_plural",
    ),
    "indices": ("pi", "formality"),
}


def _fmt(x: float) -> str:
    return "NA" if (isinstance(x, float) and math.isnan(x)) else repr(float(x))


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(out_dir: Path, command: str, config: dict, outputs: list[Path], extra: dict | None = None) -> Path:
    manifest = {
        "command": command,
        "config": config,
        "outputs": {p.name: _sha256(p) for p in outputs},
    }
    if extra:
        manifest.update(extra)
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8")
    return path


def _config_echo(args: argparse.Namespace) -> dict:
    skip = {"func"}
    return {
        k: (str(v) if isinstance(v, Path) else v)
        for k, v in sorted(vars(args).items())
        if k not in skip
    }


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _require_file(path_str: str) -> Path:
    path = Path(path_str)
    if not path.is_file():
        raise FileNotFoundError(f"input file not found: {path}")
    return path


def cmd_synth(args) -> int:
    out = _out_dir(args)
    config = SynthConfig(
        posts_per_group=args.posts_per_group,
        sentences_per_post=args.sentences_per_post,
        posts_per_user=args.posts_per_user,
        seed=args.seed,
        target=GroupProfile(
            pron_first_singular_rate=args.target_pron1sg,
            propn_rate=args.target_propn,
            other_pronoun_rate=args.target_other_pron,
            tense_mix=tuple(args.target_tense_mix),
            interjection_rate=args.target_intj,
            adjective_rate=args.target_adj,
            adverb_rate=args.target_adv,
        ),
        control=GroupProfile(
            pron_first_singular_rate=args.control_pron1sg,
            propn_rate=args.control_propn,
            other_pronoun_rate=args.control_other_pron,
            tense_mix=tuple(args.control_tense_mix),
            interjection_rate=args.control_intj,
            adjective_rate=args.control_adj,
            adverb_rate=args.control_adv,
        ),
    )
    corpus, gold, planted = generate_corpus(config)
    outputs = []
    corpus_path = out / "corpus.jsonl"
    save_jsonl(corpus, corpus_path)
    outputs.append(corpus_path)
    if args.emit_gold:
        gold_path = out / "gold_tagged.conllu"
        save_conllu(gold, gold_path)
        outputs.append(gold_path)
    if args.treebank_sentences > 0:
        sentences = generate_treebank(args.treebank_sentences, seed=args.seed + 1000)
        doc = TaggedDocument(
            user_id="treebank",
            label=Label.CONTROL,
            sentences=[analyze_morphology(forms, tags) for forms, tags in sentences],
        )
        treebank_path = out / "treebank.conllu"
        save_conllu([doc], treebank_path)
        outputs.append(treebank_path)
    _write_manifest(out, "synth", _config_echo(args), outputs, extra={"planted": planted})
    print(f"wrote {len(outputs)} files to {out}")
    return 0


def cmd_train_tagger(args) -> int:
    out = _out_dir(args)
    documents = load_conllu(_require_file(args.treebank))
    sentences = [s for doc in documents for s in doc.sentences]
    if not sentences:
        raise ValueError("treebank contains no sentences")
    X = [[t.form for t in s] for s in sentences]
    y = [[t.ptb for t in s] for s in sentences]
    holdout = int(len(X) * args.eval_fraction)
    if holdout:
        X_train, y_train = X[:-holdout], y[:-holdout]
        X_eval, y_eval = X[-holdout:], y[-holdout:]
    else:
        X_train, y_train = X, y
        X_eval, y_eval = [], []
    tagger = PerceptronTagger(epochs=args.epochs, seed=args.seed).fit(X_train, y_train)
    model_path = out / "tagger.json"
    tagger.save(model_path)
    extra = {"training_sentences": len(X_train)}
    if X_eval:
        accuracy = tagger.score(X_eval, y_eval)
        extra["heldout_accuracy"] = accuracy
        print(f"held-out accuracy on {len(X_eval)} sentences: {accuracy:.4f}")
    _write_manifest(out, "train-tagger", _config_echo(args), [model_path], extra=extra)
    print(f"wrote tagger model to {model_path}")
    return 0


def _load_input_corpus(args) -> Corpus:
    if args.format == "jsonl":
        if not args.input:
            raise ValueError("--input is required for jsonl format")
        return load_jsonl(_require_file(args.input))
    if args.format == "erisk-xml":
        if not args.target_dir and not args.control_dir:
            raise ValueError("erisk-xml format needs --target-dir and/or --control-dir")
        corpus = Corpus([])
        if args.target_dir:
            corpus = corpus.merge(load_erisk_xml(args.target_dir, Label.TARGET))
        if args.control_dir:
            corpus = corpus.merge(load_erisk_xml(args.control_dir, Label.CONTROL))
        return corpus
    raise ValueError(f"unsupported input format: {args.format}")


def cmd_tag(args) -> int:
    out = _out_dir(args)
    tagged_path = out / "tagged.conllu"
    if args.format == "conllu":
        if not args.input:
            raise ValueError("--input is required for conllu format")
        documents = load_conllu(
            _require_file(args.input), strict_md_adjacency=args.strict_md_adjacency
        )
    else:
        corpus = _load_input_corpus(args)
        if not args.model:
            raise ValueError(
                "a tagger model is required to tag raw text; train one with"
                " 'poslens train-tagger' and pass it via --model"
            )
        tagger = PerceptronTagger.load(_require_file(args.model))
        documents = tag_corpus(
            corpus, tagger, strict_md_adjacency=args.strict_md_adjacency
        )
    save_conllu(documents, tagged_path)
    _write_manifest(
        out, "tag", _config_echo(args), [tagged_path],
        extra={"documents": len(documents)},
    )
    print(f"wrote tagged corpus to {tagged_path}")
    return 0


def _write_group_table(path: Path, features: tuple[str, ...], target, control):
    names = list(FEATURE_NAMES)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["feature", "mean_target", "std_target", "n_target",
             "mean_control", "std_control", "n_control"]
        )
        for feature in features:
            j = names.index(feature)
            writer.writerow(
                [
                    feature,
                    _fmt(target.mean[j]), _fmt(target.std[j]), int(target.count[j]),
                    _fmt(control.mean[j]), _fmt(control.std[j]), int(control.count[j]),
                ]
            )


def _write_welch_table(path: Path, X_target, X_control):
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["feature", "mean_target", "mean_control", "t", "df", "p"])
        for j, feature in enumerate(FEATURE_NAMES):
            a = X_target[:, j]
            a = a[~np.isnan(a)]
            b = X_control[:, j]
            b = b[~np.isnan(b)]
            if len(a) >= 2 and len(b) >= 2:
                result = welch_t(list(a), list(b))
                row = [
                    feature,
                    _fmt(result.mean_a), _fmt(result.mean_b),
                    _fmt(result.t), _fmt(result.df), _fmt(result.p_two_sided),
                ]
            else:
                mean_a = _fmt(float(a.mean()) if len(a) else float("nan"))
                mean_b = _fmt(float(b.mean()) if len(b) else float("nan"))
                row = [feature, mean_a, mean_b, "NA", "NA", "NA"]
            writer.writerow(row)


def _write_keyness_table(path: Path, result):
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["word", "count_target", "count_reference", "g2", "overused_in", "rank"])
        for entries in (result.target, result.reference):
            for rank, entry in enumerate(entries, start=1):
                writer.writerow(
                    [
                        entry.word, entry.count_target, entry.count_reference,
                        _fmt(entry.g2), entry.overused_in.value, rank,
                    ]
                )


def _per_user_matrix(matrix: np.ndarray, user_ids: list[str]) -> np.ndarray:
    """Average each user's rows, ignoring undefined entries per feature."""
    order = sorted(set(user_ids))
    rows = []
    users = np.array(user_ids)
    for user in order:
        block = matrix[users == user]
        with np.errstate(invalid="ignore"):
            counts = (~np.isnan(block)).sum(axis=0)
            sums = np.nansum(block, axis=0)
            mean = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
        rows.append(mean)
    return np.vstack(rows)


def cmd_analyze(args) -> int:
    out = _out_dir(args)
    documents = load_conllu(_require_file(args.tagged))
    by_label = {Label.TARGET: [], Label.CONTROL: []}
    for doc in documents:
        by_label[doc.label].append(doc)
    if not by_label[Label.TARGET] or not by_label[Label.CONTROL]:
        raise ValueError("both groups required: tagged corpus must contain target and control documents")

    matrix, kept = extract_features(documents, denominator=args.upos_denominator)
    labels = np.array([1 if documents[i].label is Label.TARGET else 0 for i in kept])
    if not (labels == 1).any() or not (labels == 0).any():
        raise ValueError(
            "both groups required: every document of one group is empty"
        )
    outputs = []

    features_path = out / "features.csv"
    write_feature_csv(features_path, documents, matrix, kept)
    outputs.append(features_path)

    X_target = matrix[labels == 1]
    X_control = matrix[labels == 0]
    if args.per_user:
        users_target = [documents[i].user_id for i, lab in zip(kept, labels) if lab == 1]
        users_control = [documents[i].user_id for i, lab in zip(kept, labels) if lab == 0]
        X_target = _per_user_matrix(X_target, users_target)
        X_control = _per_user_matrix(X_control, users_control)

    summary_target = summarize_matrix(X_target, Label.TARGET)
    summary_control = summarize_matrix(X_control, Label.CONTROL)
    for table, family in _FEATURE_FAMILIES.items():
        path = out / f"{table}.csv"
        _write_group_table(path, family, summary_target, summary_control)
        outputs.append(path)

    welch_path = out / "welch.csv"
    _write_welch_table(welch_path, X_target, X_control)
    outputs.append(welch_path)

    for table, upos in (("keyness_nouns", "NOUN"), ("keyness_verbs", "VERB")):
        target_counts = word_counts(by_label[Label.TARGET], {upos}, use_lemmas=args.lemmas)
        control_counts = word_counts(by_label[Label.CONTROL], {upos}, use_lemmas=args.lemmas)
        result = keyness(
            target_counts, control_counts,
            top_k=args.keyness_top, min_count=args.keyness_min_count,
        )
        path = out / f"{table}.csv"
        _write_keyness_table(path, result)
        outputs.append(path)

    _write_manifest(out, "analyze", _config_echo(args), outputs)
    print(f"wrote {len(outputs)} tables to {out}")
    return 0


def cmd_train_eval(args) -> int:
    out = _out_dir(args)
    X_train, y_train, _, _ = read_feature_csv(_require_file(args.train_features))
    X_test, y_test, _, _ = read_feature_csv(_require_file(args.test_features))
    if args.drop_undefined:
        keep = ~np.isnan(X_train).any(axis=1)
        X_train, y_train = X_train[keep], y_train[keep]
        keep = ~np.isnan(X_test).any(axis=1)
        X_test, y_test = X_test[keep], y_test[keep]
    forest = RandomForest(
        n_trees=args.n_trees,
        max_depth=args.max_depth,
        class_weighting=args.class_weighting,
        min_samples_leaf=args.min_samples_leaf,
        seed=args.seed,
    ).fit(X_train, y_train, feature_names=list(FEATURE_NAMES))
    model_path = out / "forest.json"
    forest.save(model_path)
    metrics = evaluate(forest, X_test, y_test, threshold=args.threshold)
    metrics_path = out / "metrics.json"
    metrics_path.write_text(
        json.dumps(metrics.to_dict(), indent=2, sort_keys=True), encoding="utf-8"
    )
    _write_manifest(out, "train-eval", _config_echo(args), [model_path, metrics_path])
    print(
        f"macro F1 {metrics.macro_f1:.4f}, weighted F1 {metrics.weighted_f1:.4f};"
        f" model at {model_path}"
    )
    return 0


def cmd_explain(args) -> int:
    out = _out_dir(args)
    forest = RandomForest.load(_require_file(args.model))
    X, _, _, post_indices = read_feature_csv(_require_file(args.features))
    result = shap_summary(forest, X, sample_size=args.sample_size, seed=args.seed)
    names = list(FEATURE_NAMES)

    attr_path = out / "attributions.csv"
    with attr_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["post_index", "feature", "feature_value", "phi"])
        for row, sample_index in enumerate(result.indices):
            for j, feature in enumerate(names):
                writer.writerow(
                    [
                        post_indices[sample_index],
                        feature,
                        _fmt(X[sample_index, j]),
                        _fmt(result.phi[row, j]),
                    ]
                )

    summary_path = out / "shap_summary.csv"
    with summary_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["feature", "mean_abs_phi", "rank"])
        for rank, j in enumerate(result.ranking.order, start=1):
            writer.writerow([names[j], _fmt(result.ranking.mean_abs_phi[j]), rank])

    _write_manifest(
        out, "explain", _config_echo(args), [attr_path, summary_path],
        extra={"base_value": result.base_value, "explained_posts": len(result.indices)},
    )
    print(f"explained {len(result.indices)} posts; summary at {summary_path}")
    return 0


def _tense_mix(text: str) -> list[float]:
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("tense mix needs three comma-separated numbers")
    return parts


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="poslens",
        description="Part-of-speech profiling and classification of two-group corpora",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", required=True, help="directory for outputs and manifest")
    common.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic labeled corpus")
    p.add_argument("--posts-per-group", type=int, default=2000)
    p.add_argument("--sentences-per-post", type=int, default=16)
    p.add_argument("--posts-per-user", type=int, default=10)
    p.add_argument("--treebank-sentences", type=int, default=6000,
                   help="tagged training sentences to emit (0 disables)")
    p.add_argument("--emit-gold", action="store_true",
                   help="also write the corpus's own gold tagging")
    p.add_argument("--target-pron1sg", type=float, default=TARGET_DEFAULT.pron_first_singular_rate)
    p.add_argument("--target-propn", type=float, default=TARGET_DEFAULT.propn_rate)
    p.add_argument("--target-other-pron", type=float, default=TARGET_DEFAULT.other_pronoun_rate)
    p.add_argument("--target-tense-mix", type=_tense_mix,
                   default=list(TARGET_DEFAULT.tense_mix), metavar="PAST,PRES,FUT")
    p.add_argument("--target-intj", type=float, default=TARGET_DEFAULT.interjection_rate)
    p.add_argument("--target-adj", type=float, default=TARGET_DEFAULT.adjective_rate)
    p.add_argument("--target-adv", type=float, default=TARGET_DEFAULT.adverb_rate)
    p.add_argument("--control-pron1sg", type=float, default=CONTROL_DEFAULT.pron_first_singular_rate)
    p.add_argument("--control-propn", type=float, default=CONTROL_DEFAULT.propn_rate)
    p.add_argument("--control-other-pron", type=float, default=CONTROL_DEFAULT.other_pronoun_rate)
    p.add_argument("--control-tense-mix", type=_tense_mix,
                   default=list(CONTROL_DEFAULT.tense_mix), metavar="PAST,PRES,FUT")
    p.add_argument("--control-intj", type=float, default=CONTROL_DEFAULT.interjection_rate)
    p.add_argument("--control-adj", type=float, default=CONTROL_DEFAULT.adjective_rate)
    p.add_argument("--control-adv", type=float, default=CONTROL_DEFAULT.adverb_rate)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train-tagger", parents=[common], help="train the perceptron tagger")
    p.add_argument("--treebank", required=True, help="CoNLL-U training data")
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--eval-fraction", type=float, default=0.1,
                   help="trailing fraction held out for accuracy reporting")
    p.set_defaults(func=cmd_train_tagger)

    p = sub.add_parser("tag", parents=[common], help="tokenize and tag a corpus")
    p.add_argument("--format", choices=("jsonl", "erisk-xml", "conllu"), default="jsonl")
    p.add_argument("--input", help="corpus file (jsonl or conllu formats)")
    p.add_argument("--target-dir", help="eRisk XML directory for the target group")
    p.add_argument("--control-dir", help="eRisk XML directory for the control group")
    p.add_argument("--model", help="tagger model file (required for raw text)")
    p.add_argument("--strict-md-adjacency", action="store_true",
                   help="future tense only when the modal immediately precedes the verb")
    p.set_defaults(func=cmd_tag)

    p = sub.add_parser("analyze", parents=[common], help="group statistics, t-tests, keyness")
    p.add_argument("--tagged", required=True, help="tagged corpus (CoNLL-U with labels)")
    p.add_argument("--per-user", action="store_true",
                   help="aggregate per user before group statistics")
    p.add_argument("--keyness-top", type=int, default=20)
    p.add_argument("--keyness-min-count", type=int, default=5)
    p.add_argument("--lemmas", action="store_true",
                   help="count lemmas instead of surface forms when available")
    p.add_argument("--upos-denominator", choices=("tracked", "all"), default="tracked")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("train-eval", parents=[common], help="train and evaluate the forest")
    p.add_argument("--train-features", required=True)
    p.add_argument("--test-features", required=True)
    p.add_argument("--n-trees", type=int, default=50)
    p.add_argument("--max-depth", type=int, default=15)
    p.add_argument("--class-weighting", choices=("balanced", "uniform"), default="balanced")
    p.add_argument("--min-samples-leaf", type=int, default=1)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--drop-undefined", action="store_true",
                   help="drop rows with undefined features instead of imputing")
    p.set_defaults(func=cmd_train_eval)

    p = sub.add_parser("explain", parents=[common], help="Shapley attributions for a forest")
    p.add_argument("--model", required=True, help="forest model file")
    p.add_argument("--features", required=True, help="feature CSV to explain")
    p.add_argument("--sample-size", type=int, default=1500)
    p.set_defaults(func=cmd_explain)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # surface one parsable line, nonzero exit
        message = " ".join(str(exc).split())
        print(f"error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
