"""Command-line pipeline over JSONL artifacts.

Subcommands compose into the full workflow:

    omit -> filter -> assemble -> cad        (augmentation)
    dates / irrelevant                       (diagnostic set construction)
    distract                                 (positive/negative mining input)
    vote / score / agree / types / overlap   (analysis)
    losscheck                                (kernel verification)

Exit codes: 0 success, 1 validation error, 2 I/O error, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from . import augment, corpus, evaluate, lossmath, omission, stopwords, syntax
from .corpus import CorpusError, Dataset, OmissionType, VeracityLabel

logger = logging.getLogger(__name__)

DEFAULT_SEED = 13
DEFAULT_NEGATIVES_CAP = 4
DEFAULT_TAU = 1.5


@dataclass(frozen=True)
class PipelineConfig:
    """Run-wide knobs shared by the pipeline subcommands."""

    dataset: Dataset
    tau: float = DEFAULT_TAU
    negatives_cap: int = DEFAULT_NEGATIVES_CAP
    stopword_path: Optional[str] = None
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if not math.isfinite(self.tau):
            raise CorpusError("tau must be finite")
        if self.negatives_cap < 0:
            raise CorpusError("negatives cap must be non-negative")
        if self.stopword_path is not None and not os.path.exists(self.stopword_path):
            raise CorpusError(f"stopword file {self.stopword_path!r} does not exist")


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _emit(payload: dict, fmt: str = "json") -> None:
    if fmt == "json":
        print(json.dumps(payload, ensure_ascii=False, indent=2))
    else:
        for line in _tabulate(payload):
            print(line)


def _tabulate(payload: dict, indent: str = "") -> list:
    lines = []
    flat = {k: v for k, v in payload.items() if not isinstance(v, dict)}
    nested = {k: v for k, v in payload.items() if isinstance(v, dict)}
    if flat:
        width = max(len(str(k)) for k in flat)
        for key, value in flat.items():
            if isinstance(value, float):
                value = f"{value:.6f}"
            lines.append(f"{indent}{str(key).ljust(width)}  {value}")
    for key, value in nested.items():
        lines.append(f"{indent}{key}:")
        lines.extend(_tabulate(value, indent + "  "))
    return lines


def _parse_types(text: Optional[str]) -> Optional[frozenset]:
    if not text or text.strip().upper() == "ALL":
        return None
    return frozenset(OmissionType.parse(part) for part in text.split(",") if part.strip())


def _load_parses_for(instance, parse_map, needed: bool):
    trees = []
    for k in range(len(instance.evidence)):
        trees.append(parse_map.get((instance.id, k)))
    if needed and any(tree is None for tree in trees):
        missing = [k for k, tree in enumerate(trees) if tree is None]
        raise CorpusError(
            f"instance {instance.id}: no parse for sentence(s) {missing}"
        )
    return trees


def _read_label_map(path, dataset: Optional[Dataset] = None) -> Dict[str, VeracityLabel]:
    """Accepts prediction records or plain {"instance_id", "label"} lines."""
    labels: Dict[str, VeracityLabel] = {}
    for line_no, payload in corpus.iter_jsonl(path):
        try:
            if "label" in payload and "predicted" not in payload:
                labels[str(payload["instance_id"])] = corpus.parse_label(
                    payload["label"], dataset
                )
            else:
                record = augment.PredictionRecord.from_json(payload)
                if dataset is not None:
                    record.validate(dataset)
                labels[record.instance_id] = record.predicted
        except (KeyError, CorpusError) as exc:
            raise CorpusError(f"{path}:{line_no}: {exc}") from None
    return labels


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def _omit_worker(job):
    instance, trees, types = job
    return omission.generate_all(instance, trees, types)


def _cmd_omit(args) -> None:
    types = _parse_types(args.types)
    wanted = frozenset(OmissionType) if types is None else types
    needs_parses = bool(wanted & omission.CONSTITUENT_TYPES)
    if needs_parses and not args.parses:
        raise CorpusError("constituent omission types require --parses")
    parse_map = syntax.read_parses(args.parses) if args.parses else {}
    instances = list(corpus.read_instances(args.instances, _dataset(args)))
    jobs = [
        (inst, _load_parses_for(inst, parse_map, needs_parses), types)
        for inst in instances
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            batches = list(pool.map(_omit_worker, jobs, chunksize=16))
    else:
        batches = [_omit_worker(job) for job in jobs]
    candidates = [cand for batch in batches for cand in batch]
    written = corpus.write_jsonl(candidates, args.out)
    _emit({"written": written, "instances": len(instances)})


def _cmd_dates(args) -> None:
    instances = list(corpus.read_instances(args.instances, _dataset(args)))
    candidates = []
    for inst in instances:
        candidates.extend(omission.omit_dates(inst))
    written = corpus.write_jsonl(candidates, args.out)
    _emit({"written": written, "instances": len(instances)})


def _cmd_distract(args) -> None:
    documents: Dict[str, list] = {}
    for line_no, payload in corpus.iter_jsonl(args.docs):
        try:
            documents[str(payload["id"])] = [str(s) for s in payload["sentences"]]
        except (KeyError, TypeError) as exc:
            raise CorpusError(f"{args.docs}:{line_no}: bad document record: {exc}") from None
    rows = []
    skipped = 0
    for inst in corpus.read_instances(args.instances, _dataset(args)):
        sentences = documents.get(inst.id)
        if sentences is None:
            skipped += 1
            logger.warning("no document sentences for instance %s; skipped", inst.id)
            continue
        try:
            distractor = augment.mine_distractor(inst, sentences)
        except augment.AugmentError:
            skipped += 1
            logger.warning("no usable distractor for instance %s; skipped", inst.id)
            continue
        rows.append({"instance_id": inst.id, "distractor": distractor})
    written = corpus.write_jsonl(rows, args.out)
    _emit({"written": written, "skipped": skipped})


def _cmd_filter(args) -> None:
    dataset = Dataset.parse(args.dataset)
    candidates = list(omission.read_candidates(args.candidates))
    grouped = augment.predictions_by_instance(
        augment.read_predictions(args.predictions, dataset)
    )
    kept = augment.filter_negatives(candidates, grouped, dataset)
    written = corpus.write_jsonl(kept, args.out)
    _emit({"written": written, "dropped": len(candidates) - written})


def _cmd_assemble(args) -> None:
    dataset = Dataset.parse(args.dataset)
    instances = list(corpus.read_instances(args.instances, dataset))
    by_base: Dict[str, list] = {}
    for cand in omission.read_candidates(args.candidates):
        by_base.setdefault(cand.base_id, []).append(cand)
    distractors: Dict[str, str] = {}
    for line_no, payload in corpus.iter_jsonl(args.distractors):
        try:
            distractors[str(payload["instance_id"])] = str(payload["distractor"])
        except KeyError as exc:
            raise CorpusError(f"{args.distractors}:{line_no}: missing {exc}") from None

    rng = random.Random(args.seed)
    groups = []
    skipped_nei = 0
    skipped_nodistractor = 0
    for inst in instances:
        if inst.label.is_insufficient:
            skipped_nei += 1
            continue
        if inst.id not in distractors:
            skipped_nodistractor += 1
            continue
        negatives = by_base.get(inst.id, [])
        if args.sample and len(negatives) > args.cap:
            picked = sorted(rng.sample(range(len(negatives)), args.cap))
            negatives = [negatives[i] for i in picked]
        groups.append(
            augment.assemble_group(inst, negatives, distractors[inst.id], cap=args.cap)
        )
    written = corpus.write_jsonl(groups, args.out)
    _emit(
        {
            "written": written,
            "skipped_insufficient": skipped_nei,
            "skipped_no_distractor": skipped_nodistractor,
        }
    )


def _cmd_cad(args) -> None:
    dataset = Dataset.parse(args.dataset)
    groups = list(augment.read_groups(args.groups))
    instances = augment.emit_cad(groups, dataset)
    written = corpus.write_jsonl(instances, args.out)
    _emit({"written": written, "groups": len(groups)})


def _cmd_irrelevant(args) -> None:
    instances = list(corpus.read_instances(args.instances, _dataset(args)))
    swapped = corpus.build_incorrect_evidence_set(instances)
    written = corpus.write_jsonl(swapped, args.out)
    _emit({"written": written})


def _cmd_vote(args) -> None:
    grouped = augment.predictions_by_instance(
        augment.read_predictions(args.predictions, _dataset(args))
    )
    rows = []
    for instance_id in sorted(grouped):
        label = augment.majority_vote(grouped[instance_id])
        rows.append({"instance_id": instance_id, "label": label.value})
    written = corpus.write_jsonl(rows, args.out)
    _emit({"written": written})


def _cmd_score(args) -> None:
    dataset = Dataset.parse(args.dataset)
    instances = list(corpus.read_instances(args.instances, dataset))
    labels = _read_label_map(args.predictions, dataset)
    golds = []
    preds = []
    for inst in instances:
        if inst.id not in labels:
            raise CorpusError(f"missing prediction for instance {inst.id}")
        golds.append(inst.label)
        preds.append(labels[inst.id])
    report = {
        "macro_f1": evaluate.macro_f1(golds, preds, corpus.label_space_size(dataset)),
        "nei_accuracy": evaluate.nei_accuracy(preds, dataset),
        "n": len(instances),
    }
    _emit(report, args.format)


def _cmd_agree(args) -> None:
    diagnostics = list(corpus.read_diagnostics(args.diagnostics))
    grouped = augment.predictions_by_instance(augment.read_predictions(args.predictions))
    split_tables: Dict[str, evaluate.AgreementTable] = {}
    for diag in diagnostics:
        if diag.annotation is None:
            raise CorpusError(f"diagnostic {diag.base_id} lacks a human annotation")
        records = grouped.get(diag.base_id)
        if records is None:
            raise CorpusError(f"missing predictions for diagnostic {diag.base_id}")
        split = diag.split or "all"
        table = split_tables.setdefault(split, evaluate.AgreementTable())
        table.add(evaluate.agreement_row(records), diag.annotation)
    total = evaluate.AgreementTable()
    for table in split_tables.values():
        total = total.merge(table)
    report = {
        "splits": {name: split_tables[name].to_json() for name in sorted(split_tables)},
        "split_sizes": {name: split_tables[name].total() for name in sorted(split_tables)},
        "total": total.to_json(),
    }
    _emit(report, args.format)


def _cmd_types(args) -> None:
    diagnostics = list(corpus.read_diagnostics(args.diagnostics))
    labels = _read_label_map(args.predictions)
    breakdown = evaluate.per_type_accuracy(diagnostics, labels)
    report = {
        omission_type.value: breakdown[omission_type].to_json()
        for omission_type in OmissionType
        if omission_type in breakdown
    }
    _emit(report, args.format)


def _cmd_overlap(args) -> None:
    words = stopwords.load_stopwords(args.stopwords)
    pairs = [
        (inst.claim, inst.evidence_text())
        for inst in corpus.read_instances(args.instances, _dataset(args))
    ]
    stats = evaluate.overlap_stats(pairs, words)
    _emit(stats.to_json(), args.format)


def _cmd_losscheck(args) -> None:
    report = lossmath.gradient_report(
        dim=args.dim, trials=args.trials, epsilon=args.eps, seed=args.seed, tau=args.tau
    )
    _emit(report, args.format)


def _dataset(args) -> Optional[Dataset]:
    value = getattr(args, "dataset", None)
    return Dataset.parse(value) if value else None


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="suffacts",
        description="Evidence-sufficiency diagnostics and augmentation pipeline",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")

    def add(name, handler, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(handler=handler)
        return p

    p = add("omit", _cmd_omit, "generate omission candidates")
    p.add_argument("--instances", required=True)
    p.add_argument("--parses")
    p.add_argument("--types", default="ALL", help="comma-separated omission types")
    p.add_argument("--dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)

    p = add("dates", _cmd_dates, "generate date-template candidates only")
    p.add_argument("--instances", required=True)
    p.add_argument("--dataset")
    p.add_argument("--out", required=True)

    p = add("distract", _cmd_distract, "mine claim-similar distractor sentences")
    p.add_argument("--instances", required=True)
    p.add_argument("--docs", required=True, help="JSONL of {id, sentences}")
    p.add_argument("--dataset")
    p.add_argument("--out", required=True)

    p = add("filter", _cmd_filter, "keep candidates both models call insufficient")
    p.add_argument("--candidates", required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)

    p = add("assemble", _cmd_assemble, "build contrastive groups")
    p.add_argument("--instances", required=True)
    p.add_argument("--candidates", required=True, help="agreement-filtered candidates")
    p.add_argument("--distractors", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--cap", type=int, default=DEFAULT_NEGATIVES_CAP)
    p.add_argument("--sample", action="store_true", help="sample negatives over the cap")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", required=True)

    p = add("cad", _cmd_cad, "emit counterfactually augmented training instances")
    p.add_argument("--groups", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)

    p = add("irrelevant", _cmd_irrelevant, "swap in the most claim-similar other evidence")
    p.add_argument("--instances", required=True)
    p.add_argument("--dataset")
    p.add_argument("--out", required=True)

    p = add("vote", _cmd_vote, "three-model majority vote")
    p.add_argument("--predictions", required=True)
    p.add_argument("--dataset")
    p.add_argument("--out", required=True)

    p = add("score", _cmd_score, "macro-F1 and insufficiency rate")
    p.add_argument("--instances", required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--format", choices=("json", "table"), default="json")

    p = add("agree", _cmd_agree, "model-agreement vs human-annotation table")
    p.add_argument("--diagnostics", required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--format", choices=("json", "table"), default="json")

    p = add("types", _cmd_types, "per-omission-type detection rates")
    p.add_argument("--diagnostics", required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--format", choices=("json", "table"), default="json")

    p = add("overlap", _cmd_overlap, "claim-evidence overlap statistics")
    p.add_argument("--instances", required=True)
    p.add_argument("--dataset")
    p.add_argument("--stopwords", help="stop-word file (or SUFFACTS_STOPWORDS env)")
    p.add_argument("--format", choices=("json", "table"), default="json")

    p = add("losscheck", _cmd_losscheck, "finite-difference gradient verification")
    p.add_argument("--dim", type=int, default=8)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--eps", type=float, default=1e-5)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--tau", type=float, default=DEFAULT_TAU)
    p.add_argument("--format", choices=("json", "table"), default="json")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 64
    if not getattr(args, "handler", None):
        parser.print_usage(sys.stderr)
        return 64
    try:
        args.handler(args)
    except OSError as exc:
        print(f"suffacts: I/O error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"suffacts: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
