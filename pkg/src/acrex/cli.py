"""Single executable exposing the pipeline.

Subcommands: validate, stats, mix, prompts, targets, extract, baseline,
score, e2e. Record-emitting commands write line-delimited JSON to stdout or
--out; human-readable tables switch to machine output with --json. Every
run emits a manifest (counts, backend, seed, wall time) as one JSON line on
stderr, or to --manifest <path>. ACREX_LOG sets the log level.
"""

from __future__ import annotations

import argparse
import contextlib
import functools
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .backends import BackendError, GenRequest, generate, parse_backend_spec
from .baseline import RuleConfig, baseline_prediction
from .corpus import (STAGE_MULTILINGUAL, STAGE_SINGLE_LANGUAGE, DatasetError,
                     load_dataset, mix_curriculum, summarize, write_dataset)
from .extraction import extract, load_predictions, write_predictions
from .scoring import ScoreReport, score, score_per_sample
from .template import build_prompt, encode_target

log = logging.getLogger(__name__)


@dataclass
class RunManifest:
    """Per-run provenance and diagnostics, emitted for every invocation."""

    command: str
    inputs: list[str]
    backend: str | None = None
    seed: int | None = None
    version: str = __version__
    samples: int = 0
    malformed_outputs: int = 0
    unmatched_forms: int = 0
    wall_time_s: float = 0.0

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "backend": self.backend,
            "seed": self.seed,
            "version": self.version,
            "samples": self.samples,
            "malformed_outputs": self.malformed_outputs,
            "unmatched_forms": self.unmatched_forms,
            "wall_time_s": self.wall_time_s,
        }


def _open_out(args):
    if getattr(args, "out", None):
        return open(args.out, "w", encoding="utf-8")
    return contextlib.nullcontext(sys.stdout)


def _named_splits(paths) -> list[tuple[str, list]]:
    splits = []
    names = set()
    for path in paths:
        name = Path(path).stem
        if name in names:
            raise DatasetError(f"duplicate split name {name!r}; rename the files")
        names.add(name)
        splits.append((name, load_dataset(path)))
    return splits


def cmd_validate(args, manifest: RunManifest) -> None:
    samples = load_dataset(args.dataset, fmt=args.format)
    shorts = sum(len(s.shorts) for s in samples)
    longs = sum(len(s.longs) for s in samples)
    manifest.samples = len(samples)
    if args.json:
        print(json.dumps({"path": args.dataset, "samples": len(samples),
                          "short_spans": shorts, "long_spans": longs},
                         ensure_ascii=False))
    else:
        print(f"OK {args.dataset}: {len(samples)} samples, "
              f"{shorts} short spans, {longs} long spans")


def cmd_stats(args, manifest: RunManifest) -> None:
    summaries = summarize(_named_splits(args.datasets))
    manifest.samples = sum(s.samples for s in summaries)
    if args.json:
        print(json.dumps([{
            "split": s.name, "samples": s.samples, "ratio": s.ratio,
            "short_spans": s.short_spans, "long_spans": s.long_spans,
            "mean_spans": s.mean_spans,
        } for s in summaries], ensure_ascii=False))
        return
    header = f"{'split':<16}{'samples':>9}{'ratio':>9}{'shorts':>8}{'longs':>8}{'spans/sample':>14}"
    print(header)
    print("-" * len(header))
    for s in summaries:
        print(f"{s.name:<16}{s.samples:>9}{s.ratio * 100:>8.2f}%"
              f"{s.short_spans:>8}{s.long_spans:>8}{s.mean_spans:>14.2f}")
    print("-" * len(header))
    print(f"{'total':<16}{manifest.samples:>9}{100.0:>8.2f}%")


def cmd_mix(args, manifest: RunManifest) -> None:
    mixed = mix_curriculum(_named_splits(args.datasets), stage=args.stage,
                           language=args.language, seed=args.seed)
    manifest.samples = len(mixed)
    manifest.seed = args.seed
    with _open_out(args) as out:
        write_dataset(mixed, out)


def cmd_prompts(args, manifest: RunManifest) -> None:
    samples = load_dataset(args.dataset)
    manifest.samples = len(samples)
    with _open_out(args) as out:
        for sample in samples:
            out.write(json.dumps({"id": sample.id,
                                  "prompt": build_prompt(sample.text)},
                                 ensure_ascii=False) + "\n")


def cmd_targets(args, manifest: RunManifest) -> None:
    samples = load_dataset(args.dataset)
    manifest.samples = len(samples)
    with _open_out(args) as out:
        for sample in samples:
            out.write(json.dumps({"id": sample.id,
                                  "target": encode_target(sample)},
                                 ensure_ascii=False) + "\n")


def _map_samples(func, inputs, workers: int) -> list:
    if workers > 1 and inputs:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, *zip(*inputs)))
    return [func(*item) for item in inputs]


def _run_extraction(samples, backend, workers: int) -> list:
    requests = [GenRequest(s.id, build_prompt(s.text)) for s in samples]
    responses = generate(requests, backend)
    pairs = [(s.text, r.output) for s, r in zip(samples, responses)]
    return _map_samples(extract, pairs, workers)


def _note_extraction(manifest: RunManifest, samples, predictions) -> None:
    manifest.samples = len(samples)
    manifest.malformed_outputs = sum(1 for p in predictions if p.malformed)
    manifest.unmatched_forms = sum(p.unmatched for p in predictions)


def cmd_extract(args, manifest: RunManifest) -> None:
    samples = load_dataset(args.dataset)
    backend = parse_backend_spec(args.model, timeout=args.timeout)
    try:
        predictions = _run_extraction(samples, backend, args.workers)
    finally:
        backend.close()
    manifest.backend = args.model
    _note_extraction(manifest, samples, predictions)
    with _open_out(args) as out:
        write_predictions(zip((s.id for s in samples), predictions), out)


def cmd_baseline(args, manifest: RunManifest) -> None:
    samples = load_dataset(args.dataset)
    config = RuleConfig(uppercase_ratio=args.threshold,
                        long_form_window=args.window)
    runner = functools.partial(baseline_prediction, config=config)
    predictions = _map_samples(runner, [(s.text,) for s in samples], args.workers)
    manifest.samples = len(samples)
    with _open_out(args) as out:
        write_predictions(zip((s.id for s in samples), predictions), out)


def _print_report(report: ScoreReport, as_json: bool,
                  per_sample: ScoreReport | None = None) -> None:
    if as_json:
        record = report.to_dict()
        if per_sample is not None:
            record["per_sample"] = per_sample.to_dict()
        print(json.dumps(record, ensure_ascii=False))
        return
    print(f"{'type':<8}{'tp':>6}{'pred':>7}{'gold':>7}{'p':>9}{'r':>9}{'f1':>9}")
    for name, ts in (("short", report.short), ("long", report.long)):
        print(f"{name:<8}{ts.tp:>6}{ts.predicted:>7}{ts.gold:>7}"
              f"{ts.precision:>9.4f}{ts.recall:>9.4f}{ts.f1:>9.4f}")
    print(f"official {report.official:.4f}")
    if per_sample is not None:
        print(f"per-sample short f1 {per_sample.short.f1:.4f}, "
              f"long f1 {per_sample.long.f1:.4f}, "
              f"official {per_sample.official:.4f}")


def cmd_score(args, manifest: RunManifest) -> None:
    gold = {s.id: s for s in load_dataset(args.gold)}
    predictions = load_predictions(args.pred)
    report = score(predictions, gold)
    per = score_per_sample(predictions, gold) if args.per_sample else None
    manifest.samples = len(gold)
    _print_report(report, args.json, per)


def cmd_e2e(args, manifest: RunManifest) -> None:
    samples = load_dataset(args.dataset)
    backend = parse_backend_spec(args.model, timeout=args.timeout)
    try:
        predictions = _run_extraction(samples, backend, args.workers)
    finally:
        backend.close()
    manifest.backend = args.model
    _note_extraction(manifest, samples, predictions)
    gold = {s.id: s for s in samples}
    pred_map = {s.id: p for s, p in zip(samples, predictions)}
    report = score(pred_map, gold)
    per = score_per_sample(pred_map, gold) if args.per_sample else None
    _print_report(report, args.json, per)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="acrex",
        description="Acronym extraction pipeline: datasets, codecs, "
                    "extraction, baseline, scoring.")
    parser.add_argument("--version", action="version",
                        version=f"acrex {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--manifest", metavar="PATH",
                        help="write the run manifest here instead of stderr")

    emitting = argparse.ArgumentParser(add_help=False)
    emitting.add_argument("--out", metavar="PATH",
                          help="write records here instead of stdout")

    backendish = argparse.ArgumentParser(add_help=False)
    backendish.add_argument("--model", required=True, metavar="SPEC",
                            help="backend: mock:<path>, oracle:<path>, or proc:<command>")
    backendish.add_argument("--workers", type=int, default=1,
                            help="worker pool size for per-sample processing")
    backendish.add_argument("--timeout", type=float, default=60.0,
                            help="per-request timeout for proc backends, seconds")

    p = sub.add_parser("validate", parents=[common],
                       help="check a dataset file against the record schema")
    p.add_argument("dataset")
    p.add_argument("--format", choices=["auto", "text", "tokens"], default="auto")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("stats", parents=[common],
                       help="per-split counts and ratios")
    p.add_argument("datasets", nargs="+")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("mix", parents=[common, emitting],
                       help="build a curriculum training file from sources")
    p.add_argument("datasets", nargs="+",
                   help="source files; the file stem is the source name")
    p.add_argument("--stage", required=True,
                   choices=[STAGE_MULTILINGUAL, STAGE_SINGLE_LANGUAGE])
    p.add_argument("--language", help="source name to keep for single-language")
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_mix)

    p = sub.add_parser("prompts", parents=[common, emitting],
                       help="emit {id, prompt} records for generation")
    p.add_argument("dataset")
    p.set_defaults(func=cmd_prompts)

    p = sub.add_parser("targets", parents=[common, emitting],
                       help="emit {id, target} records for training")
    p.add_argument("dataset")
    p.set_defaults(func=cmd_targets)

    p = sub.add_parser("extract", parents=[common, emitting, backendish],
                       help="generate and locate spans for a dataset")
    p.add_argument("dataset")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("baseline", parents=[common, emitting],
                       help="rule-based predictions for a dataset")
    p.add_argument("dataset")
    p.add_argument("--threshold", type=float, default=0.6,
                   help="uppercase ratio an acronym must exceed")
    p.add_argument("--window", type=int, default=None,
                   help="words scanned back for a long form")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("score", parents=[common],
                       help="boundary exact-match report")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--per-sample", action="store_true", dest="per_sample",
                   help="also report the per-sample macro reading")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("e2e", parents=[common, backendish],
                       help="extract with a backend, then score against the same file")
    p.add_argument("dataset")
    p.add_argument("--per-sample", action="store_true", dest="per_sample")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_e2e)

    return parser


def _configure_logging() -> None:
    level = os.environ.get("ACREX_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _gather_inputs(args) -> list[str]:
    inputs = []
    for attr in ("dataset", "gold", "pred"):
        value = getattr(args, attr, None)
        if value:
            inputs.append(value)
    inputs.extend(getattr(args, "datasets", []) or [])
    return inputs


def _emit_manifest(manifest: RunManifest, path: str | None) -> None:
    line = json.dumps(manifest.to_dict(), ensure_ascii=False)
    if path:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(line + "\n")
    else:
        print(line, file=sys.stderr)


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    manifest = RunManifest(command=args.command, inputs=_gather_inputs(args))
    start = time.perf_counter()
    try:
        args.func(args, manifest)
    except (DatasetError, BackendError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    manifest.wall_time_s = round(time.perf_counter() - start, 6)
    _emit_manifest(manifest, getattr(args, "manifest", None))
    return 0


if __name__ == "__main__":
    sys.exit(main())
