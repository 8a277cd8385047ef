"""Optional two-stage fine-tuning for the served model.

Not part of the serving contract and never touched by tests; needs the
[model] extra and real GPU time. Stage files are line-delimited JSON
records {"id": ..., "prompt": ...} and {"id": ..., "target": ...}
produced by the dataset tooling, joined here by id.

Schedule: stage 1 trains on the full multilingual pool at lr 1e-4, then
stage 2 continues on the target-language split at lr 1e-5, 8 epochs
each by default.

    python -m acrex_bridge.finetune \
        --model google/mt5-base \
        --stage mixed_prompts.jsonl mixed_targets.jsonl \
        --stage en_prompts.jsonl en_targets.jsonl \
        --out ./checkpoints
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

STAGE_LEARNING_RATES = (1e-4, 1e-5)


def read_column(path: str, field: str) -> dict[str, str]:
    table: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            record = json.loads(line)
            if record["id"] in table:
                raise ValueError(f"{path}:{number}: duplicate id {record['id']!r}")
            table[record["id"]] = record[field]
    return table


def join_stage(prompts_path: str, targets_path: str) -> list[tuple[str, str]]:
    prompts = read_column(prompts_path, "prompt")
    targets = read_column(targets_path, "target")
    missing = sorted(set(prompts) ^ set(targets))
    if missing:
        raise ValueError(f"ids not present on both sides: {missing[:5]}")
    return [(prompts[key], targets[key]) for key in sorted(prompts)]


def run_stage(model, tokenizer, pairs, lr, epochs, batch_size, device, max_length):
    import torch
    from torch.utils.data import DataLoader

    def collate(batch):
        sources, labels = zip(*batch)
        encoded = tokenizer(
            list(sources),
            text_target=list(labels),
            padding=True,
            truncation=True,
            max_length=max_length,
            return_tensors="pt",
        )
        # Padding must not contribute to the loss.
        encoded["labels"][encoded["labels"] == tokenizer.pad_token_id] = -100
        return {key: value.to(device) for key, value in encoded.items()}

    loader = DataLoader(pairs, batch_size=batch_size, shuffle=True, collate_fn=collate)
    optimizer = torch.optim.AdamW(model.parameters(), lr=lr)
    model.train()
    for epoch in range(1, epochs + 1):
        total = 0.0
        for batch in loader:
            loss = model(**batch).loss
            loss.backward()
            optimizer.step()
            optimizer.zero_grad()
            total += loss.item()
        print(f"lr={lr:g} epoch {epoch}/{epochs} loss {total / max(len(loader), 1):.4f}")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="acrex_bridge.finetune",
        description="Two-stage curriculum fine-tuning over prompt/target files.",
    )
    parser.add_argument("--model", default="google/mt5-base")
    parser.add_argument(
        "--stage",
        nargs=2,
        action="append",
        required=True,
        metavar=("PROMPTS", "TARGETS"),
        help="one prompts file plus one targets file; repeat per stage",
    )
    parser.add_argument("--out", required=True, help="checkpoint directory")
    parser.add_argument("--epochs", type=int, default=8)
    parser.add_argument("--batch-size", type=int, default=4)
    parser.add_argument("--max-length", type=int, default=256)
    parser.add_argument("--device", default="cpu")
    args = parser.parse_args(argv)

    if len(args.stage) > len(STAGE_LEARNING_RATES):
        parser.error(f"at most {len(STAGE_LEARNING_RATES)} stages supported")

    try:
        from transformers import AutoModelForSeq2SeqLM, AutoTokenizer
    except ImportError as exc:
        print(f"error: fine-tuning needs the [model] extra: {exc}", file=sys.stderr)
        return 1

    tokenizer = AutoTokenizer.from_pretrained(args.model)
    model = AutoModelForSeq2SeqLM.from_pretrained(args.model).to(args.device)

    out_dir = Path(args.out)
    for index, (prompts_path, targets_path) in enumerate(args.stage):
        pairs = join_stage(prompts_path, targets_path)
        lr = STAGE_LEARNING_RATES[index]
        print(f"stage {index + 1}: {len(pairs)} pairs from {prompts_path}")
        run_stage(
            model,
            tokenizer,
            pairs,
            lr,
            args.epochs,
            args.batch_size,
            args.device,
            args.max_length,
        )
        stage_dir = out_dir / f"stage{index + 1}"
        model.save_pretrained(stage_dir)
        tokenizer.save_pretrained(stage_dir)
        print(f"saved {stage_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
