"""Line-protocol serving loop.

One JSON object per line on stdin: {"id": ..., "prompt": ...}.
One JSON object per line on stdout: {"id": ..., "output": ...}, flushed
immediately so a pipelined client never stalls. Requests are answered
strictly in the order they arrive; the loop is single threaded because
generation dominates wall time anyway.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import sys
from typing import Callable, Iterable, TextIO

log = logging.getLogger("acrex_bridge")

# Plain-text control tokens the downstream parser splits on. A model
# whose vocabulary spells them differently is adapted via sentinel_map.
PLAIN_SENTINELS = tuple(f"<extra_id_{i}>" for i in range(1, 6))


class BridgeStartupError(RuntimeError):
    """Model or tokenizer could not be brought up."""


@dataclasses.dataclass
class BridgeConfig:
    """Everything the serving loop needs to know.

    sentinel_map translates model-native sentinel spellings to the plain
    <extra_id_N> forms, so the wire format stays fixed even when the
    underlying vocabulary changes. None means the model already emits
    the plain forms (true for the mT5 family).
    """

    model: str = "google/mt5-base"
    echo: bool = False
    max_new_tokens: int = 64
    num_beams: int = 1
    device: str = "cpu"
    sentinel_map: dict[str, str] | None = None

    def __post_init__(self) -> None:
        if self.max_new_tokens < 1:
            raise ValueError("max_new_tokens must be at least 1")
        if self.num_beams < 1:
            raise ValueError("num_beams must be at least 1")


def apply_sentinel_map(text: str, mapping: dict[str, str]) -> str:
    for raw, plain in mapping.items():
        text = text.replace(raw, plain)
    return text


def normalize_sentinel_spacing(text: str) -> str:
    """Pad every sentinel with single spaces and collapse whitespace runs.

    Decoders split sections on exact " <extra_id_N> " strings; generated
    text often glues sentinels to neighbouring words, so re-pad here.
    """
    for sentinel in PLAIN_SENTINELS:
        text = text.replace(sentinel, f" {sentinel} ")
    return " ".join(text.split())


def load_generator(config: BridgeConfig) -> Callable[[str], str]:
    """Bring up tokenizer + model and return a prompt -> text callable.

    Imports are deferred so echo mode works without the [model] extra.
    """
    try:
        import torch
        from transformers import AutoModelForSeq2SeqLM, AutoTokenizer
    except ImportError as exc:
        raise BridgeStartupError(
            f"model mode needs the [model] extra installed: {exc}"
        ) from exc

    try:
        tokenizer = AutoTokenizer.from_pretrained(config.model)
        model = AutoModelForSeq2SeqLM.from_pretrained(config.model)
        model.to(config.device)
    except Exception as exc:
        raise BridgeStartupError(f"cannot load model {config.model!r}: {exc}") from exc
    model.eval()
    mapping = config.sentinel_map or {}

    def generate(prompt: str) -> str:
        batch = tokenizer(prompt, return_tensors="pt", truncation=True)
        batch = {key: value.to(config.device) for key, value in batch.items()}
        with torch.no_grad():
            tokens = model.generate(
                **batch,
                max_new_tokens=config.max_new_tokens,
                num_beams=config.num_beams,
            )
        # Sentinels are special tokens, so they survive only when special
        # tokens are kept; pad/eos/unk are stripped by hand afterwards.
        text = tokenizer.decode(tokens[0], skip_special_tokens=False)
        for special in (tokenizer.pad_token, tokenizer.eos_token, tokenizer.unk_token):
            if special:
                text = text.replace(special, " ")
        text = apply_sentinel_map(text, mapping)
        return normalize_sentinel_spacing(text)

    return generate


def parse_request(line: str) -> tuple[str, str]:
    record = json.loads(line)
    if not isinstance(record, dict):
        raise ValueError("request is not a JSON object")
    request_id = record.get("id")
    prompt = record.get("prompt")
    if not isinstance(request_id, str) or not request_id:
        raise ValueError("missing or empty field 'id'")
    if not isinstance(prompt, str):
        raise ValueError("missing field 'prompt'")
    return request_id, prompt


def serve(
    config: BridgeConfig,
    stdin: Iterable[str] | None = None,
    stdout: TextIO | None = None,
    generator: Callable[[str], str] | None = None,
) -> int:
    """Answer requests until stdin closes; returns the process exit code.

    The model is loaded before the first read, so a broken model name
    fails the whole process instead of poisoning individual requests.
    A request that fails during generation gets an empty output plus an
    error field; the loop keeps going.
    """
    if stdin is None:
        stdin = sys.stdin
    if stdout is None:
        stdout = sys.stdout
    if generator is None and not config.echo:
        generator = load_generator(config)

    for line in stdin:
        if not line.strip():
            continue
        try:
            request_id, prompt = parse_request(line)
        except (ValueError, json.JSONDecodeError) as exc:
            log.warning("skipping malformed request line: %s", exc)
            continue
        if config.echo:
            reply = {"id": request_id, "output": prompt}
        else:
            try:
                output = generator(prompt)
                if output.count("<extra_id_3>") != 1:
                    # Soft diagnostic only; the client-side parser decides
                    # what to do with an off-template output.
                    log.debug(
                        "output for %s has %d section separators",
                        request_id,
                        output.count("<extra_id_3>"),
                    )
                reply = {"id": request_id, "output": output}
            except Exception as exc:  # noqa: BLE001 - isolate per-request faults
                log.warning("generation failed for %s: %s", request_id, exc)
                reply = {"id": request_id, "output": "", "error": str(exc)}
        stdout.write(json.dumps(reply, ensure_ascii=False) + "\n")
        stdout.flush()
    return 0
