"""Generation backends: canned tables, gold-replay oracle, subprocess client.

Wire protocol, shared with any "proc:" peer: one JSON object per line over
the child's stdin/stdout, {"id": ..., "prompt": ...} in and {"id": ...,
"output": ...} out, UTF-8, flushed per line. Responses are matched by id,
not by arrival order.
"""

from __future__ import annotations

import json
import logging
import queue
import shlex
import subprocess
import threading
from dataclasses import dataclass
from typing import Sequence

from .corpus import load_dataset
from .template import encode_target

log = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 60.0


class BackendError(RuntimeError):
    """Backend could not produce a response for some request."""


@dataclass(frozen=True)
class GenRequest:
    id: str
    prompt: str


@dataclass(frozen=True)
class GenResponse:
    id: str
    output: str


def _check_batch(requests: Sequence[GenRequest]) -> None:
    ids = [r.id for r in requests]
    if len(set(ids)) != len(ids):
        raise BackendError("duplicate request ids in batch")


class MockBackend:
    """Answers each request from a fixed id -> output table."""

    def __init__(self, table: dict[str, str]):
        self.table = dict(table)

    def generate(self, requests: Sequence[GenRequest]) -> list[GenResponse]:
        _check_batch(requests)
        responses = []
        for request in requests:
            if request.id not in self.table:
                raise BackendError(f"no canned output for id {request.id}")
            responses.append(GenResponse(request.id, self.table[request.id]))
        return responses

    def close(self) -> None:
        pass


def mock_from_gold(dataset) -> MockBackend:
    """Oracle backend: replies to each sample id with its encoded gold target."""
    return MockBackend({sample.id: encode_target(sample) for sample in dataset})


def load_mock_table(path) -> MockBackend:
    """Read a canned table file of {"id", "output"} records, one per line."""
    table: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for index, line in enumerate(handle):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                table[record["id"]] = record["output"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise BackendError(f"mock table record {index}: {exc}") from None
    return MockBackend(table)


class ProcBackend:
    """Client for a child process speaking the line protocol.

    Requests are streamed from a writer thread while responses are read as
    they arrive, so pipe buffering never deadlocks against a well-behaved
    peer no matter how large the batch is. One conversation at a time per
    handle; open several handles for parallelism.
    """

    def __init__(self, command: str | Sequence[str],
                 timeout: float = DEFAULT_TIMEOUT):
        argv = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout
        self.proc = subprocess.Popen(
            argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
            text=True, encoding="utf-8")
        self._lines: queue.Queue[str | None] = queue.Queue()
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()

    def _read_loop(self) -> None:
        for line in self.proc.stdout:
            self._lines.put(line)
        self._lines.put(None)

    def generate(self, requests: Sequence[GenRequest]) -> list[GenResponse]:
        _check_batch(requests)
        pending = {r.id for r in requests}
        outputs: dict[str, str] = {}

        def write_all() -> None:
            try:
                for request in requests:
                    frame = json.dumps({"id": request.id, "prompt": request.prompt},
                                       ensure_ascii=False)
                    self.proc.stdin.write(frame + "\n")
                    self.proc.stdin.flush()
            except (BrokenPipeError, OSError):
                pass  # the reader side reports the death with request context

        writer = threading.Thread(target=write_all, daemon=True)
        writer.start()
        try:
            while pending:
                blocked_on = next(r.id for r in requests if r.id in pending)
                try:
                    line = self._lines.get(timeout=self.timeout)
                except queue.Empty:
                    raise BackendError(
                        f"timeout after {self.timeout}s waiting for response "
                        f"to request {blocked_on}") from None
                if line is None:
                    raise BackendError(
                        f"backend process exited before answering request "
                        f"{blocked_on}")
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                    response_id = record["id"]
                    output = record["output"]
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    raise BackendError(
                        f"malformed response frame while waiting for request "
                        f"{blocked_on}: {exc}") from None
                if response_id not in pending:
                    raise BackendError(
                        f"unexpected response id {response_id!r} while waiting "
                        f"for request {blocked_on}")
                outputs[response_id] = output
                pending.discard(response_id)
        finally:
            writer.join(timeout=5.0)
        return [GenResponse(r.id, outputs[r.id]) for r in requests]

    def close(self) -> None:
        if self.proc.stdin and not self.proc.stdin.closed:
            try:
                self.proc.stdin.close()
            except OSError:
                pass
        try:
            self.proc.wait(timeout=5.0)
        except subprocess.TimeoutExpired:
            log.warning("backend process did not exit, killing it")
            self.proc.kill()
            self.proc.wait()
        self._reader.join(timeout=5.0)

    def __enter__(self) -> "ProcBackend":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def parse_backend_spec(spec: str, timeout: float = DEFAULT_TIMEOUT):
    """Build a backend from a CLI spec string.

    mock:<path>    canned {"id", "output"} table file
    oracle:<path>  gold-replay over a dataset file
    proc:<command> subprocess speaking the line protocol
    """
    scheme, _, rest = spec.partition(":")
    if not rest:
        raise ValueError(f"backend spec {spec!r} has no argument")
    if scheme == "mock":
        return load_mock_table(rest)
    if scheme == "oracle":
        return mock_from_gold(load_dataset(rest))
    if scheme == "proc":
        return ProcBackend(rest, timeout=timeout)
    raise ValueError(
        f"unknown backend scheme {scheme!r}; use mock:, oracle:, or proc:")


def generate(requests: Sequence[GenRequest], backend) -> list[GenResponse]:
    """Run one batch; exactly one response per request, in request order."""
    responses = backend.generate(requests)
    if len(responses) != len(requests):
        raise BackendError(
            f"backend returned {len(responses)} responses for "
            f"{len(requests)} requests")
    return responses
