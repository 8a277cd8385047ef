"""Inline subprocess peers for wire-protocol tests.

Each constant is a small program run as ``python -c <code> [args]``; extra
argv entries land in sys.argv[1:]. Keeping them inline avoids fixture files
and makes each peer's behavior visible next to the test using it.
"""

import sys

from acrex.backends import GenRequest, ProcBackend

ECHO = r"""
import json, sys
for line in sys.stdin:
    if not line.strip():
        continue
    r = json.loads(line)
    sys.stdout.write(json.dumps({"id": r["id"], "output": r["prompt"]},
                                ensure_ascii=False) + "\n")
    sys.stdout.flush()
"""

# answers only after reading argv[1] requests, in reverse order
REVERSED_BATCH = r"""
import json, sys
k = int(sys.argv[1])
rows = [json.loads(sys.stdin.readline()) for _ in range(k)]
for r in reversed(rows):
    sys.stdout.write(json.dumps({"id": r["id"], "output": r["prompt"]},
                                ensure_ascii=False) + "\n")
sys.stdout.flush()
"""

# echoes in shuffled chunks of argv[1]; batch sizes must divide evenly or
# the tail stays buffered until EOF
SHUFFLED_CHUNKS = r"""
import json, random, sys
chunk = int(sys.argv[1])
rng = random.Random(12345)
rows = []
def flush_rows():
    rng.shuffle(rows)
    for r in rows:
        sys.stdout.write(json.dumps({"id": r["id"], "output": r["prompt"]},
                                    ensure_ascii=False) + "\n")
    sys.stdout.flush()
    rows.clear()
for line in sys.stdin:
    if not line.strip():
        continue
    rows.append(json.loads(line))
    if len(rows) == chunk:
        flush_rows()
flush_rows()
"""

DEAD = r"""
import sys
sys.stdin.readline()
sys.exit(3)
"""

SILENT = r"""
import sys
for _ in sys.stdin:
    pass
"""

MALFORMED = r"""
import sys
sys.stdin.readline()
sys.stdout.write("this is not a frame\n")
sys.stdout.flush()
for _ in sys.stdin:
    pass
"""

WRONG_ID = r"""
import json, sys
r = json.loads(sys.stdin.readline())
sys.stdout.write(json.dumps({"id": "imposter-" + r["id"], "output": ""}) + "\n")
sys.stdout.flush()
for _ in sys.stdin:
    pass
"""

BLANK_THEN_ECHO = r"""
import json, sys
sys.stdout.write("\n")
sys.stdout.flush()
for line in sys.stdin:
    if not line.strip():
        continue
    r = json.loads(line)
    sys.stdout.write(json.dumps({"id": r["id"], "output": r["prompt"]},
                                ensure_ascii=False) + "\n")
    sys.stdout.flush()
"""


def peer_command(code: str, *args: str) -> list[str]:
    return [sys.executable, "-c", code, *args]


def run_conformance(command, n: int = 1000, timeout: float = 60.0) -> None:
    """Drive a peer with n requests; ids echoed, matching order-independent."""
    requests = [GenRequest(f"req-{i:04d}", f"payload {i} λψж {'x' * (i % 17)}")
                for i in range(n)]
    with ProcBackend(command, timeout=timeout) as backend:
        responses = backend.generate(requests)
    assert [r.id for r in responses] == [q.id for q in requests]
    for request, response in zip(requests, responses):
        assert response.output == request.prompt
