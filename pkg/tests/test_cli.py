import json
import shlex
import subprocess
import sys

import pytest

import peers
from acrex import cli

GOLD_ROWS = [
    {"id": "a", "text": "We use a conditional random field (CRF) layer.",
     "short": [[35, 38]], "long": [[9, 33]]},
    {"id": "b", "text": "Không có gì here.", "short": [], "long": []},
]


def write_rows(path, rows):
    path.write_text("".join(json.dumps(r, ensure_ascii=False) + "\n"
                            for r in rows), encoding="utf-8")
    return path


@pytest.fixture
def gold(tmp_path):
    return write_rows(tmp_path / "gold.jsonl", GOLD_ROWS)


def run(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def manifest_of(err):
    return json.loads(err.strip().splitlines()[-1])


class TestValidate:
    def test_ok_and_manifest(self, gold, capsys):
        code, out, err = run(capsys, ["validate", str(gold)])
        assert code == 0
        assert out.startswith(f"OK {gold}: 2 samples")
        manifest = manifest_of(err)
        assert manifest["command"] == "validate"
        assert manifest["samples"] == 2
        assert manifest["inputs"] == [str(gold)]
        assert manifest["version"]

    def test_json_output(self, gold, capsys):
        code, out, _ = run(capsys, ["validate", str(gold), "--json"])
        assert code == 0
        assert json.loads(out) == {"path": str(gold), "samples": 2,
                                   "short_spans": 1, "long_spans": 1}

    def test_missing_file(self, tmp_path, capsys):
        code, _, err = run(capsys, ["validate", str(tmp_path / "nope.jsonl")])
        assert code == 1
        assert err.startswith("error:")

    def test_malformed_record_reports_index(self, tmp_path, capsys):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"id": "a", "text": "ab", "short": [[5, 4]], "long": []}\n',
                        encoding="utf-8")
        code, _, err = run(capsys, ["validate", str(path)])
        assert code == 1
        assert "record 0" in err

    def test_manifest_to_file(self, gold, tmp_path, capsys):
        target = tmp_path / "manifest.json"
        code, _, err = run(capsys, ["validate", str(gold),
                                    "--manifest", str(target)])
        assert code == 0
        assert err == ""
        assert json.loads(target.read_text())["command"] == "validate"


class TestStats:
    def test_json_ratios(self, tmp_path, capsys):
        write_rows(tmp_path / "train.jsonl",
                   [{"id": f"t{i}", "text": "x", "short": [], "long": []}
                    for i in range(3)])
        write_rows(tmp_path / "dev.jsonl",
                   [{"id": "d0", "text": "x", "short": [], "long": []}])
        code, out, _ = run(capsys, ["stats", str(tmp_path / "train.jsonl"),
                                    str(tmp_path / "dev.jsonl"), "--json"])
        assert code == 0
        got = json.loads(out)
        assert [g["split"] for g in got] == ["train", "dev"]
        assert [g["ratio"] for g in got] == [0.75, 0.25]

    def test_human_table(self, gold, capsys):
        code, out, _ = run(capsys, ["stats", str(gold)])
        assert code == 0
        assert "100.00%" in out and "gold" in out

    def test_duplicate_split_name(self, gold, capsys):
        code, _, err = run(capsys, ["stats", str(gold), str(gold)])
        assert code == 1
        assert "duplicate split name" in err


class TestMix:
    def sources(self, tmp_path):
        vi = write_rows(tmp_path / "vi.jsonl",
                        [{"id": f"v{i}", "text": "x", "short": [], "long": []}
                         for i in range(4)])
        fa = write_rows(tmp_path / "fa.jsonl",
                        [{"id": f"f{i}", "text": "x", "short": [], "long": []}
                         for i in range(3)])
        return vi, fa

    def test_multilingual_pools_and_prefixes(self, tmp_path, capsys):
        vi, fa = self.sources(tmp_path)
        out_path = tmp_path / "mixed.jsonl"
        code, _, _ = run(capsys, ["mix", str(vi), str(fa), "--stage",
                                  "multilingual", "--seed", "7",
                                  "--out", str(out_path)])
        assert code == 0
        ids = [json.loads(l)["id"] for l in out_path.read_text().splitlines()]
        assert len(ids) == 7
        assert {i.split(":")[0] for i in ids} == {"vi", "fa"}

    def test_seed_reproducibility(self, tmp_path, capsys):
        vi, fa = self.sources(tmp_path)
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        for out_path in (a, b):
            code, _, _ = run(capsys, ["mix", str(vi), str(fa), "--stage",
                                      "multilingual", "--seed", "7",
                                      "--out", str(out_path)])
            assert code == 0
        assert a.read_bytes() == b.read_bytes()

    def test_single_language_keeps_one_source(self, tmp_path, capsys):
        vi, fa = self.sources(tmp_path)
        code, out, _ = run(capsys, ["mix", str(vi), str(fa), "--stage",
                                    "single-language", "--language", "fa",
                                    "--seed", "1"])
        assert code == 0
        ids = [json.loads(l)["id"] for l in out.splitlines()]
        assert len(ids) == 3 and all(i.startswith("fa:") for i in ids)

    def test_unknown_language_fails(self, tmp_path, capsys):
        vi, fa = self.sources(tmp_path)
        code, _, err = run(capsys, ["mix", str(vi), str(fa), "--stage",
                                    "single-language", "--language", "de",
                                    "--seed", "1"])
        assert code == 1
        assert "available: vi, fa" in err


class TestPromptsTargets:
    def test_prompts(self, gold, capsys):
        code, out, _ = run(capsys, ["prompts", str(gold)])
        assert code == 0
        rows = [json.loads(l) for l in out.splitlines()]
        assert rows[0]["prompt"].endswith("The acronyms and their meanings are:")
        assert rows[1]["prompt"].startswith("Không có gì here.")

    def test_targets(self, gold, capsys):
        code, out, _ = run(capsys, ["targets", str(gold)])
        assert code == 0
        rows = [json.loads(l) for l in out.splitlines()]
        assert rows[0]["target"] == "CRF <extra_id_3> conditional random field"
        assert rows[1]["target"] == "<extra_id_4> <extra_id_3> <extra_id_5>"


class TestExtract:
    def test_oracle_backend_reproduces_gold(self, gold, tmp_path, capsys):
        pred = tmp_path / "pred.jsonl"
        code, _, err = run(capsys, ["extract", "--model", f"oracle:{gold}",
                                    str(gold), "--out", str(pred)])
        assert code == 0
        rows = [json.loads(l) for l in pred.read_text().splitlines()]
        assert rows[0] == {"id": "a", "short": [[35, 38]], "long": [[9, 33]]}
        manifest = manifest_of(err)
        assert manifest["backend"] == f"oracle:{gold}"
        assert manifest["malformed_outputs"] == 0
        assert manifest["unmatched_forms"] == 0

    def test_workers_preserve_input_order(self, gold, tmp_path, capsys):
        serial = tmp_path / "serial.jsonl"
        pooled = tmp_path / "pooled.jsonl"
        for out_path, workers in ((serial, "1"), (pooled, "4")):
            code, _, _ = run(capsys, ["extract", "--model", f"oracle:{gold}",
                                      str(gold), "--workers", workers,
                                      "--out", str(out_path)])
            assert code == 0
        assert serial.read_bytes() == pooled.read_bytes()

    def test_proc_backend_echo_counts_malformed(self, gold, tmp_path, capsys):
        spec = "proc:" + shlex.join([sys.executable, "-c", peers.ECHO])
        pred = tmp_path / "pred.jsonl"
        code, _, err = run(capsys, ["extract", "--model", spec, str(gold),
                                    "--out", str(pred)])
        assert code == 0
        # echoed prompts contain no section separator: all malformed, empty
        rows = [json.loads(l) for l in pred.read_text().splitlines()]
        assert all(r["short"] == [] and r["long"] == [] for r in rows)
        assert manifest_of(err)["malformed_outputs"] == 2

    def test_unknown_backend_scheme(self, gold, capsys):
        code, _, err = run(capsys, ["extract", "--model", "grpc:x", str(gold)])
        assert code == 1
        assert "unknown backend scheme" in err


class TestBaselineCommand:
    def test_predictions_emitted(self, gold, capsys):
        code, out, _ = run(capsys, ["baseline", str(gold)])
        assert code == 0
        rows = [json.loads(l) for l in out.splitlines()]
        assert rows[0] == {"id": "a", "short": [[35, 38]], "long": [[9, 33]]}
        assert rows[1] == {"id": "b", "short": [], "long": []}

    def test_threshold_flag(self, tmp_path, capsys):
        path = write_rows(tmp_path / "one.jsonl",
                          [{"id": "x", "text": "see ABc here",
                            "short": [], "long": []}])
        code, out, _ = run(capsys, ["baseline", str(path), "--threshold", "0.9"])
        assert code == 0
        assert json.loads(out.splitlines()[0])["short"] == []


class TestScore:
    def test_gold_against_itself(self, gold, capsys):
        code, out, _ = run(capsys, ["score", "--gold", str(gold),
                                    "--pred", str(gold), "--json"])
        assert code == 0
        assert json.loads(out)["official"] == 1.0

    def test_human_table(self, gold, capsys):
        code, out, _ = run(capsys, ["score", "--gold", str(gold),
                                    "--pred", str(gold)])
        assert code == 0
        assert "official 1.0000" in out

    def test_per_sample_block(self, gold, capsys):
        code, out, _ = run(capsys, ["score", "--gold", str(gold),
                                    "--pred", str(gold), "--per-sample",
                                    "--json"])
        assert code == 0
        got = json.loads(out)
        assert got["per_sample"]["official"] == 1.0

    def test_misaligned_pred_file(self, gold, tmp_path, capsys):
        pred = write_rows(tmp_path / "pred.jsonl",
                          [{"id": "ghost", "short": [], "long": []}])
        code, _, err = run(capsys, ["score", "--gold", str(gold),
                                    "--pred", str(pred)])
        assert code == 1
        assert "ghost" in err


class TestE2E:
    def test_oracle_round_trip_scores_one(self, gold, capsys):
        code, out, err = run(capsys, ["e2e", "--model", f"oracle:{gold}",
                                      str(gold), "--json"])
        assert code == 0
        assert json.loads(out)["official"] == 1.0
        manifest = manifest_of(err)
        assert manifest["samples"] == 2
        assert manifest["malformed_outputs"] == 0


class TestArgumentErrors:
    def test_unknown_subcommand_exits_two(self, capsys):
        with pytest.raises(SystemExit) as err:
            cli.main(["frobnicate"])
        assert err.value.code == 2

    def test_missing_required_flag_exits_two(self, gold, capsys):
        with pytest.raises(SystemExit) as err:
            cli.main(["extract", str(gold)])
        assert err.value.code == 2

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as err:
            cli.main(["--version"])
        assert err.value.code == 0


def test_console_script_is_wired(gold):
    got = subprocess.run(["acrex", "validate", str(gold)],
                         capture_output=True, text=True)
    assert got.returncode == 0
    assert got.stdout.startswith("OK")
