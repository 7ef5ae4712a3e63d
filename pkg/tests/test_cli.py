import json
from pathlib import Path

import pytest

from crisislang.cli import ConfigError, load_config, main
from synthdata import pipeline_corpus_lines, write_config


@pytest.fixture()
def workspace(tmp_path):
    corpus = tmp_path / "corpus.jsonl"
    corpus.write_text("\n".join(pipeline_corpus_lines(seed=0)) + "\n", encoding="utf-8")
    config = tmp_path / "config.json"
    out = tmp_path / "out"
    write_config(config, corpus, out)
    return {"config": config, "corpus": corpus, "out": out, "root": tmp_path}


def run(workspace, *argv):
    return main(["--config", str(workspace["config"]), *argv])


def read_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def read_lines(path):
    return [l for l in Path(path).read_text(encoding="utf-8").splitlines() if l]


class TestConfig:
    def test_missing_required_key(self, workspace):
        doc = read_json(workspace["config"])
        del doc["primary_region"]
        bad = workspace["root"] / "bad.json"
        bad.write_text(json.dumps(doc), encoding="utf-8")
        with pytest.raises(ConfigError, match="primary_region"):
            load_config(bad)

    def test_primary_region_must_exist(self, workspace):
        doc = read_json(workspace["config"])
        doc["primary_region"] = "atlantis"
        bad = workspace["root"] / "bad.json"
        bad.write_text(json.dumps(doc), encoding="utf-8")
        with pytest.raises(ConfigError, match="atlantis"):
            load_config(bad)

    def test_input_output_must_differ(self, workspace):
        doc = read_json(workspace["config"])
        doc["output_dir"] = doc["input"]
        bad = workspace["root"] / "bad.json"
        bad.write_text(json.dumps(doc), encoding="utf-8")
        with pytest.raises(ConfigError, match="distinct"):
            load_config(bad)

    def test_overrides(self, workspace):
        config = load_config(workspace["config"], seed=99, output_dir="elsewhere", threads=4)
        assert config.seed == 99
        assert config.output_dir == Path("elsewhere")
        assert config.threads == 4

    def test_bad_exit_code(self, workspace, capsys):
        assert main(["--config", str(workspace["root"] / "nope.json"), "partition"]) == 1
        assert "error:" in capsys.readouterr().err


class TestPartition:
    def test_files_and_counts(self, workspace):
        assert run(workspace, "partition") == 0
        summary = read_json(workspace["out"] / "partition_summary.json")
        assert summary["counts"]["IR"] == 80
        assert summary["counts"]["OR"] == 120
        assert summary["counts"]["PC_IR"] == 5
        assert summary["counts"]["PC_OR"] == 5
        assert summary["counts"]["unlabeled"] == 60
        assert summary["imbalance_ratio"] == pytest.approx(80 / 200)
        parts = workspace["out"] / "partitions"
        assert len(read_lines(parts / "ir.jsonl")) == 80
        assert len(read_lines(parts / "unlabeled.jsonl")) == 60

    def test_rerun_is_byte_identical(self, workspace):
        run(workspace, "partition")
        first = {
            p.name: p.read_bytes()
            for p in sorted((workspace["out"] / "partitions").iterdir())
        }
        run(workspace, "partition")
        second = {
            p.name: p.read_bytes()
            for p in sorted((workspace["out"] / "partitions").iterdir())
        }
        assert first == second

    def test_three_record_fixture(self, tmp_path):
        lines = [
            json.dumps({"id": "a", "text": "x", "created_at": "2013-04-15T19:30:00Z",
                        "geo": {"lat": 42.35, "lon": -71.08}}),
            json.dumps({"id": "b", "text": "y", "created_at": "2013-04-15T19:30:00Z",
                        "geo": {"lat": 40.75, "lon": -73.99}}),
            json.dumps({"id": "c", "text": "z", "created_at": "2013-04-15T19:30:00Z"}),
        ]
        corpus = tmp_path / "tiny.jsonl"
        corpus.write_text("\n".join(lines) + "\n", encoding="utf-8")
        config = tmp_path / "c.json"
        write_config(config, corpus, tmp_path / "o")
        assert main(["--config", str(config), "partition"]) == 0
        summary = read_json(tmp_path / "o" / "partition_summary.json")
        assert summary["counts"]["IR"] == 1
        assert summary["counts"]["OR"] == 1
        assert summary["counts"]["unlabeled"] == 1
        assert summary["counts"]["PC_IR"] == 0

    def test_empty_input(self, tmp_path):
        corpus = tmp_path / "empty.jsonl"
        corpus.write_text("", encoding="utf-8")
        config = tmp_path / "c.json"
        write_config(config, corpus, tmp_path / "o")
        assert main(["--config", str(config), "partition"]) == 0
        summary = read_json(tmp_path / "o" / "partition_summary.json")
        assert all(v == 0 for v in summary["counts"].values())


class TestDivergence:
    def test_regional_matrix(self, workspace):
        assert run(workspace, "divergence", "--mode", "regional") == 0
        doc = read_json(workspace["out"] / "divergence_regional.json")
        assert doc["labels"] == ["boston", "nyc"]
        assert doc["values"][0][0] == 0.0
        assert doc["values"][0][1] == doc["values"][1][0] > 0.0
        csv_text = (workspace["out"] / "divergence_regional.csv").read_text()
        assert csv_text.splitlines()[0] == ",boston,nyc"

    def test_hourly_matrix(self, tmp_path):
        from synthdata import hourly_shift_tweets

        corpus = tmp_path / "hourly.jsonl"
        corpus.write_text(
            "\n".join(json.dumps(r, sort_keys=True) for r in hourly_shift_tweets(seed=1)) + "\n",
            encoding="utf-8",
        )
        config = tmp_path / "c.json"
        write_config(config, corpus, tmp_path / "o")
        assert main(["--config", str(config), "divergence", "--mode", "hourly"]) == 0
        doc = read_json(tmp_path / "o" / "divergence_hourly.json")
        assert doc["labels"] == [f"{h:02d}:00" for h in range(10, 20)]

    def test_identical_groups_zero_matrix(self, tmp_path):
        # One tweet duplicated at both epicenters: off-diagonal exactly zero.
        lines = [
            json.dumps({"id": "a", "text": "same words", "created_at": "2013-04-15T19:30:00Z",
                        "geo": {"lat": 42.35, "lon": -71.08}}),
            json.dumps({"id": "b", "text": "same words", "created_at": "2013-04-15T19:30:00Z",
                        "geo": {"lat": 40.75, "lon": -73.99}}),
        ]
        corpus = tmp_path / "two.jsonl"
        corpus.write_text("\n".join(lines) + "\n", encoding="utf-8")
        config = tmp_path / "c.json"
        write_config(config, corpus, tmp_path / "o")
        assert main(["--config", str(config), "divergence", "--mode", "regional"]) == 0
        doc = read_json(tmp_path / "o" / "divergence_regional.json")
        assert doc["values"] == [[0.0, 0.0], [0.0, 0.0]]


class TestTrainClassify:
    def test_train_writes_model_and_summary(self, workspace):
        run(workspace, "partition")
        assert run(workspace, "train") == 0
        model_doc = read_json(workspace["out"] / "model.json")
        assert model_doc["kind"] == "nb"
        assert model_doc["feature_classes"] == ["UNIGRAM", "BIGRAM"]
        summary = read_json(workspace["out"] / "train_summary.json")
        assert summary["balanced"] is True
        assert summary["class_counts"]["IR"] == summary["class_counts"]["OR"] == 80

    def test_no_balance_flag(self, workspace):
        run(workspace, "partition")
        assert run(workspace, "train", "--no-balance") == 0
        summary = read_json(workspace["out"] / "train_summary.json")
        assert summary["balanced"] is False
        assert summary["class_counts"]["OR"] == 120

    def test_train_rerun_identical_model(self, workspace):
        run(workspace, "partition")
        run(workspace, "train")
        first = (workspace["out"] / "model.json").read_bytes()
        run(workspace, "train")
        assert (workspace["out"] / "model.json").read_bytes() == first

    def test_classify_unlabeled(self, workspace):
        run(workspace, "partition")
        run(workspace, "train")
        assert run(workspace, "classify", "--model", str(workspace["out"] / "model.json")) == 0
        summary = read_json(workspace["out"] / "classify_summary.json")
        assert summary["total"] == 60
        assert summary["classified"] == 60
        # Markers split the unlabeled pool evenly; separability recovers them.
        assert summary["classified_ir"] == 30
        rows = [json.loads(l) for l in read_lines(workspace["out"] / "classified.jsonl")]
        assert all("label" in r and "score" in r for r in rows)

    def test_classify_empty_input(self, workspace, tmp_path):
        run(workspace, "partition")
        run(workspace, "train")
        empty = tmp_path / "none.jsonl"
        empty.write_text("", encoding="utf-8")
        assert run(
            workspace, "classify", "--model", str(workspace["out"] / "model.json"),
            "--input", str(empty),
        ) == 0
        summary = read_json(workspace["out"] / "classify_summary.json")
        assert summary["total"] == 0 and summary["classified_ir"] == 0
        assert read_lines(workspace["out"] / "classified.jsonl") == []

    def test_classify_layer_mismatch_is_fatal(self, workspace, capsys):
        # Model trained on a class whose layer the input cannot supply.
        doc = read_json(workspace["config"])
        doc["feature_classes"] = ["PTB_POS"]
        workspace["config"].write_text(json.dumps(doc), encoding="utf-8")
        run(workspace, "partition")
        from crisislang.features import FeatureClass, FeatureId
        from crisislang.model import save_model, train_naive_bayes

        fid = FeatureId(FeatureClass.PTB_POS, "NN")
        model = train_naive_bayes([({fid: 1}, "IR"), ({}, "OR")])
        model_path = workspace["root"] / "ptb_model.json"
        save_model(model_path, model, feature_classes=[FeatureClass.PTB_POS])
        assert run(workspace, "classify", "--model", str(model_path)) == 1
        assert "PTB_POS" in capsys.readouterr().err

    def test_partition_warns_on_malformed_lines(self, workspace):
        with open(workspace["corpus"], "a", encoding="utf-8") as handle:
            handle.write("this is not json\n")
        assert run(workspace, "partition") == 0
        summary = read_json(workspace["out"] / "partition_summary.json")
        assert summary["counts"]["skipped"] == 1
        assert summary["warnings"]

    def test_classify_self_consistency(self, workspace):
        # Re-classifying the IR training tweets recovers them all (separable).
        run(workspace, "partition")
        run(workspace, "train")
        ir_file = workspace["out"] / "partitions" / "ir.jsonl"
        assert run(
            workspace, "classify", "--model", str(workspace["out"] / "model.json"),
            "--input", str(ir_file),
        ) == 0
        summary = read_json(workspace["out"] / "classify_summary.json")
        assert summary["classified_ir"] == summary["total"] == 80

    def test_train_logreg_kind(self, workspace):
        doc = read_json(workspace["config"])
        doc["model"] = {"kind": "logreg"}
        doc["feature_classes"] = ["UNIGRAM"]
        workspace["config"].write_text(json.dumps(doc), encoding="utf-8")
        run(workspace, "partition")
        assert run(workspace, "train") == 0
        model_doc = read_json(workspace["out"] / "model.json")
        assert model_doc["kind"] == "logreg"


class TestEvaluate:
    def test_single_mode_fifteen_readings(self, workspace):
        run(workspace, "partition")
        assert run(workspace, "evaluate", "--mode", "single") == 0
        doc = read_json(workspace["out"] / "cv_report.json")
        assert len(doc["readings"]) == 15
        csv_lines = read_lines(workspace["out"] / "cv_report.csv")
        assert len(csv_lines) == 17

    def test_combos_mode_word_only(self, workspace):
        doc = json.loads(workspace["config"].read_text())
        doc["fallback_tags"] = False
        workspace["config"].write_text(json.dumps(doc), encoding="utf-8")
        run(workspace, "partition")
        assert run(workspace, "evaluate", "--mode", "combos") == 0
        combos = read_json(workspace["out"] / "combinations.json")
        assert len(combos["entries"]) == 3
        assert "ARK_POS" in combos["excluded_classes"]

    def test_combos_mode_with_fallback_tags(self, workspace):
        # Fallback ARK tags make UNIGRAM/BIGRAM/ARK_POS/CRISIS_SENSITIVE
        # extractable: 2^4 - 1 = 15 combinations.
        run(workspace, "partition")
        assert run(workspace, "evaluate", "--mode", "combos") == 0
        combos = read_json(workspace["out"] / "combinations.json")
        assert len(combos["entries"]) == 15
        assert set(combos["excluded_classes"]) == {"PTB_POS", "SHALLOW_PARSE"}

    def test_imbalance_mode(self, workspace):
        doc = json.loads(workspace["config"].read_text())
        doc["imbalance_ratios"] = [0.2, 0.5, 0.8]
        workspace["config"].write_text(json.dumps(doc), encoding="utf-8")
        run(workspace, "partition")
        assert run(workspace, "evaluate", "--mode", "imbalance") == 0
        sweep = read_json(workspace["out"] / "imbalance.json")
        assert len(sweep["auc_per_ratio"]) == 3
        assert all(a >= 0.9 for a in sweep["auc_per_ratio"])


class TestTopFeatures:
    def test_marker_ranks_first(self, workspace):
        run(workspace, "partition")
        assert run(workspace, "top-features", "--k", "3") == 0
        lines = read_lines(workspace["out"] / "top_features.csv")
        assert lines[0] == "class,rank,feature,weight"
        first_unigram = next(l for l in lines[1:] if l.startswith("UNIGRAM,1,"))
        assert '"qz1"' in first_unigram


class TestCloud:
    def test_clouds_written(self, workspace):
        run(workspace, "partition")
        run(workspace, "train")
        assert run(workspace, "cloud", "--model", str(workspace["out"] / "model.json"), "--k", "10") == 0
        a = read_json(workspace["out"] / "cloud_geotagged.json")
        b = read_json(workspace["out"] / "cloud_combined.json")
        assert len(a["bigrams"]) == 10 and len(b["bigrams"]) == 10
        summary = read_json(workspace["out"] / "cloud_summary.json")
        assert summary["model_additions"] == 30

    def test_no_additions_identical_files(self, workspace, tmp_path):
        run(workspace, "partition")
        run(workspace, "train")
        # Empty the unlabeled partition: no model additions, identical clouds.
        (workspace["out"] / "partitions" / "unlabeled.jsonl").write_text("", encoding="utf-8")
        run(workspace, "cloud", "--model", str(workspace["out"] / "model.json"), "--k", "5")
        a = (workspace["out"] / "cloud_geotagged.json").read_bytes()
        b = (workspace["out"] / "cloud_combined.json").read_bytes()
        assert a.replace(b"geotagged", b"") == b.replace(b"combined", b"") or a == b

    def test_novel_bigram_only_in_combined(self, workspace):
        run(workspace, "partition")
        run(workspace, "train")
        # Plant an unlabeled tweet with a novel dominant bigram and marker qz1.
        novel = {
            "id": "novel1",
            "text": "qz1 hoboken flooding hoboken flooding hoboken flooding",
            "created_at": "2013-04-15T19:30:00Z",
        }
        unlabeled = workspace["out"] / "partitions" / "unlabeled.jsonl"
        unlabeled.write_text(json.dumps(novel, sort_keys=True) + "\n", encoding="utf-8")
        run(workspace, "cloud", "--model", str(workspace["out"] / "model.json"), "--k", "10")
        a = read_json(workspace["out"] / "cloud_geotagged.json")
        b = read_json(workspace["out"] / "cloud_combined.json")
        a_bigrams = {e["bigram"] for e in a["bigrams"]}
        b_bigrams = {e["bigram"] for e in b["bigrams"]}
        assert "hoboken flooding" not in a_bigrams
        assert "hoboken flooding" in b_bigrams


class TestTagAndVectors:
    def test_tag_fills_missing_ark(self, workspace):
        assert run(workspace, "tag") == 0
        summary = read_json(workspace["out"] / "tag_summary.json")
        assert summary["newly_tagged"] == summary["total"] > 0
        rows = [json.loads(l) for l in read_lines(workspace["out"] / "tagged.jsonl")]
        assert all("ark_tags" in r for r in rows)
        first = rows[0]
        assert len(first["ark_tags"]) == len(first["text"].split())

    def test_tag_preserves_existing_tags(self, workspace, tmp_path):
        line = json.dumps({"id": "x", "text": "in boston", "created_at": "2013-04-15T19:30:00Z",
                           "ark_tags": ["P", "^"]})
        src = tmp_path / "pre.jsonl"
        src.write_text(line + "\n", encoding="utf-8")
        assert run(workspace, "tag", "--input", str(src)) == 0
        rows = [json.loads(l) for l in read_lines(workspace["out"] / "tagged.jsonl")]
        assert rows[0]["ark_tags"] == ["P", "^"]

    def test_vectors_emitted(self, workspace):
        assert run(workspace, "vectors") == 0
        rows = [json.loads(l) for l in read_lines(workspace["out"] / "vectors.jsonl")]
        assert rows and all(set(r) == {"id", "features"} for r in rows)
        some = rows[0]["features"]
        assert any(key.startswith("UNIGRAM:") for key in some)
        summary = read_json(workspace["out"] / "vectors_summary.json")
        assert summary["class_coverage"]["UNIGRAM"] == summary["total"]


class TestEndToEndDeterminism:
    def _run_pipeline(self, config, out):
        for argv in (
            ["partition"],
            ["train"],
            ["evaluate", "--mode", "single"],
            ["classify", "--model", str(out / "model.json")],
        ):
            assert main(["--config", str(config), *argv]) == 0
        return {
            str(p.relative_to(out)): p.read_bytes() for p in out.rglob("*") if p.is_file()
        }

    def test_identical_outputs_on_rerun(self, tmp_path):
        corpus = tmp_path / "corpus.jsonl"
        corpus.write_text("\n".join(pipeline_corpus_lines(seed=5)) + "\n", encoding="utf-8")
        out = tmp_path / "out"
        config = tmp_path / "config.json"
        write_config(config, corpus, out)
        first = self._run_pipeline(config, out)
        second = self._run_pipeline(config, out)
        assert first.keys() == second.keys()
        for name in first:
            assert first[name] == second[name], name
