import json

import jsonschema

from nlstplan import corpus as C
from nlstplan.cli import evaluate, main
from nlstplan.corpus import CorpusEntry, QueryType, read_corpus
from nlstplan.data_paths import schema_path


class TestCommands:
    def test_load_json(self, capsys):
        assert main(["load", "--db", "minicity", "--json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["name"] == "minicity"
        assert any(r["name"] == "pois" and r["tuples"] == 10_000 for r in doc["relations"])

    def test_query_json(self, capsys):
        code = main(["query", "--db", "minicity", "--json",
                     "--nlq", "Which pois are within 500 m of amber falcon cafe?"])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["trace"]["query_type"] == "Range"
        assert doc["timing"]["baseline_ms"] >= 0

    def test_query_error_exit_code(self, capsys):
        code = main(["query", "--db", "minicity", "--json", "--nlq", "zzz qq"])
        assert code == 1
        doc = json.loads(capsys.readouterr().out)
        assert "error" in doc

    def test_corpus_gen_roundtrip(self, tmp_path, capsys):
        out = tmp_path / "corpus.jsonl"
        assert main(["corpus", "gen", "--db", "minicity", "-n", "14",
                     "--seed", "5", "--out", str(out)]) == 0
        entries = read_corpus(out)
        assert len(entries) == 14
        assert {e.query_type for e in entries} == set(QueryType)

    def test_nlu_train_and_eval(self, tmp_path, capsys):
        corpus_file = tmp_path / "train.jsonl"
        model_file = tmp_path / "model.json"
        main(["corpus", "gen", "--db", "minicity", "-n", "140", "--seed", "6",
              "--out", str(corpus_file)])
        assert main(["nlu", "train", "--corpus", str(corpus_file),
                     "--out", str(model_file)]) == 0
        assert model_file.exists()

        eval_file = tmp_path / "eval.jsonl"
        main(["corpus", "gen", "--db", "minicity", "-n", "21", "--seed", "7",
              "--out", str(eval_file)])
        capsys.readouterr()
        assert main(["eval", "--db", "minicity", "--corpus", str(eval_file),
                     "--model", str(model_file), "--json"]) == 0
        report = json.loads(capsys.readouterr().out)
        jsonschema.validate(report, json.loads(
            schema_path("eval_report.schema.json").read_text()))
        assert report["n"] == 21

    def test_eval_missing_corpus_file(self, capsys):
        assert main(["eval", "--db", "minicity", "--corpus", "/nope/missing.jsonl"]) == 2
        assert "error" in capsys.readouterr().err


class TestEvalSemantics:
    def test_unparseable_entry_counts_as_untranslated(self, minicity, classifier):
        entries = [CorpusEntry("zzz qq ww", QueryType.BasicSpatial, {})]
        report = evaluate(minicity, entries, classifier)
        assert report.translatability == 0.0
        assert report.precision == 0.0

    def test_deterministic_metrics(self, minicity, classifier):
        entries = C.generate(minicity, 35, seed=44)
        a = evaluate(minicity, entries, classifier)
        b = evaluate(minicity, entries, classifier)
        assert (a.translatability, a.precision) == (b.translatability, b.precision)
        assert a.per_type == b.per_type

    def test_per_type_counts_sum_to_n(self, minicity, classifier):
        entries = C.generate(minicity, 35, seed=45)
        report = evaluate(minicity, entries, classifier)
        assert sum(bucket["n"] for bucket in report.per_type.values()) == report.n

    def test_report_respects_definitions(self, minicity, classifier):
        entries = C.generate(minicity, 21, seed=46)
        report = evaluate(minicity, entries, classifier)
        assert report.translatability == report.translated / report.n
        if report.translated:
            assert report.precision == report.correct / report.translated
