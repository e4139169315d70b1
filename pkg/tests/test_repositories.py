import math

import numpy as np
import pytest

from app.core.errors import ArtifactFormatError, ManifestInvalid
from app.core.types import RunManifest, ScoreRecord
from app.evaluation.metrics import PairList
from app.pruning.structured import build_structured_plan
from app.repositories import (
    ArtifactRepository,
    DatasetRepository,
    EvaluationRepository,
    ReportRepository,
    ScoreRepository,
)
from app.repositories.files import decode_float, format_float, to_document, write_table
from app.synthlab.generator import SynthConfig, generate_dataset
from tests.conftest import random_mlp


class TestFiles:
    def test_float_format(self):
        assert format_float(0.1) == "0.10000000000000001"
        assert format_float(0.0) == "0"
        assert format_float(None) == ""

    def test_infinities_survive_json(self):
        document = to_document({"tau": math.inf, "low": -math.inf, "x": np.float64(0.5)})
        assert document == {"tau": "+inf", "low": "-inf", "x": 0.5}
        assert decode_float(document["tau"]) == math.inf

    def test_tables_use_lf(self, tmp_path):
        path = write_table(tmp_path / "nested" / "t.csv", ["a", "b"], [["1", "2"]])
        assert path.read_bytes() == b"a,b\n1,2\n"


class TestDatasetRepository:
    def test_round_trip_is_exact(self, tmp_path, small_experiment):
        data = generate_dataset(SynthConfig.parse(small_experiment["synth"]))
        repo = DatasetRepository()
        loaded = repo.load(repo.save(tmp_path / "dataset.csv", data))
        assert loaded.ids == data.ids
        assert loaded.inputs.tobytes() == data.inputs.tobytes()
        np.testing.assert_array_equal(loaded.labels, data.labels)
        np.testing.assert_array_equal(loaded.sigmas, data.sigmas)

    def test_wrong_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("sample,label,sigma,x0\na,0,0,1\n", encoding="utf-8")
        with pytest.raises(ArtifactFormatError):
            DatasetRepository().load(path)

    def test_ragged_row(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("id,label,sigma,x0\na,0,0\n", encoding="utf-8")
        with pytest.raises(ArtifactFormatError):
            DatasetRepository().load(path)


class TestEvaluationRepository:
    def test_pairs_with_and_without_scores(self, tmp_path):
        repo = EvaluationRepository()
        plain = PairList.from_rows([("a", "b", True), ("a", "c", False)])
        scored = PairList.from_rows([("a", "b", True, 0.5), ("a", "c", False, -0.25)])
        assert repo.load_pairs(repo.save_pairs(tmp_path / "p.csv", plain)).scores is None
        path = repo.save_pairs(tmp_path / "s.csv", scored)
        assert path.read_text(encoding="utf-8").splitlines()[0] == "id_a,id_b,genuine,score"
        np.testing.assert_array_equal(repo.load_pairs(path).scores, [0.5, -0.25])

    def test_bad_genuine_flag(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("id_a,id_b,genuine\na,b,yes\n", encoding="utf-8")
        with pytest.raises(ArtifactFormatError):
            EvaluationRepository().load_pairs(path)

    def test_unknown_pair_column(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("id_a,id_b,genuine,weight\na,b,1,2\n", encoding="utf-8")
        with pytest.raises(ArtifactFormatError):
            EvaluationRepository().load_pairs(path)

    def test_embeddings_round_trip(self, tmp_path):
        repo = EvaluationRepository()
        vectors = np.array([[0.6, 0.8], [1.0, 0.0]], dtype=np.float32)
        loaded = repo.load_embeddings(repo.save_embeddings(tmp_path / "e.csv", ["x", "y"], vectors))
        assert loaded.ids == ("x", "y")
        assert loaded.matrix.tobytes() == vectors.tobytes()


class TestScoreRepository:
    def test_failed_rows_keep_their_place(self, tmp_path):
        records = [
            ScoreRecord(sample_id="a", drift=0.0, quality=1.0, rho=0.4, criterion="l1", granularity="u"),
            ScoreRecord(sample_id="b", rho=0.4, criterion="l1", granularity="u", error="ShapeMismatch: x"),
        ]
        repo = ScoreRepository()
        path = repo.save_scores(tmp_path / "scores.csv", records)
        assert path.read_text(encoding="utf-8") == "sample_id,drift,quality\na,0,1\nb,,\n"
        assert repo.load_qualities(path) == {"a": 1.0}
        failures = repo.save_failures(tmp_path / "score_failures.csv", records)
        assert failures.read_text(encoding="utf-8") == "sample_id,error\nb,ShapeMismatch: x\n"


class TestArtifactRepository:
    def test_plan_round_trip(self, tmp_path):
        plan = build_structured_plan(random_mlp([4, 8, 3], seed=0), 0.5)
        repo = ArtifactRepository()
        assert repo.load_plan(repo.save_plan(tmp_path / "plan.json", plan)) == plan

    def test_invalid_plan(self, tmp_path):
        path = tmp_path / "plan.json"
        path.write_text('{"rho": "high"}', encoding="utf-8")
        with pytest.raises(ManifestInvalid):
            ArtifactRepository().load_plan(path)


class TestReportRepository:
    def test_manifest_round_trip(self, tmp_path):
        manifest = RunManifest(command="prune", parameters={"ratio": 0.4}, tool_version="0.1.0")
        repo = ReportRepository()
        assert repo.load_manifest(repo.save_manifest(tmp_path / "m.json", manifest)) == manifest

    def test_invalid_manifest(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text('{"command": "prune"}', encoding="utf-8")
        with pytest.raises(ManifestInvalid):
            ReportRepository().load_manifest(path)
