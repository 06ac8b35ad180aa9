"""Document round trips, CLI subcommands and exit codes."""

import json

import numpy as np
import pytest

from krein_spectra import DocumentError
from krein_spectra.cli import main
from krein_spectra.documents import (
    OperatorDocument,
    dumps_canonical,
    generator_spec_from_json,
    generator_spec_to_json,
    parse_operator_document,
)
from krein_spectra.generators import GeneratorSpec


def write_operator(tmp_path, name="op.json", gram=None, matrix=None, **extra):
    gram = np.diag([1.0, -1.0]) if gram is None else np.asarray(gram)
    matrix = np.diag([1.0, 2.0]) if matrix is None else np.asarray(matrix)
    doc = OperatorDocument(dim=gram.shape[0], gram=gram, matrix=matrix, **extra)
    path = tmp_path / name
    path.write_text(doc.to_json(), encoding="utf-8")
    return path


class TestDocuments:
    def test_round_trip_is_byte_identical(self, tmp_path):
        path = write_operator(tmp_path, metadata={"label": "reference"})
        text = path.read_text(encoding="utf-8")
        reparsed = parse_operator_document(text)
        assert reparsed.to_json() == text

    def test_malformed_json_reports_line(self):
        with pytest.raises(DocumentError, match="line 2"):
            parse_operator_document('{\n  "dim": oops\n}')

    def test_field_diagnostics(self):
        with pytest.raises(DocumentError, match="dim"):
            parse_operator_document('{"gram": [], "matrix": []}')
        with pytest.raises(DocumentError, match=r"gram\[0\]\[1\]"):
            parse_operator_document(
                '{"dim": 2, "gram": [[[1,0],[0]],[[0,0],[1,0]]], "matrix":'
                ' [[[1,0],[0,0]],[[0,0],[1,0]]]}'
            )

    def test_unknown_fields_rejected(self):
        with pytest.raises(DocumentError, match="unknown"):
            parse_operator_document('{"dim": 1, "gram": [[[1,0]]], "matrix": [[[1,0]]], "x": 3}')

    def test_tolerance_overrides(self):
        raw = {
            "dim": 1,
            "gram": [[[1.0, 0.0]]],
            "matrix": [[[5.0, 0.0]]],
            "tolerances": {"cluster_tol": 1e-9},
        }
        doc = parse_operator_document(json.dumps(raw))
        assert doc.tolerances.cluster_tol == 1e-9
        assert doc.to_json() == dumps_canonical(
            {
                "dim": 1,
                "gram": [[[1.0, 0.0]]],
                "matrix": [[[5.0, 0.0]]],
                "tolerances": {"cluster_tol": 1e-9},
            }
        )

    def test_generator_spec_json_round_trip(self):
        spec = GeneratorSpec(
            signature=(3, 2),
            positive_type_eigs=((1.0 + 0j, 2),),
            negative_type_eigs=((2.0 + 0j, 1),),
            neutral_pairs=(((0.5 + 0.5j), (-1.0 + 0j)),),
            cond_bound=100.0,
            seed=11,
        )
        raw = generator_spec_to_json(spec)
        assert generator_spec_from_json(raw) == spec


class TestExitCodes:
    def test_classify_ok(self, tmp_path, capsys):
        path = write_operator(tmp_path)
        assert main(["classify", str(path)]) == 0
        out = capsys.readouterr().out
        assert "two-sided-positive" in out and "two-sided-negative" in out

    def test_malformed_input_is_exit_1(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        assert main(["classify", str(path)]) == 1

    def test_non_normal_operator_is_exit_2(self, tmp_path, capsys):
        path = write_operator(tmp_path, matrix=np.array([[0.0, 1.0], [0.0, 0.0]]))
        assert main(["classify", str(path)]) == 2
        assert "residual" in capsys.readouterr().err

    def test_contour_through_spectrum_is_exit_3(self, tmp_path):
        path = write_operator(tmp_path)
        assert main(["project", str(path), "--disk", "0,0,1"]) == 3

    def test_sylvester_overlap_is_exit_2(self, tmp_path):
        payload = {
            "s": [[[1.0, 0.0]]],
            "t": [[[1.0, 0.0]]],
            "z": [[[1.0, 0.0]]],
        }
        path = tmp_path / "sylvester.json"
        path.write_text(json.dumps(payload), encoding="utf-8")
        assert main(["sylvester", str(path)]) == 2


class TestSubcommands:
    def test_classify_json_payload(self, tmp_path, capsys):
        path = write_operator(tmp_path)
        assert main(["classify", str(path), "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert [p["type"] for p in payload["points"]] == [
            "two-sided-positive",
            "two-sided-negative",
        ]

    def test_classify_identity_single_point(self, tmp_path, capsys):
        path = write_operator(tmp_path, gram=np.eye(2), matrix=np.eye(2))
        assert main(["classify", str(path), "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert len(payload["points"]) == 1
        point = payload["points"][0]
        assert point["type"] == "two-sided-positive"
        assert point["alg_mult"] == point["geo_mult"] == 2

    def test_project_emits_projection_and_discrepancy(self, tmp_path, capsys):
        path = write_operator(tmp_path)
        assert main(["project", str(path), "--disk", "1,0,0.4"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["projection"][0][0] == [1.0, 0.0]
        assert payload["projection"][1][1] == [0.0, 0.0]
        assert payload["diagnostics"]["contour_oracle_discrepancy"] <= 1e-6

    def test_project_full_and_empty_region(self, tmp_path, capsys):
        path = write_operator(tmp_path)
        assert main(["project", str(path), "--disk", "1.5,0,5"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["rank"] == 2
        assert main(["project", str(path), "--disk", "40,40,1"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["rank"] == 0

    def test_sylvester_scalar(self, tmp_path, capsys):
        payload = {
            "s": [[[2.0, 0.0]]],
            "t": [[[1.0, 0.0]]],
            "z": [[[3.0, 0.0]]],
        }
        path = tmp_path / "sylvester.json"
        path.write_text(json.dumps(payload), encoding="utf-8")
        assert main(["sylvester", str(path)]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["x"][0][0] == [pytest.approx(3.0), pytest.approx(0.0)]
        assert out["spectral_gap"] == pytest.approx(1.0)

    def test_generate_then_classify(self, tmp_path, capsys):
        spec = GeneratorSpec(
            signature=(2, 2),
            positive_type_eigs=((1.0 + 0j, 1),),
            negative_type_eigs=((-2.0 + 0j, 1),),
            neutral_pairs=(((3.0 + 0j), (5.0 + 0j)),),
            cond_bound=50.0,
            seed=3,
        )
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(generator_spec_to_json(spec)), encoding="utf-8")
        doc_path = tmp_path / "generated.json"
        truth_path = tmp_path / "truth.json"
        assert (
            main(
                [
                    "generate", str(spec_path),
                    "--output", str(doc_path),
                    "--truth", str(truth_path),
                ]
            )
            == 0
        )
        assert main(["classify", str(doc_path), "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        truth = json.loads(truth_path.read_text(encoding="utf-8"))
        got = sorted(p["type"] for p in payload["points"])
        expected = sorted(p["type"] for p in truth["points"])
        assert got == expected

    def test_probe_resolvent(self, tmp_path, capsys):
        path = write_operator(tmp_path, gram=np.eye(2))
        assert main(
            ["probe-resolvent", str(path), "--point", "1,0", "--radii", "0.4,0.2"]
        ) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["pole_order"] == 1
        assert payload["c_estimate"] == pytest.approx(1.0, abs=1e-9)

    def test_stability_json(self, tmp_path, capsys):
        path = write_operator(tmp_path)
        assert main(["stability", str(path)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["stable"] is True and payload["certified"] is True

    def test_lsf_verify(self, tmp_path, capsys):
        path = write_operator(tmp_path)
        assert main(["lsf-verify", str(path), "--disk", "1,0,0.4", "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["summary"]["fail"] == 0


class TestSuiteCommand:
    def test_deterministic_report_json(self, tmp_path, capsys):
        first = tmp_path / "r1.json"
        second = tmp_path / "r2.json"
        args = ["suite", "--trials", "2", "--seed", "5", "--dims", "2:5"]
        assert main(args + ["--json-out", str(first)]) == 0
        assert main(args + ["--json-out", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()
        capsys.readouterr()

    def test_only_trial_reproduction(self, tmp_path, capsys):
        full = tmp_path / "full.json"
        one = tmp_path / "one.json"
        assert main(
            ["suite", "--trials", "3", "--seed", "9", "--dims", "2:4",
             "--json-out", str(full)]
        ) == 0
        assert main(
            ["suite", "--trials", "3", "--seed", "9", "--dims", "2:4",
             "--only-trial", "1", "--json-out", str(one)]
        ) == 0
        capsys.readouterr()
        full_entries = [
            e for e in json.loads(full.read_text())["entries"] if e["trial"] == 1
        ]
        one_entries = json.loads(one.read_text())["entries"]
        assert [e["name"] for e in full_entries] == [e["name"] for e in one_entries]
        assert [e["residual"] for e in full_entries] == [
            e["residual"] for e in one_entries
        ]

    def test_thread_env_cap_keeps_results(self, tmp_path, capsys, monkeypatch):
        serial = tmp_path / "serial.json"
        monkeypatch.setenv("KREIN_SPECTRA_THREADS", "1")
        assert main(
            ["suite", "--trials", "2", "--seed", "5", "--dims", "2:5",
             "--json-out", str(serial)]
        ) == 0
        monkeypatch.setenv("KREIN_SPECTRA_THREADS", "4")
        parallel = tmp_path / "parallel.json"
        assert main(
            ["suite", "--trials", "2", "--seed", "5", "--dims", "2:5",
             "--json-out", str(parallel)]
        ) == 0
        capsys.readouterr()
        assert serial.read_bytes() == parallel.read_bytes()
