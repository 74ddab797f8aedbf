import json

import pytest

from qresize import metrics, parse_qasm, strip_terminal_measurements
from qresize.cli import main
from qresize.report import RunReport, render_report


@pytest.fixture
def bv_file(tmp_path):
    path = tmp_path / "bv10.qasm"
    assert main(["gen", "--family", "bv", "--n", "10", "--out", str(path)]) == 0
    return path


class TestGen:
    def test_generates_valid_qasm(self, bv_file):
        circuit = strip_terminal_measurements(parse_qasm(bv_file.read_text()))
        assert circuit.width == 10
        assert metrics(circuit).cx_count == 9

    def test_records_instance(self, tmp_path, capsys):
        path = tmp_path / "bv.qasm"
        assert main(["gen", "--family", "bv", "--n", "4", "--out", str(path)]) == 0
        instance = json.loads(capsys.readouterr().out)
        assert instance["family"] == "bv" and instance["secret"] == "111"

    def test_bad_family_exits_nonzero(self, tmp_path, capsys):
        code = main(["gen", "--family", "bv", "--n", "3", "--secret", "abc",
                     "--out", str(tmp_path / "x.qasm")])
        assert code == 1
        assert "error" in json.loads(capsys.readouterr().out)


class TestRun:
    def test_dependency_flow_bv(self, bv_file, tmp_path):
        out = tmp_path / "out.qasm"
        rep = tmp_path / "rep.json"
        code = main(["--input", str(bv_file), "--flow", "dependency",
                     "--cost", "max-reuse", "--out", str(out),
                     "--report", str(rep), "--seed", "0"])
        assert code == 0
        report = json.loads(rep.read_text())
        assert report["flow"] == "dependency"
        assert report["input_stats"]["width"] == 10
        assert report["output_stats"]["width"] == 2
        assert report["schema_version"] == "1"

    def test_report_stats_match_reparsed_output(self, bv_file, tmp_path):
        out = tmp_path / "out.qasm"
        rep = tmp_path / "rep.json"
        main(["--input", str(bv_file), "--flow", "dependency", "--out", str(out),
              "--report", str(rep)])
        report = json.loads(rep.read_text())
        reparsed = strip_terminal_measurements(parse_qasm(out.read_text()))
        stats = metrics(reparsed, report["config"]["mmr_weight"])
        assert report["output_stats"]["width"] == stats.width
        assert report["output_stats"]["cx_count"] == stats.cx_count
        assert report["output_stats"]["two_qubit_depth"] == stats.two_qubit_depth
        assert report["output_stats"]["mmr_count"] == stats.mmr_count

    def test_swap_unitary_flow_not_resizable(self, tmp_path, capsys):
        path = tmp_path / "swap.qasm"
        path.write_text(
            'OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[2];\n'
            "cx q[0],q[1];\ncx q[1],q[0];\ncx q[0],q[1];\n")
        code = main(["--input", str(path), "--flow", "unitary",
                     "--out", str(tmp_path / "o.qasm")])
        assert code == 2
        payload = json.loads(capsys.readouterr().out)
        assert "not resizable at unitary level" in payload["error"]

    def test_empty_circuit_flow_none(self, tmp_path):
        path = tmp_path / "empty.qasm"
        path.write_text('OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[1];\n')
        rep = tmp_path / "rep.json"
        code = main(["--input", str(path), "--flow", "auto",
                     "--out", str(tmp_path / "o.qasm"), "--report", str(rep)])
        assert code == 0
        report = json.loads(rep.read_text())
        assert report["flow"] == "none"
        assert report["output_stats"]["width"] == report["input_stats"]["width"]

    def test_auto_prefers_dependency(self, bv_file, tmp_path):
        rep = tmp_path / "rep.json"
        main(["--input", str(bv_file), "--flow", "auto",
              "--out", str(tmp_path / "o.qasm"), "--report", str(rep)])
        assert json.loads(rep.read_text())["flow"] == "dependency"

    def test_auto_never_runs_unitary_when_pairs_exist(self, tmp_path):
        # width <= 5 with dependency pairs available: auto must stay on the
        # dependency flow even though the unitary flow would also apply
        path = tmp_path / "fanin.qasm"
        path.write_text(
            'OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[3];\n'
            "cx q[0],q[2];\ncx q[1],q[2];\n")
        rep = tmp_path / "rep.json"
        code = main(["--input", str(path), "--flow", "auto",
                     "--out", str(tmp_path / "o.qasm"), "--report", str(rep)])
        assert code == 0
        report = json.loads(rep.read_text())
        assert report["flow"] == "dependency"
        assert "check" not in report["distances"]

    def test_resets_knob(self, bv_file, tmp_path):
        out = tmp_path / "out.qasm"
        main(["--input", str(bv_file), "--flow", "dependency", "--resets", "3",
              "--out", str(out)])
        # 8 reuse points, three resets each
        assert out.read_text().count("reset q[0];") == 24

    def test_coupling_file(self, bv_file, tmp_path):
        edges = tmp_path / "edges.json"
        edges.write_text(json.dumps({"n": 2, "edges": [[0, 1]]}))
        code = main(["--input", str(bv_file), "--flow", "dependency",
                     "--coupling", f"file:{edges}", "--out", str(tmp_path / "o.qasm")])
        assert code == 0

    def test_missing_input_errors(self, tmp_path, capsys):
        code = main(["--input", str(tmp_path / "nope.qasm"), "--out", str(tmp_path / "o.qasm")])
        assert code == 1


class TestDeterminism:
    def test_byte_identical_runs(self, bv_file, tmp_path):
        outs, reps = [], []
        for tag in ("a", "b"):
            out = tmp_path / f"out_{tag}.qasm"
            rep = tmp_path / f"rep_{tag}.json"
            assert main(["--input", str(bv_file), "--flow", "dependency",
                         "--seed", "7", "--out", str(out), "--report", str(rep)]) == 0
            outs.append(out.read_bytes())
            reps.append(json.loads(rep.read_text()))
        assert outs[0] == outs[1]
        for r in reps:
            r.pop("timings")
        assert reps[0] == reps[1]


class TestReport:
    def test_round_trips_through_json(self):
        report = RunReport(
            flow="dependency", seed=1, config={"epsilon": 1e-10},
            input_stats={"width": 3}, output_stats={"width": 2},
            distances={"check": 0.123456789012345},
        )
        text = render_report(report)
        parsed = json.loads(text)
        assert parsed["schema_version"] == "1"
        assert parsed["distances"]["check"] == pytest.approx(0.123456789012, rel=1e-11)

    def test_float_rounding_stable(self):
        report = RunReport(flow="none", seed=0, config={}, input_stats={},
                           output_stats={}, distances={"d": 1 / 3})
        assert "0.333333333333" in render_report(report)
