import json
from fractions import Fraction as F

import pytest

from rideshare_market import PaymentSchedule, ValidationError
from rideshare_market.cli import main
from rideshare_market.generate import generate_instance
from rideshare_market.instance_io import (
    parse_document,
    parse_instance,
    serialize_document,
    serialize_instance,
)


def test_round_trip_canonical(canonical):
    text = serialize_instance(canonical)
    assert parse_instance(text) == canonical
    assert serialize_instance(parse_instance(text)) == text


def test_round_trip_generated_instances():
    for seed in range(10):
        inst = generate_instance(seed, n=4, m=2)
        assert parse_instance(serialize_instance(inst)) == inst
    inst = generate_instance(0, n=4, m=2, degenerate=True)
    assert parse_instance(serialize_instance(inst)) == inst


def test_round_trip_payments(canonical):
    t = PaymentSchedule({("T1", "V1"): F(7, 3), ("T2", "V1"): F(2)})
    text = serialize_document(canonical, t)
    doc = parse_document(text)
    assert doc.payments.entries == t.entries


def test_parse_rejects_floats(canonical):
    raw = json.loads(serialize_instance(canonical))
    raw["travelers"][0]["v_max"] = 10.0
    with pytest.raises(ValidationError, match="exact number"):
        parse_instance(json.dumps(raw))


def test_parse_rejects_wrong_schema_version(canonical):
    raw = json.loads(serialize_instance(canonical))
    raw["schema_version"] = 2
    with pytest.raises(ValidationError, match="schema_version"):
        parse_instance(json.dumps(raw))


def test_parse_reports_all_errors_at_once(canonical):
    raw = json.loads(serialize_instance(canonical))
    raw["travelers"][0]["destination"] = raw["travelers"][0]["origin"]
    raw["travelers"][1]["v_min"] = 0.5
    with pytest.raises(ValidationError) as exc:
        parse_instance(json.dumps(raw))
    messages = "\n".join(exc.value.errors)
    assert "origin equals destination" in messages
    assert "exact number" in messages


def test_parse_rejects_dangling_edge(canonical):
    raw = json.loads(serialize_instance(canonical))
    raw["network"]["edges"].append(["e9", "A", "Z"])
    with pytest.raises(ValidationError, match="head"):
        parse_instance(json.dumps(raw))


def test_parse_syntax_error_has_position():
    with pytest.raises(ValidationError, match="line 1"):
        parse_instance("{not json")


@pytest.fixture
def canonical_path(canonical, tmp_path):
    path = tmp_path / "instance.json"
    path.write_text(serialize_instance(canonical))
    return str(path)


def test_cli_solve_text(canonical_path, capsys):
    assert main(["solve", canonical_path]) == 0
    out = capsys.readouterr().out
    assert "objective: 10" in out
    assert "T1: V1" in out and "T2: V1" in out


def test_cli_solve_machine(canonical_path, capsys):
    assert main(["solve", canonical_path, "--format", "machine"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["assignment"] == {"T1": "V1", "T2": "V1"}
    assert doc["objective"] == "10"
    assert doc["dual_certificate"]["y"].keys() == {"T1", "T2"}


def test_cli_solve_paper_objective(canonical_path, capsys):
    code = main(
        ["solve", canonical_path, "--objective", "paper", "--payments", "T1=3,T2=2",
         "--format", "machine"]
    )
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["welfare_paper"] == "9"


def test_cli_oracle_agreement(canonical_path, capsys):
    assert main(["oracle", canonical_path, "--format", "machine"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["agreement"] is True
    assert doc["optimal_assignments"] == [{"T1": "V1", "T2": "V1"}]


def test_cli_check_default_passes(canonical_path, capsys):
    assert main(["check", canonical_path, "--format", "machine"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["feasibility"]["verdict"] is True
    assert doc["stability"]["verdict"] is True


def test_cli_check_unstable_payment_exits_1(canonical_path, capsys):
    assert main(["check", canonical_path, "--payments", "T1:V1=7", "--format", "machine"]) == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["stability"]["verdict"] is False
    assert doc["stability"]["violations"][0]["kind"] == "exit_preferred"


def test_cli_check_infeasible_payment_exits_1(canonical_path, capsys):
    assert main(["check", canonical_path, "--payments", "T1:V1=9", "--format", "machine"]) == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["feasibility"]["verdict"] is False
    assert doc["stability"]["verdict"] is None


def test_cli_synthesize(canonical_path, capsys):
    assert main(["synthesize", canonical_path, "--format", "machine"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["payments"] == {"T1:V1": "2", "T2:V1": "2"}


def test_cli_synthesize_off_optimum_exits_1(canonical_path, capsys):
    code = main(["synthesize", canonical_path, "--assignment", "T2=V1", "--format", "machine"])
    assert code == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["feasible"] is False
    assert doc["certificate"]


def test_cli_generate_deterministic(capsys):
    assert main(["generate", "--seed", "5", "--n", "3", "--m", "2"]) == 0
    first = capsys.readouterr().out
    assert main(["generate", "--seed", "5", "--n", "3", "--m", "2"]) == 0
    assert capsys.readouterr().out == first
    parse_instance(first)


def test_cli_generate_to_file_then_report(tmp_path, capsys):
    path = str(tmp_path / "gen.json")
    assert main(["generate", "--seed", "9", "--n", "3", "--m", "2", "-o", path]) == 0
    code = main(["report", path, "--with-oracle", "--format", "machine"])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["oracle"]["agreement"] is True
    assert "synthesis" in doc and "feasibility" in doc


def test_cli_missing_file_exits_2(capsys):
    assert main(["solve", "/nonexistent/instance.json"]) == 2
    assert "error:" in capsys.readouterr().err


def test_cli_bad_payment_spec_exits_2(canonical_path, capsys):
    assert main(["check", canonical_path, "--payments", "T1:V1=one"]) == 2
    assert "exact number" in capsys.readouterr().err


def test_cli_invalid_document_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["solve", str(path)]) == 2
    assert "syntax error" in capsys.readouterr().err


def test_cli_usage_error_exits_2(capsys):
    assert main([]) == 2
    assert main(["frobnicate"]) == 2
    capsys.readouterr()
