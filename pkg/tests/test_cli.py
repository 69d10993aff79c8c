import json

import pytest

from bm_census.cli import EXIT_MISMATCH, EXIT_OK, EXIT_USAGE, main
from bm_census.reporting import REPORT_COLUMNS
from bm_census.utils import resolve_jobs


def run(capsys, *argv):
    code = main([*argv, "--log-level", "ERROR"])
    return code, capsys.readouterr().out


def test_count_csv(capsys):
    code, out = run(capsys, *"count --id F17 --order 2 --classes both --format csv".split())
    assert code == EXIT_OK
    header, row = out.splitlines()
    assert header == "key,class,identity,order,raw,iso,iso_anti,engine"
    assert row == "F17,classical,(xy·x)z = x(y·xz),2,10,7,5,pruned"


def test_count_expression_json(capsys):
    code, out = run(capsys, "count", "--expr", "xy·zx = (xy·z)x", *"--order 2 --format json".split())
    assert code == EXIT_OK
    [record] = json.loads(out)
    assert record["raw"] == 10
    assert record["key"] is None
    assert record["iso"] is None


def test_count_conjunction_and_timing(capsys):
    code, out = run(capsys, *"count --id F1 --id F3 --order 2 --timing --format json".split())
    assert code == EXIT_OK
    [record] = json.loads(out)
    assert record["key"] == "F1+F3"
    assert "elapsed_s" in record


def test_count_naive_engine(capsys):
    code, out = run(capsys, *"count --id EL --order 3 --engine naive --format csv".split())
    assert code == EXIT_OK
    assert out.splitlines()[1].split(",")[4] == "239"


@pytest.mark.parametrize(
    "argv",
    [
        ["count", "--id", "F99", "--order", "2"],
        ["count", "--expr", "xy = ", "--order", "2"],
        ["count", "--order", "2"],
        ["count", "--id", "F1", "--order", "4", "--classes", "iso"],
        ["count", "--id", "F1", "--order", "2", "--jobs", "0"],
        ["classify", "--id", "F1", "--id", "F2"],
    ],
)
def test_input_errors_exit_with_usage_code(capsys, argv):
    code, _ = run(capsys, *argv)
    assert code == EXIT_USAGE


@pytest.mark.parametrize(
    "argv", [[], ["count", "--id", "F1", "--order", "6"], ["verify", "--scope", "table9"]]
)
def test_argument_errors_exit(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


def test_verify_table1(capsys):
    code, out = run(capsys, "verify", "--scope", "table1", "--format", "csv")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "key,order,metric,expected,computed,match,erratum"
    assert len(lines) == 181
    assert "F54,2,iso_anti,6,5,False,True" in lines


def test_verify_strict_fails_on_errata(capsys):
    code, _ = run(capsys, "verify", "--scope", "table1", "--strict")
    assert code == EXIT_MISMATCH


def test_verify_theorem_json(capsys):
    code, out = run(capsys, "verify", "--scope", "theorem", "--format", "json")
    assert code == EXIT_OK
    records = json.loads(out)
    assert len(records) == 32
    assert all(r["match"] for r in records)


def test_verify_output_is_stable(capsys):
    _, first = run(capsys, "verify", "--scope", "table2", "--max-order", "2", "--format", "csv")
    _, second = run(capsys, "verify", "--scope", "table2", "--max-order", "2", "--format", "csv")
    assert first == second
    assert len(first.splitlines()) == 38


@pytest.mark.parametrize(
    "argv, partner",
    [
        (["--id", "F45"], "catalog: F60"),
        (["--id", "F9"], "catalog: F9"),
        (["--id", "C1"], "catalog: CD"),
        (["--expr", "x=x"], "catalog: -"),
    ],
)
def test_parastrophe(capsys, argv, partner):
    code, out = run(capsys, "parastrophe", *argv)
    assert code == EXIT_OK
    assert out.splitlines()[1] == partner


def test_parastrophe_json(capsys):
    code, out = run(capsys, "parastrophe", "--expr", "x=x", "--format", "json")
    assert json.loads(out) == {"identity": "x = x", "parastrophe": "x = x", "catalog": []}


@pytest.mark.parametrize(
    "expr, label",
    [
        ("xy·zx = (xy·z)x", "classical"),
        ("(xy)(xz) = (xx)(zy)", "generalized"),
        ("x·yz = x", "neither"),
    ],
)
def test_classify(capsys, expr, label):
    code, out = run(capsys, "classify", "--expr", expr)
    assert code == EXIT_OK
    assert out == f"{label}\n"


@pytest.mark.parametrize("order, mode, count", [(2, "iso-anti", 7), (2, "iso", 10), (1, "iso", 1)])
def test_classes(capsys, order, mode, count):
    code, out = run(capsys, "classes", "--order", str(order), "--mode", mode)
    assert code == EXIT_OK
    assert len(out.splitlines()) == count


def test_classes_of_an_identity(capsys):
    code, out = run(capsys, "classes", "--id", "F17", "--order", "2", "--mode", "iso-anti")
    assert len(out.splitlines()) == 5


def test_enumerate_streams(capsys):
    code, out = run(capsys, "enumerate", "--id", "F1", "--order", "2")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert len(lines) == 10
    assert lines == sorted(lines)
    code, out = run(capsys, "enumerate", "--id", "F1", "--order", "2", "--stream-format", "jsonl")
    assert json.loads(out.splitlines()[0])["order"] == 2


def test_catalog_listing(capsys):
    code, out = run(capsys, "catalog", "--scope", "generalized", "--format", "csv")
    assert code == EXIT_OK
    assert len(out.splitlines()) == 38


def test_catalog_export(capsys, tmp_path):
    target = tmp_path / "bm.json"
    code, out = run(capsys, "catalog", "--format", "json", "--output", str(target))
    assert code == EXIT_OK
    assert out == ""
    assert len(json.loads(target.read_text(encoding="utf-8"))) == 97


def test_output_into_directory(capsys, tmp_path):
    code, _ = run(
        capsys, "count", "--id", "F17", "--order", "2", "--format", "csv", "--output", str(tmp_path)
    )
    assert code == EXIT_OK
    assert (tmp_path / "count_f17_order_2.csv").exists()


def test_count_text_marks_missing_values(capsys):
    code, out = run(capsys, "count", "--expr", "xy·zx = (xy·z)x", "--order", "2")
    assert code == EXIT_OK
    header, row = out.splitlines()
    assert header.split() == REPORT_COLUMNS
    assert "None" not in row and "<NA>" not in row
    assert row.split()[0] == "-"
    assert row.split()[-3:] == ["-", "-", "pruned"]


def test_jobs_from_the_environment(capsys, monkeypatch):
    monkeypatch.setenv("BM_CENSUS_JOBS", "3")
    assert resolve_jobs(None) == 3
    assert resolve_jobs(2) == 2
    monkeypatch.setenv("BM_CENSUS_JOBS", "many")
    code, _ = run(capsys, *"count --id F1 --order 2".split())
    assert code == EXIT_USAGE


def test_verify_table2_flags_errata(capsys):
    code, out = run(capsys, *"verify --scope table2 --max-order 2 --format csv".split())
    assert code == EXIT_OK
    assert "T7,2,raw,12,8,False,True" in out.splitlines()
    code, _ = run(capsys, *"verify --scope table2 --max-order 2 --strict".split())
    assert code == EXIT_MISMATCH


def test_parastrophe_outside_its_own_table(capsys):
    code, out = run(capsys, "parastrophe", "--id", "ML")
    assert code == EXIT_OK
    assert out.splitlines()[1] == "catalog: F4"


def test_enumerate_into_a_file(capsys, tmp_path):
    target = tmp_path / "tables.txt"
    code, out = run(capsys, *"enumerate --id EL --order 3 --output".split(), str(target))
    assert code == EXIT_OK
    assert out == ""
    lines = target.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 239
    assert lines == sorted(lines)
