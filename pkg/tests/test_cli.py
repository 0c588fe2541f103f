import json

import pytest

from ipps.cli import main
from ipps.core import parse_set_system


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_construct_writes_system_and_sidecar(tmp_path, capsys):
    out = tmp_path / "sys.json"
    code, _, _ = run(capsys, "construct", "--m", "16", "--out", str(out))
    assert code == 0
    system = parse_set_system(out.read_text())
    assert len(system) == 48 and system.n == 640
    side = json.loads((tmp_path / "sys.json.params.json").read_text())
    assert side["q"] == 4 and side["slopes"] == [1, 2, 7] and len(side["equations"]) == 16


def test_construct_with_set(tmp_path, capsys):
    (tmp_path / "s.json").write_text("[1, 7]")
    code, out, _ = run(capsys, "construct", "--m", "16", "--set", str(tmp_path / "s.json"))
    assert code == 0 and len(parse_set_system(out)) == 32
    (tmp_path / "bad.json").write_text("[1, 2, 3]")
    code, _, err = run(capsys, "construct", "--m", "16", "--set", str(tmp_path / "bad.json"))
    assert code == 2 and "error" in err


def test_verify_exit_codes(tmp_path, capsys, fixtures_dir):
    ks_path = str(fixtures_dir / "hamming_ks_system.json")
    for mode in ("fast", "exhaustive", "bruteforce"):
        code, out, _ = run(capsys, "verify", ks_path, "--mode", mode)
        assert code == 1
        rep = json.loads(out)
        assert rep["verdict"] == "fail"
        assert rep["witness"]["labels"] == [[1, 1], [1, 2], [3, 2], [4, 1]]
    run(capsys, "construct", "--m", "8", "--out", str(tmp_path / "s.json"))
    code, out, _ = run(capsys, "verify", str(tmp_path / "s.json"))
    assert code == 0 and json.loads(out)["verdict"] == "pass"
    code, _, _ = run(capsys, "verify", ks_path, "--mode", "fast", "--t", "3")
    assert code == 2


def test_input_errors(tmp_path, capsys):
    assert run(capsys, "verify", str(tmp_path / "missing.json"))[0] == 2
    (tmp_path / "junk.json").write_text("{")
    assert run(capsys, "verify", str(tmp_path / "junk.json"))[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "construct", "--m", "1")[0] == 2
    assert run(capsys, "bounds", "--n", "3", "--k", "4", "--t", "2")[0] == 2


def test_verify_code_and_ks(tmp_path, capsys, fixtures_dir):
    code, out, _ = run(capsys, "verify-code", str(fixtures_dir / "hamming_code.json"))
    assert code == 0 and json.loads(out)["verdict"] == "pass"
    target = tmp_path / "ks.json"
    assert run(capsys, "ks", str(fixtures_dir / "hamming_code.json"), "--out", str(target))[0] == 0
    assert parse_set_system(target.read_text()) == parse_set_system(
        (fixtures_dir / "hamming_ks_system.json").read_text()
    )
    code, out, _ = run(capsys, "ks", "hamming")
    assert parse_set_system(out) == parse_set_system(target.read_text())


def test_trace(tmp_path, capsys, fixtures_dir):
    ks_path = str(fixtures_dir / "hamming_ks_system.json")
    pirate = tmp_path / "T.json"
    pirate.write_text(json.dumps([[1, 1], [1, 2], [3, 2], [4, 1]]))
    code, out, _ = run(capsys, "trace", ks_path, "--pirate", str(pirate))
    assert code == 1 and json.loads(out)["status"] == "unidentifiable"
    pirate.write_text(json.dumps([[1, 1], [2, 1], [3, 1], [4, 1]]))
    code, out, _ = run(capsys, "trace", ks_path, "--pirate", str(pirate))
    assert code == 0 and json.loads(out)["traitors"] == [0]


def test_derive_eqs_and_greedy(tmp_path, capsys):
    eqs = tmp_path / "eqs.txt"
    assert run(capsys, "derive-eqs", "--m", "16", "--out", str(eqs))[0] == 0
    text = eqs.read_text()
    assert text.startswith("# m=16 q=4 n=640")
    code, out, _ = run(capsys, "greedy-set", "--m", "16", "--equations", str(eqs))
    assert code == 0 and json.loads(out)["elements"] == [1, 2, 7]
    code, out, _ = run(capsys, "derive-eqs", "--m", "16", "--cases")
    rows = json.loads(out)
    assert {r["case"] for r in rows} == {1, 2, 3}
    sidon = tmp_path / "sidon.txt"
    sidon.write_text("1 1 -1 -1 CM\n")
    code, out, _ = run(capsys, "greedy-set", "--m", "10", "--equations", str(sidon))
    assert json.loads(out)["elements"] == [1, 2, 4, 8]


def test_bounds(capsys):
    code, out, _ = run(capsys, "bounds", "--n", "640", "--k", "4", "--t", "2", "--achieved", "48")
    rep = json.loads(out)
    assert code == 0
    assert (rep["upper_binomial"], rep["mu"], rep["lower_exponent"]) == (204480, 4, "4/3")
    assert rep["achieved_over_n_1.5"] == f"{48 / 640**1.5:.6f}"


def test_experiment_csv(tmp_path, capsys):
    out = tmp_path / "exp.csv"
    assert run(capsys, "experiment", "--m", "8", "--out", str(out))[0] == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("m,q,n,")
    assert len(lines) == 2 and ",pass," in lines[1]


COMMANDS = [
    ["construct", "--m", "8"],
    ["derive-eqs", "--m", "32", "--cases"],
    ["greedy-set", "--m", "24"],
    ["bounds", "--n", "100", "--k", "4", "--t", "3"],
    ["ks", "hamming"],
    ["experiment", "--m", "8", "16", "--seed", "5"],
]


@pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: a[0])
def test_repeated_commands_are_byte_identical(tmp_path, capsys, argv):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(argv + ["--out", str(a)] if argv[0] != "bounds" else argv) == 0
    first = capsys.readouterr().out
    assert main(argv + ["--out", str(b)] if argv[0] != "bounds" else argv) == 0
    second = capsys.readouterr().out
    if argv[0] == "bounds":
        assert first == second
    else:
        assert a.read_bytes() == b.read_bytes()


def test_parallel_experiment_matches_serial(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["experiment", "--m", "8", "16", "--jobs", "1", "--out", str(a)])
    main(["experiment", "--m", "8", "16", "--jobs", "2", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
