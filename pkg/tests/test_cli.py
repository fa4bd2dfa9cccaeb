import json

import pytest

from gridminor import io
from gridminor.cli import EXIT_INVALID, EXIT_OK, EXIT_PRECONDITION, main


@pytest.fixture
def pendant(tmp_path):
    g, s = tmp_path / "g.json", tmp_path / "s.json"
    assert main(["gen", "--kind", "pendant-grid", "--kappa", "16", "--graph", str(g), "--sets", str(s)]) == EXIT_OK
    return g, s


def test_gen_round_trips_byte_identical(pendant):
    g, s = pendant
    G = io.graph_from_json(io.read_json(g))
    assert io.dumps(io.graph_to_json(G)) == g.read_text()
    assert io.dumps(io.sets_to_json(*io.sets_from_json(io.read_json(s)))) == s.read_text()


def test_paper_config_echo(capsys):
    assert main(["config", "--preset", "paper:g=2"]) == EXIT_OK
    cfg = json.loads(capsys.readouterr().out)
    assert cfg["D"] == 1024 and cfg["M2"] == 128 and cfg["kappa_min"] == 2 ** 31


def _pipeline(tmp_path, kappa=32, seed=None):
    g, s, c = tmp_path / "g.json", tmp_path / "s.json", tmp_path / "c.json"
    main(["gen", "--kind", "pendant-grid", "--kappa", str(kappa), "--graph", str(g), "--sets", str(s)])
    extra = ["--seed", str(seed)] if seed is not None else []
    assert main(["pipeline", "--graph", str(g), "--sets", str(s), "--out", str(c)] + extra) == EXIT_OK
    return g, c


def test_pipeline_then_validate(tmp_path):
    g, c = _pipeline(tmp_path)
    assert main(["validate", "--graph", str(g), "--cert", str(c)]) == EXIT_OK


def test_certificate_bytes_are_deterministic(tmp_path):
    _, c = _pipeline(tmp_path)
    first = c.read_text()
    _, c = _pipeline(tmp_path)
    assert c.read_text() == first


def test_corrupted_connector_fails_validation(tmp_path, capsys):
    g, c = _pipeline(tmp_path)
    data = json.loads(c.read_text())
    conn = data["body"]["connectors"][0][0]
    conn[1] = conn[1] + 1
    c.write_text(json.dumps(data))
    capsys.readouterr()
    assert main(["--log", "json", "validate", "--graph", str(g), "--cert", str(c)]) == EXIT_INVALID
    records = [json.loads(line) for line in capsys.readouterr().err.splitlines()]
    assert any(r.get("clause", "").startswith("connector") for r in records)


def test_precondition_failures_exit_three(tmp_path, pendant):
    g, s = pendant
    out = tmp_path / "c.json"
    assert main(["pipeline", "--graph", str(g), "--sets", str(tmp_path / "none.json"), "--out", str(out)]) \
        == EXIT_PRECONDITION
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({**json.loads(g.read_text()), "schema_version": 7}))
    assert main(["pipeline", "--graph", str(bad), "--sets", str(s), "--out", str(out)]) == EXIT_PRECONDITION
    # too few witnesses for the strict paper preset
    assert main(["pipeline", "--graph", str(g), "--sets", str(s), "--preset", "paper:g=2",
                 "--out", str(out)]) == EXIT_PRECONDITION


def test_expander_flow(tmp_path):
    h, e = tmp_path / "h.json", tmp_path / "e.json"
    assert main(["gen", "--kind", "hairy", "--kappa", "8", "--length", "90", "--hairy", str(h)]) == EXIT_OK
    assert main(["expander", "--hairy", str(h), "--n", "8", "--strategy", "spectral", "--seed", "3",
                 "--out", str(e)]) == EXIT_OK
    assert main(["validate", "--hairy", str(h), "--cert", str(e)]) == EXIT_OK
    data = json.loads(e.read_text())
    assert data["kind"] == "expander" and data["body"]["expansion"]["status"] == "certified"
    data["body"]["edges"][0][3] = data["body"]["edges"][0][3][:-1]
    e.write_text(json.dumps(data))
    assert main(["validate", "--hairy", str(h), "--cert", str(e)]) == EXIT_INVALID


def test_seed_env_default(monkeypatch):
    from gridminor.cli import build_parser
    monkeypatch.setenv("GRIDMINOR_SEED", "11")
    args = build_parser().parse_args(["config"])
    assert args.seed == 11


def test_export_dot(tmp_path, pendant, capsys):
    g, _ = pendant
    assert main(["export", "--graph", str(g)]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("graph G {") and out.count("--") == io.graph_from_json(io.read_json(g)).m()
