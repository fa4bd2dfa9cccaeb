import copy
import json
from fractions import Fraction

import pytest

from gridminor.certificates import (
    SCHEMA_VERSION, Certificate, pos_from_certificate, validate_certificate,
)
from gridminor.config import RunConfig, desk, desk_for, paper, resolve
from gridminor.graph import make_path_bundle, make_pendant_grid, pendant_grid_witnesses
from gridminor.pipeline import PipelineError, crossbar_or_pos
from gridminor.pos import validate_pos


@pytest.fixture(scope="module")
def pendant32():
    G, A, B, X = make_pendant_grid(32)
    P, Q = pendant_grid_witnesses(32)
    return G, A, B, X, P, Q, crossbar_or_pos(G, A, B, X, desk_for(32), P, Q)


# config

def test_paper_preset_values():
    cfg = paper(4)
    assert cfg.D == 64 * 4 ** 4 and cfg.rho == 16 and cfg.strict
    assert cfg.type1_ratio == Fraction(1, 4) and cfg.wld_D == cfg.D // 4


def test_paper_preset_needs_power_of_two():
    with pytest.raises(ValueError):
        paper(6)


def test_resolve_and_roundtrip():
    cfg = resolve("desk:rho=3,type1_ratio=2/3")
    assert cfg.rho == 3 and cfg.type1_ratio == Fraction(2, 3)
    again = RunConfig.from_json(json.loads(cfg.dumps()))
    assert again == cfg
    assert resolve("paper:g=2") == paper(2)
    with pytest.raises(ValueError):
        resolve("fast")
    with pytest.raises(ValueError):
        desk(nope=1)
    with pytest.raises(ValueError):
        RunConfig.from_json({"bogus": 1})


def test_desk_depth_scales_with_kappa():
    assert [desk_for(k).D for k in (4, 8, 63, 64)] == [1, 2, 2, 4]
    assert desk_for(64, D=3).D == 3


# pipeline

def test_pendant_grid_gives_strong_pos(pendant32):
    G, *_, res = pendant32
    cert = res.certificate
    assert cert.kind == "pos" and cert.body["strength"] == "strong"
    assert res.stats["case"] == 1 and res.stats["stage"] == "path-of-sets"
    assert validate_certificate(cert, G).ok
    assert validate_pos(pos_from_certificate(cert), "strong").ok


def test_path_bundle_gives_crossbar():
    G, A, B, X, P, Q = make_path_bundle(8, cross_links=3, seed=1)
    res = crossbar_or_pos(G, A, B, X, desk(D=2), P, Q)
    assert res.certificate.kind == "crossbar" and res.stats["stage"] == "pseudo-grid"
    assert len(res.certificate.body["P"]) == 2
    assert validate_certificate(res.certificate, G).ok


def test_forced_reslicing_case():
    G, A, B, X = make_pendant_grid(48)
    P, Q = pendant_grid_witnesses(48)
    res = crossbar_or_pos(G, A, B, X, desk(D=2, M1=1, type1_ratio=Fraction(2)), P, Q)
    assert res.stats["case"] == 2 and res.stats["type1"] == []
    assert res.stats["slices_after_reslicing"] >= 2
    assert validate_certificate(res.certificate, G).ok


def test_runs_are_deterministic(pendant32):
    G, A, B, X, P, Q, res = pendant32
    again = crossbar_or_pos(G, A, B, X, desk_for(32), P, Q)
    assert json.dumps(again.certificate.to_json(), sort_keys=True) == \
        json.dumps(res.certificate.to_json(), sort_keys=True)


def test_strict_preset_refuses_small_instance():
    G, A, B, X = make_pendant_grid(32)
    P, Q = pendant_grid_witnesses(32)
    with pytest.raises(PipelineError) as info:
        crossbar_or_pos(G, A, B, X, desk_for(32, strict=True), P, Q)
    assert info.value.stage in ("slicing", "chain")


def test_bad_terminals_rejected():
    G, A, B, X = make_pendant_grid(8)
    with pytest.raises(ValueError):
        crossbar_or_pos(G, A, B[:-1], X, desk())
    with pytest.raises(ValueError):
        crossbar_or_pos(G, A, B, A, desk())


# certificates

def _corrupt(cert, fn):
    c = copy.deepcopy(cert)
    fn(c.body)
    return c


@pytest.mark.parametrize("fn,clause", [
    (lambda b: b["minor"]["vertices"][0][1].pop(), "minor-(ii)"),
    (lambda b: b["minor"]["vertices"][1][1].extend(b["minor"]["vertices"][0][1]), "minor-(i)"),
    (lambda b: b["connectors"][0][0].pop(), "connector-ends"),
    (lambda b: b["clusters"][0].pop(), "nails"),
    (lambda b: b["A"][0].__setitem__(0, b["B"][0][0]), "nails"),
    (lambda b: b.pop("clusters"), "schema"),
])
def test_corruption_is_detected(pendant32, fn, clause):
    G, *_, res = pendant32
    rep = validate_certificate(_corrupt(res.certificate, fn), G)
    assert not rep.ok and clause in rep.clauses()


def test_corrupt_crossbar_detected():
    G, A, B, X, P, Q = make_path_bundle(8, cross_links=3, seed=1)
    cert = crossbar_or_pos(G, A, B, X, desk(D=2), P, Q).certificate
    bad = _corrupt(cert, lambda b: b["P"][0].pop())
    assert not validate_certificate(bad, G).ok


def test_certificate_json_roundtrip(pendant32):
    G, *_, res = pendant32
    data = json.loads(json.dumps(res.certificate.to_json()))
    assert data["schema_version"] == SCHEMA_VERSION
    assert validate_certificate(Certificate.from_json(data), G).ok
    with pytest.raises(ValueError):
        Certificate.from_json({**data, "schema_version": 99})
    with pytest.raises(ValueError):
        Certificate.from_json({**data, "kind": "grid"})
