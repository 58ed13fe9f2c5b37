import json
from fractions import Fraction

import pytest

from interference_dags import build_figure, joint_distribution, load_scm, random_scm, save_scm
from interference_dags.errors import ScmFormatError
from interference_dags.scm_io import dumps_scm, scm_from_dict, scm_to_dict


def test_roundtrip(tmp_path):
    s = random_scm(build_figure("fig12"), 5)
    path = tmp_path / "m.json"
    save_scm(s, path)
    back = load_scm(path)
    assert back.dag == s.dag
    assert joint_distribution(back) == joint_distribution(s)
    assert dumps_scm(back) == dumps_scm(s)


def test_probabilities_are_strings():
    data = scm_to_dict(random_scm(build_figure("fig1"), 1))
    probs = data["nodes"]["A"]["noise"]["probs"]
    assert all(isinstance(p, str) for p in probs)
    assert sum(Fraction(p) for p in probs) == 1


def test_latent_kind_preserved():
    s = random_scm(build_figure("fig7"), 2)
    assert scm_from_dict(json.loads(dumps_scm(s))).dag.kind("U").value == "latent"


@pytest.mark.parametrize(
    "data",
    [
        [],
        {"nodes": {"A": {"domain": [0, 1], "noise": {"values": [0], "probs": [0.5]}}}},
        {"nodes": {"A": {"domain": [0, 1], "noise": {"values": [0], "probs": ["x/y"]}}}},
        {"nodes": {"A": {"noise": {"values": [0], "probs": ["1"]}}}},
        {"nodes": {"A": {"domain": [0], "kind": "ghost"}}},
        {"nodes": {"A": {"domain": [0], "parents": ["B"]}}},
        {"nodes": {"A": {"domain": [0], "mechanism": [[[], 0, 0], [[], 0, 0]]}}},
        {"nodes": {"A": {"domain": [0], "mechanism": [[[1], 0, 0]]}}},
    ],
)
def test_format_errors(data):
    with pytest.raises(ScmFormatError):
        scm_from_dict(data)


def test_bad_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{")
    with pytest.raises(ScmFormatError):
        load_scm(p)
