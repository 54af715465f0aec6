import json
from fractions import Fraction as F

import pytest

from lfembed.analysis import certify_cases, distortion, envelope_check, moduli
from lfembed.formats import (
    block_vector_from_doc,
    block_vector_to_doc,
    dumps,
    embedding_from_doc,
    embedding_to_doc,
    ledger_to_csv,
    num_out,
    read_csv_space,
    read_space,
    report_to_doc,
    space_from_doc,
    space_to_csv,
    space_to_doc,
)
from lfembed.generators import grid, random_tree, uniform_points
from lfembed.glue import build_embedding
from lfembed.metric import InputError


def test_numbers_use_rational_strings():
    assert num_out(F(3, 4)) == "3/4"
    assert num_out(F(5)) == "5"
    assert num_out(0.1) == 0.1
    assert num_out(float("inf")) == "inf"


def test_csv_with_header_and_rationals():
    sp = read_csv_space("t0,a,b\n0,1/2,1\n1/2,0,0.5\n1,0.5,0\n", basepoint="a")
    assert sp.points == ("t0", "a", "b") and sp.basepoint == 1
    assert sp.dist[0][1] == F(1, 2) and sp.dist[1][2] == F(1, 2)


def test_csv_with_row_labels():
    sp = read_csv_space(",x,y\nx,0,3\ny,3,0\n")
    assert sp.points == ("x", "y") and sp.dist[0][1] == 3


@pytest.mark.parametrize("text", ["a,b\n0,1\n", "a,b\n0,x\n1,0\n", "", ",a,b\nq,0,1\nb,1,0\n"])
def test_bad_csv_is_an_input_error(text):
    with pytest.raises(InputError):
        read_csv_space(text)


def test_unknown_basepoint():
    with pytest.raises(InputError):
        read_csv_space("a,b\n0,1\n1,0\n", basepoint="zz")


def test_graph_document():
    doc = {"nodes": ["a", "b", "c"], "edges": [["a", "b", "1/3"], ["b", "c", 2]], "basepoint": "b"}
    sp = space_from_doc(doc)
    assert sp.basepoint == 1 and sp.dist[0][2] == F(7, 3)


def test_graph_document_decimal_weights_are_exact(tmp_path):
    path = tmp_path / "g.json"
    path.write_text('{"nodes": ["a", "b"], "edges": [["a", "b", 0.1]], "basepoint": "a"}')
    assert read_space(path).dist[0][1] == F(1, 10)


@pytest.mark.parametrize("sp", [grid(2, 2), uniform_points(12, 2, seed=1), uniform_points(8, 2, seed=1, norm="l2")])
def test_space_round_trip(sp, tmp_path):
    back = space_from_doc(json.loads(dumps(space_to_doc(sp))))
    assert back.points == sp.points and back.basepoint == sp.basepoint
    assert back.as_mode(sp.exact).dist == sp.dist
    if sp.exact:
        path = tmp_path / "s.csv"
        path.write_text(space_to_csv(sp))
        assert read_space(path, basepoint=str(sp.points[sp.basepoint])).dist == sp.dist


def test_block_vector_round_trip():
    emb = build_embedding(random_tree(12, 3), "random", 4)
    for t in range(12):
        doc = block_vector_to_doc(emb.space, emb.image[t])
        assert block_vector_from_doc(emb.space, json.loads(json.dumps(doc))) == emb.image[t]


@pytest.mark.parametrize("exact", [True, False])
def test_embedding_round_trip(exact):
    sp = random_tree(15, 2) if exact else random_tree(15, 2).as_mode(False)
    emb = build_embedding(sp, "random", 6)
    doc = json.loads(dumps(embedding_to_doc(emb)))
    assert doc["schema_version"] == 1 and list(doc)[:3] == ["schema_version", "kind", "arith"]
    back, problems = embedding_from_doc(doc)
    assert problems == []
    assert back.operators == emb.operators and back.scale == emb.scale
    assert all(back.image[t] == emb.image[t] for t in range(15))
    assert distortion(back) == distortion(emb)


def test_embedding_doc_detects_shell_tampering():
    doc = json.loads(dumps(embedding_to_doc(build_embedding(random_tree(8, 1), "identity"))))
    name = next(iter(doc["shells"]))
    doc["shells"][name]["lambda"] = "1/7"
    _, problems = embedding_from_doc(doc)
    assert problems and name in problems[0]


def test_report_and_ledger_csv():
    emb = build_embedding(grid(2, 1), "half")
    ledger = certify_cases(emb)
    rep = distortion(emb)
    doc = report_to_doc(emb, rep, True, ledger, envelope_check(emb), moduli(emb), full_ledger=True)
    assert list(doc) == ["schema_version", "kind", "arith", "mode", "seed", "scale", "points",
                         "distortion", "cases", "envelope", "moduli"]
    assert doc["moduli"]["empty_set_conventions"] == {"omega": 0, "rho": "inf"}
    assert len(doc["cases"]["ledger"]) == 10
    rows = ledger_to_csv(emb.space, ledger).splitlines()
    assert rows[0] == "t,t_prime,d,image_distance,lip_case,inv_case,lip_ok,inv_ok,ok"
    assert len(rows) == 1 + 10
    json.loads(dumps(doc))
