import json

import numpy as np
import pytest

import mshine

NODES = "a0\tA\na1\tA\np0\tP\np1\tP\np2\tP\nv0\tV\nv1\tV\nt0\tT\nt1\tT\n"
EDGES = (
    "p0\ta0\tPA\np1\ta0\tPA\np1\ta1\tPA\np2\ta1\tPA\n"
    "p0\tv0\tPV\np1\tv0\tPV\np2\tv1\tPV\n"
    "p0\tt0\tPT\np1\tt1\tPT\np2\tt1\tPT\n"
)


@pytest.fixture
def graph(tmp_path):
    (tmp_path / "n.tsv").write_text(NODES)
    (tmp_path / "e.tsv").write_text(EDGES)
    return tmp_path / "n.tsv", tmp_path / "e.tsv"


def test_schema_selection_counts():
    dblp = [("P", "A"), ("P", "V"), ("P", "T")]
    yelp = [("Ca", "B"), ("Ci", "B"), ("B", "U"), ("U", "U")]
    assert len(mshine.select_for_schema(dblp)) == 6
    assert len(mshine.select_for_schema(yelp)) == 10


def test_decompose():
    douban = [("U", "M"), ("M", "A")]
    assert sorted(mshine.decompose(douban, "U:M:A:M:U")) == [
        "A:MA:M:UM:U",
        "M:MA:A:MA:M",
        "M:UM:U:UM:M",
        "U:UM:M:MA:A",
    ]


def test_select_from_files(graph):
    paths = mshine.select_metapaths(*map(str, graph))
    ids = [p for p, _ in paths]
    assert len(ids) == 6
    assert "A:PA:P:PA:A" in ids


def test_train_export_and_embeddings(graph, tmp_path):
    model = tmp_path / "m.mshn"
    manifest = mshine.train(*graph, model, tmp_path / "train.log", dim=8, epochs=3, seed=4)
    assert manifest["seed"] == 4
    assert manifest["deterministic"] is True
    assert len((tmp_path / "train.log").read_text().splitlines()) == 3

    ids = mshine.metapath_ids(str(model))
    labels, emb = mshine.embeddings(str(model), ids[0])
    assert emb.shape == (9, 8)
    assert labels[0] == "a0"
    assert np.all(np.isfinite(emb))

    files = mshine.export(str(model), str(tmp_path / "emb"))
    assert len(files) == len(ids)
    first = open(files[0]).read().splitlines()
    assert first[0] == "9 8"
    row = np.array(first[1].split()[1:], dtype=float)
    np.testing.assert_allclose(row, emb[0], atol=1e-5)


def test_evaluations(graph, tmp_path):
    model = tmp_path / "m.mshn"
    mshine.train(*graph, model, tmp_path / "train.log", dim=8, epochs=2)
    (tmp_path / "held.tsv").write_text("p2\ta0\tPA\n")
    rep = mshine.eval_link(str(model), *map(str, graph), str(tmp_path / "held.tsv"), "PA", [1, 2])
    assert rep["queries"] == 1
    assert 0.0 <= rep["mrr"] <= 1.0
    (tmp_path / "labels.tsv").write_text("p0\tx\np1\tx\np2\ty\na0\tx\na1\ty\nv0\tx\nv1\ty\n")
    macro, micro = mshine.eval_classify(
        str(model), str(tmp_path / "labels.tsv"), "A:PA:P:PA:A", ratio=0.6, reps=2
    )
    assert 0.0 <= macro <= 1.0 and 0.0 <= micro <= 1.0


def test_errors(graph, tmp_path):
    with pytest.raises(mshine.DataError):
        mshine.embeddings(str(tmp_path / "missing.mshn"), "x")
    with pytest.raises(mshine.DataError):
        mshine.decompose([("P", "A")], "A:V:A")
    assert mshine.main([]) == 1
    assert mshine.main(["select-metapaths", "--nodes", str(graph[0]), "--edges", str(graph[1])]) == 0
