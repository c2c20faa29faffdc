import json
import subprocess
import sys

import pytest

from nice_ed.cli import main
from nice_ed.dataset import save_dataset
from nice_ed.linkgraph import write_tsv

from conftest import mention, write_jsonl
from synthetic import coherent_corpus, coherent_world

A1, B1, B2 = 100, 101, 102


@pytest.fixture
def toy(tmp_path):
    """The hand-trace fixture as files."""
    edges = [(1, A1), (2, A1), (2, B1), (3, B1), (1, B2)] + [(p, B2) for p in range(10, 31)]
    (tmp_path / "edges.tsv").write_text("# src\tdst\n" + "".join(f"{s}\t{d}\n" for s, d in edges))
    (tmp_path / "meta.tsv").write_text(f"{A1}\tA one\tPER\n{B1}\tB one\tORG\n{B2}\tB two\t\n")
    write_jsonl(tmp_path / "toy.jsonl", [{"doc_id": "toy", "mentions": [
        mention(0, "A", [(A1, None, 0.4)]),
        mention(5, "B", [(B1, 0.3, 0.2), (B2, 0.7, 0.6)], target=True, gold=B1),
    ]}])
    assert main(["build-graph", str(tmp_path / "edges.tsv"), "--metadata", str(tmp_path / "meta.tsv"),
                 "--out", str(tmp_path / "g.bin"), "--total-pages", "64"]) == 0
    return tmp_path


def test_build_graph_summary(toy, capsys):
    main(["build-graph", str(toy / "edges.tsv"), "--out", str(toy / "g2.bin")])
    out = capsys.readouterr().out
    assert "entities: 3" in out
    assert "total_pages (W): 27" in out


def test_build_graph_malformed(tmp_path, capsys):
    (tmp_path / "e.tsv").write_text("1\t2\n3\tfour\n")
    assert main(["build-graph", str(tmp_path / "e.tsv"), "--out", str(tmp_path / "g.bin")]) != 0
    err = capsys.readouterr().err
    assert "line 2" in err and "[linkgraph]" in err


def test_build_graph_total_pages_too_small(toy, capsys):
    assert main(["build-graph", str(toy / "edges.tsv"), "--out", str(toy / "g3.bin"), "--total-pages", "5"]) != 0
    assert "total_pages" in capsys.readouterr().err


def test_disambiguate_hand_trace(toy, capsys):
    assert main(["disambiguate", str(toy / "toy.jsonl"), "--graph", str(toy / "g.bin"),
                 "--out", str(toy / "p.tsv"), "--trace", str(toy / "trace.tsv")]) == 0
    assert (toy / "p.tsv").read_text() == f"toy\t1\t{B1}\n"
    trace = (toy / "trace.tsv").read_text().splitlines()
    assert trace[0].startswith("doc_id\tstep")
    step2 = trace[2].split("\t")
    assert step2[:4] == ["toy", "2", "1", str(B1)]
    assert float(step2[-1]) == pytest.approx(0.56)


def test_disambiguate_all_mentions_and_weights(toy, capsys):
    main(["disambiguate", str(toy / "toy.jsonl"), "--graph", str(toy / "g.bin"), "--all-mentions",
          "--weights", "0,1,0"])
    assert capsys.readouterr().out == f"toy\t0\t{A1}\ntoy\t1\t{B2}\n"


def test_config_file_and_flag_precedence(toy, capsys):
    (toy / "c.cfg").write_text("weights = 0,1,0\n")
    main(["disambiguate", str(toy / "toy.jsonl"), "--graph", str(toy / "g.bin"), "--config", str(toy / "c.cfg")])
    assert capsys.readouterr().out == f"toy\t1\t{B2}\n"
    main(["disambiguate", str(toy / "toy.jsonl"), "--graph", str(toy / "g.bin"), "--config", str(toy / "c.cfg"),
          "--alpha", "0.7"])
    assert capsys.readouterr().out == f"toy\t1\t{B1}\n"


def test_disambiguate_missing_graph(toy, capsys):
    assert main(["disambiguate", str(toy / "toy.jsonl"), "--graph", str(toy / "nope.bin")]) != 0
    assert "not found" in capsys.readouterr().err


def test_typedict_flag(toy, capsys):
    # a type dictionary that keeps only B2 for a PER prediction flips the answer
    write_jsonl(toy / "typed.jsonl", [{"doc_id": "t", "mentions": [
        mention(0, "A", [(A1, None, 0.4)]),
        mention(5, "B", [(B1, None, 0.2), (B2, None, 0.6)], True, B1, types=[("LOC", 0.99)]),
    ]}])
    (toy / "types.tsv").write_text(f"{B1}\tORG\n{B2}\tLOC\n")
    main(["disambiguate", str(toy / "typed.jsonl"), "--graph", str(toy / "g.bin"),
          "--typedict", str(toy / "types.tsv"), "--filter-threshold", "0.9"])
    assert capsys.readouterr().out == f"t\t1\t{B2}\n"
    main(["disambiguate", str(toy / "typed.jsonl"), "--graph", str(toy / "g.bin"),
          "--typedict", str(toy / "types.tsv"), "--filter-threshold", "0.9", "--no-filter"])
    assert capsys.readouterr().out == f"t\t1\t{B1}\n"


def test_evaluate(tmp_path, capsys):
    write_jsonl(tmp_path / "d.jsonl", [
        {"doc_id": k, "mentions": [mention(0, k, [(g, None, 0.5)], True, g)]} for k, g in (("a", 1), ("b", 2), ("c", 3))
    ])
    (tmp_path / "p.tsv").write_text("a\t0\t1\nb\t0\t7\nc\t0\t-1\n")
    assert main(["evaluate", str(tmp_path / "p.tsv"), str(tmp_path / "d.jsonl"), "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["n_predicted"] == 2
    assert report["micro_f1"] == pytest.approx(0.4)
    main(["evaluate", str(tmp_path / "p.tsv"), str(tmp_path / "d.jsonl")])
    assert "micro F1" in capsys.readouterr().out
    (tmp_path / "q.tsv").write_text("a\t0\t1\nb\t0\t2\nc\t0\t3\n")
    main(["evaluate", str(tmp_path / "q.tsv"), str(tmp_path / "d.jsonl"), "--json"])
    assert json.loads(capsys.readouterr().out)["micro_f1"] == 1.0


@pytest.fixture(scope="module")
def corpus_files(tmp_path_factory):
    d = tmp_path_factory.mktemp("corpus")
    world = coherent_world(n_clusters=5, n_noise=60, seed=3)
    write_tsv(world[0], d / "e.tsv", d / "m.tsv")
    main(["build-graph", str(d / "e.tsv"), "--metadata", str(d / "m.tsv"), "--out", str(d / "g.bin")])
    save_dataset(coherent_corpus(6, seed=4, world=world), d / "dev.jsonl")
    return d


def test_tune(corpus_files, capsys):
    d = corpus_files
    args = ["tune", str(d / "dev.jsonl"), "--graph", str(d / "g.bin"), "--alphas", "0,0.7",
            "--thresholds=-1,1", "--measures", "milne_witten,jaccard", "--aggregations", "max",
            "--table-out", str(d / "sweep.csv"), "--json"]
    assert main(args) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["cells"] == 8 and summary["micro_f1"] == 1.0
    assert summary["alpha"] == 0.7
    rows = (d / "sweep.csv").read_text().splitlines()
    assert rows[0] == "alpha,threshold,measure,aggregation,micro_f1"
    assert len(rows) == 9


def test_analyze_overshadowing(tmp_path, capsys):
    def side(prefix, entries):
        write_jsonl(tmp_path / f"{prefix}.jsonl", [
            {"doc_id": f"{prefix}{i}", "mentions": [mention(0, s, [(g, None, 0.5)], True, g)]}
            for i, (s, g) in enumerate(entries)
        ])
    side("top", [("Rome", 1), ("Paris", 3)])
    side("sh", [("Rome", 2), ("Paris", 4)])
    (tmp_path / "pt.tsv").write_text("top0\t0\t1\ntop1\t0\t3\n")
    (tmp_path / "ps.tsv").write_text("sh0\t0\t1\nsh1\t0\t4\n")
    files = [str(tmp_path / n) for n in ("pt.tsv", "ps.tsv", "top.jsonl", "sh.jsonl")]
    assert main(["analyze-overshadowing", *files, "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["pred(top) != pred(shadow), %"] == 50.0
    assert out["pred(top) is correct, %"] == 100.0
    assert out["pred(shadow) is correct, %"] == 50.0
    main(["analyze-overshadowing", *files, "--label", "NICE"])
    assert "pred(top) != pred(shadow), %" in capsys.readouterr().out


def test_relatedness(toy, capsys):
    main(["relatedness", "--graph", str(toy / "g.bin"), "--e1", str(A1), "--e2", str(B1)])
    assert float(capsys.readouterr().out) == pytest.approx(0.8)
    (toy / "pairs.tsv").write_text(f"{A1}\t{B1}\n{A1}\t{A1}\n{B1}\t999\n")
    main(["relatedness", "--graph", str(toy / "g.bin"), "--measure", "jaccard", "--pairs", str(toy / "pairs.tsv")])
    lines = [l.split("\t") for l in capsys.readouterr().out.splitlines()]
    assert [len(l) for l in lines] == [3, 3, 3]
    assert float(lines[0][2]) == pytest.approx(1 / 3)
    assert float(lines[1][2]) == 1.0 and float(lines[2][2]) == 0.0
    assert main(["relatedness", "--graph", str(toy / "g.bin"), "--e1", "1"]) != 0


def test_module_entry_point_exit_codes(toy):
    ok = subprocess.run([sys.executable, "-m", "nice_ed", "relatedness", "--graph", str(toy / "g.bin"),
                         "--e1", str(A1), "--e2", str(A1)], capture_output=True, text=True)
    assert ok.returncode == 0 and ok.stdout.strip() == "1.0" and ok.stderr == ""
    bad = subprocess.run([sys.executable, "-m", "nice_ed", "evaluate", "missing.tsv", "missing.jsonl"],
                         capture_output=True, text=True)
    assert bad.returncode != 0 and "error" in bad.stderr and bad.stdout == ""
