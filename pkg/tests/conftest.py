import json

import pytest

from nice_ed.dataset import load_dataset

ACCEPTANCE_LINES = []


def write_jsonl(path, docs):
    path.write_text("".join(json.dumps(d) + "\n" for d in docs), encoding="utf-8")
    return path


def mention(start, surface, cands, target=False, gold=None, types=()):
    return {
        "start": start,
        "end": start + len(surface),
        "surface": surface,
        "is_target": target,
        "gold": gold,
        "type_predictions": [list(t) for t in types],
        "candidates": [{"entity": e, "prior": p, "input_score": s} for e, p, s in cands],
    }


@pytest.fixture
def make_dataset(tmp_path):
    counter = iter(range(10_000))

    def _make(docs):
        return load_dataset(write_jsonl(tmp_path / f"ds{next(counter)}.jsonl", docs))

    return _make


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
