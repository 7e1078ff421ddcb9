import pytest

TOPICS = [
    ("the telescope", "captured", "a spiral galaxy", "above the southern ridge"),
    ("our database", "indexed", "a million vectors", "before the nightly deadline"),
    ("the orchestra", "rehearsed", "a quiet nocturne", "in the empty concert hall"),
    ("a fishing boat", "weathered", "the winter storm", "beyond the harbor wall"),
    ("the bakery", "delivered", "fresh rye loaves", "to the corner market"),
]

EXTRAS = [
    "sensor logs confirmed the reading twice",
    "nobody expected the follow-up question",
    "the committee postponed its final vote",
    "travelers waited for the delayed express",
    "the garden needed water after the heat",
]


def make_corpus_lines(n=100):
    lines = []
    for i in range(n):
        subject, verb, obj, where = TOPICS[i % len(TOPICS)]
        extra = EXTRAS[(i // len(TOPICS)) % len(EXTRAS)]
        lines.append(f"{subject} {verb} {obj} {where}, entry {i}; {extra}")
    return lines


@pytest.fixture
def corpus_file(tmp_path):
    path = tmp_path / "corpus.txt"
    path.write_text("\n".join(make_corpus_lines()) + "\n", encoding="utf-8")
    return path
