"""End-to-end smoke checks for the Python bindings."""

import json
import math

import pytest

semloss = pytest.importorskip("semloss")

COLOURS = ["red", "blue", "green", "amber", "violet", "teal", "coral", "ivory"]


def write_corpus(path, count=48):
    with open(path, "w") as fh:
        for i in range(count):
            a, b = COLOURS[i % 8], COLOURS[(i + 3) % 8]
            fh.write(
                json.dumps(
                    {
                        "dialogue_id": f"mini-{i}",
                        "turns": [
                            {"speaker": "user", "text": f"{a} {b}"},
                            {"speaker": "agent", "text": f"{b} {a}"},
                        ],
                    }
                )
                + "\n"
            )


def test_tokenize_and_metrics():
    toks = semloss.tokenize("Hello, World")
    assert toks == ["hello", ",", "world"]

    corpus = [["the", "cat", "sat"], ["the", "dog", "ran"]]
    assert semloss.bleu(corpus, corpus) == 1.0
    assert 0.0 < semloss.distinct_n(corpus, 2) <= 1.0

    stats = semloss.bigram_stats(corpus)
    assert stats.average_occurrence() == stats.total / stats.unique()
    assert stats.contains("the", "cat")
    assert semloss.unseen_bigram_fraction([["the", "cat"]], stats) == 0.0
    assert semloss.unseen_bigram_fraction([["cat", "the"]], stats) == 1.0
    assert semloss.word_repeat_fraction([["a", "a", "b"]]) == 0.5


def test_embedding_distance(tmp_path):
    table_path = tmp_path / "vectors.txt"
    table_path.write_text("left 1.0 0.0\nright 0.0 1.0\n")
    table = semloss.EmbeddingTable.load(str(table_path))
    assert table.dim == 2
    assert len(table) == 2
    assert "left" in table and "up" not in table

    d = semloss.semantic_distance(["left"], ["right"], table)
    assert math.isclose(d, math.sqrt(2.0))
    assert semloss.semantic_distance(["left"], ["left"], table) == 0.0


def test_train_and_decode(tmp_path):
    corpus = tmp_path / "corpus.jsonl"
    write_corpus(corpus)

    cfg = semloss.TrainingConfig()
    cfg.alpha = 0.0
    cfg.hidden_size = 8
    cfg.embedding_size = 8
    cfg.batch_size = 16
    cfg.epochs = 2
    cfg.seeds = [1]
    cfg.valid_percent = 20
    cfg.eval_every = 5
    cfg.max_decode_len = 6
    cfg.validate()

    runs = semloss.train(cfg, str(corpus), str(tmp_path / "run"))
    assert len(runs) == 1
    run = runs[0]
    assert not run["diverged"]
    assert run["steps"] > 0
    assert "final_metrics" in run

    model = semloss.ResponseModel(run["checkpoint"])
    assert model.vocab_size > 8

    reply = model.greedy("red blue")
    assert isinstance(reply, str)

    hyps = model.beam("red blue", width=3)
    assert 1 <= len(hyps) <= 3
    scores = [score for _, score in hyps]
    assert scores == sorted(scores, reverse=True)
    assert model.beam("red blue", width=1)[0][0] == reply

    assert model.sample("red blue", seed=7) == model.sample("red blue", seed=7)
