"""Wire contract of the model backend, exercised against `qud mock-serve`."""

import json
import subprocess
import urllib.error
import urllib.request

import pytest


@pytest.fixture(scope="module")
def server(qud_cli):
    proc = subprocess.Popen(
        [qud_cli, "mock-serve", "--port", "0", "--seed", "3"],
        stdout=subprocess.PIPE,
        stderr=subprocess.DEVNULL,
        text=True,
    )
    line = proc.stdout.readline()
    port = int(line.split(" (seed")[0].rsplit(":", 1)[1])
    yield f"http://127.0.0.1:{port}"
    proc.terminate()
    proc.wait(timeout=10)


def post(base, endpoint, body):
    req = urllib.request.Request(
        base + endpoint, data=json.dumps(body).encode(), headers={"Content-Type": "application/json"}
    )
    with urllib.request.urlopen(req, timeout=10) as resp:
        return json.loads(resp.read())


def test_health(server):
    with urllib.request.urlopen(server + "/health", timeout=10) as resp:
        body = json.loads(resp.read())
    assert body["status"] == "ok"
    assert set(body["model_ids"]) == {"anchor", "generator", "reranker", "ner"}


def test_anchor(server):
    body = post(server, "/anchor", {"request_id": "a1", "encoding": "[CLS] x", "n": 6, "answer_index": 4})
    assert body["request_id"] == "a1"
    assert body["anchor_index"] == 3


def test_generate(server):
    prompt = "[A_START] Rain fell. [A_END] [SEP] Rain fell. [SEP] Schools closed."
    body = post(
        server, "/generate", {"request_id": "g1", "prompt": prompt, "num_samples": 3, "top_p": 0.9, "seed": 1}
    )
    assert body["questions"] == [f"What happened after Rain fell.? ({k})" for k in (1, 2, 3)]


def test_rerank_and_ner(server):
    body = post(server, "/rerank", {"request_id": "r1", "question": "Why?", "anchor_text": "a", "answer_text": "b"})
    assert 0.0 <= body["score"] < 1.0
    again = post(server, "/rerank", {"request_id": "r2", "question": "Why?", "anchor_text": "a", "answer_text": "b"})
    assert again["score"] == body["score"]
    ner = post(server, "/ner", {"request_id": "n1", "sentence_index": 2, "tokens": ["Hugo", "hit"]})
    assert ner == {"request_id": "n1", "spans": []}


def test_bad_request(server):
    with pytest.raises(urllib.error.HTTPError) as err:
        post(server, "/generate", {"request_id": "g", "prompt": "p", "num_samples": 0, "top_p": 0.9, "seed": 0})
    assert err.value.code == 400
    assert "error" in json.loads(err.value.read())
