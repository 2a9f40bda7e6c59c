from __future__ import annotations

import math

import pytest
from fastapi.testclient import TestClient

from embedding_sidecar.app import create_app
from embedding_sidecar.model import ModelLoadError, SentenceEmbedder


@pytest.fixture(scope="module")
def embedder(tiny_model_dir):
    return SentenceEmbedder(tiny_model_dir)


@pytest.fixture(scope="module")
def client(embedder):
    return TestClient(create_app(embedder, max_batch=16))


def norm(vector):
    return math.sqrt(sum(v * v for v in vector))


def test_identical_texts_identical_vectors(client):
    response = client.post("/embed", json={"texts": ["a", "a"]})
    assert response.status_code == 200
    body = response.json()
    assert len(body["vectors"]) == 2
    assert body["vectors"][0] == body["vectors"][1]


def test_empty_batch(client, embedder):
    response = client.post("/embed", json={"texts": []})
    assert response.status_code == 200
    assert response.json() == {"dim": embedder.dim, "vectors": []}


def test_count_and_order_preserved(client):
    texts = ["rain", "sales fell", "rain", "visitors", "円安"]
    body = client.post("/embed", json={"texts": texts}).json()
    assert len(body["vectors"]) == len(texts)
    assert body["vectors"][0] == body["vectors"][2]
    assert body["vectors"][0] != body["vectors"][1]


def test_vectors_unit_norm(client, embedder):
    texts = ["due to rain sales fell", "prices rose", "客", "x"]
    body = client.post("/embed", json={"texts": texts}).json()
    assert body["dim"] == embedder.dim
    for vector in body["vectors"]:
        assert len(vector) == embedder.dim
        assert abs(norm(vector) - 1.0) < 1e-5


def test_empty_text_zero_vector(client):
    body = client.post("/embed", json={"texts": [""]}).json()
    assert norm(body["vectors"][0]) == 0.0


def test_oversized_batch_refused(client):
    response = client.post("/embed", json={"texts": ["x"] * 17})
    assert response.status_code == 413
    assert "limit" in response.json()["detail"]


def test_malformed_request_refused(client):
    assert client.post("/embed", json={"text": "wrong key"}).status_code == 422
    assert client.post("/embed", json={"texts": "not a list"}).status_code == 422


def test_health(client, embedder, tiny_model_dir):
    body = client.get("/health").json()
    assert body["status"] == "ok"
    assert body["model"] == tiny_model_dir
    assert body["dim"] == embedder.dim


def test_encode_deterministic_across_calls(embedder):
    first = embedder.encode(["due to rain sales fell"])
    second = embedder.encode(["due to rain sales fell"])
    assert first == second


def test_missing_model_dir_fails_fast():
    with pytest.raises(ModelLoadError, match="not found"):
        SentenceEmbedder("./no/such/model")


def test_bad_batch_size_rejected(tiny_model_dir):
    with pytest.raises(ModelLoadError, match="batch size"):
        SentenceEmbedder(tiny_model_dir, batch_size=0)
