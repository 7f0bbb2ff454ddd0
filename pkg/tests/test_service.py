import threading
import time

import pytest
from fastapi.testclient import TestClient

from elfe.service import MAX_TEXT_BYTES, ServiceSettings, create_app

from texts import INJECTIVITY_HINTED, LIB_DIR


@pytest.fixture()
def client(tmp_path):
    settings = ServiceSettings(
        lib_dirs=(LIB_DIR,),
        timeout=30.0,
        max_concurrent=2,
        static_dir=tmp_path / "nonexistent",
    )
    return TestClient(create_app(settings))


def test_verify_endpoint_full_text(client):
    resp = client.post("/api/verify", json={"text": INJECTIVITY_HINTED})
    assert resp.status_code == 200
    data = resp.json()
    assert data["verified"] is True
    assert any(e.get("tptp") for e in data["statements"])


def test_verify_empty_text(client):
    resp = client.post("/api/verify", json={"text": ""})
    assert resp.status_code == 200
    data = resp.json()
    assert data["verified"] is True and data["statements"] == []


def test_verify_malformed_body(client):
    resp = client.post("/api/verify", json={"nope": 1})
    assert resp.status_code == 400
    resp = client.post(
        "/api/verify",
        content=b"this is not json",
        headers={"content-type": "application/json"},
    )
    assert resp.status_code == 422  # framework-level malformed JSON


def test_verify_oversize_rejected(client):
    resp = client.post("/api/verify", json={"text": "x" * (MAX_TEXT_BYTES + 1)})
    assert resp.status_code == 400


def test_verify_parse_error_is_200_with_report(client):
    resp = client.post("/api/verify", json={"text": "Lemma oops"})
    assert resp.status_code == 200
    data = resp.json()
    assert data["verified"] is False
    assert data["statements"][0]["status"] == "parse_error"


def test_unknown_prover_option(client):
    resp = client.post(
        "/api/verify",
        json={"text": "Lemma: P implies P. Proof: qed.", "options": {"provers": ["nope"]}},
    )
    assert resp.status_code == 400


def test_capacity_limit_returns_503(tmp_path):
    settings = ServiceSettings(
        lib_dirs=(LIB_DIR,), timeout=30.0, max_concurrent=1,
        static_dir=tmp_path / "none",
    )
    app = create_app(settings)
    client = TestClient(app)
    # hold the only slot
    assert settings.verify_slots.acquire(blocking=False)
    try:
        resp = client.post("/api/verify", json={"text": ""})
        assert resp.status_code == 503
    finally:
        settings.verify_slots.release()
    resp = client.post("/api/verify", json={"text": ""})
    assert resp.status_code == 200


def test_libraries_listing(client):
    resp = client.get("/api/libraries")
    assert resp.status_code == 200
    names = {e["name"] for e in resp.json()}
    assert {"sets", "relations", "functions"} <= names
    # every returned source re-parses
    from elfe.lang import parse_document

    for entry in resp.json():
        parse_document(entry["source"], name=entry["name"], search_path=(LIB_DIR,))


def test_unknown_api_404(client):
    assert client.get("/api/unknown").status_code == 404


def test_static_fallback_page(client):
    resp = client.get("/")
    assert resp.status_code == 200
    assert "elfe" in resp.text


def test_static_serving_and_spa_fallback(tmp_path):
    dist = tmp_path / "dist"
    dist.mkdir()
    (dist / "index.html").write_text("<html><body>editor</body></html>")
    (dist / "app.js").write_text("console.log(1)")
    settings = ServiceSettings(lib_dirs=(LIB_DIR,), static_dir=dist)
    client = TestClient(create_app(settings))
    assert "editor" in client.get("/").text
    js = client.get("/app.js")
    assert js.status_code == 200
    assert js.headers["content-type"].startswith("text/javascript")
    # unknown path falls back to the app shell
    assert "editor" in client.get("/some/client/route").text


def test_report_identical_to_cli_json(client, tmp_path):
    from elfe.cli import main

    src = tmp_path / "p.elfe"
    text = "Lemma: P implies P. Proof: Assume P. Hence P. qed.\n"
    src.write_text(text)
    resp = client.post("/api/verify", json={"text": text, "options": {"timeout": 10}})
    api = resp.json()

    import io
    import json as jsonlib
    from contextlib import redirect_stdout

    buf = io.StringIO()
    with redirect_stdout(buf):
        main([str(src), "--json", "--timeout", "10", "--provers",
              "resolution,modelfinder"])
    cli = jsonlib.loads(buf.getvalue())
    for d in (api, cli):
        d.pop("elapsedMs")
        for e in d["statements"]:
            e.pop("ms")
    assert api == cli
