import json

import pytest
from fastapi.testclient import TestClient

from kgbench.evaluation import evaluate_partial_1to1
from kgbench.gold import load_gold
from kgbench.graph import EntityKind, load_graph
from kgbench.matching import match_by_label
from kgbench.rdf import parse_ntriples
from kgbench.report import build_aggregates, cells_for_run, emit_dashboard
from kgbench.sampling import sample
from kgbench.service import collect_cards, create_app, init_session


@pytest.fixture()
def session_setup(tmp_path, mini_dir, alpha, beta):
    alignment = match_by_label(alpha, beta, use_alt_labels=True)
    items = sample(alignment.cells, 5, seed=11, matcher="baselineAltLabel", task="alpha-beta")
    iris = {i.correspondence.source for i in items} | {i.correspondence.target for i in items}
    cards = collect_cards(parse_ntriples(mini_dir / "alpha.nt"), alpha, iris)
    cards.update(collect_cards(parse_ntriples(mini_dir / "beta.nt"), beta, iris))
    sessions = tmp_path / "sessions"
    init_session(sessions, "s1", items, cards, confidence=0.95, meta={"note": "mini"})
    return sessions, items


@pytest.fixture()
def client(session_setup):
    sessions, items = session_setup
    return TestClient(create_app(sessions)), items


def judge_all(client, items, annotator, verdict="same"):
    for item in items:
        response = client.post(
            "/sessions/s1/judgments",
            json={"item_id": item.id, "annotator": annotator, "verdict": verdict},
        )
        assert response.status_code == 200
    return response.json()


def test_next_walks_all_items_once(client):
    api, items = client
    seen = []
    while True:
        body = api.get("/sessions/s1/next", params={"annotator": "ann1"}).json()
        if body["done"]:
            break
        seen.append(body["item"]["id"])
        assert body["remaining"] == len(items) - len(seen) + 1
        assert body["source_card"] is not None and body["target_card"] is not None
        api.post(
            "/sessions/s1/judgments",
            json={"item_id": body["item"]["id"], "annotator": "ann1", "verdict": "same"},
        )
    assert seen == [i.id for i in items]
    assert body == {"done": True, "total": len(items), "judged": len(items)}


def test_submit_returns_tallies_and_estimate(client):
    api, items = client
    body = api.post(
        "/sessions/s1/judgments",
        json={"item_id": items[0].id, "annotator": "ann1", "verdict": "same"},
    ).json()
    assert body["ok"] is True and body["revised"] is False
    assert body["tallies"] == {"same": 1, "different": 0, "unsure": 0, "pending": 4}
    estimate = body["estimate"]
    assert estimate["point"] == 1.0 and estimate["n_judged"] == 1
    assert 0.0 <= estimate["interval"][0] <= 1.0 <= estimate["interval"][1] + 1e-12


def test_revision_last_write_wins(client):
    api, items = client
    first = {"item_id": items[0].id, "annotator": "ann1", "verdict": "same"}
    assert api.post("/sessions/s1/judgments", json=first).json()["revised"] is False
    body = api.post(
        "/sessions/s1/judgments", json={**first, "verdict": "different"}
    ).json()
    assert body["revised"] is True
    assert body["tallies"]["different"] == 1 and body["tallies"]["same"] == 0

    summary = api.get("/sessions/s1/summary").json()
    (row,) = [i for i in summary["items"] if i["id"] == items[0].id]
    assert row["resolved"] == "different"
    assert row["judgments"] == {"ann1": "different"}


def test_two_annotators_interleaved_majority(client):
    api, items = client
    target = items[0].id
    api.post("/sessions/s1/judgments", json={"item_id": target, "annotator": "ann1", "verdict": "same"})
    api.post("/sessions/s1/judgments", json={"item_id": target, "annotator": "ann2", "verdict": "different"})
    summary = api.get("/sessions/s1/summary").json()
    (row,) = [i for i in summary["items"] if i["id"] == target]
    assert row["resolved"] == "unsure"  # 1-1 tie
    api.post("/sessions/s1/judgments", json={"item_id": target, "annotator": "ann3", "verdict": "same"})
    summary = api.get("/sessions/s1/summary").json()
    (row,) = [i for i in summary["items"] if i["id"] == target]
    assert row["resolved"] == "same"
    assert summary["annotators"]["ann1"]["judged"] == 1
    assert summary["annotators"]["ann3"]["same"] == 1


def test_summary_math(client):
    api, items = client
    judge_all(api, items[:3], "ann1", "same")
    judge_all(api, items[3:], "ann1", "different")
    summary = api.get("/sessions/s1/summary").json()
    assert summary["total"] == 5
    assert summary["tallies"] == {"same": 3, "different": 2, "unsure": 0, "pending": 0}
    estimate = summary["estimate"]
    assert estimate["point"] == pytest.approx(3 / 5)
    assert estimate["n_judged"] == 5
    assert estimate["max_error"] == pytest.approx(1.9599639845400536 * (0.25 / 5) ** 0.5)


def test_empty_estimate_reported_explicitly(client):
    api, items = client
    summary = api.get("/sessions/s1/summary").json()
    assert summary["estimate"] == {"empty": True, "reason": "no decisive judgments"}
    api.post("/sessions/s1/judgments", json={"item_id": items[0].id, "annotator": "a", "verdict": "unsure"})
    summary = api.get("/sessions/s1/summary").json()
    assert summary["estimate"]["empty"] is True


def test_durability_across_restart(session_setup):
    sessions, items = session_setup
    with TestClient(create_app(sessions)) as api:
        judge_all(api, items, "ann1", "same")
    # a brand-new app over the same directory sees every judgment
    with TestClient(create_app(sessions)) as api:
        summary = api.get("/sessions/s1/summary").json()
        assert summary["tallies"]["same"] == 5
        body = api.get("/sessions/s1/next", params={"annotator": "ann1"}).json()
        assert body["done"] is True

    log = (sessions / "s1" / "judgments.log").read_text(encoding="utf-8")
    assert len(log.splitlines()) == 5
    for line in log.splitlines():
        entry = json.loads(line)
        assert set(entry) == {"item_id", "verdict", "annotator", "timestamp"}


def test_error_codes(client):
    api, items = client
    assert api.get("/sessions/nope/summary").status_code == 404
    assert api.get("/sessions/../s1/summary").status_code == 404
    assert (
        api.post(
            "/sessions/s1/judgments",
            json={"item_id": "not-an-item", "annotator": "a", "verdict": "same"},
        ).status_code
        == 404
    )
    assert (
        api.post(
            "/sessions/s1/judgments",
            json={"item_id": items[0].id, "annotator": "a", "verdict": "maybe"},
        ).status_code
        == 400
    )
    assert (
        api.post(
            "/sessions/s1/judgments",
            json={"item_id": items[0].id, "annotator": "", "verdict": "same"},
        ).status_code
        == 400
    )
    assert api.get("/sessions/s1/next", params={"annotator": ""}).status_code == 400


def test_dashboard_serves_bundle_and_agreement(tmp_path, session_setup, mini_dir, alpha, beta):
    sessions, items = session_setup
    from kgbench.alignment import parse_alignment

    gold = load_gold(mini_dir / "gold.tsv", one_to_one=True)
    alignment = parse_alignment(mini_dir / "align_baselineAltLabel.tsv", "alpha", "beta")
    result = evaluate_partial_1to1(alignment, gold, alpha, beta)
    cells = cells_for_run("baselineAltLabel", "alpha-beta", alignment, result, alpha, beta)
    bundle_dir = tmp_path / "bundle"
    emit_dashboard(cells, build_aggregates(cells), bundle_dir)

    api = TestClient(create_app(sessions, bundle_dir))
    for item in items:
        for annotator in ("ann1", "ann2"):
            api.post(
                "/sessions/s1/judgments",
                json={"item_id": item.id, "annotator": annotator, "verdict": "same"},
            )
    # break perfect agreement so kappa is defined
    api.post(
        "/sessions/s1/judgments",
        json={"item_id": items[0].id, "annotator": "ann2", "verdict": "different"},
    )

    body = api.get("/sessions/s1/dashboard").json()
    assert body["session"] == "s1"
    assert body["meta"] == {"note": "mini"}
    agreement = body["agreement"]
    assert agreement["n_raters"] == 2 and agreement["n_items"] == 5
    assert -1.0 <= agreement["kappa"] <= 1.0
    bundle = body["bundle"]
    assert len(bundle["cells"]) == 9
    assert "baselineAltLabel" in bundle["aggregates"]["matchers"]
    assert bundle["manifest"]["files"]["cells.csv"]["sha256"]


def test_dashboard_rejects_tampered_bundle(tmp_path, session_setup, mini_dir, alpha, beta):
    sessions, _ = session_setup
    from kgbench.alignment import parse_alignment

    gold = load_gold(mini_dir / "gold.tsv", one_to_one=True)
    alignment = parse_alignment(mini_dir / "align_baselineLabel.tsv", "alpha", "beta")
    result = evaluate_partial_1to1(alignment, gold, alpha, beta)
    cells = cells_for_run("baselineLabel", "alpha-beta", alignment, result, alpha, beta)
    bundle_dir = tmp_path / "bundle"
    emit_dashboard(cells, build_aggregates(cells), bundle_dir)
    (bundle_dir / "cells.csv").write_bytes(
        (bundle_dir / "cells.csv").read_bytes().replace(b",TP,", b",FP,", 1)
    )

    api = TestClient(create_app(sessions, bundle_dir), raise_server_exceptions=False)
    assert api.get("/sessions/s1/dashboard").status_code == 500


def test_agreement_needs_two_annotators(client):
    api, items = client
    judge_all(api, items, "ann1")
    body = api.get("/sessions/s1/dashboard").json()
    assert body["agreement"]["kappa"] is None
    assert "two annotators" in body["agreement"]["reason"]


def test_cards_capped_and_informative(mini_dir, alpha):
    kj = "http://kg.example.org/alpha/resource/Kathryn_Janeway"
    cards = collect_cards(parse_ntriples(mini_dir / "alpha.nt"), alpha, {kj})
    card = cards[kj]
    assert card["label"] == "Kathryn Janeway"
    assert card["kind"] == EntityKind.INSTANCE.value
    assert "Catarina" in card["alt_labels"]
    assert card["properties"] and len(card["properties"]) <= 25


def test_cards_property_cap():
    from kgbench.graph import KnowledgeGraph
    from kgbench.rdf import Literal, Triple

    iri = "http://x/busy"
    graph = KnowledgeGraph(
        id="x",
        entities={iri: EntityKind.INSTANCE},
        labels={iri: {"busy"}},
        alt_labels={},
        triple_count=60,
    )
    triples = [Triple(iri, f"http://x/p{i:03d}", Literal(str(i))) for i in range(60)]
    cards = collect_cards(triples, graph, {iri})
    assert len(cards[iri]["properties"]) == 25


def test_init_session_validates_id(tmp_path):
    with pytest.raises(ValueError, match="session id"):
        init_session(tmp_path, "../evil", [], {})
    init_session(tmp_path, "ok-1", [], {})
    with pytest.raises(FileExistsError):
        init_session(tmp_path, "ok-1", [], {})
