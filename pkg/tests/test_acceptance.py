"""The acceptance gate: one test per primary criterion, each printing a
pass line and enforcing its stated tolerance and runtime bound.

Run with `pytest tests/test_acceptance.py -v -s` to see the pass lines.
"""

import io
import json
import random
import threading
import time
from datetime import timedelta
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from taidesk.analytics import AGREEMENT_LABELS, FREQUENCY_LABELS, likert_aggregate
from taidesk.api import create_app
from taidesk.config import ReviewerIdentity
from taidesk.connectors.forum import FileForum, ForumCredentials
from taidesk.connectors.llm import MockCompletionClient
from taidesk.domain import ActionKind, WorkItemState
from taidesk.errors import StaleVersion
from taidesk.replay import run_replay
from taidesk.rfc3339 import EPOCH
from taidesk.service import Service
from taidesk.store import ExportFilter, MemoryStore, RecordKind
from taidesk.workflow import final_text

from .helpers import T0, make_course, make_service_config, post_doc, write_posts_file
from .machine import EVENT_KINDS, apply_kind, fresh_item
from .oracles import scan_filter
from .prompt_props import check_random_bundles
from .test_workflow import enumerate_and_compare, test_every_state_event_pair_matches_oracle

FIXTURE = Path(__file__).resolve().parents[1] / "fixtures" / "acceptance"

PASS = "ACCEPTANCE PASS"


def report(name: str, elapsed: float, bound: float) -> None:
    print(f"{PASS}: {name} ({elapsed:.2f}s < {bound:.0f}s)")


# --- 1. Likert golden tables ---------------------------------------------------------


def test_likert_golden_tables():
    started = time.perf_counter()
    golden = [
        ("q3", AGREEMENT_LABELS, (0, 1, 0, 3, 0), ("0.0", "25.0", "0.0", "75.0", "0.0")),
        ("q4", AGREEMENT_LABELS, (0, 0, 0, 4, 0), ("0.0", "0.0", "0.0", "100.0", "0.0")),
        ("q5", AGREEMENT_LABELS, (0, 0, 1, 3, 0), ("0.0", "0.0", "25.0", "75.0", "0.0")),
        ("q6", AGREEMENT_LABELS, (0, 0, 1, 3, 0), ("0.0", "0.0", "25.0", "75.0", "0.0")),
        ("q7", FREQUENCY_LABELS, (0, 1, 2, 1, 0), ("0.0", "25.0", "50.0", "25.0", "0.0")),
        ("q11", AGREEMENT_LABELS, (0, 0, 0, 3, 1), ("0.0", "0.0", "0.0", "75.0", "25.0")),
    ]
    for question, labels, counts, expected in golden:
        responses = [label for label, n in zip(labels, counts) for _ in range(n)]
        table = likert_aggregate(question, labels, responses)
        assert table.counts == counts, question
        # exact string match at one decimal place
        assert table.percent_strings == expected, question
        assert table.total == 4
    # spot checks called out individually: 100.0 somewhat agree, 75/25 split
    assert likert_aggregate("q4", AGREEMENT_LABELS, ["Somewhat Agree"] * 4).percent_strings[
        3
    ] == "100.0"
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    report("likert golden tables (six tables, exact one-decimal strings)", elapsed, 1.0)


# --- 2. human-in-the-loop safety -------------------------------------------------------


def test_safety_walks_and_exhaustive_transition_relation():
    started = time.perf_counter()

    # brute-force agreement with the declared transition table: every
    # (state, event) pair, then all reachable prefixes of length <= 5 with
    # every event attempted at each prefix
    test_every_state_event_pair_matches_oracle()
    accepted, rejected = enumerate_and_compare(max_depth=5)
    assert accepted > 0 and rejected > 0

    # >= 10,000 randomized walks of length <= 12: POSTED implies a prior APPROVE
    rng = random.Random(0x5AFE)
    walks = 10_000
    posted_seen = 0
    for _ in range(walks):
        item = fresh_item()
        length = rng.randint(1, 12)
        for step in range(length):
            kind = rng.choice(EVENT_KINDS)
            try:
                item = apply_kind(item, kind, step)
            except Exception:
                continue
            if item.state in (WorkItemState.APPROVED, WorkItemState.POSTED):
                approvals = [a for a in item.actions if a.kind is ActionKind.APPROVE]
                assert approvals, "reached an approved state without an APPROVE action"
                assert all(a.actor_id for a in approvals)
            if item.state is WorkItemState.POSTED:
                posted_seen += 1
    assert posted_seen > 0, "walks never exercised the POSTED state"

    elapsed = time.perf_counter() - started
    assert elapsed < 30.0
    report(
        f"state-machine safety ({walks} walks, exhaustive depth-5 enumeration, "
        f"{accepted} accepted / {rejected} rejected transitions)",
        elapsed,
        30.0,
    )


# --- 3. end-to-end replay ----------------------------------------------------------------


def test_end_to_end_replay_fixture():
    started = time.perf_counter()
    result = run_replay(FIXTURE, FIXTURE / "script.json")

    assert len(result.answers) == 19
    by_thread = {a["thread_id"]: a["text"] for a in result.answers}
    posted = [i for i in result.items if i.state is WorkItemState.POSTED]
    assert len(posted) == 19
    for item in posted:
        assert by_thread[item.post.thread_id] == final_text(item)  # byte-identical

    summary = result.summary
    assert summary.items_total == 20
    assert summary.approved_unedited == 14
    assert summary.edited == 5
    assert summary.dismissed == 1
    assert summary.reprompt_histogram == {0: 16, 1: 4}
    assert summary.mean_drafts_per_item == pytest.approx(1.2)

    # mean edit distance against an independent recomputation
    from .oracles import levenshtein_ref

    distances = []
    for item in result.items:
        for draft in item.drafts:
            if draft.edited_output is not None:
                a, b = draft.raw_output, draft.edited_output
                distances.append(levenshtein_ref(a, b) / max(len(a), len(b)))
    assert len(distances) == 5
    assert summary.mean_edit_distance == pytest.approx(sum(distances) / 5)

    elapsed = time.perf_counter() - started
    assert elapsed < 10.0
    report("end-to-end replay (19 answers byte-identical, summary counts)", elapsed, 10.0)


# --- 4. prompt invariants -------------------------------------------------------------------


def test_prompt_invariants_randomized():
    started = time.perf_counter()
    cases = 1_000
    stats = check_random_bundles(n_cases=cases, seed=0xBADA55)
    assert stats["rendered"] + stats["budget_impossible"] == cases
    assert stats["rendered"] > 0
    assert stats["truncated"] > 0  # budget pressure was actually exercised
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0
    report(
        f"prompt invariants ({cases} random bundles, {stats['truncated']} truncated, "
        f"{stats['budget_impossible']} impossible budgets)",
        elapsed,
        10.0,
    )


# --- 5. concurrency ---------------------------------------------------------------------


def test_concurrent_reviewers_and_cas_writers(tmp_path):
    started = time.perf_counter()

    # (a) two reviewers, conflicting approve/edit on the same version over HTTP
    forum_dir = tmp_path / "forum"
    forum_dir.mkdir()
    write_posts_file(forum_dir, [post_doc("p1")])
    course = make_course(forum_dir=forum_dir)
    reviewers = (
        ReviewerIdentity("ta-ada", "Ada", "token-ada"),
        ReviewerIdentity("ta-bob", "Bob", "token-bob"),
    )
    service = Service(
        make_service_config(course, reviewers=reviewers),
        MemoryStore(),
        llm=MockCompletionClient(),
        forums={course.course_id: FileForum(forum_dir)},
        mode="sync",
    )
    with TestClient(create_app(service, reviewers)) as client:
        auth_ada = {"Authorization": "Bearer token-ada"}
        client.post("/api/sync?course_id=CS101", headers=auth_ada)
        entry = client.get("/api/queue?course_id=CS101", headers=auth_ada).json()["items"][0]
        statuses = []
        barrier = threading.Barrier(2)

        def approve():
            barrier.wait()
            r = client.post(
                f"/api/items/{entry['item_id']}/approve",
                headers={"Authorization": "Bearer token-ada", "If-Match": str(entry["version"])},
            )
            statuses.append(r.status_code)

        def edit():
            barrier.wait()
            r = client.post(
                f"/api/items/{entry['item_id']}/edit",
                json={"text": "competing rewrite"},
                headers={"Authorization": "Bearer token-bob", "If-Match": str(entry["version"])},
            )
            statuses.append(r.status_code)

        threads = [threading.Thread(target=approve), threading.Thread(target=edit)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert sum(1 for s in statuses if 200 <= s < 300) == 1, statuses
        assert sum(1 for s in statuses if s == 409) == 1, statuses

    # (b) 100 concurrent CAS writers on one key -> exactly 100 increments
    store = MemoryStore()
    store.save(RecordKind.METRICS_EVENT, "counter", {"n": 0}, 0)
    successes = []
    start_gate = threading.Barrier(100)

    def writer():
        start_gate.wait()
        while True:
            current = store.get(RecordKind.METRICS_EVENT, "counter")
            try:
                store.save(
                    RecordKind.METRICS_EVENT,
                    "counter",
                    {"n": current.payload["n"] + 1},
                    current.version,
                )
                successes.append(1)
                return
            except StaleVersion:
                continue

    writers = [threading.Thread(target=writer) for _ in range(100)]
    for t in writers:
        t.start()
    for t in writers:
        t.join()
    final = store.get(RecordKind.METRICS_EVENT, "counter")
    assert sum(successes) == 100
    assert final.version == 101
    assert final.payload["n"] == 100

    elapsed = time.perf_counter() - started
    report("concurrency (single-winner review conflict, 100 CAS increments)", elapsed, 30.0)


# --- 6. persistence round-trip ------------------------------------------------------------


def test_persistence_roundtrip_and_filters():
    started = time.perf_counter()
    store = MemoryStore()
    rng = random.Random(0xD0C5)
    courses = ["CS180", "CS240", "CS251"]
    states = ["NEW", "GENERATING", "AWAITING_REVIEW", "APPROVED", "POSTED", "DISMISSED"]
    for i in range(700):
        ts = (T0 + timedelta(minutes=rng.randint(0, 5000))).strftime("%Y-%m-%dT%H:%M:%SZ")
        store.save(
            RecordKind.WORK_ITEM,
            f"item-{i:04d}",
            {
                "item_id": f"item-{i:04d}",
                "course_id": rng.choice(courses),
                "state": rng.choice(states),
                "post": {"created_at": ts},
                "drafts": [],
                "actions": [],
            },
            0,
        )
    for i in range(200):
        ts = (T0 + timedelta(minutes=rng.randint(0, 5000))).strftime("%Y-%m-%dT%H:%M:%SZ")
        store.save(
            RecordKind.METRICS_EVENT,
            f"ev-{i:04d}",
            {"event": "published", "course_id": rng.choice(courses), "at": ts},
            0,
        )
    for i in range(100):
        store.save(
            RecordKind.SURVEY_RESPONSE,
            f"sr-{i:04d}",
            {"question_id": f"q{rng.randint(1, 11)}", "label": "Neutral"},
            0,
        )
    assert len(store.records()) == 1_000

    # export -> import -> export is byte-identical
    first = io.StringIO()
    store.export_json(first)
    fresh = MemoryStore()
    fresh.import_lines(first.getvalue().splitlines())
    second = io.StringIO()
    fresh.export_json(second)
    assert first.getvalue() == second.getvalue()

    # filtered export equals the brute-force scan oracle
    everything = [json.loads(line) for line in store.export_lines()]
    from taidesk.rfc3339 import parse_rfc3339

    mid = (T0 + timedelta(minutes=2500)).strftime("%Y-%m-%dT%H:%M:%SZ")
    filters = [
        ({"course_id": "CS180"}, ExportFilter(course_id="CS180")),
        ({"kind": "WORK_ITEM"}, ExportFilter(kind=RecordKind.WORK_ITEM)),
        ({"state": "POSTED"}, ExportFilter(state="POSTED")),
        (
            {"course_id": "CS240", "state": "APPROVED", "kind": "WORK_ITEM"},
            ExportFilter(course_id="CS240", state="APPROVED", kind=RecordKind.WORK_ITEM),
        ),
        ({"since": mid}, ExportFilter(since=parse_rfc3339(mid))),
        (
            {"course_id": "CS251", "until": mid},
            ExportFilter(course_id="CS251", until=parse_rfc3339(mid)),
        ),
    ]
    for oracle_kwargs, flt in filters:
        got = [json.loads(line) for line in store.export_lines(flt)]
        assert got == scan_filter(everything, **oracle_kwargs), oracle_kwargs

    elapsed = time.perf_counter() - started
    report("persistence round-trip (1,000 records, byte-identical, filter oracle)", elapsed, 30.0)


# --- 7. idempotent publish ---------------------------------------------------------------


def test_idempotent_publish_after_transport_failure(tmp_path):
    started = time.perf_counter()
    forum_dir = tmp_path / "forum"
    forum_dir.mkdir()
    write_posts_file(forum_dir, [post_doc("p1")])
    course = make_course(forum_dir=forum_dir)
    forum = FileForum(forum_dir)
    service = Service(
        make_service_config(course),
        MemoryStore(),
        llm=MockCompletionClient(),
        forums={course.course_id: forum},
        mode="sync",
    )
    item_id = service.poll_cycle(course)[0]
    item = service.get_item(item_id)

    forum.fail_posts_after_write = 1  # answer lands, acknowledgement is lost
    service.handle_review_action(
        item_id, kind=ActionKind.APPROVE, actor_id="ta-1", expected_version=item.version
    )
    assert service.get_item(item_id).state is WorkItemState.APPROVED

    service.publish(item_id)  # the retry
    assert service.get_item(item_id).state is WorkItemState.POSTED
    answers = forum.answers()
    assert len(answers) == 1
    assert answers[0]["text"] == final_text(service.get_item(item_id))

    elapsed = time.perf_counter() - started
    report("idempotent publish (forced transport failure, retry, one answer)", elapsed, 30.0)
