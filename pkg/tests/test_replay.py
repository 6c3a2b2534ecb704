import json
from pathlib import Path

import pytest

from taidesk.domain import ActionKind, WorkItemState
from taidesk.errors import ParseError
from taidesk.replay import load_script, run_replay
from taidesk.workflow import final_text

FIXTURE = Path(__file__).resolve().parents[1] / "fixtures" / "acceptance"
SCRIPT = FIXTURE / "script.json"


def test_load_script_shape():
    steps = load_script(SCRIPT)
    assert len(steps) == 29
    assert steps[0].kind is ActionKind.APPROVE
    kinds = [s.kind for s in steps]
    assert kinds.count(ActionKind.APPROVE) == 19
    assert kinds.count(ActionKind.EDIT) == 5
    assert kinds.count(ActionKind.REPROMPT) == 4
    assert kinds.count(ActionKind.DISMISS) == 1


def test_load_script_rejects_garbage(tmp_path):
    bad = tmp_path / "script.json"
    bad.write_text('[{"action": "approve"}]', encoding="utf-8")
    with pytest.raises(ParseError):
        load_script(bad)
    bad.write_text('{"not": "a list"}', encoding="utf-8")
    with pytest.raises(ParseError):
        load_script(bad)


def test_replay_end_to_end_counts():
    result = run_replay(FIXTURE, SCRIPT)
    summary = result.summary
    assert summary.items_total == 20
    assert summary.approved_unedited == 14
    assert summary.edited == 5
    assert summary.dismissed == 1
    assert summary.pending == 0
    assert summary.reprompt_histogram == {0: 16, 1: 4}
    assert summary.mean_drafts_per_item == pytest.approx(1.2)
    assert len(result.answers) == 19


def test_replay_answers_byte_identical_to_final_text():
    result = run_replay(FIXTURE, SCRIPT)
    by_thread = {a["thread_id"]: a["text"] for a in result.answers}
    posted = [i for i in result.items if i.state is WorkItemState.POSTED]
    assert len(posted) == 19
    for item in posted:
        assert by_thread[item.post.thread_id] == final_text(item)


def test_replay_is_deterministic():
    first = run_replay(FIXTURE, SCRIPT)
    second = run_replay(FIXTURE, SCRIPT)
    assert first.report == second.report
    assert first.answers == second.answers


def test_replay_does_not_touch_fixture(tmp_path):
    before = (FIXTURE / "posts.json").read_bytes()
    run_replay(FIXTURE, SCRIPT)
    assert (FIXTURE / "posts.json").read_bytes() == before
    assert not (FIXTURE / "answers.ndjson").exists()


def test_replay_store_roundtrips_through_export(tmp_path):
    import io

    from taidesk.analytics import intervention_summary
    from taidesk.store import MemoryStore

    result = run_replay(FIXTURE, SCRIPT)
    out = io.StringIO()
    result.store.export_json(out)

    fresh = MemoryStore()
    fresh.import_lines(out.getvalue().splitlines())
    assert intervention_summary(fresh, "CS180") == result.summary
