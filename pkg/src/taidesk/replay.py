"""Deterministic end-to-end replay of a posts fixture plus a scripted review.

A replay stands up the whole pipeline against the file-backed forum and the
mock completion client, runs one poll cycle, applies the scripted reviewer
decisions in order, and reports the resulting intervention summary. With a
fixed logical clock the entire run is reproducible byte for byte.

Script file: a JSON array of steps, each
``{"post_id": ..., "action": "approve"|"edit"|"reprompt"|"dismiss",
"payload": {...}, "actor_id": ...?}``. Edit payloads carry {"text": ...};
reprompt payloads carry {preserve_history, code_allowed, detail_level,
custom_instructions}.

The fixture directory holds ``posts.json`` (the forum fixture) and may hold
``course.json`` overriding course settings ({course_id, documents,
token_budget, history_window}).
"""

from __future__ import annotations

import json
import shutil
import tempfile
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import List, Optional

from .analytics import InterventionSummary, format_summary, intervention_summary
from .config import CourseConfig, CourseDocument, ServiceConfig
from .connectors.forum import POSTS_FILE, FileForum, ForumCredentials
from .connectors.llm import MockCompletionClient, ModelConfig
from .domain import ActionKind, DetailLevel, RepromptOptions, WorkItem
from .errors import ParseError
from .service import Service
from .store import MemoryStore

DEFAULT_ACTOR = "reviewer"

_ACTION_KINDS = {
    "approve": ActionKind.APPROVE,
    "edit": ActionKind.EDIT,
    "reprompt": ActionKind.REPROMPT,
    "dismiss": ActionKind.DISMISS,
}


class LogicalClock:
    """Monotonic fake clock: a fixed start plus one second per reading."""

    def __init__(self, start: Optional[datetime] = None) -> None:
        self._now = start or datetime(2024, 1, 15, tzinfo=timezone.utc)

    def __call__(self) -> datetime:
        self._now += timedelta(seconds=1)
        return self._now


@dataclass(frozen=True)
class ScriptStep:
    post_id: str
    kind: ActionKind
    payload: dict
    actor_id: str


@dataclass
class ReplayResult:
    summary: InterventionSummary
    answers: List[dict]
    items: List[WorkItem]
    store: MemoryStore
    report: str


def load_script(path: str | Path) -> List[ScriptStep]:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read script {path}: {exc}") from exc
    if not isinstance(raw, list):
        raise ParseError("script must be a JSON array of steps")
    steps = []
    for i, step in enumerate(raw):
        try:
            kind = _ACTION_KINDS[step["action"]]
            steps.append(
                ScriptStep(
                    post_id=step["post_id"],
                    kind=kind,
                    payload=step.get("payload") or {},
                    actor_id=step.get("actor_id", DEFAULT_ACTOR),
                )
            )
        except KeyError as exc:
            raise ParseError(f"script step {i}: missing or bad field {exc}") from exc
    return steps


def _load_course(fixture_dir: Path) -> CourseConfig:
    course_path = fixture_dir / "course.json"
    overrides = {}
    if course_path.exists():
        overrides = json.loads(course_path.read_text(encoding="utf-8"))
    course_id = overrides.get("course_id")
    if course_id is None:
        posts = json.loads((fixture_dir / POSTS_FILE).read_text(encoding="utf-8"))
        if not posts:
            raise ParseError(f"{fixture_dir / POSTS_FILE} holds no posts")
        course_id = posts[0]["course_id"]
    return CourseConfig(
        course_id=course_id,
        forum=ForumCredentials(base_url=str(fixture_dir), course_ref=course_id),
        documents=tuple(
            CourseDocument(d["doc_id"], d["text"]) for d in overrides.get("documents", [])
        ),
        model=ModelConfig(model_id="mock-model", temperature=0.0),
        token_budget=int(overrides.get("token_budget", 4096)),
        history_window=int(overrides.get("history_window", 3)),
    )


def run_replay(
    fixture_dir: str | Path,
    script_path: str | Path,
    *,
    work_dir: Optional[str | Path] = None,
) -> ReplayResult:
    """Run the scripted session; the fixture itself is never modified."""
    fixture_dir = Path(fixture_dir)
    steps = load_script(script_path)

    cleanup: Optional[tempfile.TemporaryDirectory] = None
    if work_dir is None:
        cleanup = tempfile.TemporaryDirectory(prefix="taidesk-replay-")
        work_dir = cleanup.name
    work_dir = Path(work_dir)
    work_dir.mkdir(parents=True, exist_ok=True)
    shutil.copy(fixture_dir / POSTS_FILE, work_dir / POSTS_FILE)
    answers_file = work_dir / "answers.ndjson"
    if answers_file.exists():
        answers_file.unlink()

    try:
        course = _load_course(fixture_dir)
        course = CourseConfig(
            course_id=course.course_id,
            forum=ForumCredentials(base_url=str(work_dir), course_ref=course.course_id),
            documents=course.documents,
            model=course.model,
            token_budget=course.token_budget,
            history_window=course.history_window,
        )
        config = ServiceConfig(courses=(course,))
        clock = LogicalClock()
        store = MemoryStore()
        forum = FileForum(work_dir, clock=clock)
        service = Service(
            config,
            store,
            llm=MockCompletionClient(),
            forums={course.course_id: forum},
            mode="sync",
            clock=clock,
        )

        service.poll_cycle(course)
        for step in steps:
            item_id = f"{course.course_id}:{step.post_id}"
            item = service.get_item(item_id)
            kwargs: dict = {}
            if step.kind is ActionKind.EDIT:
                kwargs["text"] = step.payload["text"]
            elif step.kind is ActionKind.REPROMPT:
                payload = step.payload
                kwargs["options"] = RepromptOptions(
                    preserve_history=bool(payload.get("preserve_history", False)),
                    code_allowed=bool(payload.get("code_allowed", True)),
                    detail_level=DetailLevel(payload.get("detail_level", "STANDARD")),
                    custom_instructions=payload.get("custom_instructions"),
                )
            service.handle_review_action(
                item_id,
                kind=step.kind,
                actor_id=step.actor_id,
                expected_version=item.version,
                note=step.payload.get("note"),
                **kwargs,
            )

        summary = intervention_summary(store, course.course_id)
        answers = forum.answers()
        report = format_summary(summary) + f"\nanswers_posted={len(answers)}"
        return ReplayResult(
            summary=summary,
            answers=answers,
            items=service.list_items(course.course_id),
            store=store,
            report=report,
        )
    finally:
        if cleanup is not None:
            cleanup.cleanup()
