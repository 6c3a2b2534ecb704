"""Shared builders used across the test suite."""

from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path

from taidesk.config import CourseConfig, CourseDocument, ServiceConfig
from taidesk.connectors.forum import ForumCredentials
from taidesk.connectors.llm import ModelConfig
from taidesk.domain import (
    Draft,
    RepromptOptions,
    StudentPost,
    TokenUsage,
    WorkItem,
)
from taidesk.prompts import PromptBundle, PromptRecord, system_role_text

T0 = datetime(2024, 2, 1, 12, 0, 0, tzinfo=timezone.utc)


def make_post(
    post_id: str = "p1",
    course_id: str = "CS101",
    title: str = "Segfault in linked list",
    body: str = "My delete function crashes on the last node. What should I check?",
    created_at: datetime = T0,
    answered: bool = False,
) -> StudentPost:
    return StudentPost(
        post_id=post_id,
        thread_id=f"t-{post_id}",
        course_id=course_id,
        title=title,
        body=body,
        author_label=f"Student-{post_id}",
        created_at=created_at,
        category="assignments",
        answered=answered,
    )


def make_bundle(
    question: tuple[str, str] = ("Segfault in linked list", "What should I check?"),
    course_id: str = "CS101",
    token_budget: int = 4096,
) -> PromptBundle:
    return PromptBundle(
        system_role=system_role_text(course_id),
        course_context=(),
        question=question,
        history=(),
        modifiers=RepromptOptions(),
        token_budget=token_budget,
    )


def make_draft(
    index: int = 0,
    raw_output: str = "Check the next pointer of the node before the one you remove.",
    created_at: datetime = T0,
) -> Draft:
    bundle = make_bundle()
    return Draft(
        index=index,
        prompt_record=PromptRecord(text=f"prompt-{index}", bundle=bundle),
        raw_output=raw_output,
        model_id="mock-model",
        usage=TokenUsage(100, 25),
        latency_ms=5,
        created_at=created_at,
    )


def make_item(post: StudentPost | None = None, item_id: str = "CS101:p1") -> WorkItem:
    return WorkItem(item_id=item_id, post=post or make_post())


def make_course(
    course_id: str = "CS101",
    forum_dir: str | Path = "",
    documents: tuple[CourseDocument, ...] = (),
    token_budget: int = 4096,
    history_window: int = 3,
) -> CourseConfig:
    return CourseConfig(
        course_id=course_id,
        forum=ForumCredentials(base_url=str(forum_dir), course_ref=course_id),
        documents=documents,
        model=ModelConfig(model_id="mock-model", temperature=0.0),
        token_budget=token_budget,
        history_window=history_window,
    )


def write_posts_file(directory: Path, posts: list[dict]) -> Path:
    path = directory / "posts.json"
    path.write_text(json.dumps(posts, indent=2), encoding="utf-8")
    return path


def post_doc(
    post_id: str,
    course_id: str = "CS101",
    created_at: str = "2024-02-01T12:00:00Z",
    answered: bool = False,
    body: str = "How do I read input until EOF?",
    title: str = "Reading until EOF",
) -> dict:
    return {
        "post_id": post_id,
        "thread_id": f"t-{post_id}",
        "course_id": course_id,
        "title": title,
        "body": body,
        "author_label": f"Student-{post_id}",
        "created_at": created_at,
        "category": "assignments",
        "answered": answered,
    }


def make_service_config(course: CourseConfig, **kwargs) -> ServiceConfig:
    return ServiceConfig(courses=(course,), **kwargs)
