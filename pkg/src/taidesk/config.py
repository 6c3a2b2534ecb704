"""Service configuration: courses, reviewers, model endpoint, storage.

The config file is a single JSON tree (see README for the full shape).
Secrets can be overridden from the environment: TAI_LLM_TOKEN replaces the
completion-provider token, TAI_BIND replaces the listen address.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple

from .connectors.forum import ForumCredentials
from .connectors.llm import ModelConfig
from .domain import DEFAULT_MAX_GENERATION_ATTEMPTS

DEFAULT_BIND = "127.0.0.1:8787"
DEFAULT_POLL_INTERVAL_S = 60
DEFAULT_TOKEN_BUDGET = 2048
DEFAULT_HISTORY_WINDOW = 3

ENV_LLM_TOKEN = "TAI_LLM_TOKEN"
ENV_BIND = "TAI_BIND"


@dataclass(frozen=True)
class CourseDocument:
    doc_id: str
    text: str


@dataclass(frozen=True)
class ReviewerIdentity:
    actor_id: str
    display_name: str
    token: str

    def __repr__(self) -> str:  # keep the token out of logs and tracebacks
        return f"ReviewerIdentity(actor_id={self.actor_id!r}, display_name={self.display_name!r})"


@dataclass(frozen=True)
class LLMSettings:
    """How to reach the completion provider. kind is 'mock' or 'http'."""

    kind: str = "mock"
    base_url: str = ""
    api_token: str = ""
    timeout_s: float = 30.0
    max_retries: int = 2

    def __post_init__(self) -> None:
        if self.kind not in ("mock", "http"):
            raise ValueError(f"llm.kind must be 'mock' or 'http', not {self.kind!r}")
        if self.kind == "http" and not self.base_url:
            raise ValueError("llm.base_url is required when llm.kind is 'http'")


@dataclass(frozen=True)
class CourseConfig:
    course_id: str
    forum: ForumCredentials
    documents: Tuple[CourseDocument, ...] = ()
    poll_interval_s: int = DEFAULT_POLL_INTERVAL_S
    model: ModelConfig = field(default_factory=lambda: ModelConfig(model_id="mock-model"))
    token_budget: int = DEFAULT_TOKEN_BUDGET
    history_window: int = DEFAULT_HISTORY_WINDOW

    def __post_init__(self) -> None:
        if not self.course_id:
            raise ValueError("course_id must be non-empty")
        if self.poll_interval_s < 5:
            raise ValueError("poll_interval_s must be at least 5")
        doc_ids = [d.doc_id for d in self.documents]
        if len(doc_ids) != len(set(doc_ids)):
            raise ValueError("document ids must be unique within a course")
        if self.token_budget <= 0:
            raise ValueError("token_budget must be positive")
        if self.history_window <= 0:
            raise ValueError("history_window must be positive")


@dataclass(frozen=True)
class ServiceConfig:
    courses: Tuple[CourseConfig, ...]
    reviewers: Tuple[ReviewerIdentity, ...] = ()
    llm: LLMSettings = field(default_factory=LLMSettings)
    storage_path: Optional[str] = None  # None keeps everything in memory
    bind: str = DEFAULT_BIND
    max_workers: int = 4
    max_generation_attempts: int = DEFAULT_MAX_GENERATION_ATTEMPTS

    def course(self, course_id: str) -> CourseConfig:
        for course in self.courses:
            if course.course_id == course_id:
                return course
        raise KeyError(course_id)

    def secret_values(self) -> Tuple[str, ...]:
        """Every configured secret, for export redaction scans."""
        secrets = [c.forum.api_token for c in self.courses if c.forum.api_token]
        secrets += [r.token for r in self.reviewers if r.token]
        if self.llm.api_token:
            secrets.append(self.llm.api_token)
        return tuple(secrets)


def load_config(path: str | os.PathLike, env: Optional[dict] = None) -> ServiceConfig:
    """Parse a config file, applying environment overrides for secrets."""
    env = os.environ if env is None else env
    raw = json.loads(Path(path).read_text(encoding="utf-8"))

    courses = []
    for c in raw.get("courses", []):
        forum_raw = c.get("forum", {})
        forum = ForumCredentials(
            base_url=forum_raw.get("base_url", ""),
            api_token=forum_raw.get("api_token", ""),
            course_ref=forum_raw.get("course_ref", c["course_id"]),
        )
        model_raw = c.get("model", {})
        model = ModelConfig(
            model_id=model_raw.get("model_id", "mock-model"),
            temperature=float(model_raw.get("temperature", 0.2)),
            max_output_tokens=int(model_raw.get("max_output_tokens", 512)),
        )
        courses.append(
            CourseConfig(
                course_id=c["course_id"],
                forum=forum,
                documents=tuple(
                    CourseDocument(d["doc_id"], d["text"]) for d in c.get("documents", [])
                ),
                poll_interval_s=int(c.get("poll_interval_s", DEFAULT_POLL_INTERVAL_S)),
                model=model,
                token_budget=int(c.get("token_budget", DEFAULT_TOKEN_BUDGET)),
                history_window=int(c.get("history_window", DEFAULT_HISTORY_WINDOW)),
            )
        )

    llm_raw = raw.get("llm", {})
    llm = LLMSettings(
        kind=llm_raw.get("kind", "mock"),
        base_url=llm_raw.get("base_url", ""),
        api_token=env.get(ENV_LLM_TOKEN) or llm_raw.get("api_token", ""),
        timeout_s=float(llm_raw.get("timeout_s", 30.0)),
        max_retries=int(llm_raw.get("max_retries", 2)),
    )

    reviewers = tuple(
        ReviewerIdentity(r["actor_id"], r.get("display_name", r["actor_id"]), r["token"])
        for r in raw.get("reviewers", [])
    )

    return ServiceConfig(
        courses=tuple(courses),
        reviewers=reviewers,
        llm=llm,
        storage_path=raw.get("storage", {}).get("path"),
        bind=env.get(ENV_BIND) or raw.get("bind", DEFAULT_BIND),
        max_workers=int(raw.get("max_workers", 4)),
        max_generation_attempts=int(
            raw.get("max_generation_attempts", DEFAULT_MAX_GENERATION_ATTEMPTS)
        ),
    )
