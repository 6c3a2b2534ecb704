"""Core domain types: student posts, work items, drafts, review actions, events.

Everything here is an immutable value. A WorkItem never mutates in place;
state changes go through :func:`taidesk.workflow.transition`, which returns an
updated copy with the version bumped. That keeps items safe to share across
threads and makes optimistic concurrency (compare-and-swap on ``version``) the
only write path.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import Optional, Tuple, Union

DEFAULT_MAX_GENERATION_ATTEMPTS = 3


class WorkItemState(Enum):
    NEW = "NEW"
    GENERATING = "GENERATING"
    AWAITING_REVIEW = "AWAITING_REVIEW"
    APPROVED = "APPROVED"
    POSTED = "POSTED"
    FAILED = "FAILED"
    DISMISSED = "DISMISSED"


class ActionKind(Enum):
    APPROVE = "APPROVE"
    EDIT = "EDIT"
    REPROMPT = "REPROMPT"
    DISMISS = "DISMISS"


class DetailLevel(Enum):
    CONCISE = "CONCISE"
    STANDARD = "STANDARD"
    DETAILED = "DETAILED"


@dataclass(frozen=True)
class StudentPost:
    """An unanswered forum question as pulled from a connector.

    Invariants (enforced where posts enter the system, i.e. by connectors):
    post_id non-empty and unique within a course; body non-empty.
    """

    post_id: str
    thread_id: str
    course_id: str
    title: str
    body: str
    author_label: str
    created_at: datetime
    category: Optional[str] = None
    answered: bool = False


@dataclass(frozen=True)
class RepromptOptions:
    """Reviewer-selected knobs for regenerating a draft."""

    preserve_history: bool = False
    code_allowed: bool = True
    detail_level: DetailLevel = DetailLevel.STANDARD
    custom_instructions: Optional[str] = None

    def __post_init__(self) -> None:
        if self.custom_instructions is not None and not self.custom_instructions.strip():
            raise ValueError("custom_instructions must be non-empty when present")


@dataclass(frozen=True)
class TokenUsage:
    input_tokens: int = 0
    output_tokens: int = 0


@dataclass(frozen=True)
class Draft:
    """One LLM generation, possibly overlaid with a human edit.

    The text that may be published is ``edited_output`` when present, else
    ``raw_output``.
    """

    index: int
    prompt_record: "PromptRecord"
    raw_output: str
    model_id: str
    usage: TokenUsage
    latency_ms: int
    created_at: datetime
    edited_output: Optional[str] = None

    @property
    def published_text(self) -> str:
        return self.edited_output if self.edited_output is not None else self.raw_output


@dataclass(frozen=True)
class EditPayload:
    """A manual rewrite plus its normalized distance from the raw draft."""

    text: str
    distance: float


@dataclass(frozen=True)
class ReviewAction:
    """An auditable human intervention on a work item.

    ``draft_index`` points at the draft the action was taken on; it is None
    only for dismissals of failed items that never produced a draft.
    """

    actor_id: str
    kind: ActionKind
    at: datetime
    draft_index: Optional[int]
    edit_payload: Optional[EditPayload] = None
    reprompt_payload: Optional[RepromptOptions] = None
    note: Optional[str] = None


@dataclass(frozen=True)
class WorkItem:
    """The unit of workflow: a post, its draft history, and its review state.

    ``attempts`` counts generation starts within the current generation cycle
    (a cycle begins at NEW or at a reprompt); retries from FAILED are allowed
    only while attempts stays below the configured maximum. ``version`` rises
    by one on every accepted transition and anchors compare-and-swap writes.
    """

    item_id: str
    post: StudentPost
    state: WorkItemState = WorkItemState.NEW
    drafts: Tuple[Draft, ...] = ()
    actions: Tuple[ReviewAction, ...] = ()
    attempts: int = 0
    version: int = 1

    @property
    def latest_draft(self) -> Optional[Draft]:
        return self.drafts[-1] if self.drafts else None

    @property
    def reprompt_count(self) -> int:
        return sum(1 for a in self.actions if a.kind is ActionKind.REPROMPT)

    @property
    def was_edited(self) -> bool:
        return any(a.kind is ActionKind.EDIT for a in self.actions)


# --- workflow events ---------------------------------------------------------
# Review events carry the reviewer identity and wall-clock time so that
# transition() stays a pure function of (item, event).


@dataclass(frozen=True)
class StartGeneration:
    pass


@dataclass(frozen=True)
class DraftReady:
    draft: Draft


@dataclass(frozen=True)
class GenerationFailed:
    reason: str = ""


@dataclass(frozen=True)
class Approve:
    actor_id: str
    at: datetime
    note: Optional[str] = None


@dataclass(frozen=True)
class Edit:
    actor_id: str
    text: str
    at: datetime
    note: Optional[str] = None


@dataclass(frozen=True)
class Reprompt:
    actor_id: str
    options: RepromptOptions
    at: datetime
    note: Optional[str] = None


@dataclass(frozen=True)
class Dismiss:
    actor_id: str
    at: datetime
    note: Optional[str] = None


@dataclass(frozen=True)
class PublishSucceeded:
    pass


@dataclass(frozen=True)
class PublishFailed:
    reason: str = ""


WorkflowEvent = Union[
    StartGeneration,
    DraftReady,
    GenerationFailed,
    Approve,
    Edit,
    Reprompt,
    Dismiss,
    PublishSucceeded,
    PublishFailed,
]
