"""Prompt assembly and rendering.

A rendered prompt is a deterministic function of its PromptBundle: six
labeled segments in a fixed order (ROLE, COURSE CONTEXT, HISTORY, QUESTION,
CONSTRAINTS, CUSTOM). The exact sentences below are part of this package's
contract; tests assert them verbatim.

Token budgeting uses a chars/4 estimate. When a render would exceed the
budget, course-context excerpts are trimmed from the last one backwards until
it fits. The question, history and constraint segments are never touched; if
the budget cannot be met with every excerpt gone, rendering fails.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Optional, Sequence, Tuple

from .domain import DetailLevel, Draft, RepromptOptions, StudentPost
from .errors import BudgetImpossible, EmptyQuestion, NoPriorDraft

if TYPE_CHECKING:
    from .config import CourseConfig

GUIDANCE_DIRECTIVE = "Guide the student toward a solution; do not provide the complete answer."
CODE_FORBIDDEN_SENTENCE = "Do not include code in your response."
CODE_ALLOWED_SENTENCE = "You may include short code examples where they help."
DETAIL_SENTENCES = {
    DetailLevel.CONCISE: "Keep the response brief.",
    DetailLevel.STANDARD: "Use a moderate level of detail.",
    DetailLevel.DETAILED: "Explain step by step in detail.",
}

SEGMENT_LABELS = ("ROLE", "COURSE CONTEXT", "HISTORY", "QUESTION", "CONSTRAINTS", "CUSTOM")

DEFAULT_HISTORY_WINDOW = 3


def estimate_tokens(text: str) -> int:
    """chars/4, rounded up. Deterministic and model-agnostic on purpose."""
    return (len(text) + 3) // 4


def system_role_text(course_id: str) -> str:
    return (
        f"You are an objective teaching assistant for {course_id}, an undergraduate "
        "Computer Science course, answering student questions on the course discussion forum.\n"
        f"{GUIDANCE_DIRECTIVE}\n"
        "Write in the calm, supportive tone of a human teaching assistant."
    )


@dataclass(frozen=True)
class PromptBundle:
    """Everything that goes into one prompt, before rendering."""

    system_role: str
    course_context: Tuple[Tuple[str, str], ...]  # (doc_id, excerpt), priority order
    question: Tuple[str, str]  # (title, body)
    history: Tuple[str, ...]  # prior raw outputs, oldest first
    modifiers: RepromptOptions
    token_budget: int


@dataclass(frozen=True)
class PromptRecord:
    """A rendered prompt together with the bundle that produced it."""

    text: str
    bundle: PromptBundle


def build_base_prompt(course: "CourseConfig", post: StudentPost) -> PromptBundle:
    """First-draft bundle: role framing, course documents, the question, defaults."""
    if not post.body.strip():
        raise EmptyQuestion(f"post {post.post_id} has an empty body")
    return PromptBundle(
        system_role=system_role_text(course.course_id),
        course_context=tuple((doc.doc_id, doc.text) for doc in course.documents),
        question=(post.title, post.body),
        history=(),
        modifiers=RepromptOptions(),
        token_budget=course.token_budget,
    )


def apply_reprompt(
    bundle: PromptBundle,
    options: RepromptOptions,
    prior_drafts: Sequence[Draft],
    history_window: int = DEFAULT_HISTORY_WINDOW,
) -> PromptBundle:
    """Re-shape a bundle for regeneration after a reviewer's reprompt."""
    if not prior_drafts:
        raise NoPriorDraft("a reprompt always follows at least one draft")
    if options.preserve_history:
        history = tuple(d.raw_output for d in prior_drafts[-history_window:])
    else:
        history = ()
    return replace(bundle, modifiers=options, history=history)


def render(bundle: PromptBundle) -> str:
    """Serialize the bundle into the labeled-segment prompt text."""
    if not bundle.system_role:
        raise ValueError("bundle.system_role must be non-empty")
    if bundle.token_budget <= 0:
        raise ValueError("token_budget must be positive")
    excerpts = list(bundle.course_context)
    while True:
        text = _assemble(bundle, excerpts)
        overflow = estimate_tokens(text) - bundle.token_budget
        if overflow <= 0:
            return text
        if not excerpts:
            raise BudgetImpossible(
                f"prompt needs {estimate_tokens(text)} tokens with no context left, "
                f"budget is {bundle.token_budget}"
            )
        doc_id, body = excerpts[-1]
        trim = overflow * 4
        if len(body) > trim:
            excerpts[-1] = (doc_id, body[: len(body) - trim])
        else:
            excerpts.pop()


def question_segment(rendered: str) -> Optional[str]:
    """Extract the QUESTION segment from a rendered prompt, or None."""
    marker = "## QUESTION\n"
    start = rendered.find(marker)
    if start < 0:
        return None
    start += len(marker)
    end = rendered.find("\n\n## CONSTRAINTS", start)
    return rendered[start:end] if end >= 0 else rendered[start:]


def _assemble(bundle: PromptBundle, excerpts: Sequence[Tuple[str, str]]) -> str:
    context = "\n\n".join(f"[{doc_id}]\n{body}" for doc_id, body in excerpts)
    history = "\n\n".join(
        f"Previous draft {i}:\n{text}" for i, text in enumerate(bundle.history, start=1)
    )
    title, body = bundle.question
    question = f"Title: {title}\n{body}"
    mods = bundle.modifiers
    constraints = "\n".join(
        (
            CODE_ALLOWED_SENTENCE if mods.code_allowed else CODE_FORBIDDEN_SENTENCE,
            DETAIL_SENTENCES[mods.detail_level],
        )
    )
    custom = (mods.custom_instructions or "").strip()
    segments = (
        ("ROLE", bundle.system_role),
        ("COURSE CONTEXT", context),
        ("HISTORY", history),
        ("QUESTION", question),
        ("CONSTRAINTS", constraints),
        ("CUSTOM", custom),
    )
    return "\n\n".join(
        f"## {label}\n{content}" if content else f"## {label}" for label, content in segments
    )
