"""JSON mapping for domain values stored as documents.

The dict shapes here are what lands in the store and in exports, so key
names and timestamp formatting are stable contracts. Work-item payloads
carry course_id and state at the top level so exports can filter without
digging into nested structures.
"""

from __future__ import annotations

from typing import Optional

from .domain import (
    ActionKind,
    DetailLevel,
    Draft,
    EditPayload,
    RepromptOptions,
    ReviewAction,
    StudentPost,
    TokenUsage,
    WorkItem,
    WorkItemState,
)
from .prompts import PromptBundle, PromptRecord
from .rfc3339 import format_rfc3339, parse_rfc3339


def post_to_dict(post: StudentPost) -> dict:
    return {
        "post_id": post.post_id,
        "thread_id": post.thread_id,
        "course_id": post.course_id,
        "title": post.title,
        "body": post.body,
        "author_label": post.author_label,
        "created_at": format_rfc3339(post.created_at),
        "category": post.category,
        "answered": post.answered,
    }


def post_from_dict(data: dict) -> StudentPost:
    return StudentPost(
        post_id=data["post_id"],
        thread_id=data["thread_id"],
        course_id=data["course_id"],
        title=data["title"],
        body=data["body"],
        author_label=data["author_label"],
        created_at=parse_rfc3339(data["created_at"]),
        category=data.get("category"),
        answered=bool(data.get("answered", False)),
    )


def reprompt_options_to_dict(options: RepromptOptions) -> dict:
    return {
        "preserve_history": options.preserve_history,
        "code_allowed": options.code_allowed,
        "detail_level": options.detail_level.value,
        "custom_instructions": options.custom_instructions,
    }


def reprompt_options_from_dict(data: dict) -> RepromptOptions:
    return RepromptOptions(
        preserve_history=bool(data.get("preserve_history", False)),
        code_allowed=bool(data.get("code_allowed", True)),
        detail_level=DetailLevel(data.get("detail_level", "STANDARD")),
        custom_instructions=data.get("custom_instructions"),
    )


def bundle_to_dict(bundle: PromptBundle) -> dict:
    return {
        "system_role": bundle.system_role,
        "course_context": [[doc_id, text] for doc_id, text in bundle.course_context],
        "question": [bundle.question[0], bundle.question[1]],
        "history": list(bundle.history),
        "modifiers": reprompt_options_to_dict(bundle.modifiers),
        "token_budget": bundle.token_budget,
    }


def bundle_from_dict(data: dict) -> PromptBundle:
    return PromptBundle(
        system_role=data["system_role"],
        course_context=tuple((d, t) for d, t in data["course_context"]),
        question=(data["question"][0], data["question"][1]),
        history=tuple(data["history"]),
        modifiers=reprompt_options_from_dict(data["modifiers"]),
        token_budget=data["token_budget"],
    )


def draft_to_dict(draft: Draft) -> dict:
    return {
        "index": draft.index,
        "prompt_record": {
            "text": draft.prompt_record.text,
            "bundle": bundle_to_dict(draft.prompt_record.bundle),
        },
        "raw_output": draft.raw_output,
        "edited_output": draft.edited_output,
        "model_id": draft.model_id,
        "token_usage": {
            "input_tokens": draft.usage.input_tokens,
            "output_tokens": draft.usage.output_tokens,
        },
        "latency_ms": draft.latency_ms,
        "created_at": format_rfc3339(draft.created_at),
    }


def draft_from_dict(data: dict) -> Draft:
    usage = data.get("token_usage", {})
    return Draft(
        index=data["index"],
        prompt_record=PromptRecord(
            text=data["prompt_record"]["text"],
            bundle=bundle_from_dict(data["prompt_record"]["bundle"]),
        ),
        raw_output=data["raw_output"],
        edited_output=data.get("edited_output"),
        model_id=data["model_id"],
        usage=TokenUsage(
            input_tokens=usage.get("input_tokens", 0),
            output_tokens=usage.get("output_tokens", 0),
        ),
        latency_ms=data["latency_ms"],
        created_at=parse_rfc3339(data["created_at"]),
    )


def action_to_dict(action: ReviewAction) -> dict:
    edit: Optional[dict] = None
    if action.edit_payload is not None:
        edit = {"text": action.edit_payload.text, "distance": action.edit_payload.distance}
    return {
        "actor_id": action.actor_id,
        "kind": action.kind.value,
        "at": format_rfc3339(action.at),
        "draft_index": action.draft_index,
        "edit_payload": edit,
        "reprompt_payload": (
            reprompt_options_to_dict(action.reprompt_payload)
            if action.reprompt_payload is not None
            else None
        ),
        "note": action.note,
    }


def action_from_dict(data: dict) -> ReviewAction:
    edit = data.get("edit_payload")
    reprompt = data.get("reprompt_payload")
    return ReviewAction(
        actor_id=data["actor_id"],
        kind=ActionKind(data["kind"]),
        at=parse_rfc3339(data["at"]),
        draft_index=data.get("draft_index"),
        edit_payload=EditPayload(edit["text"], edit["distance"]) if edit else None,
        reprompt_payload=reprompt_options_from_dict(reprompt) if reprompt else None,
        note=data.get("note"),
    )


def work_item_to_dict(item: WorkItem) -> dict:
    return {
        "item_id": item.item_id,
        "course_id": item.post.course_id,
        "state": item.state.value,
        "attempts": item.attempts,
        "version": item.version,
        "post": post_to_dict(item.post),
        "drafts": [draft_to_dict(d) for d in item.drafts],
        "actions": [action_to_dict(a) for a in item.actions],
    }


def work_item_from_dict(data: dict) -> WorkItem:
    return WorkItem(
        item_id=data["item_id"],
        post=post_from_dict(data["post"]),
        state=WorkItemState(data["state"]),
        drafts=tuple(draft_from_dict(d) for d in data["drafts"]),
        actions=tuple(action_from_dict(a) for a in data["actions"]),
        attempts=data["attempts"],
        version=data["version"],
    )
