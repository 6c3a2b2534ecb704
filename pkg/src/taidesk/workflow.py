"""The review-workflow state machine.

The safety property the whole service hangs on: the only way to POSTED is
through APPROVED, and APPROVED is only entered by an Approve event, which
appends an APPROVE action to the audit log. No AI text reaches the forum
without a human signing off.

Legal transitions:

    NEW              --StartGeneration-->  GENERATING        (attempts = 1)
    GENERATING       --DraftReady------->  AWAITING_REVIEW
    GENERATING       --GenerationFailed->  FAILED
    FAILED           --StartGeneration-->  GENERATING        (attempts + 1, while < max)
    FAILED           --Dismiss---------->  DISMISSED
    AWAITING_REVIEW  --Approve---------->  APPROVED
    AWAITING_REVIEW  --Edit------------->  AWAITING_REVIEW   (edits latest draft in place)
    AWAITING_REVIEW  --Reprompt--------->  GENERATING        (attempts = 1, new cycle)
    AWAITING_REVIEW  --Dismiss---------->  DISMISSED
    APPROVED         --PublishSucceeded->  POSTED
    APPROVED         --PublishFailed---->  APPROVED          (stays for retry)

Everything else raises IllegalTransition; a retry from FAILED beyond the
attempt budget raises AttemptsExhausted. Rejected events leave the item
untouched; accepted ones return a new item with version + 1.
"""

from __future__ import annotations

from dataclasses import replace

from .domain import (
    DEFAULT_MAX_GENERATION_ATTEMPTS,
    ActionKind,
    Approve,
    Dismiss,
    DraftReady,
    Edit,
    EditPayload,
    GenerationFailed,
    PublishFailed,
    PublishSucceeded,
    Reprompt,
    ReviewAction,
    StartGeneration,
    WorkflowEvent,
    WorkItem,
    WorkItemState,
)
from .edit_distance import normalized_edit_distance
from .errors import AttemptsExhausted, IllegalTransition, NotApproved

_S = WorkItemState


def transition(
    item: WorkItem,
    event: WorkflowEvent,
    *,
    max_attempts: int = DEFAULT_MAX_GENERATION_ATTEMPTS,
) -> WorkItem:
    """Apply one workflow event, returning the updated item or raising."""
    state = item.state

    if isinstance(event, StartGeneration):
        if state is _S.NEW:
            return replace(item, state=_S.GENERATING, attempts=1, version=item.version + 1)
        if state is _S.FAILED:
            if item.attempts >= max_attempts:
                raise AttemptsExhausted(
                    f"{item.item_id}: {item.attempts} generation attempts already used"
                )
            return replace(
                item, state=_S.GENERATING, attempts=item.attempts + 1, version=item.version + 1
            )
        raise IllegalTransition(f"StartGeneration not valid in {state.value}")

    if isinstance(event, DraftReady):
        if state is not _S.GENERATING:
            raise IllegalTransition(f"DraftReady not valid in {state.value}")
        if event.draft.index != len(item.drafts):
            raise IllegalTransition(
                f"draft index {event.draft.index} breaks contiguity (expected {len(item.drafts)})"
            )
        return replace(
            item,
            state=_S.AWAITING_REVIEW,
            drafts=item.drafts + (event.draft,),
            version=item.version + 1,
        )

    if isinstance(event, GenerationFailed):
        if state is not _S.GENERATING:
            raise IllegalTransition(f"GenerationFailed not valid in {state.value}")
        return replace(item, state=_S.FAILED, version=item.version + 1)

    if isinstance(event, Approve):
        if state is not _S.AWAITING_REVIEW:
            raise IllegalTransition(f"Approve not valid in {state.value}")
        action = ReviewAction(
            actor_id=event.actor_id,
            kind=ActionKind.APPROVE,
            at=event.at,
            draft_index=len(item.drafts) - 1,
            note=event.note,
        )
        return replace(
            item, state=_S.APPROVED, actions=item.actions + (action,), version=item.version + 1
        )

    if isinstance(event, Edit):
        if state is not _S.AWAITING_REVIEW:
            raise IllegalTransition(f"Edit not valid in {state.value}")
        latest = item.drafts[-1]
        payload = EditPayload(
            text=event.text,
            distance=normalized_edit_distance(latest.raw_output, event.text),
        )
        action = ReviewAction(
            actor_id=event.actor_id,
            kind=ActionKind.EDIT,
            at=event.at,
            draft_index=latest.index,
            edit_payload=payload,
            note=event.note,
        )
        edited = replace(latest, edited_output=event.text)
        return replace(
            item,
            drafts=item.drafts[:-1] + (edited,),
            actions=item.actions + (action,),
            version=item.version + 1,
        )

    if isinstance(event, Reprompt):
        if state is not _S.AWAITING_REVIEW:
            raise IllegalTransition(f"Reprompt not valid in {state.value}")
        action = ReviewAction(
            actor_id=event.actor_id,
            kind=ActionKind.REPROMPT,
            at=event.at,
            draft_index=len(item.drafts) - 1,
            reprompt_payload=event.options,
            note=event.note,
        )
        return replace(
            item,
            state=_S.GENERATING,
            attempts=1,
            actions=item.actions + (action,),
            version=item.version + 1,
        )

    if isinstance(event, Dismiss):
        if state not in (_S.AWAITING_REVIEW, _S.FAILED):
            raise IllegalTransition(f"Dismiss not valid in {state.value}")
        action = ReviewAction(
            actor_id=event.actor_id,
            kind=ActionKind.DISMISS,
            at=event.at,
            draft_index=len(item.drafts) - 1 if item.drafts else None,
            note=event.note,
        )
        return replace(
            item, state=_S.DISMISSED, actions=item.actions + (action,), version=item.version + 1
        )

    if isinstance(event, PublishSucceeded):
        if state is not _S.APPROVED:
            raise IllegalTransition(f"PublishSucceeded not valid in {state.value}")
        return replace(item, state=_S.POSTED, version=item.version + 1)

    if isinstance(event, PublishFailed):
        if state is not _S.APPROVED:
            raise IllegalTransition(f"PublishFailed not valid in {state.value}")
        return replace(item, version=item.version + 1)

    raise IllegalTransition(f"unknown event {event!r}")


def final_text(item: WorkItem) -> str:
    """The text cleared for publication: the latest draft's edit, else its raw output."""
    if item.state not in (_S.APPROVED, _S.POSTED):
        raise NotApproved(f"{item.item_id} is {item.state.value}, not approved")
    return item.drafts[-1].published_text
