"""HTTP review API.

Every endpoint requires a bearer token mapped to a configured reviewer.
Mutating endpoints additionally require ``If-Match: <version>`` and answer
409 when another reviewer got there first, 422 when the event is illegal in
the item's current state. Errors use the body ``{"error": code,
"message": text}``.
"""

from __future__ import annotations

from typing import Iterable, Optional

from fastapi import Depends, FastAPI, Header, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .config import ReviewerIdentity
from .domain import ActionKind, DetailLevel, RepromptOptions, WorkItem
from .errors import (
    AttemptsExhausted,
    ForumUnavailable,
    IllegalState,
    IllegalTransition,
    StaleVersion,
    UnknownItem,
)
from .rfc3339 import format_rfc3339
from .serialize import work_item_to_dict
from .service import Service


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str) -> None:
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class ApproveBody(BaseModel):
    note: Optional[str] = None


class EditBody(BaseModel):
    text: str
    note: Optional[str] = None


class RepromptBody(BaseModel):
    preserve_history: bool = False
    code_allowed: bool = True
    detail_level: str = "STANDARD"
    custom_instructions: Optional[str] = None
    note: Optional[str] = None


class DismissBody(BaseModel):
    note: Optional[str] = None


def queue_entry(item: WorkItem) -> dict:
    draft = item.drafts[-1]
    preview = draft.published_text
    return {
        "item_id": item.item_id,
        "course_id": item.post.course_id,
        "title": item.post.title,
        "waiting_since": format_rfc3339(draft.created_at),
        "draft_preview": preview[:200],
        "version": item.version,
    }


def create_app(service: Service, reviewers: Iterable[ReviewerIdentity]) -> FastAPI:
    app = FastAPI(title="taidesk", docs_url=None, redoc_url=None)
    by_token = {r.token: r for r in reviewers}

    def authenticate(authorization: Optional[str] = Header(default=None)) -> ReviewerIdentity:
        if authorization is None or not authorization.startswith("Bearer "):
            raise ApiError(401, "unauthorized", "missing bearer token")
        reviewer = by_token.get(authorization[len("Bearer "):])
        if reviewer is None:
            raise ApiError(401, "unauthorized", "unknown token")
        return reviewer

    def expected_version(if_match: Optional[str] = Header(default=None)) -> int:
        if if_match is None:
            raise ApiError(428, "version_required", "mutating requests need If-Match: <version>")
        try:
            return int(if_match.strip().strip('"'))
        except ValueError:
            raise ApiError(400, "bad_request", f"If-Match must be an integer version: {if_match!r}")

    @app.exception_handler(ApiError)
    async def handle_api_error(_req: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(
            status_code=exc.status, content={"error": exc.code, "message": exc.message}
        )

    @app.exception_handler(RequestValidationError)
    async def handle_validation(_req: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=400, content={"error": "bad_request", "message": str(exc.errors())}
        )

    def run(action, *args, **kwargs):
        """Translate service errors into HTTP statuses."""
        try:
            return action(*args, **kwargs)
        except UnknownItem as exc:
            raise ApiError(404, "unknown_item", str(exc))
        except StaleVersion as exc:
            raise ApiError(409, "stale_version", str(exc))
        except AttemptsExhausted as exc:
            raise ApiError(422, "attempts_exhausted", str(exc))
        except (IllegalTransition, IllegalState) as exc:
            raise ApiError(422, "illegal_transition", str(exc))
        except ForumUnavailable as exc:
            raise ApiError(503, "forum_unavailable", str(exc))
        except ValueError as exc:
            raise ApiError(400, "bad_request", str(exc))

    # --- read side -------------------------------------------------------------

    @app.get("/api/queue")
    def get_queue(
        course_id: Optional[str] = Query(default=None),
        _reviewer: ReviewerIdentity = Depends(authenticate),
    ) -> dict:
        return {"items": [queue_entry(i) for i in service.queue(course_id)]}

    @app.get("/api/items/{item_id}")
    def get_item(
        item_id: str, _reviewer: ReviewerIdentity = Depends(authenticate)
    ) -> dict:
        return run(lambda: work_item_to_dict(service.get_item(item_id)))

    @app.get("/api/metrics")
    def get_metrics(
        course_id: Optional[str] = Query(default=None),
        _reviewer: ReviewerIdentity = Depends(authenticate),
    ) -> dict:
        return service.metrics(course_id).to_dict()

    # --- review actions ----------------------------------------------------------

    @app.post("/api/items/{item_id}/approve")
    def approve(
        item_id: str,
        body: Optional[ApproveBody] = None,
        reviewer: ReviewerIdentity = Depends(authenticate),
        version: int = Depends(expected_version),
    ) -> dict:
        item = run(
            service.handle_review_action,
            item_id,
            kind=ActionKind.APPROVE,
            actor_id=reviewer.actor_id,
            expected_version=version,
            note=body.note if body else None,
        )
        return work_item_to_dict(service.get_item(item.item_id))

    @app.post("/api/items/{item_id}/edit")
    def edit(
        item_id: str,
        body: EditBody,
        reviewer: ReviewerIdentity = Depends(authenticate),
        version: int = Depends(expected_version),
    ) -> dict:
        item = run(
            service.handle_review_action,
            item_id,
            kind=ActionKind.EDIT,
            actor_id=reviewer.actor_id,
            expected_version=version,
            text=body.text,
            note=body.note,
        )
        return work_item_to_dict(item)

    @app.post("/api/items/{item_id}/reprompt", status_code=202)
    def reprompt(
        item_id: str,
        body: RepromptBody,
        reviewer: ReviewerIdentity = Depends(authenticate),
        version: int = Depends(expected_version),
    ) -> dict:
        try:
            level = DetailLevel(body.detail_level)
        except ValueError:
            raise ApiError(400, "bad_request", f"unknown detail_level {body.detail_level!r}")
        custom = body.custom_instructions
        if custom is not None and not custom.strip():
            custom = None
        options = RepromptOptions(
            preserve_history=body.preserve_history,
            code_allowed=body.code_allowed,
            detail_level=level,
            custom_instructions=custom,
        )
        item = run(
            service.handle_review_action,
            item_id,
            kind=ActionKind.REPROMPT,
            actor_id=reviewer.actor_id,
            expected_version=version,
            options=options,
            note=body.note,
        )
        return work_item_to_dict(item)

    @app.post("/api/items/{item_id}/dismiss")
    def dismiss(
        item_id: str,
        body: Optional[DismissBody] = None,
        reviewer: ReviewerIdentity = Depends(authenticate),
        version: int = Depends(expected_version),
    ) -> dict:
        item = run(
            service.handle_review_action,
            item_id,
            kind=ActionKind.DISMISS,
            actor_id=reviewer.actor_id,
            expected_version=version,
            note=body.note if body else None,
        )
        return work_item_to_dict(item)

    @app.post("/api/items/{item_id}/retry", status_code=202)
    def retry(
        item_id: str,
        _reviewer: ReviewerIdentity = Depends(authenticate),
        version: int = Depends(expected_version),
    ) -> dict:
        item = run(service.retry_generation, item_id, version)
        return work_item_to_dict(item)

    # --- operations ---------------------------------------------------------------

    @app.post("/api/sync")
    def sync(
        course_id: str = Query(...),
        _reviewer: ReviewerIdentity = Depends(authenticate),
    ) -> dict:
        try:
            created = run(service.sync_course, course_id)
        except KeyError:
            raise ApiError(404, "unknown_course", f"no course {course_id}")
        return {"created": created}

    return app
