"""Pipeline orchestration: polling, generation, review handling, publication.

The service owns no mutable item state of its own; every item lives in the
store and every write is a compare-and-swap against the version the caller
saw. That makes per-item transitions linearizable no matter how many poll
loops, worker threads and API handlers run concurrently.

``mode='sync'`` executes scheduled work (generation, publication) inline,
which replays and most tests rely on; ``mode='async'`` hands it to a bounded
worker pool, which the long-running server uses.
"""

from __future__ import annotations

import logging
import threading
from concurrent.futures import Future, ThreadPoolExecutor
from datetime import datetime
from typing import Callable, Dict, List, Optional

from .analytics import InterventionSummary, intervention_summary
from .config import CourseConfig, ServiceConfig
from .connectors.forum import FileForum, ForumConnector
from .connectors.llm import CompletionClient, HttpChatClient, MockCompletionClient
from .domain import (
    ActionKind,
    Approve,
    Dismiss,
    Draft,
    DraftReady,
    Edit,
    GenerationFailed,
    PublishFailed,
    PublishSucceeded,
    Reprompt,
    RepromptOptions,
    StartGeneration,
    TokenUsage,
    WorkItem,
    WorkItemState,
)
from .errors import (
    AuthFailed,
    EmptyCompletion,
    ForumUnavailable,
    IllegalState,
    MalformedPayload,
    ProviderError,
    RateLimited,
    StaleVersion,
    ThreadNotFound,
    Timeout,
    UnknownItem,
    Unreachable,
)
from .prompts import PromptRecord, apply_reprompt, build_base_prompt, render
from .rfc3339 import EPOCH, format_rfc3339, utc_now
from .serialize import work_item_from_dict, work_item_to_dict
from .store import MemoryStore, RecordKind
from .workflow import final_text, transition

logger = logging.getLogger(__name__)

GENERATION_ERRORS = (RateLimited, Timeout, ProviderError, EmptyCompletion)
TRANSPORT_ERRORS = (Unreachable, AuthFailed, ThreadNotFound)


def make_llm_client(config: ServiceConfig) -> CompletionClient:
    if config.llm.kind == "http":
        return HttpChatClient(
            base_url=config.llm.base_url,
            api_token=config.llm.api_token,
            timeout_s=config.llm.timeout_s,
            max_retries=config.llm.max_retries,
        )
    return MockCompletionClient()


class Service:
    def __init__(
        self,
        config: ServiceConfig,
        store: MemoryStore,
        llm: Optional[CompletionClient] = None,
        forums: Optional[Dict[str, ForumConnector]] = None,
        *,
        mode: str = "sync",
        clock: Callable[[], datetime] = utc_now,
    ) -> None:
        if mode not in ("sync", "async"):
            raise ValueError(f"mode must be 'sync' or 'async', not {mode!r}")
        self.config = config
        self.store = store
        self.llm = llm if llm is not None else make_llm_client(config)
        self.forums = forums if forums is not None else {
            c.course_id: FileForum.from_credentials(c.forum) for c in config.courses
        }
        self.mode = mode
        self._clock = clock
        self._executor = (
            ThreadPoolExecutor(max_workers=config.max_workers, thread_name_prefix="taidesk")
            if mode == "async"
            else None
        )
        self._pending: set[Future] = set()
        self._pending_lock = threading.Lock()
        self._stop = threading.Event()
        self._pollers: List[threading.Thread] = []

    # --- item access ----------------------------------------------------------

    def get_item(self, item_id: str) -> WorkItem:
        record = self.store.get(RecordKind.WORK_ITEM, item_id)
        if record is None:
            raise UnknownItem(f"no work item {item_id}")
        return work_item_from_dict(record.payload)

    def list_items(
        self,
        course_id: Optional[str] = None,
        state: Optional[WorkItemState] = None,
    ) -> List[WorkItem]:
        items = []
        for record in self.store.records(RecordKind.WORK_ITEM):
            if course_id is not None and record.payload.get("course_id") != course_id:
                continue
            if state is not None and record.payload.get("state") != state.value:
                continue
            items.append(work_item_from_dict(record.payload))
        return items

    def queue(self, course_id: Optional[str] = None) -> List[WorkItem]:
        """Items awaiting review, longest-waiting first."""
        waiting = self.list_items(course_id, WorkItemState.AWAITING_REVIEW)
        waiting.sort(key=lambda i: (i.drafts[-1].created_at, i.item_id))
        return waiting

    def metrics(self, course_id: Optional[str] = None) -> InterventionSummary:
        return intervention_summary(self.store, course_id)

    # --- pipeline -------------------------------------------------------------

    def poll_cycle(self, course: CourseConfig) -> List[str]:
        """One periodic check: discover unanswered posts, start generation.

        Also re-schedules publication for items stuck in APPROVED from an
        earlier failed publish. Returns the ids of newly created items.
        Dedupe key is (course_id, post_id); losing a creation race to a
        concurrent cycle is not an error.
        """
        forum = self.forums[course.course_id]
        try:
            posts = forum.fetch_unanswered(course.forum, since=EPOCH)
        except (Unreachable, AuthFailed, MalformedPayload) as exc:
            raise ForumUnavailable(f"{course.course_id}: {exc}") from exc

        created: List[str] = []
        for post in posts:
            item_id = f"{course.course_id}:{post.post_id}"
            if self.store.get(RecordKind.WORK_ITEM, item_id) is not None:
                continue
            item = WorkItem(item_id=item_id, post=post)
            try:
                self.store.save(RecordKind.WORK_ITEM, item_id, work_item_to_dict(item), 0)
            except StaleVersion:
                continue  # a concurrent cycle created it first
            item = self._save_transition(item, StartGeneration())
            created.append(item_id)
            self._schedule(self._run_generation, item_id)

        for item in self.list_items(course.course_id, WorkItemState.APPROVED):
            self._schedule(self._publish_quietly, item.item_id)
        return created

    def sync_course(self, course_id: str) -> List[str]:
        """Manual poll trigger (the API's POST /api/sync)."""
        return self.poll_cycle(self.config.course(course_id))

    def generate_draft(self, item_id: str) -> WorkItem:
        """One generation attempt for an item in GENERATING.

        Provider failures are folded into the item (FAILED state), not
        raised; the retry budget is handled by the caller's loop.
        """
        item = self.get_item(item_id)
        if item.state is not WorkItemState.GENERATING:
            raise IllegalState(f"{item_id} is {item.state.value}, not GENERATING")
        course = self.config.course(item.post.course_id)

        bundle = build_base_prompt(course, item.post)
        last_action = item.actions[-1] if item.actions else None
        if last_action is not None and last_action.kind is ActionKind.REPROMPT:
            bundle = apply_reprompt(
                bundle, last_action.reprompt_payload, item.drafts, course.history_window
            )
        prompt = render(bundle)

        try:
            completion = self.llm.generate(prompt, course.model)
        except GENERATION_ERRORS as exc:
            logger.warning("generation failed for %s: %s", item_id, exc)
            return self._save_transition(item, GenerationFailed(str(exc)))

        draft = Draft(
            index=len(item.drafts),
            prompt_record=PromptRecord(text=prompt, bundle=bundle),
            raw_output=completion.text,
            model_id=completion.model_id,
            usage=TokenUsage(completion.input_tokens, completion.output_tokens),
            latency_ms=completion.latency_ms,
            created_at=self._clock(),
        )
        return self._save_transition(item, DraftReady(draft))

    def handle_review_action(
        self,
        item_id: str,
        *,
        kind: ActionKind,
        actor_id: str,
        expected_version: int,
        text: Optional[str] = None,
        options: Optional[RepromptOptions] = None,
        note: Optional[str] = None,
    ) -> WorkItem:
        """Apply one reviewer decision with compare-and-swap on the version."""
        item = self.get_item(item_id)
        if item.version != expected_version:
            raise StaleVersion(
                f"{item_id}: expected version {expected_version}, stored {item.version}"
            )
        at = self._clock()
        if kind is ActionKind.APPROVE:
            event = Approve(actor_id=actor_id, at=at, note=note)
        elif kind is ActionKind.EDIT:
            if not text or not text.strip():
                raise ValueError("edit text must be non-empty")
            event = Edit(actor_id=actor_id, text=text, at=at, note=note)
        elif kind is ActionKind.REPROMPT:
            event = Reprompt(actor_id=actor_id, options=options or RepromptOptions(), at=at, note=note)
        elif kind is ActionKind.DISMISS:
            event = Dismiss(actor_id=actor_id, at=at, note=note)
        else:
            raise ValueError(f"unsupported action kind {kind!r}")

        updated = self._save_transition(item, event)
        if kind is ActionKind.APPROVE:
            self._schedule(self._publish_quietly, item_id)
        elif kind is ActionKind.REPROMPT:
            self._schedule(self._run_generation, item_id)
        return updated

    def retry_generation(self, item_id: str, expected_version: int) -> WorkItem:
        """Manual retry of a FAILED item (subject to the attempt budget)."""
        item = self.get_item(item_id)
        if item.version != expected_version:
            raise StaleVersion(
                f"{item_id}: expected version {expected_version}, stored {item.version}"
            )
        updated = self._save_transition(item, StartGeneration())
        self._schedule(self._run_generation, item_id)
        return updated

    def publish(self, item_id: str) -> WorkItem:
        """Post an approved item's final text; exactly-once via idempotency key."""
        item = self.get_item(item_id)
        if item.state is not WorkItemState.APPROVED:
            raise IllegalState(f"{item_id} is {item.state.value}, not APPROVED")
        course = self.config.course(item.post.course_id)
        forum = self.forums[course.course_id]
        text = final_text(item)
        try:
            answer_id = forum.post_answer(
                course.forum, item.post.thread_id, text, idempotency_key=item.item_id
            )
        except TRANSPORT_ERRORS as exc:
            logger.warning("publish failed for %s: %s", item_id, exc)
            return self._save_transition(item, PublishFailed(str(exc)))

        try:
            forum.mark_answered(course.forum, item.post.post_id)
        except TRANSPORT_ERRORS as exc:
            logger.warning("mark_answered failed for %s: %s", item_id, exc)

        try:
            updated = self._save_transition(item, PublishSucceeded())
        except StaleVersion:
            updated = self.get_item(item_id)
            if updated.state is not WorkItemState.POSTED:
                raise
        self._record_published(updated, answer_id)
        return updated

    # --- background execution --------------------------------------------------

    def drain(self) -> None:
        """Block until all scheduled background work has finished."""
        while True:
            with self._pending_lock:
                pending = list(self._pending)
            if not pending:
                return
            for future in pending:
                future.exception()  # waits; errors were already logged

    def start_pollers(self) -> None:
        """One polling thread per course, at each course's interval."""
        for course in self.config.courses:
            thread = threading.Thread(
                target=self._poll_loop, args=(course,), name=f"poll-{course.course_id}", daemon=True
            )
            self._pollers.append(thread)
            thread.start()

    def stop(self) -> None:
        self._stop.set()
        for thread in self._pollers:
            thread.join(timeout=2)
        if self._executor is not None:
            self._executor.shutdown(wait=True)

    def _poll_loop(self, course: CourseConfig) -> None:
        while not self._stop.is_set():
            try:
                self.poll_cycle(course)
            except ForumUnavailable as exc:
                logger.warning("poll cycle skipped: %s", exc)
            except Exception:
                logger.exception("poll cycle crashed for %s", course.course_id)
            self._stop.wait(course.poll_interval_s)

    def _schedule(self, fn: Callable[[str], object], item_id: str) -> None:
        if self._executor is None:
            fn(item_id)
            return
        future = self._executor.submit(self._logged, fn, item_id)
        with self._pending_lock:
            self._pending.add(future)
        future.add_done_callback(self._discard_pending)

    def _discard_pending(self, future: Future) -> None:
        with self._pending_lock:
            self._pending.discard(future)

    def _logged(self, fn: Callable[[str], object], item_id: str) -> None:
        try:
            fn(item_id)
        except Exception:
            logger.exception("background task %s(%s) failed", fn.__name__, item_id)

    def _run_generation(self, item_id: str) -> WorkItem:
        """Generate until a draft lands or the attempt budget is spent."""
        max_attempts = self.config.max_generation_attempts
        while True:
            item = self.generate_draft(item_id)
            if item.state is not WorkItemState.FAILED:
                return item
            if item.attempts >= max_attempts:
                return item
            item = self._save_transition(item, StartGeneration())

    def _publish_quietly(self, item_id: str) -> None:
        """Publish without raising; failures leave the item APPROVED for retry."""
        try:
            self.publish(item_id)
        except IllegalState:
            pass  # another worker already published it

    # --- internals --------------------------------------------------------------

    def _save_transition(self, item: WorkItem, event) -> WorkItem:
        updated = transition(item, event, max_attempts=self.config.max_generation_attempts)
        self.store.save(
            RecordKind.WORK_ITEM, item.item_id, work_item_to_dict(updated), item.version
        )
        return updated

    def _record_published(self, item: WorkItem, answer_id: str) -> None:
        key = f"published:{item.item_id}"
        if self.store.get(RecordKind.METRICS_EVENT, key) is not None:
            return
        payload = {
            "event": "published",
            "item_id": item.item_id,
            "course_id": item.post.course_id,
            "answer_id": answer_id,
            "at": format_rfc3339(self._clock()),
        }
        try:
            self.store.save(RecordKind.METRICS_EVENT, key, payload, 0)
        except StaleVersion:
            pass  # concurrent publisher already recorded it
