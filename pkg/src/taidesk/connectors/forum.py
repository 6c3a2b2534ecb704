"""Forum connector: read unanswered posts, publish approved answers.

The real discussion-forum API is vendor-specific, so the connector is an
interface plus a file-backed implementation whose fixture format is the
contract:

  posts file   (``posts.json``)    — a JSON array; each element has exactly
      the keys {post_id, thread_id, course_id, title, body, author_label,
      created_at (RFC 3339), category, answered}.
  answers file (``answers.ndjson``) — one JSON object appended per published
      answer: {thread_id, answer_id, text, posted_at, idempotency_key}.

Publishing is idempotent: resubmitting with a key that was already used
returns the original answer id and appends nothing.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Callable, List, Optional, Protocol

from ..domain import StudentPost
from ..errors import AuthFailed, MalformedPayload, ThreadNotFound, Unreachable
from ..rfc3339 import format_rfc3339, parse_rfc3339, utc_now

POSTS_FILE = "posts.json"
ANSWERS_FILE = "answers.ndjson"

_POST_FIELDS = {
    "post_id",
    "thread_id",
    "course_id",
    "title",
    "body",
    "author_label",
    "created_at",
    "category",
    "answered",
}


@dataclass(frozen=True)
class ForumCredentials:
    """Where a course's forum lives and how to talk to it.

    The api_token must never appear in exports or logs; repr masks it.
    """

    base_url: str
    api_token: str = ""
    course_ref: str = ""

    def __repr__(self) -> str:  # keep the token out of logs and tracebacks
        return (
            f"ForumCredentials(base_url={self.base_url!r}, api_token='***', "
            f"course_ref={self.course_ref!r})"
        )


class ForumConnector(Protocol):
    def fetch_unanswered(self, creds: ForumCredentials, since: datetime) -> List[StudentPost]: ...

    def post_answer(
        self, creds: ForumCredentials, thread_id: str, text: str, idempotency_key: str
    ) -> str: ...

    def mark_answered(self, creds: ForumCredentials, post_id: str) -> None: ...


class FileForum:
    """The file-backed forum used for tests, replays and local runs.

    ``expected_token`` turns on credential checking (any token accepted when
    None). ``fail_posts_before_write`` / ``fail_posts_after_write`` inject
    transport failures around the answer append, for exercising publish
    retries; after-write failure simulates a lost acknowledgement.
    """

    def __init__(
        self,
        root: str | os.PathLike,
        expected_token: Optional[str] = None,
        clock: Callable[[], datetime] = utc_now,
    ) -> None:
        self.root = Path(root)
        self.expected_token = expected_token
        self.fail_posts_before_write = 0
        self.fail_posts_after_write = 0
        self._clock = clock
        self._lock = threading.Lock()

    @classmethod
    def from_credentials(cls, creds: ForumCredentials) -> "FileForum":
        """Interpret base_url as a directory path (with or without file://)."""
        url = creds.base_url
        if url.startswith("file://"):
            url = url[len("file://"):]
        return cls(url)

    # --- reading -------------------------------------------------------------

    def fetch_unanswered(self, creds: ForumCredentials, since: datetime) -> List[StudentPost]:
        self._check_auth(creds)
        posts = [
            p
            for p in self._load_posts(creds)
            if not p.answered and p.created_at >= since
        ]
        posts.sort(key=lambda p: (p.created_at, p.post_id))
        return posts

    # --- writing -------------------------------------------------------------

    def post_answer(
        self, creds: ForumCredentials, thread_id: str, text: str, idempotency_key: str
    ) -> str:
        if not text:
            raise ValueError("answer text must be non-empty")
        with self._lock:
            self._check_auth(creds)
            if self.fail_posts_before_write > 0:
                self.fail_posts_before_write -= 1
                raise Unreachable("injected transport failure before write")
            for answer in self._load_answers():
                if answer["idempotency_key"] == idempotency_key:
                    return answer["answer_id"]
            if not any(p["thread_id"] == thread_id for p in self._load_raw_posts()):
                raise ThreadNotFound(f"no thread {thread_id}")
            answer_id = "ans-" + hashlib.sha256(idempotency_key.encode("utf-8")).hexdigest()[:12]
            record = {
                "thread_id": thread_id,
                "answer_id": answer_id,
                "text": text,
                "posted_at": format_rfc3339(self._clock()),
                "idempotency_key": idempotency_key,
            }
            try:
                with (self.root / ANSWERS_FILE).open("a", encoding="utf-8") as fh:
                    fh.write(json.dumps(record, ensure_ascii=False) + "\n")
            except OSError as exc:
                raise Unreachable(f"cannot write answers file: {exc}") from exc
            if self.fail_posts_after_write > 0:
                self.fail_posts_after_write -= 1
                raise Unreachable("injected transport failure after write")
            return answer_id

    def mark_answered(self, creds: ForumCredentials, post_id: str) -> None:
        with self._lock:
            self._check_auth(creds)
            raw = self._load_raw_posts()
            hit = False
            for p in raw:
                if p["post_id"] == post_id:
                    p["answered"] = True
                    hit = True
            if not hit:
                raise ThreadNotFound(f"no post {post_id}")
            tmp = self.root / (POSTS_FILE + ".tmp")
            try:
                tmp.write_text(json.dumps(raw, ensure_ascii=False, indent=2), encoding="utf-8")
                os.replace(tmp, self.root / POSTS_FILE)
            except OSError as exc:
                raise Unreachable(f"cannot rewrite posts file: {exc}") from exc

    def answers(self) -> List[dict]:
        """All published answers, in append order (test and report helper)."""
        return self._load_answers()

    # --- internals -----------------------------------------------------------

    def _check_auth(self, creds: ForumCredentials) -> None:
        if self.expected_token is not None and creds.api_token != self.expected_token:
            raise AuthFailed("forum rejected the api token")

    def _load_raw_posts(self) -> List[dict]:
        path = self.root / POSTS_FILE
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError as exc:
            raise Unreachable(f"posts file missing: {path}") from exc
        except OSError as exc:
            raise Unreachable(f"cannot read posts file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise MalformedPayload(f"posts file is not valid JSON: {exc}") from exc
        if not isinstance(data, list):
            raise MalformedPayload("posts file must hold a JSON array")
        return data

    def _load_posts(self, creds: ForumCredentials) -> List[StudentPost]:
        posts = []
        for i, raw in enumerate(self._load_raw_posts()):
            if not isinstance(raw, dict) or set(raw) != _POST_FIELDS:
                raise MalformedPayload(f"post #{i} has wrong field set")
            if not raw["post_id"] or not raw["body"]:
                raise MalformedPayload(f"post #{i}: post_id and body must be non-empty")
            try:
                created = parse_rfc3339(raw["created_at"])
            except ValueError as exc:
                raise MalformedPayload(f"post #{i}: bad created_at: {exc}") from exc
            if creds.course_ref and raw["course_id"] != creds.course_ref:
                continue
            posts.append(
                StudentPost(
                    post_id=raw["post_id"],
                    thread_id=raw["thread_id"],
                    course_id=raw["course_id"],
                    title=raw["title"],
                    body=raw["body"],
                    author_label=raw["author_label"],
                    created_at=created,
                    category=raw["category"],
                    answered=bool(raw["answered"]),
                )
            )
        return posts

    def _load_answers(self) -> List[dict]:
        path = self.root / ANSWERS_FILE
        if not path.exists():
            return []
        answers = []
        for line in path.read_text(encoding="utf-8").splitlines():
            if line.strip():
                answers.append(json.loads(line))
        return answers
