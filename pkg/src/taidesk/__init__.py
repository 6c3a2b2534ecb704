"""Human-in-the-loop review service for AI-drafted answers on course forums.

The pipeline: a poller discovers unanswered student posts, a completion
client drafts an answer, a reviewer approves, edits, reprompts or dismisses
it, and only approved text is published back to the forum.
"""

from .analytics import (
    InterventionSummary,
    LikertTable,
    aggregate_survey,
    intervention_summary,
    likert_aggregate,
    survey_ingest,
)
from .config import CourseConfig, ReviewerIdentity, ServiceConfig, load_config
from .connectors import (
    Completion,
    FileForum,
    ForumCredentials,
    HttpChatClient,
    MockCompletionClient,
    ModelConfig,
)
from .domain import (
    ActionKind,
    DetailLevel,
    Draft,
    RepromptOptions,
    ReviewAction,
    StudentPost,
    WorkItem,
    WorkItemState,
)
from .edit_distance import levenshtein, normalized_edit_distance
from .prompts import PromptBundle, PromptRecord, apply_reprompt, build_base_prompt, render
from .replay import run_replay
from .service import Service
from .store import ExportFilter, FileStore, MemoryStore, RecordKind, StoredRecord
from .workflow import final_text, transition

__version__ = "0.1.0"

__all__ = [
    "ActionKind",
    "Completion",
    "CourseConfig",
    "DetailLevel",
    "Draft",
    "ExportFilter",
    "FileForum",
    "FileStore",
    "ForumCredentials",
    "HttpChatClient",
    "InterventionSummary",
    "LikertTable",
    "MemoryStore",
    "MockCompletionClient",
    "ModelConfig",
    "PromptBundle",
    "PromptRecord",
    "RecordKind",
    "RepromptOptions",
    "ReviewAction",
    "ReviewerIdentity",
    "Service",
    "ServiceConfig",
    "StoredRecord",
    "StudentPost",
    "WorkItem",
    "WorkItemState",
    "aggregate_survey",
    "apply_reprompt",
    "build_base_prompt",
    "final_text",
    "intervention_summary",
    "levenshtein",
    "likert_aggregate",
    "load_config",
    "normalized_edit_distance",
    "render",
    "run_replay",
    "survey_ingest",
    "transition",
]
