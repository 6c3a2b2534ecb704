"""Clients for the two external systems: the discussion forum and the LLM."""

from .forum import FileForum, ForumConnector, ForumCredentials
from .llm import (
    Completion,
    CompletionClient,
    HttpChatClient,
    MockCompletionClient,
    ModelConfig,
)

__all__ = [
    "Completion",
    "CompletionClient",
    "FileForum",
    "ForumConnector",
    "ForumCredentials",
    "HttpChatClient",
    "MockCompletionClient",
    "ModelConfig",
]
