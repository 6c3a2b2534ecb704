"""Exception types shared across the service."""


class TaideskError(Exception):
    """Base class for all errors raised by this package."""


# --- workflow ---------------------------------------------------------------

class IllegalTransition(TaideskError):
    """The event is not legal in the item's current state."""


class AttemptsExhausted(IllegalTransition):
    """A generation retry was requested beyond the configured attempt budget."""


class IllegalState(TaideskError):
    """A pipeline operation was invoked on an item in the wrong state."""


class StaleVersion(TaideskError):
    """Compare-and-swap failed: the caller's version no longer matches."""


class NotApproved(TaideskError):
    """final_text was requested for an item that has not been approved."""


# --- prompt assembly --------------------------------------------------------

class EmptyQuestion(TaideskError):
    """The student post has no question body to build a prompt from."""


class NoPriorDraft(TaideskError):
    """A reprompt was requested before any draft exists."""


class BudgetImpossible(TaideskError):
    """The prompt cannot fit the token budget even with all context removed."""


# --- connectors -------------------------------------------------------------

class AuthFailed(TaideskError):
    """The forum rejected the supplied credentials."""


class Unreachable(TaideskError):
    """Transport-level failure talking to an external system."""


class MalformedPayload(TaideskError):
    """An external system returned data that does not match its contract."""


class ThreadNotFound(TaideskError):
    """The target thread or post does not exist on the forum."""


class RateLimited(TaideskError):
    """The completion provider kept rate-limiting after all retries."""


class Timeout(TaideskError):
    """The completion provider did not answer within the deadline."""


class ProviderError(TaideskError):
    """The completion provider returned a non-retryable error."""


class EmptyCompletion(TaideskError):
    """The completion provider returned no text."""


# --- persistence ------------------------------------------------------------

class StorageFailure(TaideskError):
    """The backing store could not be read or written."""


# --- orchestration / API ----------------------------------------------------

class UnknownItem(TaideskError):
    """No work item exists with the given id."""


class ForumUnavailable(TaideskError):
    """A poll cycle could not reach the forum; the cycle was skipped."""


# --- analytics --------------------------------------------------------------

class UnknownLabel(TaideskError):
    """A survey response used a label outside the declared scale."""


class EmptyResponses(TaideskError):
    """A survey aggregate was requested over zero responses."""


class ParseError(TaideskError):
    """A survey file could not be parsed; the message names the row."""
