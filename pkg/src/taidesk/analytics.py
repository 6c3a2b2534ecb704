"""Intervention metrics and five-point survey aggregation.

Everything here is a pure read-side computation: the intervention summary is
a function of the persisted work items and their action logs, and the survey
tables are a function of the response rows. Percentages round half-up to one
decimal, matching how the source tables are printed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import EmptyResponses, ParseError, UnknownLabel
from .store import ExportFilter, MemoryStore, RecordKind, matches

AGREEMENT_LABELS = (
    "Strongly Disagree",
    "Somewhat Disagree",
    "Neutral",
    "Somewhat Agree",
    "Strongly Agree",
)
FREQUENCY_LABELS = (
    "Never",
    "Sometimes",
    "About Half the Time",
    "Most of the Time",
    "Always",
)

# Scales for the standard survey questions; q7 asks how often drafts needed
# correction, the rest are agreement statements. Files may carry additional
# question ids; those are aggregated against the agreement scale by default.
KNOWN_SCALES: Dict[str, Tuple[str, ...]] = {
    "q3": AGREEMENT_LABELS,
    "q4": AGREEMENT_LABELS,
    "q5": AGREEMENT_LABELS,
    "q6": AGREEMENT_LABELS,
    "q7": FREQUENCY_LABELS,
    "q11": AGREEMENT_LABELS,
}

SURVEY_HEADER = ("respondent_id", "question_id", "response_label")


def _percent_decimal(count: int, total: int) -> Decimal:
    return (Decimal(100 * count) / Decimal(total)).quantize(Decimal("0.1"), ROUND_HALF_UP)


@dataclass(frozen=True)
class LikertTable:
    """Counts and derived percentages for one five-point survey question."""

    question: str
    labels: Tuple[str, str, str, str, str]
    counts: Tuple[int, int, int, int, int]

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def percents(self) -> Tuple[float, ...]:
        return tuple(float(_percent_decimal(c, self.total)) for c in self.counts)

    @property
    def percent_strings(self) -> Tuple[str, ...]:
        """One-decimal strings, e.g. '75.0' — the golden-test representation."""
        return tuple(str(_percent_decimal(c, self.total)) for c in self.counts)


def likert_aggregate(
    question: str, labels: Sequence[str], responses: Sequence[str]
) -> LikertTable:
    """Count responses on a five-point scale and derive percentages."""
    if len(labels) != 5 or len(set(labels)) != 5:
        raise ValueError("a Likert scale needs exactly 5 distinct labels")
    if not responses:
        raise EmptyResponses(f"no responses for {question!r}")
    counts = [0, 0, 0, 0, 0]
    position = {label: i for i, label in enumerate(labels)}
    for response in responses:
        if response not in position:
            raise UnknownLabel(f"{response!r} is not on the scale {list(labels)}")
        counts[position[response]] += 1
    return LikertTable(question=question, labels=tuple(labels), counts=tuple(counts))


def survey_ingest(
    path: str | Path,
    scales: Optional[Mapping[str, Sequence[str]]] = None,
) -> List[Tuple[str, str]]:
    """Parse a survey CSV into (question_id, response_label) rows.

    The file must start with the header ``respondent_id,question_id,
    response_label``. Rows whose question has a declared scale are validated
    against it immediately; rows for undeclared questions are validated later,
    at aggregation time.
    """
    scales = KNOWN_SCALES if scales is None else scales
    path = Path(path)
    if not path.exists():
        raise ParseError(f"survey file not found: {path}")
    rows: List[Tuple[str, str]] = []
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != SURVEY_HEADER:
            raise ParseError(
                f"row 1: header must be {','.join(SURVEY_HEADER)}"
            )
        for row_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 3:
                raise ParseError(f"row {row_no}: expected 3 columns, got {len(row)}")
            _, question_id, label = (cell.strip() for cell in row)
            if not question_id:
                raise ParseError(f"row {row_no}: question_id is empty")
            declared = scales.get(question_id)
            if declared is not None and label not in declared:
                raise UnknownLabel(f"row {row_no}: {label!r} is not on the {question_id} scale")
            rows.append((question_id, label))
    return rows


def aggregate_survey(
    rows: Sequence[Tuple[str, str]],
    scales: Optional[Mapping[str, Sequence[str]]] = None,
) -> List[LikertTable]:
    """One LikertTable per question id, in first-appearance order."""
    scales = KNOWN_SCALES if scales is None else scales
    grouped: Dict[str, List[str]] = {}
    for question_id, label in rows:
        grouped.setdefault(question_id, []).append(label)
    return [
        likert_aggregate(question_id, scales.get(question_id, AGREEMENT_LABELS), responses)
        for question_id, responses in grouped.items()
    ]


@dataclass(frozen=True)
class InterventionSummary:
    """Per-course (or overall) counts of how reviewers intervened.

    Items partition into approved_unedited + edited + dismissed + pending.
    The histogram maps reprompt count per item to the number of such items,
    over all items. mean_edit_distance averages the stored normalized
    distances across EDIT actions (0.0 when there are none).
    """

    course_id: Optional[str]
    items_total: int
    approved_unedited: int
    edited: int
    dismissed: int
    pending: int
    reprompt_histogram: Dict[int, int]
    mean_edit_distance: float
    mean_drafts_per_item: float

    def to_dict(self) -> dict:
        return {
            "course_id": self.course_id,
            "items_total": self.items_total,
            "approved_unedited": self.approved_unedited,
            "edited": self.edited,
            "dismissed": self.dismissed,
            "pending": self.pending,
            "reprompt_histogram": {str(k): v for k, v in sorted(self.reprompt_histogram.items())},
            "mean_edit_distance": self.mean_edit_distance,
            "mean_drafts_per_item": self.mean_drafts_per_item,
        }


def intervention_summary(store: MemoryStore, course_id: Optional[str] = None) -> InterventionSummary:
    """Classify every stored work item by how its reviewers intervened."""
    flt = ExportFilter(course_id=course_id, kind=RecordKind.WORK_ITEM)
    items = [r.payload for r in store.records(RecordKind.WORK_ITEM) if matches(r, flt)]

    approved_unedited = edited = dismissed = pending = 0
    histogram: Dict[int, int] = {}
    distances: List[float] = []
    drafts_total = 0

    for payload in items:
        state = payload["state"]
        actions = payload["actions"]
        had_edit = any(a["kind"] == "EDIT" for a in actions)
        reprompts = sum(1 for a in actions if a["kind"] == "REPROMPT")
        histogram[reprompts] = histogram.get(reprompts, 0) + 1
        drafts_total += len(payload["drafts"])
        distances.extend(
            a["edit_payload"]["distance"] for a in actions if a["kind"] == "EDIT"
        )
        if state == "DISMISSED":
            dismissed += 1
        elif state in ("APPROVED", "POSTED"):
            if had_edit:
                edited += 1
            else:
                approved_unedited += 1
        else:
            pending += 1

    total = len(items)
    return InterventionSummary(
        course_id=course_id,
        items_total=total,
        approved_unedited=approved_unedited,
        edited=edited,
        dismissed=dismissed,
        pending=pending,
        reprompt_histogram=histogram,
        mean_edit_distance=sum(distances) / len(distances) if distances else 0.0,
        mean_drafts_per_item=drafts_total / total if total else 0.0,
    )


def format_likert_table(table: LikertTable) -> str:
    """Fixed-width text rendering used by the CLI report."""
    width = max(len(label) for label in table.labels + ("Total",))
    lines = [f"Question {table.question}"]
    for label, count, percent in zip(table.labels, table.counts, table.percent_strings):
        lines.append(f"  {label:<{width}}  {count:>5}  {percent:>6}")
    lines.append(f"  {'Total':<{width}}  {table.total:>5}  {'100.0':>6}")
    return "\n".join(lines)


def format_summary(summary: InterventionSummary) -> str:
    """Deterministic key=value rendering used by the CLI replay report."""
    histogram = ",".join(f"{k}:{v}" for k, v in sorted(summary.reprompt_histogram.items()))
    lines = [
        f"course={summary.course_id if summary.course_id is not None else 'ALL'}",
        f"items_total={summary.items_total}",
        f"approved_unedited={summary.approved_unedited}",
        f"edited={summary.edited}",
        f"dismissed={summary.dismissed}",
        f"pending={summary.pending}",
        f"reprompt_histogram={histogram}",
        f"mean_edit_distance={summary.mean_edit_distance:.4f}",
        f"mean_drafts_per_item={summary.mean_drafts_per_item:.4f}",
    ]
    return "\n".join(lines)
