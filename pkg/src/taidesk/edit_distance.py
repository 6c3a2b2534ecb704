"""Levenshtein edit distance and the normalized modification metric.

The normalized distance quantifies how much a reviewer changed an AI draft:
0.0 means the text was published untouched, 1.0 means a full rewrite.
"""


def levenshtein(a: str, b: str) -> int:
    """Minimum number of single-character insertions, deletions and substitutions."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost))
        previous = current
    return previous[-1]


def normalized_edit_distance(original: str, edited: str) -> float:
    """Levenshtein distance scaled into [0, 1] by the longer string; 0.0 for two empty strings."""
    longest = max(len(original), len(edited))
    if longest == 0:
        return 0.0
    return levenshtein(original, edited) / longest
