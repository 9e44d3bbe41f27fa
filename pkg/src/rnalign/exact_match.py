"""Exact structural pattern matching in O(n + m).

Each structure is relabelled as a string of signed offsets (0 for an unpaired
base, ``j - i`` at the 5' end and ``i - j`` at the 3' end of a pair). A window
of the text matches the pattern structurally exactly when the offset strings
agree: an offset pointing outside the window can never equal the pattern's
offset at that position, because the pattern's partners lie inside it. The
answer is the intersection of a KMP search over bases and one over offsets.
"""

from __future__ import annotations

from typing import Sequence

from .rna_model import RnaStructure

__all__ = ["encode_labels", "failure_function", "kmp_find_all", "exact_occurrences"]


def encode_labels(r: RnaStructure) -> list[int]:
    p = r.partners
    return [p[i] - i for i in range(1, len(r) + 1)]


def failure_function(needle: Sequence) -> list[int]:
    """``fail[k]`` = length of the longest proper border of ``needle[:k + 1]``."""
    fail = [0] * len(needle)
    k = 0
    for q in range(1, len(needle)):
        while k and needle[q] != needle[k]:
            k = fail[k - 1]
        if needle[q] == needle[k]:
            k += 1
        fail[q] = k
    return fail


def kmp_find_all(needle: Sequence, haystack: Sequence) -> list[int]:
    """1-based start positions of every (possibly overlapping) occurrence."""
    m = len(needle)
    if m == 0:
        raise ValueError("needle must be non-empty")
    fail = failure_function(needle)
    hits = []
    k = 0
    for pos, sym in enumerate(haystack):
        while k and sym != needle[k]:
            k = fail[k - 1]
        if sym == needle[k]:
            k += 1
            if k == m:
                hits.append(pos - m + 2)
                k = fail[k - 1]
    return hits


def _merge_common(xs: list[int], ys: list[int]) -> list[int]:
    out = []
    a = b = 0
    while a < len(xs) and b < len(ys):
        if xs[a] < ys[b]:
            a += 1
        elif xs[a] > ys[b]:
            b += 1
        else:
            out.append(xs[a])
            a += 1
            b += 1
    return out


def exact_occurrences(pattern: RnaStructure, text: RnaStructure) -> list[int]:
    """Positions where ``pattern`` occurs in ``text`` with identical bases and pairs."""
    if len(pattern) == 0:
        raise ValueError("pattern must be non-empty")
    by_sequence = kmp_find_all(pattern.sequence, text.sequence)
    by_labels = kmp_find_all(encode_labels(pattern), encode_labels(text))
    return _merge_common(by_sequence, by_labels)
