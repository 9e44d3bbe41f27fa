"""RNA structures: a primary sequence plus a set of (possibly crossing) base pairs.

Positions are 1-based in every public function. A structure is immutable once
built; the partner table is computed lazily and cached on the instance.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

__all__ = [
    "RnaStructure",
    "StructureError",
    "make_structure",
    "from_dotbracket",
    "parse_rna",
    "format_rna",
    "to_dotbracket",
    "partner_map",
    "validate",
    "noncanonical_pairs",
    "read_structure",
]

ALPHABET = "ACGU"
BRACKETS = {"(": ")", "[": "]", "{": "}", "<": ">"}
_CLOSERS = {v: k for k, v in BRACKETS.items()}
CANONICAL_PAIRS = frozenset({"AU", "UA", "GC", "CG", "GU", "UG"})
PAIRS_SENTINEL = "#pairs"


class StructureError(ValueError):
    """Malformed structure text or an invalid structure.

    ``line`` is the 1-based line number in the source text when known.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class RnaStructure:
    sequence: str
    pairs: frozenset = field(default_factory=frozenset)
    name: str = ""

    def __len__(self):
        return len(self.sequence)

    @cached_property
    def partners(self) -> tuple:
        """Padded partner table: ``partners[i]`` is p(i) for 1 <= i <= n, index 0 unused."""
        p = list(range(len(self.sequence) + 1))
        for i, j in self.pairs:
            p[i] = j
            p[j] = i
        return tuple(p)

    def sorted_pairs(self):
        """Base pairs ordered by their 3' end."""
        return sorted(self.pairs, key=lambda ij: ij[1])

    def is_unpaired(self, i: int) -> bool:
        return self.partners[i] == i


def normalize_sequence(seq: str) -> str:
    return seq.strip().upper().replace("T", "U")


def validate(r: RnaStructure) -> list[str]:
    """Return every violated structure invariant; an empty list means valid."""
    problems = []
    n = len(r.sequence)
    for k, base in enumerate(r.sequence, start=1):
        if base not in ALPHABET:
            problems.append(f"position {k}: base {base!r} not in {ALPHABET}")
    seen: dict[int, tuple] = {}
    for pair in sorted(r.pairs):
        i, j = pair
        if not i < j:
            problems.append(f"pair ({i}, {j}): i < j required")
        for pos in (i, j):
            if not 1 <= pos <= n:
                problems.append(f"pair ({i}, {j}): position {pos} out of range 1..{n}")
        for pos in {i, j}:
            if pos in seen:
                problems.append(f"position {pos} shared by pairs {seen[pos]} and {pair}")
            else:
                seen[pos] = pair
    return problems


def make_structure(sequence: str, pairs: Iterable = (), name: str = "") -> RnaStructure:
    """Build a validated structure; raises StructureError listing all violations."""
    pairs = frozenset((int(i), int(j)) for i, j in pairs)
    r = RnaStructure(normalize_sequence(sequence), pairs, name)
    problems = validate(r)
    if problems:
        raise StructureError("; ".join(problems))
    return r


def partner_map(r: RnaStructure) -> tuple:
    """p(i) for i = 1..n as a tuple (element ``k`` holds p(k + 1))."""
    return r.partners[1:]


def noncanonical_pairs(r: RnaStructure) -> list[tuple]:
    return [
        (i, j)
        for i, j in sorted(r.pairs)
        if r.sequence[i - 1] + r.sequence[j - 1] not in CANONICAL_PAIRS
    ]


def _parse_dotbracket(db: str, line=None) -> set:
    stacks = {opener: [] for opener in BRACKETS}
    pairs = set()
    for pos, ch in enumerate(db, start=1):
        if ch == ".":
            continue
        if ch in BRACKETS:
            stacks[ch].append(pos)
        elif ch in _CLOSERS:
            stack = stacks[_CLOSERS[ch]]
            if not stack:
                raise StructureError(f"unbalanced brackets: {ch!r} at {pos} has no opener", line)
            pairs.add((stack.pop(), pos))
        else:
            raise StructureError(f"unexpected character {ch!r} at {pos} in structure", line)
    for opener, stack in stacks.items():
        if stack:
            raise StructureError(
                f"unbalanced brackets: {opener!r} at {stack[-1]} is never closed", line
            )
    return pairs


def _check_sequence(seq: str, line=None):
    for pos, base in enumerate(seq, start=1):
        if base not in ALPHABET:
            raise StructureError(f"character {base!r} at {pos} is not a base", line)


def from_dotbracket(sequence: str, dotbracket: str, name: str = "") -> RnaStructure:
    seq = normalize_sequence(sequence)
    _check_sequence(seq)
    db = dotbracket.strip()
    if len(db) != len(seq):
        raise StructureError(f"structure length {len(db)} != sequence length {len(seq)}")
    return make_structure(seq, _parse_dotbracket(db), name)


def parse_rna(text: str, fmt: str | None = None, strict: bool = False) -> RnaStructure:
    """Parse one structure record.

    The record is ``>name``, a sequence line, then either a dot-bracket line or
    the ``#pairs`` sentinel followed by ``i j`` lines up to a blank line or EOF.
    ``fmt`` may force ``"dotbracket"`` or ``"pairlist"``; by default it is
    detected from the sentinel. With ``strict`` a warning is issued for each
    pair outside AU/GC/GU.
    """
    lines = text.splitlines()
    k = 0
    while k < len(lines) and not lines[k].strip():
        k += 1
    if k >= len(lines) or not lines[k].startswith(">"):
        raise StructureError("expected '>name' header", k + 1)
    name = lines[k][1:].strip()
    k += 1
    if k >= len(lines):
        raise StructureError("missing sequence line", k + 1)
    seq = normalize_sequence(lines[k])
    _check_sequence(seq, k + 1)
    k += 1
    third = lines[k].strip() if k < len(lines) else ""
    detected = "pairlist" if third == PAIRS_SENTINEL else "dotbracket"
    fmt = fmt or detected
    if fmt == "pairlist":
        if third != PAIRS_SENTINEL:
            raise StructureError(f"expected {PAIRS_SENTINEL!r}", k + 1)
        pairs = []
        seen: dict[int, int] = {}
        for lineno in range(k + 2, len(lines) + 1):
            raw = lines[lineno - 1].strip()
            if not raw:
                break
            fields = raw.split()
            if len(fields) != 2:
                raise StructureError(f"expected 'i j', got {raw!r}", lineno)
            try:
                i, j = int(fields[0]), int(fields[1])
            except ValueError:
                raise StructureError(f"non-integer pair {raw!r}", lineno) from None
            if not i < j:
                raise StructureError(f"pair ({i}, {j}): i < j required", lineno)
            for pos in (i, j):
                if not 1 <= pos <= len(seq):
                    raise StructureError(f"position {pos} out of range 1..{len(seq)}", lineno)
                if pos in seen:
                    raise StructureError(
                        f"position {pos} duplicated (also on line {seen[pos]})", lineno
                    )
                seen[pos] = lineno
            pairs.append((i, j))
    elif fmt == "dotbracket":
        if len(third) != len(seq):
            raise StructureError(
                f"structure length {len(third)} != sequence length {len(seq)}", k + 1
            )
        pairs = _parse_dotbracket(third, k + 1)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    r = make_structure(seq, pairs, name)
    if strict:
        for i, j in noncanonical_pairs(r):
            warnings.warn(
                f"{name or 'structure'}: non-canonical pair ({i}, {j}) "
                f"{r.sequence[i - 1]}-{r.sequence[j - 1]}",
                stacklevel=2,
            )
    return r


def to_dotbracket(r: RnaStructure) -> str:
    """Dot-bracket string; crossing pairs go to later bracket families.

    Raises StructureError when four families are not enough.
    """
    families: list[list[tuple]] = [[] for _ in BRACKETS]
    chars = ["."] * len(r)
    for i, j in sorted(r.pairs):
        for fam, (opener, closer) in zip(families, BRACKETS.items()):
            if all(not (a < i < b < j) for a, b in fam):
                fam.append((i, j))
                chars[i - 1], chars[j - 1] = opener, closer
                break
        else:
            raise StructureError("pairs need more than four bracket families; use pairlist")
    return "".join(chars)


def format_rna(r: RnaStructure, fmt: str = "pairlist") -> str:
    head = f">{r.name}\n{r.sequence}\n"
    if fmt == "dotbracket":
        return head + to_dotbracket(r) + "\n"
    body = "".join(f"{i} {j}\n" for i, j in sorted(r.pairs))
    return head + PAIRS_SENTINEL + "\n" + body


def read_structure(path, strict: bool = False) -> RnaStructure:
    with open(path, encoding="utf-8") as fh:
        return parse_rna(fh.read(), strict=strict)
