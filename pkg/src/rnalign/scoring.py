"""Similarity scoring for structural alignments.

Scores are exact half-integers. Internally every quantity is an ``int`` count
of half-units (see :func:`to_halves`); public results are ``Fraction``.

Element scores follow the usual similarity-to-DP conversion: an unpaired base
costs its own indel penalty, each end of a base pair costs half the pair's
indel penalty, and a pair-to-pair substitution is scored once, at the 3' ends.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from itertools import groupby

from .rna_model import ALPHABET, RnaStructure

__all__ = [
    "ScoringScheme",
    "SchemeError",
    "InvalidAlignment",
    "ElementScores",
    "AlignmentResult",
    "DEFAULT_SCHEME",
    "derive_element_scores",
    "load_scheme",
    "sim_score",
    "validate_alignment",
    "count_gaps",
    "to_halves",
    "from_halves",
]

GAP = "-"


def to_halves(value) -> int:
    """Exact half-unit count of ``value``; raises ValueError if not a half-integer."""
    twice = Fraction(value) * 2
    if twice.denominator != 1:
        raise ValueError(f"{value} is not a multiple of 1/2")
    return int(twice)


def from_halves(h: int) -> Fraction:
    return Fraction(h, 2)


class SchemeError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvalidAlignment(ValueError):
    pass


_SCALAR_FIELDS = (
    "base_del", "base_ins", "pair_match", "pair_half", "pair_mismatch",
    "pair_del", "pair_ins", "gap_open",
)


def _default_subst(match, mismatch):
    return {(a, b): Fraction(match if a == b else mismatch) for a in ALPHABET for b in ALPHABET}


@dataclass(frozen=True)
class ScoringScheme:
    """Scores for the six edit operations plus the gap-open penalty.

    Deletion/insertion values and ``gap_open`` are stored as positive
    penalties; the similarity contribution is their negation. Pair
    substitution depends on how many of the two positions agree
    (5' with 5', 3' with 3').
    """

    base_subst: dict = field(default_factory=lambda: _default_subst(2, -1))
    base_del: Fraction = Fraction(1)
    base_ins: Fraction = Fraction(1)
    pair_match: Fraction = Fraction(5)
    pair_half: Fraction = Fraction(1)
    pair_mismatch: Fraction = Fraction(-1)
    pair_del: Fraction = Fraction(4)
    pair_ins: Fraction = Fraction(4)
    gap_open: Fraction = Fraction(3)

    def __post_init__(self):
        problems = check_scheme(self)
        if problems:
            raise SchemeError("; ".join(problems))

    def __hash__(self):
        return hash((tuple(sorted(self.base_subst.items())),) + self._scalars())

    def _scalars(self):
        return tuple(getattr(self, key) for key in _SCALAR_FIELDS)

    @cached_property
    def halves(self) -> dict:
        """Every score as an int count of half-units (pair indels already halved per end)."""
        return {
            "sub": [[to_halves(self.base_subst[a, b]) for b in ALPHABET] for a in ALPHABET],
            "pair_tiers": tuple(
                to_halves(v) for v in (self.pair_mismatch, self.pair_half, self.pair_match)
            ),
            "base_del": to_halves(self.base_del),
            "base_ins": to_halves(self.base_ins),
            "pair_del_end": to_halves(self.pair_del) // 2,
            "pair_ins_end": to_halves(self.pair_ins) // 2,
            "gap": to_halves(self.gap_open),
        }

    def subst(self, a: str, b: str) -> Fraction:
        return self.base_subst[a, b]

    def pair_subst(self, a5: str, a3: str, b5: str, b3: str) -> Fraction:
        agree = (a5 == b5) + (a3 == b3)
        return (self.pair_mismatch, self.pair_half, self.pair_match)[agree]


def _value_problem(key: str, v, identical: bool = False) -> str | None:
    """Sign and granularity rule for one scheme entry, or None if it is fine."""
    v = Fraction(v)
    if (v * 2).denominator != 1:
        return f"{key} = {v}: scores must be multiples of 1/2"
    if key in ("pair_del", "pair_ins") and v.denominator != 1:
        return f"{key} = {v} must be an integer (each end costs half)"
    if key in ("base_del", "base_ins", "pair_del", "pair_ins") and v < 0:
        return f"{key} = {v}: deletion/insertion penalties must be >= 0"
    if (identical or key in ("pair_match", "base_match")) and v < 0:
        return f"{key} = {v}: identical elements must score >= 0"
    if key == "gap_open" and v <= 0:
        return f"gap_open = {v}: g must be positive (gap score G = -g < 0)"
    return None


def check_scheme(s: ScoringScheme) -> list[str]:
    problems = []
    for (a, b), v in sorted(s.base_subst.items()):
        problem = _value_problem(f"subst {a} {b}", v, a == b)
        if problem:
            problems.append(problem)
    for key in _SCALAR_FIELDS:
        problem = _value_problem(key, getattr(s, key))
        if problem:
            problems.append(problem)
    missing = {(a, b) for a in ALPHABET for b in ALPHABET} - set(s.base_subst)
    if missing:
        problems.append(f"base_subst missing entries {sorted(missing)}")
    return problems


DEFAULT_SCHEME = ScoringScheme()

_SCALAR_KEYS = (
    "base_match", "base_mismatch", "base_del", "base_ins", "pair_match",
    "pair_half", "pair_mismatch", "pair_del", "pair_ins", "gap_open",
)
_KV = re.compile(r"^([A-Za-z_]+)\s*=\s*(\S+)$")


def load_scheme(text: str) -> ScoringScheme:
    """Parse a ``key = value`` scheme file; omitted keys keep their defaults.

    ``subst X Y v`` lines override single entries of the 4x4 base table after
    ``base_match``/``base_mismatch`` have been applied.
    """
    scalars = {"base_match": Fraction(2), "base_mismatch": Fraction(-1)}
    overrides = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.split()[0] == "subst":
            parts = line.split()
            if len(parts) != 4:
                raise SchemeError(f"expected 'subst X Y value', got {raw.strip()!r}", lineno)
            a, b = parts[1].upper().replace("T", "U"), parts[2].upper().replace("T", "U")
            if a not in ALPHABET or b not in ALPHABET:
                raise SchemeError(f"unknown base in {raw.strip()!r}", lineno)
            value = _number(parts[3], lineno)
            problem = _value_problem(f"subst {a} {b}", value, a == b)
            if problem:
                raise SchemeError(problem, lineno)
            overrides[a, b] = value
            continue
        m = _KV.match(line)
        if not m:
            raise SchemeError(f"malformed line {raw.strip()!r}", lineno)
        key, value = m.group(1), m.group(2)
        if key not in _SCALAR_KEYS:
            raise SchemeError(f"unknown key {key!r}", lineno)
        scalars[key] = _number(value, lineno)
        problem = _value_problem(key, scalars[key])
        if problem:
            raise SchemeError(problem, lineno)
    subst = _default_subst(scalars.pop("base_match"), scalars.pop("base_mismatch"))
    subst.update(overrides)
    return ScoringScheme(base_subst=subst, **scalars)


def _number(text, lineno):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise SchemeError(f"not a number: {text!r}", lineno) from None


_BASE_INDEX = {b: k for k, b in enumerate(ALPHABET)}


class ElementScores:
    """Per-position scores for one structure pair under one scheme.

    The DP reads the padded half-unit arrays ``del1``/``ins2`` and the
    substitution matrix directly; :meth:`gamma`, :meth:`delta_del` and
    :meth:`delta_ins` give the same values as Fractions.
    """

    def __init__(self, scheme: ScoringScheme, r1: RnaStructure, r2: RnaStructure):
        self.scheme = scheme
        self.r1, self.r2 = r1, r2
        self.p1, self.p2 = r1.partners, r2.partners
        h = scheme.halves
        self.gap = h["gap"]
        self.b1 = (0,) + tuple(_BASE_INDEX[c] for c in r1.sequence)
        self.b2 = (0,) + tuple(_BASE_INDEX[c] for c in r2.sequence)
        self.sub = h["sub"]
        self.pair_tiers = h["pair_tiers"]
        bd, pd = h["base_del"], h["pair_del_end"]
        bi, pi = h["base_ins"], h["pair_ins_end"]
        self.del1 = (0,) + tuple(bd if self.p1[i] == i else pd for i in range(1, len(r1) + 1))
        self.ins2 = (0,) + tuple(bi if self.p2[j] == j else pi for j in range(1, len(r2) + 1))

    def pair_gamma(self, i: int, j: int) -> int:
        """Half-unit score of matching the pairs whose 3' ends are ``i`` and ``j``."""
        b1, b2 = self.b1, self.b2
        agree = (b1[self.p1[i]] == b2[self.p2[j]]) + (b1[i] == b2[j])
        return self.pair_tiers[agree]

    def gamma_halves(self, i: int, j: int) -> int:
        pi, pj = self.p1[i], self.p2[j]
        if pi == i and pj == j:
            return self.sub[self.b1[i]][self.b2[j]]
        if pi < i and pj < j:
            return self.pair_gamma(i, j)
        raise ValueError(f"gamma({i}, {j}) undefined: elements are not both unpaired or both 3' ends")

    def gamma(self, i: int, j: int) -> Fraction:
        return from_halves(self.gamma_halves(i, j))

    def delta_del(self, i: int) -> Fraction:
        return from_halves(self.del1[i])

    def delta_ins(self, j: int) -> Fraction:
        return from_halves(self.ins2[j])


def derive_element_scores(scheme: ScoringScheme, r1: RnaStructure, r2: RnaStructure) -> ElementScores:
    return ElementScores(scheme, r1, r2)


@dataclass(frozen=True)
class AlignmentResult:
    """A finished alignment of ``r1[region1]`` against ``r2[region2]``.

    Regions are 1-based inclusive ``(start, end)``; an empty region has
    ``end == start - 1``.
    """

    row1: str
    row2: str
    region1: tuple
    region2: tuple
    score: Fraction
    gap_count: int
    mode: str = "global"

    def columns(self) -> list[tuple]:
        """Aligned positions per column, ``None`` where the row has a gap."""
        i, j = self.region1[0], self.region2[0]
        cols = []
        for c1, c2 in zip(self.row1, self.row2):
            a = b = None
            if c1 != GAP:
                a, i = i, i + 1
            if c2 != GAP:
                b, j = j, j + 1
            cols.append((a, b))
        return cols

    @property
    def matched_columns(self) -> list[bool]:
        return [c1 != GAP and c2 != GAP for c1, c2 in zip(self.row1, self.row2)]


def count_gaps(row1: str, row2: str) -> int:
    """Number of maximal runs of '-' over both rows."""
    return sum(1 for row in (row1, row2) for is_gap, _ in groupby(row, key=lambda c: c == GAP) if is_gap)


def validate_alignment(aln: AlignmentResult, r1: RnaStructure, r2: RnaStructure) -> list[str]:
    """Check that the rows form a structural alignment of the two regions."""
    problems = []
    if len(aln.row1) != len(aln.row2):
        return [f"rows differ in length ({len(aln.row1)} vs {len(aln.row2)})"]
    for label, row, r, (s, e) in (("row1", aln.row1, r1, aln.region1), ("row2", aln.row2, r2, aln.region2)):
        if not (1 <= s <= e + 1 <= len(r) + 1):
            problems.append(f"{label}: region ({s}, {e}) outside 1..{len(r)}")
            return problems
        if row.replace(GAP, "") != r.sequence[s - 1:e]:
            problems.append(f"{label}: ungapped row differs from region {s}..{e}")
    if problems:
        return problems
    cols = aln.columns()
    for c, (a, b) in enumerate(cols, start=1):
        if a is None and b is None:
            problems.append(f"column {c}: gap in both rows")
    col1 = {a: c for c, (a, b) in enumerate(cols) if a is not None}
    col2 = {b: c for c, (a, b) in enumerate(cols) if b is not None}
    p1, p2 = r1.partners, r2.partners
    matched = []
    for c, (a, b) in enumerate(cols, start=1):
        if a is None or b is None:
            continue
        ua, ub = p1[a] == a, p2[b] == b
        if ua and ub:
            continue
        if ua != ub:
            problems.append(
                f"column {c}: {'unpaired' if ua else 'paired'} base {a} of R1 aligned to "
                f"{'unpaired' if ub else 'paired'} base {b} of R2"
            )
            continue
        pa, pb = p1[a], p2[b]
        if pa not in col1 or pb not in col2 or col1[pa] != col2[pb]:
            problems.append(
                f"column {c}: pair ({min(a, pa)}, {max(a, pa)}) of R1 not aligned to "
                f"pair ({min(b, pb)}, {max(b, pb)}) of R2"
            )
        elif a < pa:
            matched.append((col1[a], col1[pa]))
    matched.sort()
    for x in range(len(matched)):
        s1, e1 = matched[x]
        for s2, e2 in matched[x + 1:]:
            if s1 < s2 < e1 < e2:
                problems.append(f"matched pairs at columns {s1 + 1}-{e1 + 1} and {s2 + 1}-{e2 + 1} cross")
    return problems


def sim_score(aln: AlignmentResult, r1: RnaStructure, r2: RnaStructure, scheme: ScoringScheme) -> Fraction:
    """Rescore an alignment column by column from the element scores."""
    problems = validate_alignment(aln, r1, r2)
    if problems:
        raise InvalidAlignment("; ".join(problems))
    es = ElementScores(scheme, r1, r2)
    total = 0
    for a, b in aln.columns():
        if b is None:
            total -= es.del1[a]
        elif a is None:
            total -= es.ins2[b]
        elif es.p1[a] >= a:  # unpaired, or 5' end (scored with its 3' end)
            total += es.sub[es.b1[a]][es.b2[b]] if es.p1[a] == a else 0
        else:
            total += es.pair_gamma(a, b)
    total -= es.gap * count_gaps(aln.row1, aln.row2)
    return from_halves(total)
