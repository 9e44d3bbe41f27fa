"""Brute-force references for testing the DP and the exact matcher.

Nothing here shares code paths with :mod:`rnalign.align_dp`.

Two levels of brute force are provided:

* :func:`enumerate_alignments` lists every valid column sequence over every
  admissible window; :func:`oracle_best_exhaustive` maximises ``sim_score``
  over it. Exponential, only for tiny inputs.
* :func:`enumerate_matchings` lists every valid correspondence of structural
  elements (which unpaired bases and which base pairs are matched).
  Given a matching, everything else is forced: unmatched elements are
  deleted or inserted, and between two consecutive matched columns the best
  arrangement puts all deletions together and all insertions together
  (one gap per non-empty side). Shrinking a fit/local window to the first and
  last matched element never lowers the score because every element and
  every gap costs a non-negative amount. :func:`oracle_best` maximises
  over matchings with those closed-form costs, which is much cheaper and is
  cross-checked against the column enumeration in the test suite.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import accumulate, product

import numpy as np

from .rna_model import ALPHABET, RnaStructure
from .scoring import (
    AlignmentResult,
    ScoringScheme,
    count_gaps,
    from_halves,
    sim_score,
)

__all__ = [
    "SIZE_GUARD",
    "enumerate_alignments",
    "oracle_best_exhaustive",
    "enumerate_matchings",
    "oracle_best",
    "oracle_scores_all",
    "oracle_best_batch",
    "naive_exact_match",
]

SIZE_GUARD = 8
_MODES = ("global", "fit", "local")


def _guard(r1, r2, mode):
    if mode not in _MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if len(r1) > SIZE_GUARD or len(r2) > SIZE_GUARD:
        raise ValueError(f"oracle limited to structures of length <= {SIZE_GUARD}")
    if mode == "fit" and (len(r1) == 0 or len(r2) == 0):
        raise ValueError("fit mode needs a non-empty pattern and text")


def _window_columns(r1, w1, r2, w2):
    """Every valid column list aligning ``r1[w1]`` with ``r2[w2]``."""
    s1, e1 = w1
    s2, e2 = w2
    p1, p2 = r1.partners, r2.partners
    cols: list = []
    pend: list = []  # matched pairs awaiting their 3' ends, innermost last

    def rec(x, y):
        if x > e1 and y > e2:
            yield list(cols)
            return
        top = pend[-1] if pend else None
        y_free = y <= e2 and not (top and y == top[1])
        if x <= e1:
            if top and x == top[0]:
                if y == top[1]:
                    pend.pop()
                    cols.append((x, y))
                    yield from rec(x + 1, y + 1)
                    cols.pop()
                    pend.append(top)
            else:
                cols.append((x, None))
                yield from rec(x + 1, y)
                cols.pop()
                if y_free:
                    px, py = p1[x], p2[y]
                    if px == x and py == y:
                        cols.append((x, y))
                        yield from rec(x + 1, y + 1)
                        cols.pop()
                    elif (
                        x < px <= e1 and y < py <= e2
                        and (top is None or (px < top[0] and py < top[1]))
                    ):
                        pend.append((px, py))
                        cols.append((x, y))
                        yield from rec(x + 1, y + 1)
                        cols.pop()
                        pend.pop()
        if y_free:
            cols.append((None, y))
            yield from rec(x, y + 1)
            cols.pop()

    yield from rec(s1, s2)


def _windows(n):
    return [(k, l) for k in range(1, n + 1) for l in range(k, n + 1)]


def enumerate_alignments(r1: RnaStructure, r2: RnaStructure, mode: str = "global", scheme: ScoringScheme | None = None):
    """Yield every valid alignment for the mode as an AlignmentResult.

    Global uses the full structures; fit every non-empty window of ``r2``
    against all of ``r1`` plus the empty window (pattern fully deleted);
    local every pair of non-empty windows plus the empty alignment.
    ``score`` is filled in only when ``scheme`` is given.
    """
    _guard(r1, r2, mode)
    m, n = len(r1), len(r2)
    if mode == "global":
        window_pairs = [((1, m), (1, n))]
    elif mode == "fit":
        window_pairs = [((1, m), w) for w in _windows(n)] + [((1, m), (1, 0))]
    else:
        window_pairs = [(a, b) for a in _windows(m) for b in _windows(n)] + [((1, 0), (1, 0))]
    s1, s2 = r1.sequence, r2.sequence
    for w1, w2 in window_pairs:
        for cols in _window_columns(r1, w1, r2, w2):
            row1 = "".join("-" if a is None else s1[a - 1] for a, _ in cols)
            row2 = "".join("-" if b is None else s2[b - 1] for _, b in cols)
            aln = AlignmentResult(row1, row2, w1, w2, None, count_gaps(row1, row2), mode)
            if scheme is not None:
                aln = AlignmentResult(row1, row2, w1, w2, sim_score(aln, r1, r2, scheme), aln.gap_count, mode)
            yield aln


def oracle_best_exhaustive(r1, r2, mode, scheme) -> Fraction:
    return max(sim_score(a, r1, r2, scheme) for a in enumerate_alignments(r1, r2, mode))


def enumerate_matchings(r1: RnaStructure, r2: RnaStructure):
    """Yield every valid element correspondence as a tuple of matched columns.

    A column ``(i, j)`` matches two unpaired bases, two 5' ends or two
    3' ends; matched pairs appear as their two end columns. Columns are
    increasing in both coordinates and matched pairs are nested or disjoint.
    """
    p1, p2 = r1.partners, r2.partners
    m, n = len(r1), len(r2)
    cols: list = []
    pend: list = []

    def rec(x, lastj):
        if x > m:
            yield tuple(cols)
            return
        if pend and pend[-1][0] == x:
            top = pend.pop()
            cols.append((x, top[1]))
            yield from rec(x + 1, top[1])
            cols.pop()
            pend.append(top)
            return
        yield from rec(x + 1, lastj)
        px = p1[x]
        hi = pend[-1][1] if pend else n + 1
        if px == x:
            for j in range(lastj + 1, hi):
                if p2[j] == j:
                    cols.append((x, j))
                    yield from rec(x + 1, j)
                    cols.pop()
        elif px > x and (not pend or px < pend[-1][0]):
            for j in range(lastj + 1, hi):
                d = p2[j]
                if j < d < hi:
                    pend.append((px, d))
                    cols.append((x, j))
                    yield from rec(x + 1, j)
                    cols.pop()
                    pend.pop()

    yield from rec(1, 0)


def _indel_halves(r, per_base, per_pair_end):
    p = r.partners
    return [0] + [per_base if p[k] == k else per_pair_end for k in range(1, len(r) + 1)]


def _structural_costs(r1, r2, matching, h):
    """Sequence-independent part of a matching's score in each mode (half-units)."""
    g = h["gap"]
    m, n = len(r1), len(r2)
    d1 = _indel_halves(r1, h["base_del"], h["pair_del_end"])
    d2 = _indel_halves(r2, h["base_ins"], h["pair_ins_end"])
    pre1 = list(accumulate(d1))
    pre2 = list(accumulate(d2))
    if not matching:
        costs = {"global": -pre1[m] - pre2[n] - g * ((m > 0) + (n > 0))}
        costs["fit"] = -pre1[m] - g * (m > 0)
        costs["local"] = 0
        return costs
    matched1 = sum(d1[i] for i, _ in matching)
    matched2 = sum(d2[j] for _, j in matching)
    inner_gaps = 0
    for (i0, j0), (i, j) in zip(matching, matching[1:]):
        inner_gaps += (i - i0 > 1) + (j - j0 > 1)
    (fi, fj), (li, lj) = matching[0], matching[-1]
    window2 = pre2[lj] - pre2[fj - 1] - matched2
    window1 = pre1[li] - pre1[fi - 1] - matched1
    costs = {
        "global": -(pre1[m] - matched1) - (pre2[n] - matched2)
        - g * (inner_gaps + (fi > 1) + (fj > 1) + (li < m) + (lj < n)),
        "fit": -(pre1[m] - matched1) - window2 - g * (inner_gaps + (fi > 1) + (li < m)),
        "local": -window1 - window2 - g * inner_gaps,
    }
    return costs


def _matching_gamma(r1, r2, matching, h):
    p1 = r1.partners
    s1, s2 = r1.sequence, r2.sequence
    sub, tiers = h["sub"], h["pair_tiers"]
    idx = ALPHABET.index
    total = 0
    for i, j in matching:
        if p1[i] == i:
            total += sub[idx(s1[i - 1])][idx(s2[j - 1])]
        elif p1[i] < i:
            i5, j5 = p1[i], r2.partners[j]
            total += tiers[(s1[i5 - 1] == s2[j5 - 1]) + (s1[i - 1] == s2[j - 1])]
    return total


def oracle_scores_all(r1: RnaStructure, r2: RnaStructure, scheme: ScoringScheme) -> dict:
    """Best score per mode (Fractions) by maximising over all matchings."""
    h = scheme.halves
    best = {mode: None for mode in _MODES}
    for matching in enumerate_matchings(r1, r2):
        gam = _matching_gamma(r1, r2, matching, h)
        for mode, c in _structural_costs(r1, r2, matching, h).items():
            v = gam + c
            if best[mode] is None or v > best[mode]:
                best[mode] = v
    return {mode: from_halves(v) for mode, v in best.items()}


def oracle_best(r1: RnaStructure, r2: RnaStructure, mode: str, scheme: ScoringScheme) -> Fraction:
    _guard(r1, r2, mode)
    return oracle_scores_all(r1, r2, scheme)[mode]


def oracle_best_batch(shape1: RnaStructure, shape2: RnaStructure, seqs1, seqs2, scheme: ScoringScheme) -> dict:
    """Oracle optimum for every sequence assignment on two fixed pairings.

    ``shape1``/``shape2`` supply the pairs (their sequences are ignored);
    ``seqs1``/``seqs2`` are lists of sequences of the matching lengths.
    Returns ``{mode: int array (len(seqs1), len(seqs2))}`` in half-units.
    """
    h = scheme.halves
    idx = {b: k for k, b in enumerate(ALPHABET)}
    S1 = np.array([[idx[c] for c in s] for s in seqs1], dtype=np.int64).reshape(len(seqs1), len(shape1))
    S2 = np.array([[idx[c] for c in s] for s in seqs2], dtype=np.int64).reshape(len(seqs2), len(shape2))
    sub = np.array(h["sub"], dtype=np.int64)
    tiers = np.array(h["pair_tiers"], dtype=np.int64)
    p1, p2 = shape1.partners, shape2.partners
    sub_cache: dict = {}
    eq_cache: dict = {}

    def sub_at(i, j):
        if (i, j) not in sub_cache:
            sub_cache[i, j] = sub[S1[:, i - 1][:, None], S2[:, j - 1][None, :]]
        return sub_cache[i, j]

    def eq_at(i, j):
        if (i, j) not in eq_cache:
            eq_cache[i, j] = (S1[:, i - 1][:, None] == S2[:, j - 1][None, :]).astype(np.int64)
        return eq_cache[i, j]

    shape_out = (len(seqs1), len(seqs2))
    best = {mode: np.full(shape_out, np.iinfo(np.int64).min, dtype=np.int64) for mode in _MODES}
    for matching in enumerate_matchings(shape1, shape2):
        gam = np.zeros(shape_out, dtype=np.int64)
        for i, j in matching:
            if p1[i] == i:
                gam += sub_at(i, j)
            elif p1[i] < i:
                gam += tiers[eq_at(p1[i], p2[j]) + eq_at(i, j)]
        for mode, c in _structural_costs(shape1, shape2, matching, h).items():
            np.maximum(best[mode], gam + c, out=best[mode])
    return best


def naive_exact_match(r1: RnaStructure, r2: RnaStructure) -> list[int]:
    """Check every offset of ``r2`` against both exact-match conditions directly."""
    m, n = len(r1), len(r2)
    p1, p2 = r1.partners, r2.partners
    hits = []
    for i in range(1, n - m + 2):
        if r2.sequence[i - 1:i + m - 1] != r1.sequence:
            continue
        ok = all((p1[j] == j) == (p2[i + j - 1] == i + j - 1) for j in range(1, m + 1))
        ok = ok and all((a + i - 1, b + i - 1) in r2.pairs for a, b in r1.pairs)
        ok = ok and all(
            (a - i + 1, b - i + 1) in r1.pairs
            for a, b in r2.pairs
            if i <= a <= i + m - 1 and i <= b <= i + m - 1
        )
        if ok:
            hits.append(i)
    return hits


def all_sequences(length: int, alphabet: str = "AC") -> list[str]:
    return ["".join(t) for t in product(alphabet, repeat=length)]
