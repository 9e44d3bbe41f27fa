"""Two-phase affine-gap structural alignment (global, fit and local modes).

Phase 1 fills a table of global alignment scores between the interiors of
every pair of base pairs, visiting both pair lists in 3'-end order so nested
lookups are always ready. Phase 2 runs the same three-table recurrence
(``A`` best overall, ``D`` ending in a deletion, ``I`` ending in an insertion)
over the whole structures, with the boundary rows of the requested mode.

A 3' end only takes the pair-match case when its partner lies inside the
current window; that is what keeps matched pairs non-crossing even when the
inputs contain pseudoknots. All scores are ints in half-units.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .rna_model import RnaStructure
from .scoring import (
    DEFAULT_SCHEME,
    AlignmentResult,
    ElementScores,
    ScoringScheme,
    count_gaps,
    from_halves,
)

__all__ = [
    "MODES",
    "NEG_INF",
    "DpTables",
    "PairTable",
    "phase1_pair_table",
    "window_dp",
    "best_end",
    "fit_end_columns",
    "traceback",
    "align",
]

MODES = ("global", "fit", "local")
NEG_INF = float("-inf")


@dataclass
class DpTables:
    """``A``, ``D``, ``I`` indexed by prefix lengths ``[x][y]`` of the two windows."""

    A: list
    D: list
    I: list
    win1: tuple
    win2: tuple
    mode: str

    @property
    def shape(self):
        return len(self.A) - 1, len(self.A[0]) - 1


@dataclass
class PairTable:
    """Phase-1 inner scores keyed by the 3' ends ``(i, j)`` of a pair in each structure."""

    inner: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.inner)

    def __getitem__(self, ends):
        return self.inner[ends]


def _check_mode(mode):
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def window_dp(scores: ElementScores, win1, win2, mode="global", pair_table=None) -> DpTables:
    """Fill the A/D/I tables for ``r1[win1]`` against ``r2[win2]``.

    Windows are 1-based inclusive ``(start, end)``; ``end = start - 1`` is an
    empty window. Fit and local modes are only meaningful on full windows.
    """
    _check_mode(mode)
    i1, i2 = win1
    j1, j2 = win2
    n1, n2 = i2 - i1 + 1, j2 - j1 + 1
    g = scores.gap
    del1, ins2 = scores.del1, scores.ins2
    p1, p2 = scores.p1, scores.p2
    b1, b2, sub = scores.b1, scores.b2, scores.sub
    inner = pair_table.inner if pair_table is not None else {}
    pair_gamma = scores.pair_gamma
    local = mode == "local"

    A = [[NEG_INF] * (n2 + 1) for _ in range(n1 + 1)]
    D = [[NEG_INF] * (n2 + 1) for _ in range(n1 + 1)]
    I = [[NEG_INF] * (n2 + 1) for _ in range(n1 + 1)]
    A[0][0] = 0
    if mode == "global":
        D[0][0] = I[0][0] = -g
        for x in range(1, n1 + 1):
            D[x][0] = A[x][0] = D[x - 1][0] - del1[i1 + x - 1]
            I[x][0] = D[x][0] - g
        for y in range(1, n2 + 1):
            I[0][y] = A[0][y] = I[0][y - 1] - ins2[j1 + y - 1]
            D[0][y] = I[0][y] - g
    elif mode == "fit":
        # I[0][y] (y >= 0) is never read and stays -inf
        D[0][0] = -g
        for x in range(1, n1 + 1):
            D[x][0] = A[x][0] = D[x - 1][0] - del1[i1 + x - 1]
            I[x][0] = D[x][0] - g
        for y in range(1, n2 + 1):
            A[0][y] = 0
            D[0][y] = -g
    else:
        # D[x][0] and I[0][y] are never read and stay -inf
        for x in range(1, n1 + 1):
            A[x][0] = 0
            I[x][0] = -g
        for y in range(1, n2 + 1):
            A[0][y] = 0
            D[0][y] = -g

    # per-column classification of the R2 window: base index for unpaired,
    # otherwise the prefix length before the 5' end (or None if unusable)
    col_base = [None] * (n2 + 1)
    col_pair = [None] * (n2 + 1)
    for y in range(1, n2 + 1):
        j = j1 + y - 1
        pj = p2[j]
        if pj == j:
            col_base[y] = b2[j]
        elif j1 <= pj < j:
            col_pair[y] = pj - j1
    ins_open = [0] + [ins2[j1 + y - 1] + g for y in range(1, n2 + 1)]
    ins_ext = [0] + [ins2[j1 + y - 1] for y in range(1, n2 + 1)]

    for x in range(1, n1 + 1):
        i = i1 + x - 1
        dd = del1[i]
        ddg = dd + g
        Ap, Dp = A[x - 1], D[x - 1]
        Ax, Dx, Ix = A[x], D[x], I[x]
        pi = p1[i]
        srow = sub[b1[i]] if pi == i else None
        Apx = A[pi - i1] if i1 <= pi < i else None
        a_left = Ax[0]
        i_left = Ix[0]
        for y in range(1, n2 + 1):
            dv = Dp[y] - dd
            t = Ap[y] - ddg
            if t > dv:
                dv = t
            iv = i_left - ins_ext[y]
            t = a_left - ins_open[y]
            if t > iv:
                iv = t
            if local:
                if dv < 0:
                    dv = 0
                if iv < 0:
                    iv = 0
            av = dv if dv > iv else iv
            if srow is not None:
                cb = col_base[y]
                if cb is not None:
                    t = Ap[y - 1] + srow[cb]
                    if t > av:
                        av = t
            elif Apx is not None:
                py = col_pair[y]
                if py is not None:
                    j = j1 + y - 1
                    t = Apx[py] + inner[i, j] + pair_gamma(i, j)
                    if t > av:
                        av = t
            if local and av < 0:
                av = 0
            Dx[y] = dv
            Ix[y] = iv
            Ax[y] = av
            a_left = av
            i_left = iv
    return DpTables(A, D, I, (i1, i2), (j1, j2), mode)


def phase1_pair_table(scores: ElementScores) -> PairTable:
    """Global scores of every (pair interior of R1, pair interior of R2) combination."""
    table = PairTable()
    l1 = scores.r1.sorted_pairs()
    l2 = scores.r2.sorted_pairs()
    for a, b in l1:
        for c, d in l2:
            t = window_dp(scores, (a + 1, b - 1), (c + 1, d - 1), "global", table)
            table.inner[b, d] = t.A[-1][-1]
    return table


def best_end(tables: DpTables, mode=None):
    """Optimal score (Fraction) and its end cell ``(x, y)`` for the mode.

    Fit takes the leftmost best column of the last row; local the
    lexicographically smallest best cell.
    """
    mode = mode or tables.mode
    _check_mode(mode)
    A = tables.A
    m, n = tables.shape
    if mode == "global":
        return from_halves(A[m][n]), (m, n)
    if mode == "fit":
        row = A[m]
        best = max(row)
        return from_halves(best), (m, row.index(best))
    best, cell = 0, (0, 0)
    for x, row in enumerate(A):
        top = max(row)
        if top > best:
            best, cell = top, (x, row.index(top))
    return from_halves(best), cell


def fit_end_columns(tables: DpTables) -> list[int]:
    """Every column of the last row that attains the optimal fit score."""
    row = tables.A[-1]
    best = max(row)
    return [y for y, v in enumerate(row) if v == best]


class _Frame:
    __slots__ = ("tables", "mode", "state", "x", "y", "pending")

    def __init__(self, tables, mode, x, y):
        self.tables, self.mode = tables, mode
        self.state, self.x, self.y = "A", x, y
        self.pending = None


def traceback(scores: ElementScores, pair_table: PairTable, tables: DpTables, end):
    """Reconstruct the columns of an optimal alignment ending at cell ``end``.

    Returns ``(columns, start)`` where ``columns`` is a list of
    ``(i or None, j or None)`` position pairs and ``start`` is the cell of the
    top-level table where the traceback stopped. Pair-match steps recompute
    the enclosed phase-1 window and trace through it.
    """
    g = scores.gap
    del1, ins2 = scores.del1, scores.ins2
    p1, p2 = scores.p1, scores.p2
    out = []
    top = _Frame(tables, tables.mode, *end)
    stack = [top]
    start = None
    while stack:
        fr = stack[-1]
        T, mode, x, y = fr.tables, fr.mode, fr.x, fr.y
        i1, j1 = T.win1[0], T.win2[0]
        if x == 0 or y == 0:
            if mode == "local" or (mode == "fit" and x == 0):
                pass
            else:
                out.extend((i1 + k - 1, None) for k in range(x, 0, -1))
                out.extend((None, j1 + k - 1) for k in range(y, 0, -1))
                x = y = 0
            if fr is top:
                start = (x, y)
            stack.pop()
            if stack and stack[-1].pending is not None:
                out.append(stack[-1].pending)
                stack[-1].pending = None
            continue
        A, D, I = T.A, T.D, T.I
        i, j = i1 + x - 1, j1 + y - 1
        if fr.state == "A":
            v = A[x][y]
            if mode == "local" and v == 0:
                start = (x, y)
                stack.pop()
                continue
            pi, pj = p1[i], p2[j]
            if pi == i and pj == j and A[x - 1][y - 1] + scores.sub[scores.b1[i]][scores.b2[j]] == v:
                out.append((i, j))
                fr.x, fr.y = x - 1, y - 1
                continue
            if i1 <= pi < i and j1 <= pj < j:
                px, py = pi - i1, pj - j1
                inner_score = pair_table.inner[i, j]
                if A[px][py] + inner_score + scores.pair_gamma(i, j) == v:
                    out.append((i, j))
                    fr.x, fr.y, fr.pending = px, py, (pi, pj)
                    sub_t = window_dp(scores, (pi + 1, i - 1), (pj + 1, j - 1), "global", pair_table)
                    assert sub_t.A[-1][-1] == inner_score
                    stack.append(_Frame(sub_t, "global", *sub_t.shape))
                    continue
            if D[x][y] == v:
                fr.state = "D"
            elif I[x][y] == v:
                fr.state = "I"
            else:
                raise AssertionError(f"no derivation for A[{x}][{y}] = {v}")
        elif fr.state == "D":
            v = D[x][y]
            out.append((i, None))
            dd = del1[i]
            fr.x = x - 1
            if D[x - 1][y] - dd == v:
                pass
            elif A[x - 1][y] - dd - g == v:
                fr.state = "A"
            else:
                raise AssertionError(f"no derivation for D[{x}][{y}] = {v}")
        else:
            v = I[x][y]
            out.append((None, j))
            di = ins2[j]
            fr.y = y - 1
            if I[x][y - 1] - di == v:
                pass
            elif A[x][y - 1] - di - g == v:
                fr.state = "A"
            else:
                raise AssertionError(f"no derivation for I[{x}][{y}] = {v}")
    out.reverse()
    return out, start


def _rows(r1, r2, cols):
    s1, s2 = r1.sequence, r2.sequence
    row1 = "".join("-" if a is None else s1[a - 1] for a, _ in cols)
    row2 = "".join("-" if b is None else s2[b - 1] for _, b in cols)
    return row1, row2


def align(
    r1: RnaStructure,
    r2: RnaStructure,
    mode: str = "global",
    scheme: ScoringScheme = DEFAULT_SCHEME,
    *,
    scores: ElementScores | None = None,
    pair_table: PairTable | None = None,
) -> AlignmentResult:
    """Optimal structural alignment of ``r1`` and ``r2``.

    Parameters
    ----------
    r1, r2 : RnaStructure
        In fit mode ``r1`` is the pattern, aligned in full, and ``r2`` the text.
    mode : {"global", "fit", "local"}
    scheme : ScoringScheme
    scores, pair_table : optional
        Precomputed element scores and phase-1 table for this structure pair
        and scheme, to share work across modes.

    Returns
    -------
    AlignmentResult
        Rows, covered regions, exact score and gap count. Fit reports the
        leftmost optimal end column of the text.
    """
    _check_mode(mode)
    if mode == "fit" and (len(r1) == 0 or len(r2) == 0):
        raise ValueError("fit mode needs a non-empty pattern and text")
    if scores is None:
        scores = ElementScores(scheme, r1, r2)
    if pair_table is None:
        pair_table = phase1_pair_table(scores)
    tables = window_dp(scores, (1, len(r1)), (1, len(r2)), mode, pair_table)
    score, end = best_end(tables, mode)
    cols, start = traceback(scores, pair_table, tables, end)
    row1, row2 = _rows(r1, r2, cols)
    region1 = (start[0] + 1, end[0])
    region2 = (start[1] + 1, end[1])
    return AlignmentResult(row1, row2, region1, region2, Fraction(score), count_gaps(row1, row2), mode)
