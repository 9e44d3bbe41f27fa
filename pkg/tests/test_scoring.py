import dataclasses
import random
import re
from fractions import Fraction

import pytest
from hypothesis import given, settings

from rnalign.align_dp import align
from rnalign.rna_model import make_structure
from rnalign.scoring import (
    DEFAULT_SCHEME,
    AlignmentResult,
    InvalidAlignment,
    SchemeError,
    ScoringScheme,
    count_gaps,
    derive_element_scores,
    load_scheme,
    sim_score,
    to_halves,
    validate_alignment,
)
from strategies import random_scheme, random_structure, schemes, structures


def hand_score(aln, r1, r2, s):
    """Operation-level rescoring straight from the scheme fields.

    Written independently of the element-score conversion: pairs are scored
    once as whole operations (substitution, deletion, insertion, half-pair
    indel) rather than split over their two ends.
    """
    cols = aln.columns()
    p1, p2 = r1.partners, r2.partners
    where1 = {a: k for k, (a, _) in enumerate(cols) if a is not None}
    where2 = {b: k for k, (_, b) in enumerate(cols) if b is not None}
    total = Fraction(0)
    for a, b in cols:
        if a is not None and b is not None:
            if p1[a] == a:
                total += s.base_subst[r1.sequence[a - 1], r2.sequence[b - 1]]
            elif a < p1[a]:
                total += s.pair_subst(
                    r1.sequence[a - 1], r1.sequence[p1[a] - 1],
                    r2.sequence[b - 1], r2.sequence[p2[b] - 1],
                )
    for r, side, where, base_pen, pair_pen in (
        (r1, 0, where1, s.base_del, s.pair_del),
        (r2, 1, where2, s.base_ins, s.pair_ins),
    ):
        p = r.partners
        for pos, k in where.items():
            if cols[k][1 - side] is not None:
                continue
            if p[pos] == pos:
                total -= base_pen
            elif p[pos] in where and cols[where[p[pos]]][1 - side] is None:
                if pos < p[pos]:
                    total -= pair_pen  # whole pair deleted, counted once
            else:
                total -= pair_pen / 2  # partner outside the aligned region
    gaps = len(re.findall("-+", aln.row1)) + len(re.findall("-+", aln.row2))
    return total - s.gap_open * gaps


def result(row1, row2, region1, region2, score=0):
    return AlignmentResult(row1, row2, region1, region2, Fraction(score), count_gaps(row1, row2))


def test_element_scores_examples():
    hp = make_structure("ACGU", [(1, 4)])
    es = derive_element_scores(DEFAULT_SCHEME, hp, make_structure("A"))
    assert es.delta_del(1) == 2
    assert es.delta_del(2) == 1
    es = derive_element_scores(DEFAULT_SCHEME, make_structure("A"), make_structure("A"))
    assert es.gamma(1, 1) == 2


def test_gamma_undefined_for_mixed_elements():
    es = derive_element_scores(DEFAULT_SCHEME, make_structure("AU", [(1, 2)]), make_structure("AU"))
    with pytest.raises(ValueError):
        es.gamma(2, 2)
    with pytest.raises(ValueError):
        es.gamma(1, 1)


def test_pair_gamma_tiers():
    r1 = make_structure("GC", [(1, 2)])
    for seq, want in [("GC", 5), ("GU", 1), ("AC", 1), ("AU", -1)]:
        es = derive_element_scores(DEFAULT_SCHEME, r1, make_structure(seq, [(1, 2)]))
        assert es.gamma(2, 2) == want


def test_sim_score_single_match():
    r = make_structure("A")
    aln = result("A", "A", (1, 1), (1, 1))
    assert sim_score(aln, r, r, DEFAULT_SCHEME) == 2
    assert aln.gap_count == 0


def test_sim_score_deleted_pair():
    aln = result("AU", "--", (1, 2), (1, 0))
    assert sim_score(aln, make_structure("AU", [(1, 2)]), make_structure(""), DEFAULT_SCHEME) == -7
    assert aln.gap_count == 1


def test_sim_score_half_pair():
    # only the 3' end of the pair lies in the region
    r1 = make_structure("AUC", [(1, 2)])
    aln = result("UC", "-C", (2, 3), (1, 1))
    assert sim_score(aln, r1, make_structure("C"), DEFAULT_SCHEME) == Fraction(-2 + 2 - 3)


def test_sim_score_rejects_invalid():
    r = make_structure("AU", [(1, 2)])
    with pytest.raises(InvalidAlignment):
        sim_score(result("AU", "AU", (1, 2), (1, 2)), r, make_structure("AU"), DEFAULT_SCHEME)


def test_validate_identity():
    r = make_structure("GGAUCC", [(1, 6), (2, 5)])
    assert validate_alignment(result(r.sequence, r.sequence, (1, 6), (1, 6)), r, r) == []


def test_validate_paired_against_unpaired():
    r1 = make_structure("AU", [(1, 2)])
    problems = validate_alignment(result("AU", "AU", (1, 2), (1, 2)), r1, make_structure("AU"))
    assert problems and all("aligned to" in p for p in problems)


def test_validate_crossing_matched_pairs():
    r = make_structure("AUAU", [(1, 3), (2, 4)])
    problems = validate_alignment(result("AUAU", "AUAU", (1, 4), (1, 4)), r, r)
    assert any("cross" in p for p in problems)


def test_validate_row_mismatch_and_double_gap():
    r = make_structure("AC")
    assert any("differs from region" in p for p in validate_alignment(result("AG", "AC", (1, 2), (1, 2)), r, r))
    assert any("both rows" in p for p in validate_alignment(result("A-C", "A-C", (1, 2), (1, 2)), r, r))


def test_count_gaps():
    assert count_gaps("A--C-", "AAACC") == 2
    assert count_gaps("", "") == 0


def test_load_scheme_empty_is_default():
    assert load_scheme("") == DEFAULT_SCHEME
    assert load_scheme("# only a comment\n\n") == DEFAULT_SCHEME


def test_load_scheme_rejects_nonpositive_gap():
    with pytest.raises(SchemeError, match="g must be positive"):
        load_scheme("gap_open = -1\n")


def test_load_scheme_full_table_overrides():
    lines = ["base_match = 7", "base_mismatch = -7"]
    lines += [f"subst {a} {b} {'3' if a == b else '-1/2'}" for a in "ACGU" for b in "ACGU"]
    s = load_scheme("\n".join(lines))
    assert s.subst("A", "A") == 3
    assert s.subst("G", "U") == Fraction(-1, 2)


def test_load_scheme_scalars_and_errors():
    s = load_scheme("gap_open = 2.5\npair_del = 6  # whole pair\n")
    assert s.gap_open == Fraction(5, 2) and s.pair_del == 6
    for text, line in [("gap_open = x", 1), ("\nfoo = 1", 2), ("subst A X 1", 1), ("base_del 1", 1)]:
        with pytest.raises(SchemeError) as err:
            load_scheme(text)
        assert err.value.line == line


def test_scheme_rejects_bad_values():
    with pytest.raises(SchemeError):
        ScoringScheme(base_del=Fraction(1, 3))
    with pytest.raises(SchemeError):
        ScoringScheme(pair_del=Fraction(3, 2))
    with pytest.raises(SchemeError):
        ScoringScheme(base_ins=Fraction(-1))


def test_to_halves():
    assert to_halves(Fraction(-7, 2)) == -7
    with pytest.raises(ValueError):
        to_halves(Fraction(1, 3))


def test_sim_score_matches_hand_rescoring_random():
    rng = random.Random(7)
    for _ in range(300):
        r1 = random_structure(rng, rng.randint(0, 9), 3)
        r2 = random_structure(rng, rng.randint(0, 9), 3)
        s = random_scheme(rng)
        for mode in ("global", "local") + (("fit",) if len(r1) and len(r2) else ()):
            aln = align(r1, r2, mode, s)
            assert sim_score(aln, r1, r2, s) == hand_score(aln, r1, r2, s) == aln.score


@settings(max_examples=60, deadline=None)
@given(structures(max_len=8, max_pairs=3), structures(max_len=8, max_pairs=3), schemes())
def test_gap_separability(r1, r2, s):
    # score splits into element part minus g per gap; raising g by 1 costs one per gap
    aln = align(r1, r2, "global", s)
    bumped = dataclasses.replace(s, gap_open=s.gap_open + 1)
    bumped_rows = sim_score(aln, r1, r2, bumped)
    assert bumped_rows == aln.score - aln.gap_count
