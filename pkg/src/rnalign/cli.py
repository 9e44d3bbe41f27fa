"""Command-line front end.

    rnalign exact  -1 PATTERN -2 TEXT
    rnalign global|fit|local -1 FILE -2 FILE [--scheme FILE] [--format text|tsv]

Exit status: 0 on success, 1 when ``exact`` finds no occurrence, 2 on any
input error.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from fractions import Fraction

from .align_dp import align, fit_end_columns, phase1_pair_table, window_dp
from .exact_match import exact_occurrences
from .rna_model import StructureError, read_structure
from .scoring import DEFAULT_SCHEME, AlignmentResult, ElementScores, SchemeError, load_scheme

EXIT_OK, EXIT_NO_MATCH, EXIT_INPUT = 0, 1, 2
TSV_FIELDS = (
    "mode", "name1", "name2", "score", "region1", "region2",
    "gap_count", "row1", "struct1", "struct2", "row2",
)


class InputError(Exception):
    pass


def format_score(score) -> str:
    """Half-integers rendered exactly with one decimal (``-3.5``, ``4.0``)."""
    twice = Fraction(score) * 2
    if twice.denominator != 1:
        raise ValueError(f"{score} is not a half-integer")
    whole, half = divmod(abs(twice.numerator), 2)
    sign = "-" if twice < 0 else ""
    return f"{sign}{whole}.{5 if half else 0}"


def format_region(region) -> str:
    return f"{region[0]}..{region[1]}"


def annotate(aln: AlignmentResult, r, side: int) -> str:
    """Structure line for one row: '.' unpaired, '()' matched pair, '<>' unmatched pair end."""
    cols = aln.columns()
    mine = [c[side] for c in cols]
    where = {pos: k for k, pos in enumerate(mine) if pos is not None}
    p = r.partners
    out = []
    for k, pos in enumerate(mine):
        if pos is None:
            out.append("-")
        elif p[pos] == pos:
            out.append(".")
        else:
            partner_col = where.get(p[pos])
            matched = (
                partner_col is not None
                and None not in cols[k]
                and None not in cols[partner_col]
            )
            five = pos < p[pos]
            out.append(("(" if five else ")") if matched else ("<" if five else ">"))
    return "".join(out)


def alignment_record(aln: AlignmentResult, r1, r2) -> dict:
    return {
        "mode": aln.mode,
        "name1": r1.name,
        "name2": r2.name,
        "score": format_score(aln.score),
        "region1": format_region(aln.region1),
        "region2": format_region(aln.region2),
        "gap_count": str(aln.gap_count),
        "row1": aln.row1,
        "struct1": annotate(aln, r1, 0),
        "struct2": annotate(aln, r2, 1),
        "row2": aln.row2,
    }


def render_tsv(record: dict, extra=()) -> str:
    lines = [f"{key}\t{record[key]}" for key in TSV_FIELDS]
    lines += [f"{k}\t{v}" for k, v in extra]
    return "\n".join(lines) + "\n"


def parse_tsv(text: str) -> dict:
    """Read back a ``--format tsv`` record: score, regions and gap count are typed."""
    out: dict = {}
    for line in text.splitlines():
        if not line:
            continue
        key, _, value = line.partition("\t")
        out[key] = value
    out["score"] = Fraction(out["score"])
    for key in ("region1", "region2"):
        a, b = out[key].split("..")
        out[key] = (int(a), int(b))
    out["gap_count"] = int(out["gap_count"])
    return out


def render_text(record: dict, extra=()) -> str:
    marks = "".join(
        "|" if a != "-" and b != "-" else " " for a, b in zip(record["row1"], record["row2"])
    )
    head = [
        f"mode     {record['mode']}",
        f"R1       {record['name1']}  {record['region1']}",
        f"R2       {record['name2']}  {record['region2']}",
        f"score    {record['score']}",
        f"gaps     {record['gap_count']}",
    ]
    head += [f"{k:<8} {v}" for k, v in extra]
    body = [record["row1"], record["struct1"], marks, record["struct2"], record["row2"]]
    return "\n".join(head) + "\n\n" + "\n".join(body) + "\n"


def _load(path, strict):
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            r = read_structure(path, strict=strict)
    except OSError as exc:
        raise InputError(f"{path}: cannot read: {exc.strerror or exc}") from None
    except StructureError as exc:
        raise InputError(f"{path}: {exc}") from None
    for w in caught:
        print(f"{path}: warning: {w.message}", file=sys.stderr)
    return r


def _scheme(path):
    if path is None:
        return DEFAULT_SCHEME
    try:
        with open(path, encoding="utf-8") as fh:
            return load_scheme(fh.read())
    except OSError as exc:
        raise InputError(f"{path}: cannot read: {exc.strerror or exc}") from None
    except SchemeError as exc:
        raise InputError(f"{path}: {exc}") from None


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-1", dest="first", required=True, metavar="FILE", help="first structure (pattern)")
    common.add_argument("-2", dest="second", required=True, metavar="FILE", help="second structure (text)")
    common.add_argument("--format", choices=("text", "tsv"), default="text")
    common.add_argument("--strict-pairs", action="store_true", help="warn about pairs other than AU, GC, GU")

    scored = argparse.ArgumentParser(add_help=False)
    scored.add_argument("--scheme", metavar="FILE", help="scoring scheme file")

    parser = argparse.ArgumentParser(prog="rnalign", description="RNA structural matching and alignment")
    sub = parser.add_subparsers(dest="command", required=True, metavar="{exact,global,fit,local}")
    sub.add_parser("exact", parents=[common], help="exact structural occurrences of R1 in R2")
    sub.add_parser("global", parents=[common, scored], help="global structural alignment")
    fit = sub.add_parser("fit", parents=[common, scored], help="best fit of pattern R1 inside R2")
    fit.add_argument("--all-ends", action="store_true", help="also list every optimal end column")
    sub.add_parser("local", parents=[common, scored], help="best local structural alignment")
    oracle = sub.add_parser("oracle", parents=[common, scored])
    oracle.add_argument("--mode", choices=("global", "fit", "local"), default="global")
    oracle.add_argument("--exhaustive", action="store_true")
    return parser


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = _parser().parse_args(argv)
    try:
        r1 = _load(args.first, args.strict_pairs)
        r2 = _load(args.second, args.strict_pairs)
        if args.command == "exact":
            if len(r1) == 0:
                raise InputError(f"{args.first}: pattern is empty")
            hits = exact_occurrences(r1, r2)
            for pos in hits:
                out.write(f"{pos}\n")
            return EXIT_OK if hits else EXIT_NO_MATCH
        scheme = _scheme(args.scheme)
        if args.command == "oracle":
            from . import oracle

            try:
                fn = oracle.oracle_best_exhaustive if args.exhaustive else oracle.oracle_best
                score = fn(r1, r2, args.mode, scheme)
            except ValueError as exc:
                raise InputError(str(exc)) from None
            out.write(f"score\t{format_score(score)}\n")
            return EXIT_OK
        if args.command == "fit" and (len(r1) == 0 or len(r2) == 0):
            raise InputError("fit needs a non-empty pattern (-1) and text (-2)")
        scores = ElementScores(scheme, r1, r2)
        table = phase1_pair_table(scores)
        aln = align(r1, r2, args.command, scheme, scores=scores, pair_table=table)
        extra = []
        if args.command == "fit" and args.all_ends:
            tables = window_dp(scores, (1, len(r1)), (1, len(r2)), "fit", table)
            extra.append(("ends", ",".join(map(str, fit_end_columns(tables)))))
        record = alignment_record(aln, r1, r2)
        out.write(render_tsv(record, extra) if args.format == "tsv" else render_text(record, extra))
        return EXIT_OK
    except InputError as exc:
        print(f"rnalign: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main(argv=None):
    sys.exit(run(argv))
