"""Command-line front end: ``mahlerset <command> [options]``.

Structured results are printed as JSON; the tabular commands (``converge``, ``spectrum``
and ``mbgen``) can also emit CSV.  Every output carries the effective
configuration.  Exit status: 0 on success, 1 on domain errors, 2 on usage
errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Sequence

from .laurent import (
    LaurentPoly,
    PolySyntaxError,
    ZeroPolynomialError,
    coefficient_bounds,
    exponent_polytope,
    length,
    parse_poly,
)
from .lattice import IntMatrix, NotFound, hnf, q_value, shnf
from .measure_multi import (
    DEFAULT_SCHEDULE,
    MeasureConfig,
    jensen_2d,
    lawton_estimate,
    measure,
    measure_of_family_member,
    qmc_estimate,
)
from .measure_uni import InconclusiveCertificate, NonConvergenceError, _jsonable
from .spectrum import (
    embed_in_linear_form,
    lehmer_element,
    max_element,
    mb_generators,
    mignotte_bound,
    sample_measure_set,
)

__all__ = ["main", "run_cli", "build_parser", "CliOutcome"]


class UsageError(Exception):
    """Bad command-line input; maps to exit status 2."""


@dataclass
class CliOutcome:
    status: int
    output: str
    error: str = ""


# ---------------------------------------------------------------------------
# argument parsing

def _schedule(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"schedule must be comma-separated integers, got {text!r}")


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("numeric configuration")
    g.add_argument("--schedule", type=_schedule, default=DEFAULT_SCHEDULE,
                   help="Lawton n values, e.g. 5,9,13 (default %(default)s)")
    g.add_argument("--degree-cap", type=_positive, default=6000)
    g.add_argument("--nodes", type=_positive, default=2048, help="uniform Jensen nodes")
    g.add_argument("--jensen-rule", choices=("adaptive", "uniform"), default="adaptive")
    g.add_argument("--samples", type=_positive, default=4096, help="QMC points per shift")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--tol", type=_positive_float, default=1e-7, help="dedup tolerance")
    g.add_argument("--no-cross-check", action="store_true",
                   help="skip the Lawton cross-check of two-variable results")
    o = common.add_argument_group("output")
    o.add_argument("--format", choices=("json", "csv"), default="json")
    o.add_argument("--out", type=Path, help="write output here instead of stdout")

    poly = argparse.ArgumentParser(add_help=False)
    src = poly.add_mutually_exclusive_group(required=True)
    src.add_argument("--poly", help="polynomial text, e.g. '1+z1^-1+z2'")
    src.add_argument("--poly-file", type=Path, help="file with polynomial text or JSON")
    poly.add_argument("-k", type=int, help="number of variables (default: largest index)")

    mat = argparse.ArgumentParser(add_help=False)
    mat.add_argument("--matrix", help="JSON matrix: [[...],...] or {rows, cols, data}")
    mat.add_argument("--matrix-file", type=Path)

    parser = argparse.ArgumentParser(
        prog="mahlerset",
        description="Mahler measures of Laurent polynomials and their measure sets.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("measure", parents=[common, poly, mat], help="m(F) or m(F_A)")
    p.add_argument("--method", choices=("auto", "lawton", "jensen2d", "qmc"), default="auto",
                   help="force one estimator instead of the dispatch")
    sub.add_parser("shnf", parents=[common, mat], help="saturated Hermite normal form")
    sub.add_parser("hnf", parents=[common, mat], help="Hermite normal form")
    p = sub.add_parser("q", parents=[common], help="q value of an integer vector")
    p.add_argument("--vector", required=True, help="comma-separated integers")
    p.add_argument("--bound", type=_positive, default=64, help="sup-norm search bound")
    for name, text in (("spectrum", "finite sample of M(F)"), ("lehmer", "smallest and largest sampled values")):
        p = sub.add_parser(name, parents=[common, poly], help=text)
        p.add_argument("--height", type=_positive, default=1)
        p.add_argument("--ranks", type=_schedule, help="restrict to these ranks, e.g. 0,1")
    sub.add_parser("converge", parents=[common, poly], help="Lawton trace (n, estimate)")
    sub.add_parser("bounds", parents=[common, poly], help="exponent polytope bracket")
    sub.add_parser("embed", parents=[common, poly], help="embedding into a linear form")
    p = sub.add_parser("mbgen", parents=[common], help="signed-partition linear forms")
    p.add_argument("-B", "--B", dest="B", type=_positive, required=True)
    return parser


# ---------------------------------------------------------------------------
# input loading

def _load_poly(args: argparse.Namespace) -> LaurentPoly:
    if args.poly is not None:
        text = args.poly
    else:
        try:
            text = args.poly_file.read_text()
        except OSError as e:
            raise UsageError(f"cannot read --poly-file: {e}")
    if text.lstrip().startswith("{"):
        try:
            F = LaurentPoly.from_json(json.loads(text))
        except (ValueError, KeyError, TypeError) as e:
            raise UsageError(f"invalid polynomial JSON: {e}")
        if args.k is not None and args.k != F.k:
            raise UsageError(f"-k {args.k} disagrees with the JSON variable count {F.k}")
        return F
    if args.k is not None and args.k < 0:
        raise UsageError("-k must be nonnegative")
    try:
        return parse_poly(text, args.k)
    except PolySyntaxError as e:
        raise UsageError(f"polynomial syntax: {e}")
    except ValueError as e:
        raise UsageError(str(e))


def _load_matrix(args: argparse.Namespace, required: bool) -> IntMatrix | None:
    if args.matrix is not None and args.matrix_file is not None:
        raise UsageError("give either --matrix or --matrix-file, not both")
    if args.matrix is None and args.matrix_file is None:
        if required:
            raise UsageError("a matrix is required (--matrix or --matrix-file)")
        return None
    try:
        text = args.matrix if args.matrix is not None else args.matrix_file.read_text()
    except OSError as e:
        raise UsageError(f"cannot read --matrix-file: {e}")
    try:
        obj = json.loads(text)
        A = IntMatrix.from_json(obj)
    except (ValueError, TypeError, KeyError, AttributeError) as e:
        raise UsageError(f"invalid matrix JSON: {e}")
    return A


def _config(args: argparse.Namespace) -> MeasureConfig:
    try:
        return MeasureConfig(
            schedule=args.schedule,
            degree_cap=args.degree_cap,
            nodes=args.nodes,
            jensen_rule=args.jensen_rule,
            samples=args.samples,
            seed=args.seed,
            tolerance=args.tol,
            cross_check=not args.no_cross_check,
        )
    except ValueError as e:
        raise UsageError(str(e))


# ---------------------------------------------------------------------------
# commands; each returns a JSON-ready dict and optionally CSV rows

Table = tuple[list[str], list[list[Any]]]


def _cmd_measure(args, config) -> tuple[dict, Table | None]:
    F = _load_poly(args)
    A = _load_matrix(args, required=False)
    out: dict[str, Any] = {"polynomial": str(F)}
    if A is not None:
        if A.cols != F.k:
            raise UsageError(f"matrix has {A.cols} columns but the polynomial has {F.k} variables")
        out["matrix"] = A.to_json()
    if args.method == "auto":
        r = measure_of_family_member(F, A, config) if A is not None else measure(F, config)
    else:
        from .laurent import substitute

        G = substitute(F, shnf(A).H) if A is not None else F
        if G.is_zero():
            raise ZeroPolynomialError("F_A is the zero polynomial and has no Mahler measure")
        if args.method == "lawton":
            r = lawton_estimate(G, config.lawton)
        elif args.method == "jensen2d":
            if G.k != 2:
                raise UsageError(f"jensen2d needs two variables, got {G.k}")
            r = jensen_2d(G, config.nodes, config.jensen_rule)
        else:
            r = qmc_estimate(G, config.samples, config.seed)
    r.detail.pop("config", None)
    out["result"] = r.to_json()
    return out, None


def _cmd_hnf(args, config) -> tuple[dict, Table | None]:
    A = _load_matrix(args, required=True)
    res = hnf(A)
    return {
        "input": A.to_json(),
        "H": res.H.to_json(),
        "U": res.U.to_json(),
        "rank": res.rank,
        "pivot_cols": list(res.pivot_cols),
    }, None


def _cmd_shnf(args, config) -> tuple[dict, Table | None]:
    A = _load_matrix(args, required=True)
    res = shnf(A)
    return {
        "input": A.to_json(),
        "H": res.H.to_json(),
        "V": res.V.to_json(),
        "rank": res.rank,
        "pivot_cols": list(res.pivot_cols),
    }, None


def _cmd_q(args, config) -> tuple[dict, Table | None]:
    try:
        r = [int(x) for x in args.vector.split(",")]
    except ValueError:
        raise UsageError(f"--vector must be comma-separated integers, got {args.vector!r}")
    if len(r) < 2 or not any(r):
        raise UsageError("--vector needs at least 2 entries, not all zero")
    return {"vector": r, "bound": args.bound, "q": q_value(r, args.bound)}, None


def _spectrum(args, config):
    F = _load_poly(args)
    if args.ranks is not None and any(not 0 <= x <= F.k for x in args.ranks):
        raise UsageError(f"--ranks must lie in [0, {F.k}]")
    return F, sample_measure_set(F, args.height, config, args.ranks)


def _cmd_spectrum(args, config) -> tuple[dict, Table | None]:
    F, s = _spectrum(args, config)
    out = s.to_json()
    out.pop("config", None)
    rows = [
        [json.dumps(H.tolist()), r.value, r.error_bound, r.method] for H, r in s.entries
    ]
    return out, (["H", "value", "error_bound", "method"], rows)


def _cmd_lehmer(args, config) -> tuple[dict, Table | None]:
    F, s = _spectrum(args, config)
    return {
        "polynomial": str(F),
        "height": s.height,
        "label": f"height-{s.height} exhaustion",
        "entries": len(s.entries),
        "distinct_values": len(s.distinct_values),
        "lehmer_element": lehmer_element(s),
        "max_element": max_element(s) if s.distinct_values else None,
        "mignotte_bound": mignotte_bound(F) if F.is_integral() else None,
    }, None


def _cmd_converge(args, config) -> tuple[dict, Table | None]:
    F = _load_poly(args)
    r = lawton_estimate(F, config.lawton)
    trace = r.detail["trace"]
    out = {"polynomial": str(F), "result": r.to_json()}
    return out, (["n", "estimate"], [[n, v] for n, v in trace.pairs])


def _cmd_bounds(args, config) -> tuple[dict, Table | None]:
    F = _load_poly(args)
    lo, hi = coefficient_bounds(F)
    P = exponent_polytope(F)
    return {
        "polynomial": str(F),
        "lower": lo,
        "upper": hi,
        "length": length(F),
        "polytope": {"vertices": sorted(list(v) for v in P.vertices), "dim": P.dim},
    }, None


def _cmd_embed(args, config) -> tuple[dict, Table | None]:
    F = _load_poly(args)
    if not F.is_integral():
        raise UsageError("embedding needs integer coefficients")
    n, A = embed_in_linear_form(F)
    return {"polynomial": str(F), "n": n, "A": A.to_json()}, None


def _cmd_mbgen(args, config) -> tuple[dict, Table | None]:
    gens = mb_generators(args.B)
    items = [{"c": list(sp.c), "b": sp.b, "form": str(form)} for sp, form in gens]
    return {"B": args.B, "count": len(items), "generators": items}, (
        ["c", "b", "form"],
        [[" ".join(map(str, sp.c)), sp.b, str(form)] for sp, form in gens],
    )


COMMANDS: dict[str, Callable] = {
    "measure": _cmd_measure,
    "shnf": _cmd_shnf,
    "hnf": _cmd_hnf,
    "q": _cmd_q,
    "spectrum": _cmd_spectrum,
    "lehmer": _cmd_lehmer,
    "converge": _cmd_converge,
    "bounds": _cmd_bounds,
    "embed": _cmd_embed,
    "mbgen": _cmd_mbgen,
}
CSV_COMMANDS = {"converge", "spectrum", "mbgen"}


def _echo(args: argparse.Namespace, config: MeasureConfig) -> dict:
    echo = {"command": args.command, **config.to_json(), "format": args.format}
    for key in ("poly", "poly_file", "k", "matrix", "matrix_file", "height", "ranks",
                "method", "vector", "bound", "B"):
        if getattr(args, key, None) is not None:
            v = getattr(args, key)
            echo[key] = str(v) if isinstance(v, Path) else v
    return _jsonable(echo)


def _render(args, config, data: dict, table: Table | None) -> str:
    echo = _echo(args, config)
    if args.format == "csv":
        buf = io.StringIO()
        buf.write("# config: " + json.dumps(echo) + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        header, rows = table
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()
    return json.dumps({"config": echo, **_jsonable(data)}, indent=2) + "\n"


def run_cli(argv: Sequence[str]) -> CliOutcome:
    """Parse ``argv``, run the command, and return status plus output text."""
    parser = build_parser()
    err = io.StringIO()
    try:
        stderr, sys.stderr = sys.stderr, err
        try:
            args = parser.parse_args(list(argv))
        finally:
            sys.stderr = stderr
    except SystemExit as e:
        code = e.code if isinstance(e.code, int) else 2
        return CliOutcome(code, "", err.getvalue())
    try:
        config = _config(args)
        if args.format == "csv" and args.command not in CSV_COMMANDS:
            raise UsageError(f"csv output is available for {', '.join(sorted(CSV_COMMANDS))} only")
        data, table = COMMANDS[args.command](args, config)
        text = _render(args, config, data, table)
    except UsageError as e:
        return CliOutcome(2, "", f"mahlerset {args.command}: error: {e}\n")
    except (ZeroPolynomialError, NotFound, InconclusiveCertificate, NonConvergenceError, ValueError) as e:
        return CliOutcome(1, "", f"mahlerset {args.command}: error: {e}\n")
    if args.out is not None:
        try:
            args.out.write_text(text)
        except OSError as e:
            return CliOutcome(2, "", f"mahlerset {args.command}: error: cannot write --out: {e}\n")
        return CliOutcome(0, "")
    return CliOutcome(0, text)


def main(argv: Sequence[str] | None = None) -> int:
    res = run_cli(sys.argv[1:] if argv is None else argv)
    if res.output:
        sys.stdout.write(res.output)
    if res.error:
        sys.stderr.write(res.error)
    return res.status


if __name__ == "__main__":
    sys.exit(main())
