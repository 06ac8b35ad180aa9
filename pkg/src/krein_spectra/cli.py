"""Command-line front end.

Subcommands: classify, project, lsf-verify, probe-resolvent, stability,
sylvester, generate, suite.  Input and output are UTF-8 JSON; complex
numbers are [re, im] pairs and matrices row-major.  Exit codes: 0 ok,
1 input error, 2 precondition violation, 3 numerical refusal, 4 check
failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from ._errors import (
    AmbiguousRegionError,
    CheckFailure,
    ContourThroughSpectrumError,
    DocumentError,
    KreinError,
    NonNormalError,
    PreconditionError,
    SelectorAmbiguityError,
)
from .classification import classified_spectrum
from .core import frobenius
from .documents import (
    OperatorDocument,
    dumps_canonical,
    generator_spec_from_json,
    generator_spec_to_json,
    load_operator_document,
    matrix_from_json,
    matrix_to_json,
)
from .generators import build_normal_with_types
from .numerics import solve_sylvester, sylvester_spectral_gap
from .projections import (
    local_spectral_function,
    resolvent_probe,
    riesz_projection_contour,
    riesz_projection_oracle,
    strong_stability_check,
    verify_lsf_axioms,
    verify_maximality,
)
from .regions import Region
from .suite import run_suite

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_PRECONDITION = 2
EXIT_REFUSAL = 3
EXIT_CHECK_FAILED = 4


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _region_from_args(args) -> Region:
    pieces = []
    for spec in args.disk or []:
        parts = spec.split(",")
        if len(parts) != 3:
            raise DocumentError(f"--disk expects cx,cy,r, got {spec!r}")
        try:
            cx, cy, r = (float(p) for p in parts)
        except ValueError as exc:
            raise DocumentError(f"--disk {spec!r}: {exc}") from exc
        pieces.extend(Region.disk(complex(cx, cy), r).pieces)
    for spec in args.rect or []:
        parts = spec.split(",")
        if len(parts) != 4:
            raise DocumentError(f"--rect expects x0,y0,x1,y1, got {spec!r}")
        try:
            x0, y0, x1, y1 = (float(p) for p in parts)
        except ValueError as exc:
            raise DocumentError(f"--rect {spec!r}: {exc}") from exc
        pieces.extend(Region.rectangle(x0, y0, x1, y1).pieces)
    return Region(tuple(pieces))


def _add_region_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--disk", action="append", metavar="CX,CY,R",
        help="closed disk primitive (repeatable)",
    )
    parser.add_argument(
        "--rect", action="append", metavar="X0,Y0,X1,Y1",
        help="half-open rectangle primitive (repeatable)",
    )


def _point_table(points) -> list[dict]:
    return [
        {
            "value": [pt.value.real, pt.value.imag],
            "type": pt.type_tag.value,
            "alg_mult": pt.alg_mult,
            "geo_mult": pt.geo_mult,
            "gram_margin": pt.gram_margin,
            "warnings": list(pt.warnings),
        }
        for pt in points
    ]


def cmd_classify(args) -> int:
    doc = load_operator_document(args.input)
    _, operator = doc.build()
    points = classified_spectrum(operator, doc.tolerances)
    payload = {
        "normality_residual": operator.normality_residual,
        "points": _point_table(points),
    }
    if args.json:
        _write(dumps_canonical(payload), args.output)
    else:
        print(f"normality residual: {operator.normality_residual:.3e}")
        print(f"{'eigenvalue':>28}  {'type':<20} {'m_a':>3} {'m_g':>3}  {'margin':>10}")
        for pt in points:
            warn = f"  ! {';'.join(pt.warnings)}" if pt.warnings else ""
            print(
                f"{pt.value.real:>+13.6g}{pt.value.imag:>+13.6g}i  "
                f"{pt.type_tag.value:<20} {pt.alg_mult:>3} {pt.geo_mult:>3}  "
                f"{pt.gram_margin:>10.3e}{warn}"
            )
    return EXIT_OK


def cmd_project(args) -> int:
    doc = load_operator_document(args.input)
    _, operator = doc.build()
    region = _region_from_args(args)
    if not region.pieces:
        raise DocumentError("project requires at least one --disk or --rect")
    cfg = doc.tolerances
    contour = riesz_projection_contour(operator, region, nodes=args.nodes, cfg=cfg)
    oracle = riesz_projection_oracle(operator, region, cfg)
    discrepancy = frobenius(contour.matrix - oracle.matrix)
    payload = {
        "projection": matrix_to_json(oracle.matrix),
        "region": region.describe(),
        "rank": oracle.rank,
        "diagnostics": {
            "idem_residual": oracle.idem_residual,
            "selfadj_residual": oracle.selfadj_residual,
            "commute_residual": oracle.commute_residual,
            "range_definiteness": oracle.gram_margin.kind.value,
            "range_margin": oracle.gram_margin.margin,
            "contour_idem_residual": contour.idem_residual,
            "contour_oracle_discrepancy": discrepancy,
            "contour_warnings": list(contour.warnings),
        },
    }
    _write(dumps_canonical(payload), args.output)
    return EXIT_OK


def cmd_lsf_verify(args) -> int:
    doc = load_operator_document(args.input)
    _, operator = doc.build()
    carrier = _region_from_args(args)
    if not carrier.pieces:
        raise DocumentError("lsf-verify requires a carrier (--disk / --rect)")
    cfg = doc.tolerances
    lsf = local_spectral_function(operator, carrier, cfg)

    points = [lsf.points[i] for i in sorted(lsf.carrier_indices)]
    values = [pt.value for pt in lsf.points]
    if len(values) > 1:
        gap = min(
            abs(a - b) for i, a in enumerate(values) for b in values[i + 1 :]
        )
    else:
        gap = 1.0
    deltas = [Region.disk(pt.value, 0.25 * gap) for pt in points]
    if len(deltas) >= 2:
        deltas.append(deltas[0].union(deltas[1]))
    deltas.append(carrier)
    deltas.append(Region.empty())
    n = operator.matrix
    commutants = [np.eye(operator.dim), n, operator.adjoint, n @ n]

    report = verify_lsf_axioms(lsf, deltas, commutants)
    report.entries.append(
        verify_maximality(lsf, carrier, n_subspaces=args.subspaces, seed=args.seed)
    )
    report.parameters = {"carrier": carrier.describe(), "deltas": len(deltas)}
    if args.json:
        _write(report.to_json(), args.output)
    else:
        print(report.human_summary())
    return EXIT_CHECK_FAILED if report.failed else EXIT_OK


def cmd_probe_resolvent(args) -> int:
    doc = load_operator_document(args.input)
    _, operator = doc.build()
    try:
        lam = complex(*(float(p) for p in args.point.split(",")))
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"--point expects re,im: {exc}") from exc
    radii = [float(r) for r in args.radii.split(",")]
    probe = resolvent_probe(
        operator, lam, radii, samples_per_radius=args.samples, cfg=doc.tolerances
    )
    payload = {
        "c_estimate": probe.c_estimate,
        "pole_order": probe.pole_order,
        "radius_table": [[r, c] for r, c in probe.radius_table],
    }
    _write(dumps_canonical(payload), args.output)
    return EXIT_OK


def cmd_stability(args) -> int:
    doc = load_operator_document(args.input)
    _, operator = doc.build()
    stable, decomposition = strong_stability_check(operator, doc.tolerances)
    payload: dict = {"stable": stable}
    failed = False
    if decomposition is not None:
        payload["plus_dim"] = decomposition.plus.k
        payload["minus_dim"] = decomposition.minus.k
        payload["certified"] = decomposition.certified
        payload["checks"] = [e.to_json_dict() for e in decomposition.entries]
        if args.emit_bases:
            payload["plus_basis"] = matrix_to_json(decomposition.plus.columns)
            payload["minus_basis"] = matrix_to_json(decomposition.minus.columns)
        failed = not decomposition.certified
    _write(dumps_canonical(payload), args.output)
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def cmd_sylvester(args) -> int:
    try:
        with open(args.input, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise DocumentError(f"cannot read {args.input}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DocumentError(f"line {exc.lineno}: {exc.msg}") from exc
    try:
        ms = len(raw["s"])
        mt = len(raw["t"])
        s = matrix_from_json(raw["s"], ms, "s")
        t = matrix_from_json(raw["t"], mt, "t")
        if not isinstance(raw["z"], list) or len(raw["z"]) != ms:
            raise DocumentError(f"z: expected {ms} rows")
        z = np.array(
            [[complex(p[0], p[1]) for p in row] for row in raw["z"]], dtype=complex
        )
        if z.shape != (ms, mt):
            raise DocumentError(f"z: expected shape {(ms, mt)}")
    except (KeyError, TypeError, IndexError) as exc:
        raise DocumentError(f"sylvester document: {exc!r}") from exc
    x = solve_sylvester(s, t, z)
    gap, pair = sylvester_spectral_gap(s, t)
    payload = {
        "x": matrix_to_json(x),
        "residual": frobenius(s @ x - x @ t - z),
        "spectral_gap": gap,
        "closest_pair": [[pair[0].real, pair[0].imag], [pair[1].real, pair[1].imag]],
    }
    _write(dumps_canonical(payload), args.output)
    return EXIT_OK


def cmd_generate(args) -> int:
    try:
        with open(args.input, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise DocumentError(f"cannot read {args.input}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DocumentError(f"line {exc.lineno}: {exc.msg}") from exc
    spec = generator_spec_from_json(raw)
    gen = build_normal_with_types(spec)
    doc = OperatorDocument(
        dim=gen.space.dim,
        gram=gen.space.gram,
        matrix=gen.operator.matrix,
        metadata={"generator_seed": str(spec.seed)},
    )
    _write(doc.to_json(), args.output)
    truth = {
        "spec": generator_spec_to_json(spec),
        "points": [
            {
                "value": [t.value.real, t.value.imag],
                "type": t.expected_type.value,
                "alg_mult": t.alg_mult,
                "geo_mult": t.geo_mult,
            }
            for t in gen.ground_truth
        ],
    }
    if args.truth:
        _write(dumps_canonical(truth), args.truth)
    return EXIT_OK


def cmd_suite(args) -> int:
    lo, _, hi = args.dims.partition(":")
    try:
        dims = (int(lo), int(hi or lo))
    except ValueError as exc:
        raise DocumentError(f"--dims expects LO:HI, got {args.dims!r}") from exc
    report = run_suite(
        trials=args.trials,
        seed=args.seed,
        dims=dims,
        cond_bound=args.cond_bound,
        threads=args.threads,
        only_trial=args.only_trial,
    )
    if args.json_out:
        _write(report.to_json(), args.json_out)
    print(report.human_summary())
    return EXIT_CHECK_FAILED if report.failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="krein-spectra",
        description="Spectral classification and projection toolkit for normal "
        "operators in indefinite inner product spaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify every eigenvalue by definiteness type")
    p.add_argument("input", help="operator document (JSON path or - for stdin)")
    p.add_argument("--json", action="store_true", help="emit JSON instead of a table")
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("project", help="Riesz projection for a spectral region")
    p.add_argument("input")
    _add_region_flags(p)
    p.add_argument("--nodes", type=int, default=128, help="quadrature nodes per primitive")
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("lsf-verify", help="verify the local spectral function axioms")
    p.add_argument("input")
    _add_region_flags(p)
    p.add_argument("--subspaces", type=int, default=20, help="maximality trial count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_lsf_verify)

    p = sub.add_parser("probe-resolvent", help="resolvent bound and pole order")
    p.add_argument("input")
    p.add_argument("--point", required=True, metavar="RE,IM")
    p.add_argument("--radii", required=True, metavar="R1,R2,...")
    p.add_argument("--samples", type=int, default=16)
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_probe_resolvent)

    p = sub.add_parser("stability", help="strong stability and fundamental decomposition")
    p.add_argument("input")
    p.add_argument("--emit-bases", action="store_true")
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("sylvester", help="solve S X - X T = Z from a JSON document")
    p.add_argument("input")
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_sylvester)

    p = sub.add_parser("generate", help="build an operator from a generator spec")
    p.add_argument("input", help="generator spec JSON")
    p.add_argument("--output", "-o", default=None)
    p.add_argument("--truth", default=None, help="write the ground-truth table here")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("suite", help="seeded verification suite")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dims", default="2:12", metavar="LO:HI")
    p.add_argument("--cond-bound", type=float, default=1e3)
    p.add_argument("--threads", type=int, default=None,
                   help="worker cap (KREIN_SPECTRA_THREADS also honored)")
    p.add_argument("--only-trial", type=int, default=None,
                   help="re-run a single trial index for reproduction")
    p.add_argument("--json-out", default=None)
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DocumentError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NonNormalError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (ContourThroughSpectrumError, SelectorAmbiguityError, AmbiguousRegionError) as exc:
        print(f"numerical refusal: {exc}", file=sys.stderr)
        return EXIT_REFUSAL
    except CheckFailure as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except KreinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
