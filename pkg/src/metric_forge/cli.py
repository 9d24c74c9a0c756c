"""metric-forge command line: deterministic JSON pipelines over exact rationals.

Exit codes: 0 success or valid, 1 validation failure (JSON report on
stdout), 2 usage or domain errors.  Outputs carry no timestamps, so a
rerun with the same inputs is byte-identical.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from . import jsonio
from .core import random_metric, cantor_approx, validate_metric
from .nebula import (
    cover,
    margin,
    nebula_contains,
    range_of_metric,
    validate_nebula,
)
from .quantize import approximate
from .universal import (
    build_funiv_approx,
    build_pair_universal,
    find_isometric_embedding,
    fragility_experiment,
    frechet_embed,
)


def _load_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _emit(obj, path=None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _values_list(text):
    return [jsonio.parse_scalar(part.strip()) for part in text.split(",")]


# --- svg --------------------------------------------------------------------


def render_range_svg(space, nebula=None) -> str:
    """Number line with the metric's range as ticks and nebula bars above.

    Pixel coordinates use fixed two-decimal formatting; the exact rational
    behind every mark is kept in a data-exact attribute.
    """
    vals = range_of_metric(space)
    top = vals[-1]
    if nebula is not None:
        top = max(top, nebula.tail_start)
    T = max(1, math.ceil(top))
    width, height, mx = 880, 150, 40
    inner = width - 2 * mx

    def px(v) -> str:
        return f"{mx + float(Fraction(v) / T) * inner:.2f}"

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{mx}" y1="100" x2="{width - mx}" y2="100" '
        'stroke="black" stroke-width="1"/>',
    ]
    for k in range(T + 1):
        x = px(k)
        parts.append(
            f'<line x1="{x}" y1="96" x2="{x}" y2="104" stroke="black"/>'
        )
        parts.append(
            f'<text x="{x}" y="120" font-size="11" text-anchor="middle">{k}</text>'
        )
    if nebula is not None:
        for a, b in nebula.bounded:
            xa, xb = px(a), px(b)
            w = max(1.5, float(xb) - float(xa))
            parts.append(
                f'<rect x="{xa}" y="62" width="{w:.2f}" height="16" '
                f'fill="#9ecae1" data-exact="[{a},{b}]"/>'
            )
        xt = px(min(nebula.tail_start, Fraction(T)))
        parts.append(
            f'<rect x="{xt}" y="62" width="{width - mx - float(xt):.2f}" '
            f'height="16" fill="#9ecae1" data-exact="[{nebula.tail_start},inf)"/>'
        )
    for v in vals:
        if v > T:
            continue
        x = px(v)
        parts.append(
            f'<line x1="{x}" y1="88" x2="{x}" y2="100" stroke="#d62728" '
            f'stroke-width="1.5" data-exact="{v}"/>'
        )
    parts.append(
        f'<text x="{mx}" y="30" font-size="13">distance range, '
        f"{space.n} points</text>"
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# --- subcommand handlers ----------------------------------------------------


def _cmd_validate(args) -> int:
    space = jsonio.space_from_obj(_load_json(args.space))
    report = validate_metric(space)
    _emit(jsonio.validation_to_obj(report))
    return 0 if report.is_metric else 1


def _cmd_approximate(args) -> int:
    space = jsonio.space_from_obj(_load_json(args.space))
    eps = jsonio.parse_scalar(args.epsilon)
    r = jsonio.parse_scalar(args.r) if args.r else None
    result = approximate(space, eps, r=r)
    _emit(jsonio.approximation_to_obj(result), args.output)
    return 0


def _cmd_nebula_cover(args) -> int:
    raw = _load_json(args.values)
    if not isinstance(raw, list):
        raise ValueError("values file must hold a JSON array of rationals")
    values = [jsonio.parse_scalar(v) for v in raw]
    result = cover(values, args.q)
    _emit(jsonio.nebula_to_obj(result), args.output)
    return 0


def _cmd_nebula_check(args) -> int:
    nebula = jsonio.nebula_from_obj(_load_json(args.nebula))
    check = validate_nebula(nebula)
    _emit(jsonio.nebula_validation_to_obj(check))
    return 0 if check.is_valid else 1


def _cmd_nebula_margin(args) -> int:
    space = jsonio.space_from_obj(_load_json(args.space))
    nebula = jsonio.nebula_from_obj(_load_json(args.nebula))
    result = margin(space, nebula)
    _emit(
        {
            "epsilon": jsonio.scalar_str(result.epsilon),
            "fattened": jsonio.nebula_to_obj(result.fattened),
        },
        args.output,
    )
    return 0


def _cmd_embed_frechet(args) -> int:
    space = jsonio.space_from_obj(_load_json(args.space))
    rows = frechet_embed(space, args.n)
    _emit(
        {
            "n": args.n,
            "points": list(space.points),
            "coords": [[jsonio.scalar_str(c) for c in row] for row in rows],
        },
        args.output,
    )
    return 0


def _cmd_embed_search(args) -> int:
    pattern = jsonio.space_from_obj(_load_json(args.pattern))
    host = jsonio.space_from_obj(_load_json(args.host))
    distortion = jsonio.parse_scalar(args.distortion) if args.distortion else 0
    found = find_isometric_embedding(pattern, host, distortion)
    if found is None:
        _emit({"found": False}, args.output)
    else:
        _emit(
            {"found": True, **jsonio.embedding_to_obj(found, pattern, host)},
            args.output,
        )
    return 0


def _cmd_universal_pairs(args) -> int:
    space = build_pair_universal(_values_list(args.values))
    _emit(jsonio.space_to_obj(space), args.output)
    return 0


def _cmd_universal_funiv(args) -> int:
    result = build_funiv_approx(
        args.n, jsonio.parse_scalar(args.delta), args.copies
    )
    _emit(
        {
            "space": jsonio.space_to_obj(result.space),
            "net_points": [
                [jsonio.scalar_str(c) for c in p] for p in result.net.points
            ],
            "copies": result.copies,
        },
        args.output,
    )
    return 0


def _cmd_fragility(args) -> int:
    report = fragility_experiment(
        _values_list(args.values), jsonio.parse_scalar(args.epsilon)
    )
    _emit(jsonio.fragility_to_obj(report), args.output)
    return 0


def _cmd_plot_range(args) -> int:
    space = jsonio.space_from_obj(_load_json(args.space))
    nebula = None
    if args.nebula:
        nebula = jsonio.nebula_from_obj(_load_json(args.nebula))
        for v in range_of_metric(space):
            if not nebula_contains(nebula, v):
                raise ValueError(f"metric value {v} lies outside the nebula")
    svg = render_range_svg(space, nebula)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(svg)
    return 0


def _cmd_gen_random(args) -> int:
    space = random_metric(
        args.n, jsonio.parse_scalar(args.max_value), seed=args.seed
    )
    _emit(jsonio.space_to_obj(space), args.output)
    return 0


def _cmd_gen_cantor(args) -> int:
    _emit(jsonio.space_to_obj(cantor_approx(args.k)), args.output)
    return 0


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metric-forge",
        description="exact-rational metric quantization, nebula covers and "
        "universal metrics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the metric axioms of a space")
    p.add_argument("space")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("approximate", help="quantize onto a certified range")
    p.add_argument("space")
    p.add_argument("--epsilon", required=True)
    p.add_argument("--r", default=None, help="override the level ratio")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_approximate)

    neb = sub.add_parser("nebula", help="interval covers of value sets")
    nsub = neb.add_subparsers(dest="nebula_command", required=True)
    p = nsub.add_parser("cover", help="cover a value set at resolution q")
    p.add_argument("values")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_nebula_cover)
    p = nsub.add_parser("check", help="validate a nebula file")
    p.add_argument("nebula")
    p.set_defaults(func=_cmd_nebula_check)
    p = nsub.add_parser("margin", help="stability radius of a covered metric")
    p.add_argument("space")
    p.add_argument("nebula")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_nebula_margin)

    emb = sub.add_parser("embed", help="isometric embeddings")
    esub = emb.add_subparsers(dest="embed_command", required=True)
    p = esub.add_parser("frechet", help="distance-vector coordinates")
    p.add_argument("space")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_embed_frechet)
    p = esub.add_parser("search", help="backtracking embedding search")
    p.add_argument("pattern")
    p.add_argument("host")
    p.add_argument("--distortion", default=None)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_embed_search)

    uni = sub.add_parser("universal", help="universal space constructions")
    usub = uni.add_subparsers(dest="universal_command", required=True)
    p = usub.add_parser("pairs", help="pair space for prescribed distances")
    p.add_argument("--values", required=True, help="comma-separated rationals")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_universal_pairs)
    p = usub.add_parser("funiv", help="glued l-infinity net pieces")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", required=True)
    p.add_argument("--copies", type=int, default=1)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_universal_funiv)

    p = sub.add_parser(
        "fragility", help="what approximation does to a pair-universal space"
    )
    p.add_argument("--values", required=True, help="comma-separated rationals")
    p.add_argument("--epsilon", required=True)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_fragility)

    plot = sub.add_parser("plot", help="static SVG figures")
    psub = plot.add_subparsers(dest="plot_command", required=True)
    p = psub.add_parser("range", help="number line of the distance range")
    p.add_argument("space")
    p.add_argument("--nebula", default=None)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_plot_range)

    gen = sub.add_parser("gen", help="space generators")
    gsub = gen.add_subparsers(dest="gen_command", required=True)
    p = gsub.add_parser("random", help="seeded random metric")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-value", default="10")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_gen_random)
    p = gsub.add_parser("cantor", help="dyadic ultrametric on bit strings")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_gen_cantor)

    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse exits on usage errors and --help
        code = exc.code
        return code if isinstance(code, int) else 2
    try:
        return args.func(args)
    except json.JSONDecodeError as exc:
        print(
            f"error: malformed JSON at line {exc.lineno} column {exc.colno}: "
            f"{exc.msg}",
            file=sys.stderr,
        )
        return 2
    except (ValueError, TypeError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
