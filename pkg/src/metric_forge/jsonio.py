"""JSON codecs: rationals ride the wire as "p/q" or integer strings.

Readers are strict: decimals, negatives and asymmetric distance matrices
are rejected at parse time so exactness survives round-trips.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .core import FiniteMetricSpace, PartitionPlan, ValidationReport
from .nebula import Nebula, NebulaValidation
from .quantize import ApproximationResult, RangeCertificate
from .universal import Embedding, FragilityReport

_SCALAR_RE = re.compile(r"^(\d+)(?:/([1-9]\d*))?$")


def parse_scalar(text) -> Fraction:
    """Parse a nonnegative rational written as "p/q" or an integer string."""
    if isinstance(text, int) and not isinstance(text, bool):
        if text < 0:
            raise ValueError(f"negative value: {text}")
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"expected a rational string, got {type(text).__name__}")
    m = _SCALAR_RE.match(text)
    if not m:
        raise ValueError(f"malformed rational {text!r} (want \"p/q\" or \"n\")")
    return Fraction(int(m.group(1)), int(m.group(2) or 1))


def scalar_str(value: Fraction) -> str:
    return str(value)


# --- distance matrices ------------------------------------------------------


def space_to_obj(space: FiniteMetricSpace) -> dict:
    return {
        "points": list(space.points),
        "dist": [[scalar_str(v) for v in row] for row in space.dist],
    }


def space_from_obj(obj) -> FiniteMetricSpace:
    if not isinstance(obj, dict) or "points" not in obj or "dist" not in obj:
        raise ValueError("space JSON needs 'points' and 'dist'")
    points = obj["points"]
    rows = [[parse_scalar(v) for v in row] for row in obj["dist"]]
    space = FiniteMetricSpace.from_rows(points, rows)
    for i in range(space.n):
        for j in range(i + 1, space.n):
            if space.dist[i][j] != space.dist[j][i]:
                raise ValueError(
                    f"matrix not symmetric at ({points[i]}, {points[j]})"
                )
    return space


def validation_to_obj(report: ValidationReport) -> dict:
    return {
        "is_metric": report.is_metric,
        "is_ultrametric": report.is_ultrametric,
        "violations": [
            {
                "kind": v.kind,
                "witness": list(v.witness),
                "lhs": scalar_str(v.lhs),
                "rhs": scalar_str(v.rhs),
            }
            for v in report.violations
        ],
    }


# --- plans, certificates, approximation results -----------------------------


def plan_to_obj(plan: PartitionPlan) -> dict:
    return {
        "clusters": [list(c) for c in plan.clusters],
        "reps": list(plan.reps),
        "radius": scalar_str(plan.radius),
    }


def plan_from_obj(obj) -> PartitionPlan:
    return PartitionPlan(
        clusters=tuple(tuple(int(i) for i in c) for c in obj["clusters"]),
        reps=tuple(int(i) for i in obj["reps"]),
        radius=parse_scalar(obj["radius"]),
    )


def certificate_to_obj(i: int, j: int, cert: RangeCertificate) -> dict:
    return {"i": i, "j": j, "l": cert.l, "n": cert.n, "m": cert.m}


def approximation_to_obj(result: ApproximationResult) -> dict:
    return {
        "eta": scalar_str(result.eta),
        "r": scalar_str(result.r),
        "plan": plan_to_obj(result.plan),
        "certificates": [
            certificate_to_obj(i, j, cert) for i, j, cert in result.certificates
        ],
        "D": space_to_obj(result.D),
    }


# --- nebulae ----------------------------------------------------------------


def nebula_to_obj(nebula: Nebula) -> dict:
    return {
        "q": nebula.q,
        "bounded": [[scalar_str(a), scalar_str(b)] for a, b in nebula.bounded],
        "tail_start": scalar_str(nebula.tail_start),
    }


def nebula_from_obj(obj) -> Nebula:
    if not isinstance(obj, dict) or "q" not in obj:
        raise ValueError("nebula JSON needs 'q', 'bounded' and 'tail_start'")
    return Nebula(
        q=int(obj["q"]),
        bounded=tuple(
            (parse_scalar(a), parse_scalar(b)) for a, b in obj["bounded"]
        ),
        tail_start=parse_scalar(obj["tail_start"]),
    )


def nebula_validation_to_obj(check: NebulaValidation) -> dict:
    return {"valid": check.is_valid, "violations": list(check.violations)}


# --- embeddings and reports -------------------------------------------------


def embedding_to_obj(
    embedding: Embedding, pattern: FiniteMetricSpace, host: FiniteMetricSpace
) -> dict:
    return {
        "exact": embedding.exact,
        "map": {
            pattern.points[i]: host.points[h]
            for i, h in enumerate(embedding.mapping)
        },
    }


def fragility_to_obj(report: FragilityReport) -> dict:
    return {
        "values": [scalar_str(v) for v in report.values],
        "epsilon": scalar_str(report.epsilon),
        "eta": scalar_str(report.eta),
        "r": scalar_str(report.r),
        "sup_distance": scalar_str(report.sup_distance),
        "max_value": scalar_str(report.max_value),
        "missed_interval": {
            "lo": scalar_str(report.gap_lo),
            "hi": scalar_str(report.gap_hi),
            "length": scalar_str(report.gap_length),
        },
        "lost_values": [scalar_str(v) for v in report.lost_values],
        "kept_values": [scalar_str(v) for v in report.kept_values],
        "D": space_to_obj(report.approximation.D),
    }
