"""Metric-preserving transforms, ceiling quantization and certified ranges.

The certified range for parameters (eta, u) is the set of values
``eta * (l + u^n + u^m)`` with integer l >= 0 and optional geometric
summands u^n, u^m.  ``approximate`` pushes any metric into that range
while moving no distance by more than the requested epsilon, and returns
a machine-checkable certificate per pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    FiniteMetricSpace,
    PartitionPlan,
    as_scalar,
    amalgamate,
    greedy_clopen_partition,
    subdominant_ultrametric,
    sup_distance,
    validate_metric,
)


class UnsupportedTransformError(TypeError):
    """Raised when something outside the closed transform family is used."""


def ceil_ratio(x, eta) -> int:
    """Smallest integer k with x <= k * eta, by exact comparison."""
    x, eta = as_scalar(x), as_scalar(eta)
    if eta <= 0:
        raise ValueError("eta must be positive")
    if x < 0:
        raise ValueError("x must be nonnegative")
    return math.ceil(x / eta)


def quantize_discrete(space: FiniteMetricSpace, eta) -> FiniteMetricSpace:
    """Round every positive distance up to the grid eta * Z.

    The result stays within eta of the input, every positive output is at
    least eta, and metricity is preserved because the scaled ceiling is
    increasing and subadditive.
    """
    eta = as_scalar(eta)
    if eta <= 0:
        raise ValueError("eta must be positive")
    rows = tuple(
        tuple(
            Fraction(0) if i == j else eta * ceil_ratio(space.dist[i][j], eta)
            for j in range(space.n)
        )
        for i in range(space.n)
    )
    return FiniteMetricSpace(space.points, rows)


# ---------------------------------------------------------------------------
# the closed transform family
#
# Every member is increasing, maps 0 to 0 and positives to positives; the
# constructors validate their parameters so an instantiated descriptor is
# always a legal transform.  is_subadditive() is exact for atoms; for Sum
# and Compose it returns True exactly when all parts are certified
# subadditive (sums and compositions of increasing subadditive functions
# are subadditive), and a conservative False otherwise.


class Transform:
    def apply(self, s: Fraction) -> Fraction:
        raise NotImplementedError

    def is_subadditive(self) -> bool:
        raise NotImplementedError

    def _check(self, s) -> Fraction:
        s = as_scalar(s)
        if s < 0:
            raise ValueError("transforms are defined on nonnegative values")
        return s


@dataclass(frozen=True)
class Identity(Transform):
    def apply(self, s):
        return self._check(s)

    def is_subadditive(self):
        return True


@dataclass(frozen=True)
class Power(Transform):
    """s -> s^k for integer k >= 1; subadditive only for k = 1."""

    exponent: int

    def __post_init__(self):
        if not isinstance(self.exponent, int) or self.exponent < 1:
            raise ValueError("exponent must be an integer >= 1")

    def apply(self, s):
        return self._check(s) ** self.exponent

    def is_subadditive(self):
        return self.exponent == 1


@dataclass(frozen=True)
class ScaledCeil(Transform):
    """s -> eta * ceil(s / eta), the grid round-up."""

    eta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "eta", as_scalar(self.eta))
        if self.eta <= 0:
            raise ValueError("eta must be positive")

    def apply(self, s):
        return self.eta * ceil_ratio(self._check(s), self.eta)

    def is_subadditive(self):
        return True


@dataclass(frozen=True)
class Truncate(Transform):
    """s -> min(s, cap)."""

    cap: Fraction

    def __post_init__(self):
        object.__setattr__(self, "cap", as_scalar(self.cap))
        if self.cap <= 0:
            raise ValueError("cap must be positive")

    def apply(self, s):
        return min(self._check(s), self.cap)

    def is_subadditive(self):
        return True


@dataclass(frozen=True)
class RoundUpTo(Transform):
    """s -> smallest member of a finite value set that is >= s.

    The set must contain 0 and at least one positive value; inputs above
    the largest value are a domain error.  Subadditivity is decided
    exactly by a finite scan over the step boxes.
    """

    values: tuple[Fraction, ...]

    def __post_init__(self):
        vals = tuple(sorted({as_scalar(v) for v in self.values}))
        object.__setattr__(self, "values", vals)
        if not vals or vals[0] != 0:
            raise ValueError("value set must contain 0 and stay nonnegative")
        if len(vals) < 2:
            raise ValueError("value set needs a positive member")

    def apply(self, s):
        s = self._check(s)
        if s > self.values[-1]:
            raise ValueError(f"{s} is above the top of the round-up set")
        for v in self.values:
            if v >= s:
                return v
        raise AssertionError("unreachable")

    def is_subadditive(self):
        # f is constant on (v_{i-1}, v_i]; on the box (v_{i-1},v_i] x
        # (v_{j-1},v_j] the worst case of f(x+y) - f(x) - f(y) is at the
        # top corner, clamped to the domain.
        v = self.values
        top = v[-1]
        for i in range(1, len(v)):
            for j in range(i, len(v)):
                if v[i - 1] + v[j - 1] >= top:
                    continue  # box entirely outside the domain
                reach = min(v[i] + v[j], top)
                if self.apply(reach) > v[i] + v[j]:
                    return False
        return True


@dataclass(frozen=True)
class AffineCapped(Transform):
    """s -> s + alpha * min(s, cap); increasing for alpha > -1."""

    alpha: Fraction
    cap: Fraction

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_scalar(self.alpha))
        object.__setattr__(self, "cap", as_scalar(self.cap))
        if self.alpha <= -1:
            raise ValueError("alpha must exceed -1 to stay increasing")
        if self.cap <= 0:
            raise ValueError("cap must be positive")

    def apply(self, s):
        s = self._check(s)
        return s + self.alpha * min(s, self.cap)

    def is_subadditive(self):
        # alpha >= 0 adds a subadditive term; alpha < 0 fails at x = y = cap
        return self.alpha >= 0


@dataclass(frozen=True)
class Sum(Transform):
    parts: tuple[Transform, ...]

    def __post_init__(self):
        if not self.parts or not all(isinstance(p, Transform) for p in self.parts):
            raise UnsupportedTransformError("sum parts must be family members")

    def apply(self, s):
        s = self._check(s)
        total = Fraction(0)
        for p in self.parts:
            total += p.apply(s)
        return total

    def is_subadditive(self):
        return all(p.is_subadditive() for p in self.parts)


@dataclass(frozen=True)
class Compose(Transform):
    """outer(inner(s))."""

    outer: Transform
    inner: Transform

    def __post_init__(self):
        if not isinstance(self.outer, Transform) or not isinstance(
            self.inner, Transform
        ):
            raise UnsupportedTransformError("compose parts must be family members")

    def apply(self, s):
        return self.outer.apply(self.inner.apply(self._check(s)))

    def is_subadditive(self):
        return self.outer.is_subadditive() and self.inner.is_subadditive()


def transform_metric(space: FiniteMetricSpace, f: Transform) -> FiniteMetricSpace:
    """Apply a family transform to every off-diagonal distance.

    When ``f.is_subadditive()`` the output is again a metric; otherwise
    the returned candidate may fail validation, which is exactly what the
    counterexample construction exploits.
    """
    if not isinstance(f, Transform):
        raise UnsupportedTransformError(
            "transform must come from the closed descriptor family"
        )
    rows = tuple(
        tuple(
            Fraction(0) if i == j else f.apply(space.dist[i][j])
            for j in range(space.n)
        )
        for i in range(space.n)
    )
    return FiniteMetricSpace(space.points, rows)


def subadditivity_counterexample(f: Transform, x, y) -> FiniteMetricSpace:
    """Three-point path space on which a non-subadditive f breaks the triangle.

    Requires an actual violation f(x+y) > f(x) + f(y); the returned space
    has d(a,b) = x, d(b,c) = y, d(a,c) = x + y, so applying f produces a
    triangle failure at the (a, c) pair.
    """
    if not isinstance(f, Transform):
        raise UnsupportedTransformError(
            "transform must come from the closed descriptor family"
        )
    x, y = as_scalar(x), as_scalar(y)
    if x <= 0 or y <= 0:
        raise ValueError("witness values must be positive")
    if f.apply(x + y) <= f.apply(x) + f.apply(y):
        raise ValueError(f"no subadditivity violation at ({x}, {y})")
    rows = (
        (Fraction(0), x, x + y),
        (x, Fraction(0), y),
        (x + y, y, Fraction(0)),
    )
    return FiniteMetricSpace(("a", "b", "c"), rows)


# ---------------------------------------------------------------------------
# certified range membership


@dataclass(frozen=True)
class RangeParams:
    eta: Fraction
    u: Fraction

    def __post_init__(self):
        object.__setattr__(self, "eta", as_scalar(self.eta))
        object.__setattr__(self, "u", as_scalar(self.u))
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if not 0 < self.u < 1:
            raise ValueError("u must lie strictly between 0 and 1")


@dataclass(frozen=True)
class RangeCertificate:
    """Witness that a value equals eta * (l + u^n + u^m).

    ``None`` in the n or m slot encodes a missing geometric summand.
    """

    l: int
    n: int | None
    m: int | None

    def value(self, params: RangeParams) -> Fraction:
        total = Fraction(self.l)
        if self.n is not None:
            total += params.u**self.n
        if self.m is not None:
            total += params.u**self.m
        return params.eta * total


def _exponent_bound(residue_den: int, u: Fraction, cap: int) -> int:
    # any representable residue needs u^k's reduced denominator (a power of
    # den(u)) to divide ~2 * den(residue); beyond that the search is hopeless
    q = u.denominator
    k = 0
    power = 1
    while power <= 2 * residue_den:
        power *= q
        k += 1
    return min(k + 1, cap)


def range_membership(
    t, params: RangeParams, max_exponent: int = 64
) -> RangeCertificate | None:
    """Find (l, n, m) with t = eta * (l + u^n + u^m), or None.

    The exponent search is finite: a geometric summand u^k can only
    contribute to an exact rational identity while den(u)^k stays within
    the residue's denominator, and max_exponent caps the scan.
    """
    t = as_scalar(t)
    if t < 0:
        raise ValueError("t must be nonnegative")
    s = t / params.eta
    if s.denominator == 1:
        return RangeCertificate(int(s), None, None)
    bound = _exponent_bound(s.denominator, params.u, max_exponent)
    powers = [params.u**e for e in range(bound + 1)]
    # powers shrink as the exponent grows, so the residue only increases;
    # a negative residue just means "try a larger exponent"
    for n in range(bound + 1):
        rest = s - powers[n]
        if rest >= 0 and rest.denominator == 1:
            return RangeCertificate(int(rest), n, None)
    for n in range(bound + 1):
        for m in range(n, bound + 1):
            rest = s - powers[n] - powers[m]
            if rest >= 0 and rest.denominator == 1:
                return RangeCertificate(int(rest), n, m)
    return None


# ---------------------------------------------------------------------------
# the dense-approximation construction


@dataclass(frozen=True)
class ApproximationResult:
    """Quantized metric D plus the plan and per-pair certificates.

    ``certificates`` maps each off-diagonal pair (i, j) with i < j to a
    RangeCertificate valid for RangeParams(eta, r).
    """

    D: FiniteMetricSpace
    plan: PartitionPlan
    certificates: tuple[tuple[int, int, RangeCertificate], ...]
    eta: Fraction
    r: Fraction

    def certificate(self, i: int, j: int) -> RangeCertificate:
        i, j = min(i, j), max(i, j)
        for a, b, cert in self.certificates:
            if (a, b) == (i, j):
                return cert
        raise KeyError((i, j))


def geometric_levels(eta: Fraction, u: Fraction, floor: Fraction) -> dict:
    """Levels {eta * u^k} down to the first one below ``floor``; value -> k."""
    levels = {}
    k = 0
    value = eta
    while True:
        levels[value] = k
        if value < floor:
            break
        k += 1
        value = eta * u**k
    return levels


def approximate(
    space: FiniteMetricSpace, epsilon, r=None
) -> ApproximationResult:
    """Move a metric by at most epsilon into the certified range.

    With eta = epsilon/5 and r = min(1/2, epsilon/10) the construction
    partitions the points into balls of radius r, rounds the hub metric on
    the representatives up to the eta-grid, replaces each cluster by its
    subdominant ultrametric rounded up onto the geometric levels
    {eta * r^k}, and glues.  Every guarantee is checked before returning:
    the output validates, sits within epsilon of the input, and each pair
    carries an exactly-reconstructing certificate.

    ``r`` may be overridden with any value in (0, 1) with 2r <= eta.
    """
    epsilon = as_scalar(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    eta = epsilon / 5
    if r is None:
        r = min(Fraction(1, 2), epsilon / 10)
    else:
        r = as_scalar(r)
        if not 0 < r < 1:
            raise ValueError("r must lie strictly between 0 and 1")
        if 2 * r > eta:
            raise ValueError("need 2r <= eta for the cluster diameter bound")

    plan = greedy_clopen_partition(space, r)
    hub = quantize_discrete(space.restrict(plan.reps), eta)

    cluster_metrics: list[FiniteMetricSpace] = []
    exponents: list[dict[tuple[int, int], int]] = []
    for cluster in plan.clusters:
        sub = subdominant_ultrametric(space.restrict(cluster))
        exps: dict[tuple[int, int], int] = {}
        positives = sorted({v for row in sub.dist for v in row if v > 0})
        if positives:
            level_map = geometric_levels(eta, r, positives[0])
            rounded = transform_metric(
                sub, RoundUpTo((Fraction(0), *level_map))
            )
            for a in range(sub.n):
                for b in range(a + 1, sub.n):
                    exps[(a, b)] = level_map[rounded.dist[a][b]]
        else:
            rounded = sub
        cluster_metrics.append(rounded)
        exponents.append(exps)

    D = amalgamate(plan, cluster_metrics, hub)

    home = {}
    for ci, cluster in enumerate(plan.clusters):
        for pos, idx in enumerate(cluster):
            home[idx] = (ci, pos)
    rep_pos = {ci: plan.clusters[ci].index(plan.reps[ci]) for ci in range(len(plan.clusters))}

    def leg_exponent(ci: int, pos: int) -> int | None:
        rp = rep_pos[ci]
        if pos == rp:
            return None
        key = (min(pos, rp), max(pos, rp))
        return exponents[ci][key]

    certs: list[tuple[int, int, RangeCertificate]] = []
    for i in range(space.n):
        ci, pi = home[i]
        for j in range(i + 1, space.n):
            cj, pj = home[j]
            if ci == cj:
                key = (min(pi, pj), max(pi, pj))
                cert = RangeCertificate(0, exponents[ci][key], None)
            else:
                step = hub.dist[ci][cj] / eta
                if step.denominator != 1:
                    raise RuntimeError("internal: hub value off the eta grid")
                cert = RangeCertificate(
                    int(step), leg_exponent(ci, pi), leg_exponent(cj, pj)
                )
            certs.append((i, j, cert))

    params = RangeParams(eta, r)
    for i, j, cert in certs:
        if cert.value(params) != D.dist[i][j]:
            raise RuntimeError(f"internal: certificate mismatch at ({i}, {j})")
    if not validate_metric(D).is_metric:
        raise RuntimeError("internal: approximation lost metricity")
    if sup_distance(space, D) > epsilon:
        raise RuntimeError("internal: approximation moved too far")

    return ApproximationResult(D, plan, tuple(certs), eta, r)
