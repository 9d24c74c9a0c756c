"""Universal metric constructions and the embedding oracle that audits them.

A space is universal for a class when every member embeds isometrically.
This module builds the two desk-scale universal objects (the pair space,
which realizes any prescribed list of two-point distances, and the glued
l-infinity nets that capture every small well-separated space up to grid
distortion), plus the brute-force embedding search used to verify them,
and the fragility experiment showing how quantized approximation destroys
exact universality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .core import (
    FiniteMetricSpace,
    PartitionPlan,
    SearchCapExceeded,
    as_scalar,
    amalgamate,
    pair_points,
    subdominant_ultrametric,
    sup_distance,
)
from .quantize import ApproximationResult, approximate
from .nebula import range_of_metric


@dataclass(frozen=True)
class Embedding:
    """Injective map pattern index -> host index; exact means zero distortion."""

    mapping: tuple[int, ...]
    exact: bool


def class_Cn_check(space: FiniteMetricSpace, n: int) -> bool:
    """At most n points, diameter <= n, positive distances >= 1/n."""
    if n < 1:
        raise ValueError("class parameter must be at least 1")
    if space.n > n:
        return False
    if space.max_value() > n:
        return False
    sep = space.min_positive()
    return sep is None or sep >= Fraction(1, n)


def frechet_embed(space: FiniteMetricSpace, n: int):
    """Distance-vector coordinates in [0, n]^n, an exact l-infinity isometry.

    Row i is (d(p_1, p_i), ..., d(p_k, p_i), 0, ..., 0); the triangle
    inequality makes the max coordinate gap of two rows equal the original
    distance exactly.
    """
    if not class_Cn_check(space, n):
        raise ValueError(f"space is outside the class for n={n}")
    k = space.n
    rows = tuple(
        tuple(space.dist[m][i] if m < k else Fraction(0) for m in range(n))
        for i in range(k)
    )
    return rows


def linf_distance(u, v) -> Fraction:
    return max(abs(a - b) for a, b in zip(u, v))


def pullback_universal(
    dX: FiniteMetricSpace, eY: FiniteMetricSpace, f: dict, r
) -> FiniteMetricSpace:
    """max(min(dX, r), eY o f): universal for r-separated subsets of the image.

    ``f`` maps every point label of dX onto a point label of eY and must
    be surjective.  For pairs whose images are at least r apart the result
    reproduces eY exactly, so any r-separated subspace of eY embeds by
    choosing one preimage per point.
    """
    r = as_scalar(r)
    if r <= 0:
        raise ValueError("r must be positive")
    missing = [x for x in dX.points if x not in f]
    if missing:
        raise ValueError(f"map is not total: {missing}")
    targets = {f[x] for x in dX.points}
    if targets != set(eY.points):
        raise ValueError("map must be onto the target points")
    yindex = {label: i for i, label in enumerate(eY.points)}
    n = dX.n
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        fi = yindex[f[dX.points[i]]]
        for j in range(i + 1, n):
            fj = yindex[f[dX.points[j]]]
            v = max(min(dX.dist[i][j], r), eY.dist[fi][fj])
            rows[i][j] = v
            rows[j][i] = v
    return FiniteMetricSpace(dX.points, tuple(tuple(row) for row in rows))


def canonical_section(f: dict, labels) -> dict:
    """For each target label, the lexicographically smallest preimage."""
    out: dict[str, str] = {}
    for x in sorted(f):
        y = f[x]
        if y in labels and y not in out:
            out[y] = x
    return out


def build_pair_universal(values) -> FiniteMetricSpace:
    """Space containing a pair at every prescribed distance.

    Pair i sits at distance values[i]; the a-side points form a unit-
    distance hub, so any two-point space with a listed value embeds as
    (a_i, b_i) exactly.
    """
    vals = [as_scalar(v) for v in values]
    if not vals:
        raise ValueError("need at least one pair value")
    if any(v <= 0 for v in vals):
        raise ValueError("pair values must be positive")
    if len(set(vals)) != len(vals):
        raise ValueError("pair values must be distinct")
    count = len(vals)
    labels = pair_points(count)
    plan = PartitionPlan(
        clusters=tuple((2 * i, 2 * i + 1) for i in range(count)),
        reps=tuple(2 * i for i in range(count)),
        radius=max(vals),
    )
    cluster_metrics = [
        FiniteMetricSpace(
            (labels[2 * i], labels[2 * i + 1]),
            ((Fraction(0), vals[i]), (vals[i], Fraction(0))),
        )
        for i in range(count)
    ]
    one = Fraction(1)
    hub_rows = tuple(
        tuple(Fraction(0) if i == j else one for j in range(count))
        for i in range(count)
    )
    hub = FiniteMetricSpace(tuple(labels[2 * i] for i in range(count)), hub_rows)
    return amalgamate(plan, cluster_metrics, hub)


# ---------------------------------------------------------------------------
# l-infinity nets


@dataclass(frozen=True, eq=False)
class NetSpace:
    """The delta-grid of [0, n]^n under the l-infinity metric."""

    n: int
    delta: Fraction
    points: tuple[tuple[Fraction, ...], ...]
    space: FiniteMetricSpace

    def index_of(self, coords) -> int:
        coords = tuple(as_scalar(c) for c in coords)
        lo, hi = 0, len(self.points)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.points[mid] < coords:
                lo = mid + 1
            else:
                hi = mid
        if lo < len(self.points) and self.points[lo] == coords:
            return lo
        raise KeyError(f"{coords} is not a net point")

    def round_to_net(self, coords) -> tuple[Fraction, ...]:
        """Nearest net point coordinatewise, ties rounded up, clamped to [0, n]."""
        out = []
        for c in coords:
            c = as_scalar(c)
            steps = (c / self.delta).__floor__()
            lo = steps * self.delta
            hi = lo + self.delta
            pick = lo if c - lo < hi - c else hi
            pick = min(max(pick, Fraction(0)), Fraction(self.n))
            out.append(pick)
        return tuple(out)


def _coord_label(coords) -> str:
    return "(" + ",".join(str(c) for c in coords) + ")"


def make_net(n: int, delta, max_points: int = 1000) -> NetSpace:
    """Build the delta-net of [0, n]^n; delta must be n / 2^t."""
    if n < 1:
        raise ValueError("n must be at least 1")
    delta = as_scalar(delta)
    ratio = Fraction(n) / delta
    if ratio.denominator != 1 or ratio.numerator & (ratio.numerator - 1):
        raise ValueError("delta must equal n / 2^t for some t >= 0")
    axis = [k * delta for k in range(int(ratio) + 1)]
    if (len(axis)) ** n > max_points:
        raise ValueError(
            f"net would have {(len(axis))**n} points, above the cap {max_points}"
        )
    pts = tuple(product(axis, repeat=n))
    labels = tuple(_coord_label(p) for p in pts)
    rows = tuple(
        tuple(
            Fraction(0) if i == j else linf_distance(pts[i], pts[j])
            for j in range(len(pts))
        )
        for i in range(len(pts))
    )
    return NetSpace(n, delta, pts, FiniteMetricSpace(labels, rows))


@dataclass(frozen=True, eq=False)
class FUnivApprox:
    """Glued net copies: exact host for grid-valued patterns, delta otherwise."""

    space: FiniteMetricSpace
    net: NetSpace
    copies: int

    def host_index(self, piece: int, net_index: int) -> int:
        return piece * len(self.net.points) + net_index


def build_funiv_approx(n: int, delta, copies: int = 1, max_points: int = 1000) -> FUnivApprox:
    """Amalgamate ``copies`` pullback nets with hub distance 1 + n.

    Each piece carries max(min(u, 1/n), l-infinity) where u is the
    subdominant ultrametric of the net; separated patterns see the pure
    l-infinity metric, so members of the card/diameter/separation class
    with delta-grid values embed exactly and everything else lands within
    additive distortion delta.
    """
    if copies < 1:
        raise ValueError("need at least one copy")
    net = make_net(n, delta, max_points)
    proxy = subdominant_ultrametric(net.space)
    rho = pullback_universal(
        proxy, net.space, {p: p for p in net.space.points}, Fraction(1, n)
    )
    m = len(net.points)
    pieces = []
    for c in range(copies):
        labels = tuple(f"K{c}:{label}" for label in rho.points)
        pieces.append(FiniteMetricSpace(labels, rho.dist))
    plan = PartitionPlan(
        clusters=tuple(tuple(range(c * m, (c + 1) * m)) for c in range(copies)),
        reps=tuple(c * m for c in range(copies)),
        radius=Fraction(n),
    )
    far = Fraction(1 + n)
    hub_rows = tuple(
        tuple(Fraction(0) if i == j else far for j in range(copies))
        for i in range(copies)
    )
    hub = FiniteMetricSpace(tuple(p.points[0] for p in pieces), hub_rows)
    glued = amalgamate(plan, pieces, hub)
    return FUnivApprox(glued, net, copies)


# ---------------------------------------------------------------------------
# embedding search


def find_isometric_embedding(
    pattern: FiniteMetricSpace,
    host: FiniteMetricSpace,
    distortion=0,
    cap: int = 7,
) -> Embedding | None:
    """Backtracking search for an injective map within the given distortion.

    distortion 0 demands exact distance equality.  None means the search
    space was exhausted; patterns above the cap raise instead, so None
    stays a genuine non-existence verdict.
    """
    distortion = as_scalar(distortion)
    if distortion < 0:
        raise ValueError("distortion must be nonnegative")
    if pattern.n > cap:
        raise SearchCapExceeded(
            f"pattern has {pattern.n} points, above the search cap {cap}"
        )
    k, h = pattern.n, host.n
    assigned: list[int] = []
    used = [False] * h

    def feasible(idx: int, cand: int) -> bool:
        for prev in range(idx):
            gap = abs(host.dist[cand][assigned[prev]] - pattern.dist[idx][prev])
            if gap > distortion:
                return False
        return True

    def search(idx: int) -> bool:
        if idx == k:
            return True
        for cand in range(h):
            if not used[cand] and feasible(idx, cand):
                used[cand] = True
                assigned.append(cand)
                if search(idx + 1):
                    return True
                assigned.pop()
                used[cand] = False
        return False

    if search(0):
        return Embedding(tuple(assigned), distortion == 0)
    return None


def range_density_gap(space: FiniteMetricSpace, T) -> Fraction:
    """Largest gap between consecutive range values within [0, T]."""
    T = as_scalar(T)
    if T <= 0:
        raise ValueError("T must be positive")
    vals = sorted({Fraction(0), T, *(v for v in range_of_metric(space) if v <= T)})
    return max(b - a for a, b in zip(vals, vals[1:]))


# ---------------------------------------------------------------------------
# fragility of universality under approximation


@dataclass(frozen=True, eq=False)
class FragilityReport:
    values: tuple[Fraction, ...]
    epsilon: Fraction
    eta: Fraction
    r: Fraction
    sup_distance: Fraction
    max_value: Fraction
    gap_lo: Fraction
    gap_hi: Fraction
    lost_values: tuple[Fraction, ...]
    kept_values: tuple[Fraction, ...]
    approximation: ApproximationResult

    @property
    def gap_length(self) -> Fraction:
        return self.gap_hi - self.gap_lo


def fragility_experiment(values, epsilon) -> FragilityReport:
    """Approximate a pair-universal space and report what universality loses.

    The approximated metric keeps every distance within epsilon, but its
    range now lives in the certified sum range, which leaves open gaps; a
    prescribed pair value that falls into such a gap can no longer embed
    exactly.  The report names the largest missed interval and the lost
    values.
    """
    epsilon = as_scalar(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    vals = tuple(as_scalar(v) for v in values)
    before = build_pair_universal(vals)
    result = approximate(before, epsilon)
    after = result.D
    moved = sup_distance(before, after)
    if moved > epsilon:
        raise RuntimeError("internal: approximation exceeded its budget")

    rng = range_of_metric(after)
    top = rng[-1]
    gap_lo, gap_hi = Fraction(0), Fraction(0)
    for a, b in zip(rng, rng[1:]):
        if b - a > gap_hi - gap_lo:
            gap_lo, gap_hi = a, b

    present = set(rng)
    lost = tuple(v for v in vals if v not in present)
    kept = tuple(v for v in vals if v in present)
    return FragilityReport(
        values=vals,
        epsilon=epsilon,
        eta=result.eta,
        r=result.r,
        sup_distance=moved,
        max_value=top,
        gap_lo=gap_lo,
        gap_hi=gap_hi,
        lost_values=lost,
        kept_values=kept,
        approximation=result,
    )
