"""Shared generators and independent brute-force oracles for the tests.

Oracles here deliberately avoid the library's own algorithms: triangle
checks are plain triple loops, shortest and minimax paths enumerate
permutations, embedding search enumerates injections.  Slow but obviously
correct on the small inputs the tests feed them.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import permutations

from metric_forge import FiniteMetricSpace


def triple_loop_is_metric(space) -> bool:
    n = space.n
    d = space.dist
    for i in range(n):
        if d[i][i] != 0:
            return False
        for j in range(n):
            if d[i][j] != d[j][i]:
                return False
            if i != j and d[i][j] <= 0:
                return False
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if d[i][j] > d[i][k] + d[k][j]:
                    return False
    return True


def triple_loop_is_ultrametric(space) -> bool:
    if not triple_loop_is_metric(space):
        return False
    n = space.n
    d = space.dist
    return all(
        d[i][j] <= max(d[i][k], d[k][j])
        for i in range(n)
        for j in range(n)
        for k in range(n)
    )


def brute_shortest_paths(space) -> list[list[Fraction]]:
    """All-pairs minimum over every simple path; exponential, n <= 7 only."""
    n = space.n
    d = space.dist
    out = [[d[i][j] for j in range(n)] for i in range(n)]
    middle = list(range(n))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            best = d[i][j]
            others = [k for k in middle if k not in (i, j)]
            for size in range(1, len(others) + 1):
                for route in permutations(others, size):
                    chain = [i, *route, j]
                    total = sum(
                        d[a][b] for a, b in zip(chain, chain[1:])
                    )
                    if total < best:
                        best = total
            out[i][j] = best
    return out


def brute_minimax_paths(space) -> list[list[Fraction]]:
    """All-pairs minimum over paths of the largest edge; n <= 7 only."""
    n = space.n
    d = space.dist
    out = [[d[i][j] for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            best = d[i][j]
            others = [k for k in range(n) if k not in (i, j)]
            for size in range(1, len(others) + 1):
                for route in permutations(others, size):
                    chain = [i, *route, j]
                    peak = max(d[a][b] for a, b in zip(chain, chain[1:]))
                    if peak < best:
                        best = peak
            out[i][j] = best
    return out


def brute_embedding_exists(pattern, host, distortion=Fraction(0)) -> bool:
    """Enumerate every injective assignment; patterns <= 4, hosts <= 10."""
    k, h = pattern.n, host.n
    if k > h:
        return False
    for assign in permutations(range(h), k):
        ok = True
        for a in range(k):
            for b in range(a + 1, k):
                gap = abs(host.dist[assign[a]][assign[b]] - pattern.dist[a][b])
                if gap > distortion:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False


def brute_range_member(t, eta, u, l_max=None, exp_max=40) -> bool:
    """Exhaustive grid search for t = eta*(l + [u^n] + [u^m]).

    Every sum of zero, one or two geometric terms up to exp_max is tabled
    once; the integer part never exceeds t/eta, so scanning l up to there
    with set lookups is genuinely exhaustive.
    """
    s = t / eta
    if l_max is None:
        l_max = int(s) + 1
    powers = [u**e for e in range(exp_max + 1)]
    sums = {Fraction(0)}
    sums.update(powers)
    sums.update(a + b for i, a in enumerate(powers) for b in powers[i:])
    for l in range(l_max + 1):
        base = s - l
        if base < 0:
            return False
        if base in sums:
            return True
    return False


def point_set_hausdorff(interval_set, points) -> Fraction:
    """sup over the interval set of the distance to a finite point set.

    Exact: inside a component the distance to the nearest point peaks at
    an endpoint or at the midpoint of a gap between consecutive points.
    """
    pts = sorted(points)
    if not pts:
        raise ValueError("need a nonempty point set")

    def dist_to_pts(x):
        return min(abs(x - p) for p in pts)

    worst = Fraction(0)
    for a, b in interval_set.bounded:
        candidates = [a, b]
        for p, q in zip(pts, pts[1:]):
            mid = (p + q) / 2
            if a <= mid <= b:
                candidates.append(mid)
        worst = max(worst, max(dist_to_pts(c) for c in candidates))
    return worst


def random_fractions(rng: random.Random, count, max_num=10, max_den=64):
    return [
        Fraction(rng.randint(0, max_num * max_den), rng.randint(1, max_den))
        for _ in range(count)
    ]


def random_cn_space(rng: random.Random, n: int) -> FiniteMetricSpace:
    """Random member of the card/diameter/separation class for n.

    Entries live in [A, 2A] for some A >= 1/n, which closes every triangle
    outright, and are multiples of 1/n.
    """
    k = rng.randint(1, n)
    a_steps = rng.randint(1, max(1, n * n // 2))
    rows = [[Fraction(0)] * k for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            steps = rng.randint(a_steps, min(2 * a_steps, n * n))
            v = Fraction(steps, n)
            rows[i][j] = v
            rows[j][i] = v
    labels = tuple(f"c{i}" for i in range(k))
    return FiniteMetricSpace(labels, tuple(tuple(r) for r in rows))
