#!/usr/bin/env python3
"""Walkthrough: universal spaces and how quantized approximation breaks them.

The pair space realizes every prescribed two-point distance exactly; its
range is as dense as the prescription.  Quantized approximation moves it
only slightly in sup distance, yet the approximated range lives inside a
set full of gaps, so most prescribed distances can no longer embed
exactly.  Universality is fragile: arbitrarily small moves destroy it.
"""

from fractions import Fraction as F

from metric_forge import (
    FiniteMetricSpace,
    build_pair_universal,
    find_isometric_embedding,
    fragility_experiment,
    frechet_embed,
    linf_distance,
    range_density_gap,
)


def main():
    values = [F(k, 8) for k in range(1, 33)]
    print(f"prescribed pair distances: k/8 for k = 1..32")
    before = build_pair_universal(values)
    print(f"pair space has {before.n} points")

    probe = FiniteMetricSpace.from_rows(
        ["u", "v"], [[F(0), F(3, 8)], [F(3, 8), F(0)]]
    )
    hit = find_isometric_embedding(probe, before)
    print(f"two points at 3/8 embed exactly: {hit is not None}")
    print(f"largest range gap in [0, 4] before: {range_density_gap(before, 4)}\n")

    report = fragility_experiment(values, F(1, 2))
    print(f"approximated with epsilon = {report.epsilon} "
          f"(eta = {report.eta}, r = {report.r})")
    print(f"sup distance moved: {report.sup_distance}")
    print(f"missed open interval: ({report.gap_lo}, {report.gap_hi}), "
          f"length {report.gap_length}")
    lost = ", ".join(str(v) for v in report.lost_values[:8])
    print(f"{len(report.lost_values)} of {len(values)} values lost exact "
          f"embeddings, e.g. {lost}, ...")

    still = find_isometric_embedding(probe, report.approximation.D)
    print(f"two points at 3/8 embed exactly after: {still is not None}\n")

    # the distance-vector isometry behind the other universal construction
    triangle = FiniteMetricSpace.from_rows(
        ["p", "q", "r"],
        [[F(0), F(1), F(2)], [F(1), F(0), F(3, 2)], [F(2), F(3, 2), F(0)]],
    )
    rows = frechet_embed(triangle, 3)
    print("distance-vector rows of a 3-point space:")
    for label, row in zip(triangle.points, rows):
        print(f"  {label} -> ({', '.join(str(c) for c in row)})")
    gaps = [
        linf_distance(rows[i], rows[j]) == triangle.dist[i][j]
        for i in range(3)
        for j in range(3)
    ]
    print(f"sup-norm gaps reproduce the metric exactly: {all(gaps)}")


if __name__ == "__main__":
    main()
