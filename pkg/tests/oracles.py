"""Hand-rolled reference implementations used to cross-check the library.

Everything here is written from first principles (no imports from the
package under test, no scipy/numpy) so tests can compare two independent
routes to the same answer.
"""

from __future__ import annotations

import math
from itertools import chain, combinations


def normal_cdf(x: float, mean: float, sd: float) -> float:
    return 0.5 * (1.0 + math.erf((x - mean) / (sd * math.sqrt(2.0))))


def exponential_cdf(x: float, rate: float) -> float:
    return 0.0 if x < 0 else 1.0 - math.exp(-rate * x)


def lognormal_cdf(x: float, log_mean: float, log_sd: float) -> float:
    if x <= 0:
        return 0.0
    return normal_cdf(math.log(x), log_mean, log_sd)


def uniform_cdf(x: float, low: float, high: float) -> float:
    if x < low:
        return 0.0
    if x >= high:
        return 1.0
    return (x - low) / (high - low)


def ks_statistic(samples, cdf) -> float:
    """Largest gap between the empirical CDF and a model CDF."""
    ordered = sorted(samples)
    n = len(ordered)
    worst = 0.0
    for i, x in enumerate(ordered, start=1):
        model = cdf(x)
        worst = max(worst, abs(i / n - model), abs(model - (i - 1) / n))
    return worst


def quantile(values, p: float) -> float:
    """Linear-interpolation quantile on the sorted sample."""
    ordered = sorted(values)
    position = (len(ordered) - 1) * p
    below = math.floor(position)
    above = min(below + 1, len(ordered) - 1)
    fraction = position - below
    return ordered[below] + fraction * (ordered[above] - ordered[below])


def tukey_fences(values) -> tuple[float, float]:
    q1 = quantile(values, 0.25)
    q3 = quantile(values, 0.75)
    spread = q3 - q1
    return q1 - 1.5 * spread, q3 + 1.5 * spread


def directly_follows(variants) -> set[tuple[str, str]]:
    pairs = set()
    for variant in variants:
        for left, right in zip(variant, variant[1:]):
            pairs.add((left, right))
    return pairs


def footprint_relations(variants) -> dict[tuple[str, str], str]:
    """Brute-force relation matrix over every activity pair."""
    alphabet = sorted({a for variant in variants for a in variant})
    follows = directly_follows(variants)
    relations = {}
    for a in alphabet:
        for b in alphabet:
            forward = (a, b) in follows
            backward = (b, a) in follows
            if forward and backward:
                relations[(a, b)] = "||"
            elif forward:
                relations[(a, b)] = "->"
            elif backward:
                relations[(a, b)] = "<-"
            else:
                relations[(a, b)] = "#"
    return relations


def _powerset(items):
    items = list(items)
    return chain.from_iterable(
        combinations(items, size) for size in range(1, len(items) + 1)
    )


def alpha_maximal_pairs(variants) -> set[tuple[frozenset, frozenset]]:
    """Exhaustive maximal-pair search; only viable for small alphabets."""
    alphabet = sorted({a for variant in variants for a in variant})
    assert len(alphabet) <= 8, "oracle is exponential, keep alphabets small"
    rel = footprint_relations(variants)

    def valid(left, right):
        for a in left:
            for b in left:
                if rel[(a, b)] != "#":
                    return False
        for a in right:
            for b in right:
                if rel[(a, b)] != "#":
                    return False
        for a in left:
            for b in right:
                if rel[(a, b)] != "->":
                    return False
        return True

    pairs = {
        (frozenset(left), frozenset(right))
        for left in _powerset(alphabet)
        for right in _powerset(alphabet)
        if valid(left, right)
    }
    return {
        (left, right)
        for left, right in pairs
        if not any(
            (left, right) != (wider_l, wider_r)
            and left <= wider_l
            and right <= wider_r
            for wider_l, wider_r in pairs
        )
    }


def weighted_choice(weighted_ids, draw: float) -> str:
    """Cumulative-sum table lookup over (id, weight) rows in given order."""
    total = sum(weight for _, weight in weighted_ids)
    boundary = 0.0
    for identifier, weight in weighted_ids:
        boundary += weight
        if draw * total < boundary:
            return identifier
    return weighted_ids[-1][0]


def tandem_waits(arrival_gap: float, service: float, cases: int) -> list[float]:
    """Waits at a single capacity-1 station fed every arrival_gap seconds."""
    waits = []
    previous_start = None
    for k in range(cases):
        arrival = arrival_gap * k
        start = arrival if previous_start is None else max(arrival, previous_start + service)
        waits.append(start - arrival)
        previous_start = start
    return waits


def truncated_normal_mean(mean: float, sd: float) -> float:
    """Mean of a normal truncated to x >= 0 (rejection-sampling limit)."""
    alpha = -mean / sd
    density = math.exp(-alpha * alpha / 2.0) / math.sqrt(2.0 * math.pi)
    return mean + sd * density / (1.0 - normal_cdf(0.0, mean, sd))
