"""Independent brute-force oracles for schedule optimality checks.

These deliberately avoid the scheduler's own plumbing: costs are computed
inline from first principles and the search enumerates every feasible
schedule (all interval subsets for an interruptible load, all contiguous
windows for a noninterruptible one).
"""

from __future__ import annotations

import itertools
from math import comb


def solo_interval_cost(rating_kw: float, price: float, pil_kw: float) -> float:
    """Cost of one load drawing ``rating_kw`` alone for one 5-minute interval."""
    excess_kw = max(0.0, rating_kw - pil_kw)
    return price * (rating_kw - excess_kw) / 12.0 + 2.0 * price * excess_kw / 12.0


def _interval_costs(rating_kw, s, f, price_at, pil_at) -> dict[int, float]:
    return {k: solo_interval_cost(rating_kw, price_at(k), pil_at(k)) for k in range(s, f + 1)}


def min_cost_interruptible(rating_kw, s, f, r_intervals, price_at, pil_at) -> tuple[float, tuple[int, ...]]:
    """Cheapest set of ``r_intervals`` intervals in [s, f], by full enumeration."""
    costs = _interval_costs(rating_kw, s, f, price_at, pil_at)
    if comb(f - s + 1, r_intervals) > 2_000_000:
        raise ValueError("instance too large to enumerate")
    best_cost, best_set = None, None
    for subset in itertools.combinations(range(s, f + 1), r_intervals):
        cost = sum(costs[k] for k in subset)
        if best_cost is None or cost < best_cost - 1e-15:
            best_cost, best_set = cost, subset
    return best_cost, best_set


def min_cost_noninterruptible(rating_kw, s, f, r_intervals, price_at, pil_at) -> tuple[float, tuple[int, ...]]:
    """Cheapest contiguous ``r_intervals`` window in [s, f], by full enumeration."""
    costs = _interval_costs(rating_kw, s, f, price_at, pil_at)
    best_cost, best_set = None, None
    for start in range(s, f - r_intervals + 2):
        window = tuple(range(start, start + r_intervals))
        cost = sum(costs[k] for k in window)
        if best_cost is None or cost < best_cost - 1e-15:
            best_cost, best_set = cost, window
    return best_cost, best_set
