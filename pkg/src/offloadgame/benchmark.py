"""Centralized optimum, baselines and price-of-anarchy metrics."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .game import (CapacityError, all_profiles, better_response_path,
                   enumerate_equilibria)
from .model import (Profile, Scenario, cloud_overhead_alone, cloud_overhead_at,
                    local_overhead, overhead_arrays, system_cost)

EXHAUSTIVE_CAP = 20


def exhaustive_optimum(s: Scenario, cap: int = EXHAUSTIVE_CAP,
                       chunk: int = 1 << 15) -> tuple[Profile, float]:
    """Scan all 2^N profiles; ties go to the lexicographically smallest."""
    N = s.n_users
    if N > cap:
        raise CapacityError(f"{N} users exceeds the exhaustive cap of {cap}")
    best_cost, best_code = math.inf, -1
    for start in range(0, 2 ** N, chunk):
        A = all_profiles(N, start, min(start + chunk, 2 ** N))
        costs = overhead_arrays(s, A).sum(axis=1)
        i = int(np.argmin(costs))
        if costs[i] < best_cost:
            best_cost, best_code = float(costs[i]), start + i
    profile = tuple(int(x) for x in all_profiles(N, best_code, best_code + 1)[0])
    return profile, system_cost(s, profile)


def branch_and_bound_optimum(s: Scenario, incumbent: Profile | None = None
                             ) -> tuple[Profile, float]:
    """Depth-first branch and bound over users in index order.

    The bound charges every user its cost under the interference already
    committed by decided offloaders; undecided users get the cheaper of
    local and cloud at that interference.  Later offloaders only add
    interference, so the bound never overestimates.
    """
    users = s.users
    N, W = s.n_users, s.bandwidth
    g = [u.received_power for u in users]
    zl = [local_overhead(u) for u in users]

    if incumbent is None:
        incumbent = tuple(0 for _ in users)
    # Slightly inflated so a tying optimum found in lexicographic order replaces it.
    best = [system_cost(s, incumbent) * (1 + 1e-9), None]
    a = [0] * N

    def bound(depth: int, load: float) -> float:
        committed = [g[m] for m in range(depth) if a[m]]
        total = 0.0
        for n in range(depth):
            if a[n]:
                # fsum with the negated own term stays exact where load - g[n] would cancel
                total += cloud_overhead_at(users[n], W, math.fsum(committed + [-g[n]]))
            else:
                total += zl[n]
        for n in range(depth, N):
            total += min(zl[n], cloud_overhead_at(users[n], W, load))
        return total

    def visit(depth: int, load: float) -> None:
        if depth == N:
            cost = system_cost(s, a)
            if cost < best[0]:
                best[0], best[1] = cost, tuple(a)
            return
        for choice in (0, 1):
            a[depth] = choice
            new_load = load + g[depth] if choice else load
            if bound(depth + 1, new_load) <= best[0] * (1 + 1e-12):
                visit(depth + 1, new_load)
        a[depth] = 0

    visit(0, 0.0)
    if best[1] is None:
        return incumbent, system_cost(s, incumbent)
    return best[1], best[0]


def centralized_optimum(s: Scenario, cap: int = EXHAUSTIVE_CAP,
                        method: str = "auto") -> tuple[Profile, float]:
    if method == "auto":
        method = "exhaustive" if s.n_users <= cap else "branch-and-bound"
    if method == "exhaustive":
        return exhaustive_optimum(s, cap=max(cap, s.n_users))
    if method == "branch-and-bound":
        start = tuple([1] * s.n_users)
        path = better_response_path(s, start)
        ne = path[-1] if path else start
        seed = min((ne, tuple([0] * s.n_users)), key=lambda p: system_cost(s, p))
        return branch_and_bound_optimum(s, incumbent=seed)
    raise ValueError(f"unknown method {method!r}")


def baselines(s: Scenario) -> tuple[float, float]:
    """(all-local cost, all-cloud cost)."""
    N = s.n_users
    return system_cost(s, [0] * N), system_cost(s, [1] * N)


def poa_bound(s: Scenario) -> float:
    zl = [local_overhead(u) for u in s.users]
    zc = [cloud_overhead_alone(u, s.bandwidth) for u in s.users]
    return math.fsum(zl) / math.fsum(min(l, c) for l, c in zip(zl, zc))


@dataclass(frozen=True)
class EquilibriumReport:
    optimum_profile: Profile
    optimum_cost: float
    worst_ne_profile: Profile
    worst_ne_cost: float
    best_ne_profile: Profile
    best_ne_cost: float
    poa: float
    poa_bound: float
    all_local_cost: float
    all_cloud_cost: float
    ne_count: int


def equilibrium_report(s: Scenario) -> EquilibriumReport:
    equilibria = enumerate_equilibria(s)
    costs = [system_cost(s, p) for p in equilibria]
    worst = max(range(len(costs)), key=lambda i: costs[i])
    best = min(range(len(costs)), key=lambda i: costs[i])
    opt_profile, opt_cost = centralized_optimum(s)
    if costs[best] < opt_cost:
        # the scan picked a near-tie that rounds above an equilibrium
        opt_profile, opt_cost = equilibria[best], costs[best]
    local, cloud = baselines(s)
    return EquilibriumReport(
        optimum_profile=opt_profile, optimum_cost=opt_cost,
        worst_ne_profile=equilibria[worst], worst_ne_cost=costs[worst],
        best_ne_profile=equilibria[best], best_ne_cost=costs[best],
        poa=costs[worst] / opt_cost, poa_bound=poa_bound(s),
        all_local_cost=local, all_cloud_cost=cloud, ne_count=len(equilibria),
    )


def poa(s: Scenario) -> float:
    return equilibrium_report(s).poa
