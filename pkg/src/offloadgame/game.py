"""Best responses, Nash equilibria and the exact potential of the offloading game."""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .model import (NEVER_OFFLOAD, Profile, Scenario, as_profile,
                    received_interference, threshold, user_overhead)

OFFLOAD = 1
LOCAL = 0

DEFAULT_ENUMERATION_CAP = 20


class CapacityError(ValueError):
    """Raised when an exhaustive scan is requested above its size cap."""


def best_response(s: Scenario, a: Sequence[int], n: int) -> int:
    """Offload iff the interference n receives is at most its threshold."""
    mu = received_interference(s, a, n)
    return OFFLOAD if mu <= threshold(s, n) else LOCAL


def improvement_set(s: Scenario, a: Sequence[int], n: int) -> frozenset[int]:
    """Moves that strictly lower user n's overhead; empty or a singleton.

    An exact tie at the threshold is not an improvement.
    """
    mu = received_interference(s, a, n)
    L = threshold(s, n)
    if a[n] == 0 and mu < L:
        return frozenset({OFFLOAD})
    if a[n] == 1 and mu > L:
        return frozenset({LOCAL})
    return frozenset()


def improvers(s: Scenario, a: Sequence[int]) -> list[int]:
    return [n for n in range(s.n_users) if improvement_set(s, a, n)]


def is_nash(s: Scenario, a: Sequence[int]) -> bool:
    a = as_profile(s, a)
    return all(not improvement_set(s, a, n) for n in range(s.n_users))


def potential_thresholds(s: Scenario) -> np.ndarray:
    """Thresholds as used inside the potential.

    Never-offload users take ``-LARGE`` with LARGE = max finite |L_n| +
    max omega_n.  Any negative value is exact for them since they only ever
    move to local; this one is as deep as the deepest real threshold, so
    their moves show up in the potential without swamping everyone else's
    in double precision.
    """
    L = np.array(s.thresholds)
    finite = np.isfinite(L)
    large = np.max(np.abs(L[finite]), initial=0.0) + float(np.max(s.noise))
    return np.where(finite, L, -large)


def potential(s: Scenario, a: Sequence[int]) -> float:
    a = as_profile(s, a)
    g = s.gains
    L = potential_thresholds(s)
    terms = [0.5 * g[n] * g[m] for n in range(len(a)) for m in range(len(a))
             if m != n and a[n] and a[m]]
    terms += [g[n] * L[n] for n in range(len(a)) if not a[n]]
    return math.fsum(terms)


def potential_exact(s: Scenario, a: Sequence[int]) -> Fraction:
    """Potential in exact rational arithmetic over the same float inputs.

    Use this to compare profiles whose potentials differ by less than an ulp
    of the float value, e.g. a far user moving while near users dominate.
    """
    a = as_profile(s, a)
    g = [Fraction(float(x)) for x in s.gains]
    L = [Fraction(float(x)) for x in potential_thresholds(s)]
    on = [n for n in range(len(a)) if a[n]]
    load = sum((g[n] for n in on), Fraction(0))
    pair = (load * load - sum((g[n] * g[n] for n in on), Fraction(0))) / 2
    return pair + sum((g[n] * L[n] for n in range(len(a)) if not a[n]), Fraction(0))


def potential_array(s: Scenario, profiles: np.ndarray) -> np.ndarray:
    """Vectorised potential for a batch of profiles, shape (P,)."""
    A = np.asarray(profiles, dtype=float)
    g = s.gains
    load = A @ g
    pair = 0.5 * (load ** 2 - (A * g ** 2).sum(axis=1))
    return pair + ((1.0 - A) * (g * potential_thresholds(s))).sum(axis=1)


def all_profiles(n: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Profiles with integer codes in [start, stop) in lexicographic order.

    User 0 is the most significant bit, so row order is lexicographic.
    """
    stop = 2 ** n if stop is None else stop
    codes = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((codes[:, None] >> shifts) & 1).astype(np.uint8)


def enumerate_equilibria(s: Scenario, cap: int = DEFAULT_ENUMERATION_CAP,
                         chunk: int = 1 << 15) -> list[Profile]:
    """All pure Nash equilibria, lexicographically ordered."""
    N = s.n_users
    if N > cap:
        raise CapacityError(f"{N} users exceeds the enumeration cap of {cap}")
    g = s.gains
    L = np.array(s.thresholds)
    others = g[:, None] * (1.0 - np.eye(N))
    out: list[Profile] = []
    for start in range(0, 2 ** N, chunk):
        A = all_profiles(N, start, min(start + chunk, 2 ** N))
        mu = A.astype(float) @ others
        # Loose prefilter; every survivor is re-checked exactly below.
        slack = 1e-9 * (np.abs(mu) + np.abs(np.where(np.isfinite(L), L, 0.0)))
        ok_on = mu <= L + slack
        ok_off = mu >= L - slack
        cand = np.all(np.where(A == 1, ok_on, ok_off), axis=1)
        for row in A[cand]:
            p = tuple(int(x) for x in row)
            if is_nash(s, p):
                out.append(p)
    return out


UpdateRule = Callable[[Scenario, Profile, list[int], int], int]


def _lowest_index(s, a, movers, step):
    return movers[0]


def make_update_rule(name: str, seed: int | None = None) -> UpdateRule:
    """Pick one improving user per step: 'lowest-index', 'round-robin' or 'random'."""
    if name == "lowest-index":
        return _lowest_index
    if name == "round-robin":
        last = [-1]

        def rule(s, a, movers, step):
            after = [m for m in movers if m > last[0]]
            last[0] = after[0] if after else movers[0]
            return last[0]
        return rule
    if name == "random":
        rng = np.random.default_rng(seed)

        def rule(s, a, movers, step):
            return movers[int(rng.integers(len(movers)))]
        return rule
    raise ValueError(f"unknown update rule {name!r}")


def better_response_path(s: Scenario, a0: Sequence[int],
                         rule: str | UpdateRule = "lowest-index",
                         seed: int | None = None,
                         max_steps: int = 1_000_000) -> list[Profile]:
    """Asynchronous better-response path from a0; a0 itself is not included."""
    if isinstance(rule, str):
        rule = make_update_rule(rule, seed)
    a = list(as_profile(s, a0))
    path: list[Profile] = []
    for step in range(max_steps):
        movers = improvers(s, a)
        if not movers:
            return path
        k = rule(s, tuple(a), movers, step)
        (a[k],) = improvement_set(s, a, k)
        path.append(tuple(a))
    raise RuntimeError(f"no equilibrium after {max_steps} steps")


def unilateral_deviations(s: Scenario, a: Sequence[int]) -> list[int]:
    """Users who could strictly lower their overhead by flipping, checked directly."""
    a = as_profile(s, a)
    out = []
    for n in range(s.n_users):
        b = list(a)
        b[n] = 1 - b[n]
        if user_overhead(s, b, n) < user_overhead(s, a, n):
            out.append(n)
    return out


__all__ = [
    "OFFLOAD", "LOCAL", "NEVER_OFFLOAD", "CapacityError", "best_response",
    "improvement_set", "improvers", "is_nash", "potential", "potential_array",
    "potential_thresholds", "potential_exact", "all_profiles", "enumerate_equilibria",
    "make_update_rule", "better_response_path", "unilateral_deviations",
]
