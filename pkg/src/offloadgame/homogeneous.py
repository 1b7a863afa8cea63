"""Analytic equilibrium when every user puts the same power K on the channel."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .model import Profile, Scenario

HOMOGENEITY_RTOL = 1e-9


class NotHomogeneous(ValueError):
    pass


class NoBeneficialGroup(ValueError):
    """The top threshold ratio is negative; the all-local profile is the equilibrium."""


@dataclass(frozen=True)
class HomogeneousView:
    K: float
    order: tuple[int, ...]      # user ids, by L_n / K descending (stable)
    ratios: tuple[float, ...]   # L_n / K in that same order

    @classmethod
    def from_ratios(cls, ratios, K: float = 1.0) -> "HomogeneousView":
        order = tuple(sorted(range(len(ratios)), key=lambda n: -ratios[n]))
        return cls(K=K, order=order, ratios=tuple(float(ratios[n]) for n in order))


def homogeneous_view(s: Scenario, rtol: float = HOMOGENEITY_RTOL) -> HomogeneousView:
    g = [u.received_power for u in s.users]
    K = g[0]
    for n, gn in enumerate(g):
        if not math.isclose(gn, K, rel_tol=rtol, abs_tol=0.0):
            raise NotHomogeneous(f"user {n} has P*H={gn!r}, user 0 has {K!r}")
    # sorted() is stable, so equal ratios keep their original index order
    ratios = [L / K for L in s.thresholds]
    order = tuple(sorted(range(s.n_users), key=lambda n: -ratios[n]))
    return HomogeneousView(K=K, order=order, ratios=tuple(ratios[n] for n in order))


def grow_group(ratios) -> tuple[int, int]:
    """Run the group-growing loop over descending ratios.

    Returns (group size, number of growth steps taken).
    """
    if not ratios or ratios[0] < 0:
        raise NoBeneficialGroup("largest L/K is negative; use the all-local equilibrium")
    size, steps = 1, 0
    for t in range(1, len(ratios)):
        steps += 1
        if t + 1 > ratios[t] + 1:
            break
        size = t + 1
    return size, steps


def beneficial_group(v: HomogeneousView) -> tuple[int, ...]:
    """Original user ids of the beneficial cloud computing group, in sorted order."""
    size, _ = grow_group(v.ratios)
    return v.order[:size]


def homogeneous_equilibrium(s: Scenario) -> Profile:
    v = homogeneous_view(s)
    a = [0] * s.n_users
    if v.ratios[0] < 0:
        return tuple(a)
    for n in beneficial_group(v):
        a[n] = 1
    return tuple(a)
