"""Closed-form communication/computation overhead model.

Everything is SI: hertz, watts, bits, cycles, seconds, joules.  A decision
profile is any length-N sequence of 0/1 ints (1 = offload to the cloud).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Sequence

import numpy as np

# Sentinel threshold for users whose cloud branch can never win.  Compares
# below every finite interference level, so ``mu <= NEVER_OFFLOAD`` is False.
NEVER_OFFLOAD = float("-inf")

Profile = tuple[int, ...]


def default_energy_per_cycle(local_freq: float) -> float:
    """Energy per cycle in J: 1e-11 * (local frequency in GHz)**2."""
    return 1e-11 * (local_freq / 1e9) ** 2


@dataclass(frozen=True)
class UserProfile:
    transmit_power: float
    channel_gain: float
    background_power: float
    input_bits: float
    cycles: float
    local_freq: float
    cloud_freq: float
    weight_time: float = 0.5
    weight_energy: float = 0.5
    energy_per_cycle: float | None = None

    def __post_init__(self):
        positive = ("transmit_power", "channel_gain", "background_power",
                    "input_bits", "cycles", "local_freq", "cloud_freq")
        for name in positive:
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v!r}")
        for name in ("weight_time", "weight_energy"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")
        if self.weight_time + self.weight_energy <= 0:
            raise ValueError("weight_time + weight_energy must be > 0")
        if self.energy_per_cycle is None:
            object.__setattr__(self, "energy_per_cycle",
                               default_energy_per_cycle(self.local_freq))
        elif not (math.isfinite(self.energy_per_cycle) and self.energy_per_cycle >= 0):
            raise ValueError(f"energy_per_cycle must be >= 0, got {self.energy_per_cycle!r}")

    @property
    def received_power(self) -> float:
        """P_n * H_n, the power this user puts on the channel when offloading."""
        return self.transmit_power * self.channel_gain


@dataclass(frozen=True)
class Scenario:
    bandwidth: float
    users: tuple[UserProfile, ...]
    meta: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.bandwidth) and self.bandwidth > 0):
            raise ValueError(f"bandwidth must be > 0, got {self.bandwidth!r}")
        object.__setattr__(self, "users", tuple(self.users))
        if not self.users:
            raise ValueError("a scenario needs at least one user")

    @property
    def n_users(self) -> int:
        return len(self.users)

    def __len__(self) -> int:
        return len(self.users)

    # Per-user constants as arrays, used by the vectorised scans.

    @cached_property
    def gains(self) -> np.ndarray:
        return np.array([u.received_power for u in self.users])

    @cached_property
    def noise(self) -> np.ndarray:
        return np.array([u.background_power for u in self.users])

    @cached_property
    def local_overheads(self) -> np.ndarray:
        return np.array([local_overhead(u) for u in self.users])

    @cached_property
    def offload_coeffs(self) -> np.ndarray:
        """(gamma_T + gamma_E * P) * B: numerator of the transmission overhead."""
        return np.array([_offload_coeff(u) for u in self.users])

    @cached_property
    def cloud_exec_overheads(self) -> np.ndarray:
        return np.array([u.weight_time * cloud_exec_time(u) for u in self.users])

    @cached_property
    def thresholds(self) -> tuple[float, ...]:
        return tuple(_threshold(u, self.bandwidth) for u in self.users)


def as_profile(s: Scenario, a: Sequence[int]) -> Profile:
    bits = tuple(int(x) for x in a)
    if len(bits) != s.n_users:
        raise ValueError(f"profile has length {len(bits)}, scenario has {s.n_users} users")
    if any(b not in (0, 1) for b in bits):
        raise ValueError(f"profile entries must be 0 or 1, got {bits}")
    return bits


def _check_user(s: Scenario, n: int) -> None:
    if not 0 <= n < s.n_users:
        raise IndexError(f"user id {n} out of range for {s.n_users} users")


def received_interference(s: Scenario, a: Sequence[int], n: int) -> float:
    """Sum of P_m H_m over the other users currently offloading.

    Uses ``math.fsum`` so the value is correctly rounded whatever the order,
    which keeps every caller's threshold comparison consistent.
    """
    _check_user(s, n)
    return math.fsum(u.received_power for m, u in enumerate(s.users)
                     if m != n and a[m])


def rate_at(u: UserProfile, bandwidth: float, interference: float) -> float:
    return bandwidth * math.log2(1.0 + u.received_power / (u.background_power + interference))


def uplink_rate(s: Scenario, a: Sequence[int], n: int) -> float:
    """Uplink rate of user n in bits/s; independent of a[n] itself."""
    return rate_at(s.users[n], s.bandwidth, received_interference(s, a, n))


def local_time(u: UserProfile) -> float:
    return u.cycles / u.local_freq


def local_energy(u: UserProfile) -> float:
    return u.energy_per_cycle * u.cycles


def local_overhead(u: UserProfile) -> float:
    return u.weight_time * local_time(u) + u.weight_energy * local_energy(u)


def cloud_exec_time(u: UserProfile) -> float:
    return u.cycles / u.cloud_freq


def offload_time(s: Scenario, a: Sequence[int], n: int) -> float:
    return s.users[n].input_bits / uplink_rate(s, a, n)


def offload_energy(s: Scenario, a: Sequence[int], n: int) -> float:
    u = s.users[n]
    return u.transmit_power * u.input_bits / uplink_rate(s, a, n)


def _offload_coeff(u: UserProfile) -> float:
    return (u.weight_time + u.weight_energy * u.transmit_power) * u.input_bits


def cloud_overhead_at(u: UserProfile, bandwidth: float, interference: float) -> float:
    """Cloud overhead of one user at a given received interference level."""
    r = rate_at(u, bandwidth, interference)
    t_off = u.input_bits / r
    e_off = u.transmit_power * u.input_bits / r
    return u.weight_time * (t_off + cloud_exec_time(u)) + u.weight_energy * e_off


def cloud_overhead(s: Scenario, a: Sequence[int], n: int) -> float:
    return cloud_overhead_at(s.users[n], s.bandwidth, received_interference(s, a, n))


def cloud_overhead_alone(u: UserProfile, bandwidth: float) -> float:
    """Cloud overhead with no interfering offloaders (the best the cloud can do)."""
    return cloud_overhead_at(u, bandwidth, 0.0)


def user_overhead(s: Scenario, a: Sequence[int], n: int) -> float:
    _check_user(s, n)
    if a[n]:
        return cloud_overhead(s, a, n)
    return local_overhead(s.users[n])


def user_overheads(s: Scenario, a: Sequence[int]) -> tuple[float, ...]:
    return tuple(user_overhead(s, a, n) for n in range(s.n_users))


def system_cost(s: Scenario, a: Sequence[int]) -> float:
    a = as_profile(s, a)
    return math.fsum(user_overheads(s, a))


def _threshold(u: UserProfile, bandwidth: float) -> float:
    # Saving in overhead available to the cloud branch before paying for the uplink.
    margin = local_overhead(u) - u.weight_time * cloud_exec_time(u)
    if margin <= 0:
        return NEVER_OFFLOAD
    exponent = _offload_coeff(u) / (bandwidth * margin)
    try:
        denom = math.expm1(exponent * math.log(2.0))
    except OverflowError:
        denom = math.inf
    return u.received_power / denom - u.background_power


def threshold(s: Scenario, n: int) -> float:
    """Interference level up to which offloading is user n's best response.

    Returns ``NEVER_OFFLOAD`` when local execution is at least as cheap as
    cloud execution time alone.  Finite thresholds may be negative.
    """
    _check_user(s, n)
    return s.thresholds[n]


def overhead_arrays(s: Scenario, profiles: np.ndarray) -> np.ndarray:
    """Per-user overheads for a batch of profiles, shape (P, N).

    Vectorised counterpart of :func:`user_overhead`; results agree with the
    scalar path to within a few ulps.
    """
    A = np.asarray(profiles, dtype=bool)
    g = s.gains
    # total - own would cancel catastrophically when one gain dominates
    others = g[:, None] * (1.0 - np.eye(len(g)))
    mu = A.astype(float) @ others
    sinr = g / (s.noise + mu)
    rate = s.bandwidth * np.log2(1.0 + sinr)
    cloud = s.offload_coeffs / rate + s.cloud_exec_overheads
    return np.where(A, cloud, s.local_overheads)
