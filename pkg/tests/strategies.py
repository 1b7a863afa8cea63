"""Random scenario samplers shared by the test modules."""
from __future__ import annotations

import numpy as np

from offloadgame.model import Scenario, UserProfile


def random_user(rng: np.random.Generator, *, gain: float | None = None,
                power: float | None = None) -> UserProfile:
    d = rng.uniform(1.0, 36.0)
    wt = float(rng.choice([0.0, 1.0, rng.uniform()], p=[0.1, 0.1, 0.8]))
    we = float(rng.choice([0.0, 1.0, rng.uniform()], p=[0.1, 0.1, 0.8]))
    if wt + we == 0:
        wt = 0.5
    return UserProfile(
        transmit_power=power if power is not None else 10 ** rng.uniform(-2, 0),
        channel_gain=gain if gain is not None else d ** -4.0,
        background_power=10 ** rng.uniform(-14, -11),
        input_bits=10 ** rng.uniform(5, 7.3),
        cycles=10 ** rng.uniform(8, 9.7),
        local_freq=rng.uniform(0.3e9, 2e9),
        # occasionally slower than the handset, which yields never-offload users
        cloud_freq=10 ** rng.uniform(8.5, 11.3),
        weight_time=wt,
        weight_energy=we,
    )


def random_scenario(rng: np.random.Generator, n: int) -> Scenario:
    return Scenario(bandwidth=10 ** rng.uniform(5.5, 7.3),
                    users=tuple(random_user(rng) for _ in range(n)))


def homogeneous_scenario(rng: np.random.Generator, n: int) -> Scenario:
    """All users share P and H exactly; thresholds differ through task and CPU."""
    gain = rng.uniform(1.0, 36.0) ** -4.0
    power = 10 ** rng.uniform(-2, 0)
    return Scenario(bandwidth=10 ** rng.uniform(5.5, 7.3),
                    users=tuple(random_user(rng, gain=gain, power=power) for _ in range(n)))


def random_profile(rng: np.random.Generator, n: int) -> tuple[int, ...]:
    return tuple(int(x) for x in rng.integers(0, 2, size=n))


def user_with_threshold(L: float, *, power: float, gain: float, noise: float = 1e-13,
                        bandwidth: float = 5e6, cycles: float = 1e9,
                        local_freq: float = 1e9, cloud_freq: float = 1e11) -> UserProfile:
    """A user whose offloading threshold is L, obtained by solving for the input size."""
    base = UserProfile(transmit_power=power, channel_gain=gain, background_power=noise,
                       input_bits=1.0, cycles=cycles, local_freq=local_freq,
                       cloud_freq=cloud_freq)
    margin = (base.weight_time * cycles / local_freq + base.weight_energy
              * base.energy_per_cycle * cycles - base.weight_time * cycles / cloud_freq)
    exponent = np.log2(1.0 + power * gain / (L + noise))
    bits = exponent * bandwidth * margin / (base.weight_time + base.weight_energy * power)
    return UserProfile(transmit_power=power, channel_gain=gain, background_power=noise,
                       input_bits=float(bits), cycles=cycles, local_freq=local_freq,
                       cloud_freq=cloud_freq)


def scenario_with_ratios(ratios, *, power: float = 0.1, gain: float = 1e-6,
                         noise: float = 1e-13, bandwidth: float = 5e6) -> Scenario:
    """Homogeneous scenario whose thresholds are ratios[n] * K, K = power * gain."""
    K = power * gain
    return Scenario(bandwidth=bandwidth, users=tuple(
        user_with_threshold(r * K, power=power, gain=gain, noise=noise, bandwidth=bandwidth)
        for r in ratios))
