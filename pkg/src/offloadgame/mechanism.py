"""Slotted simulation of the decentralized offloading mechanism.

Each slot every user measures its interference, works out whether it can
strictly improve, and the improvers contend for a single update.  The
winner flips and broadcasts a request-to-update (RTU).  The run stops
after ``quiet_slots`` consecutive slots without an RTU.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np

from .game import improvement_set, is_nash, potential
from .model import Profile, Scenario, received_interference, user_overheads

CONTENTION_MODES = ("uniform-backoff", "random-winner")

# Messages charged per decision update: interference enquiry, the base
# station's reply, and the RTU broadcast.  Pilots ride on normal uplink
# traffic and are not counted.
MESSAGES_PER_UPDATE = 3
MESSAGE_CONVENTION = ("decentralized: 3 messages per decision update "
                      "(1 interference enquiry + 1 enquiry reply + 1 RTU broadcast); "
                      "pilot signals not counted")


@dataclass(frozen=True)
class MechanismConfig:
    quiet_slots: int = 1
    contention_mode: str = "uniform-backoff"
    seed: int = 0
    max_slots: int = 100_000

    def __post_init__(self):
        if self.quiet_slots < 1:
            raise ValueError("quiet_slots must be >= 1")
        if self.max_slots < 1:
            raise ValueError("max_slots must be >= 1")
        if self.contention_mode not in CONTENTION_MODES:
            raise ValueError(f"contention_mode must be one of {CONTENTION_MODES}")


@dataclass(frozen=True)
class SlotRecord:
    t: int
    interference: tuple[float, ...]
    contenders: tuple[int, ...]
    winner: int | None
    profile: Profile            # decisions after the slot
    overheads: tuple[float, ...]
    potential: float
    enquiries: int = 0
    replies: int = 0
    rtu: int = 0

    @property
    def messages(self) -> int:
        return self.enquiries + self.replies + self.rtu


@dataclass
class MechanismTrace:
    initial_profile: Profile
    initial_overheads: tuple[float, ...]
    initial_potential: float
    slots: list[SlotRecord] = field(default_factory=list)
    converged: bool = False

    @property
    def final_profile(self) -> Profile:
        return self.slots[-1].profile if self.slots else self.initial_profile

    @property
    def updates(self) -> int:
        return sum(1 for r in self.slots if r.winner is not None)

    @property
    def update_slots(self) -> list[SlotRecord]:
        return [r for r in self.slots if r.winner is not None]

    def message_counts(self) -> dict[str, int]:
        return {
            "enquiry": sum(r.enquiries for r in self.slots),
            "reply": sum(r.replies for r in self.slots),
            "rtu": sum(r.rtu for r in self.slots),
        }


def contention_winner(contenders: Sequence[int], mode: str,
                      rng: np.random.Generator) -> int:
    """Pick the slot's winner among the (sorted) contenders.

    'uniform-backoff' draws one backoff per contender and the smallest
    expires first; equal draws go to the lowest user id.
    """
    if not contenders:
        raise ValueError("no contenders")
    if len(contenders) == 1:
        return contenders[0]
    if mode == "uniform-backoff":
        backoff = rng.random(len(contenders))
        return contenders[int(np.argmin(backoff))]
    if mode == "random-winner":
        return contenders[int(rng.integers(len(contenders)))]
    raise ValueError(f"unknown contention mode {mode!r}")


def run_mechanism(s: Scenario, cfg: MechanismConfig = MechanismConfig(),
                  initial: Sequence[int] | None = None) -> MechanismTrace:
    rng = np.random.default_rng(cfg.seed)
    a = [1] * s.n_users if initial is None else [int(x) for x in initial]
    trace = MechanismTrace(tuple(a), user_overheads(s, a), potential(s, a))
    quiet = 0
    for t in range(cfg.max_slots):
        mu = tuple(received_interference(s, a, n) for n in range(s.n_users))
        deltas = [improvement_set(s, a, n) for n in range(s.n_users)]
        contenders = tuple(n for n, d in enumerate(deltas) if d)
        winner = None
        if contenders:
            winner = contention_winner(contenders, cfg.contention_mode, rng)
            (a[winner],) = deltas[winner]
            quiet = 0
        else:
            quiet += 1
        sent = 1 if winner is not None else 0
        trace.slots.append(SlotRecord(
            t=t, interference=mu, contenders=contenders, winner=winner,
            profile=tuple(a), overheads=user_overheads(s, a),
            potential=potential(s, a),
            enquiries=sent, replies=sent, rtu=sent,
        ))
        if quiet >= cfg.quiet_slots:
            trace.converged = is_nash(s, a)
            break
    return trace


def message_ledger(trace: MechanismTrace) -> dict:
    counts = trace.message_counts()
    return {
        **counts,
        "updates": trace.updates,
        "total": sum(counts.values()),
        "convention": MESSAGE_CONVENTION,
    }


def centralized_messages(n_users: int, per_user: int = 7) -> int:
    """Messages a centralized optimizer needs: each user reports its parameters."""
    return per_user * n_users


TRACE_FIELDS = ("t", "winner", "profile", "potential", "system_cost", "messages")


def trace_records(trace: MechanismTrace) -> Iterable[dict]:
    for r in trace.slots:
        yield {
            "t": r.t,
            "winner": r.winner,
            "profile": "".join(map(str, r.profile)),
            "potential": r.potential,
            "system_cost": math.fsum(r.overheads),
            "messages": r.messages,
        }


def write_trace(trace: MechanismTrace, fh: TextIO) -> None:
    """One JSON object per slot, keys in the fixed ``TRACE_FIELDS`` order."""
    for rec in trace_records(trace):
        fh.write(json.dumps(rec) + "\n")
