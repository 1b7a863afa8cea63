"""Scenario generation and desk-scale reproductions of the evaluation figures."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .benchmark import EXHAUSTIVE_CAP, baselines, centralized_optimum
from .game import is_nash
from .mechanism import (MESSAGE_CONVENTION, MechanismConfig, centralized_messages,
                        message_ledger, run_mechanism)
from .model import Scenario, UserProfile, system_cost

KB_BITS = 8000  # 1 KB = 1000 bytes
CENTRALIZED_CONVENTION = "centralized: 7 parameter-report messages per user"


@dataclass(frozen=True)
class GeneratorSpec:
    n_users: int = 20
    region_side: float = 50.0
    path_loss_exponent: float = 4.0
    bandwidth: float = 5e6
    transmit_power: float = 0.1
    noise_power: float = 1e-13
    input_bits: float = 420 * KB_BITS
    cycles: float = 1e9
    local_freq_choices: tuple[float, ...] = (0.5e9, 0.8e9, 1.0e9)
    cloud_freq: float = 100e9
    weight_time: float = 0.5
    weight_energy: float = 0.5
    min_distance: float = 1.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "local_freq_choices",
                           tuple(float(f) for f in self.local_freq_choices))
        if self.n_users < 1:
            raise ValueError("n_users must be >= 1")
        positive = ("region_side", "path_loss_exponent", "bandwidth", "transmit_power",
                    "noise_power", "input_bits", "cycles", "cloud_freq", "min_distance")
        for name in positive:
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v!r}")
        if not self.local_freq_choices or min(self.local_freq_choices) <= 0:
            raise ValueError("local_freq_choices must be non-empty and positive")
        for name in ("weight_time", "weight_energy"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must lie in [0, 1]")

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "GeneratorSpec":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ValueError(f"unknown generator keys: {unknown}")
        return cls(**d)

    @classmethod
    def from_json(cls, path: str | Path) -> "GeneratorSpec":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def scenario_from_positions(g: GeneratorSpec, positions: np.ndarray,
                            local_freqs: Sequence[float]) -> Scenario:
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    base = np.array([g.region_side / 2, g.region_side / 2])
    dist = np.maximum(np.hypot(*(positions - base).T), g.min_distance)
    users = tuple(
        UserProfile(
            transmit_power=g.transmit_power,
            channel_gain=float(d ** -g.path_loss_exponent),
            background_power=g.noise_power,
            input_bits=g.input_bits,
            cycles=g.cycles,
            local_freq=float(f),
            cloud_freq=g.cloud_freq,
            weight_time=g.weight_time,
            weight_energy=g.weight_energy,
        )
        for d, f in zip(dist, local_freqs)
    )
    meta = {
        "seed": g.seed,
        "region_side": g.region_side,
        "base_station": base.tolist(),
        "path_loss_exponent": g.path_loss_exponent,
        "positions": positions.tolist(),
    }
    return Scenario(bandwidth=g.bandwidth, users=users, meta=meta)


def generate_scenario(g: GeneratorSpec) -> Scenario:
    """Users uniform over the square region, base station at the centre."""
    rng = np.random.default_rng(g.seed)
    positions = rng.uniform(0.0, g.region_side, size=(g.n_users, 2))
    freqs = rng.choice(np.array(g.local_freq_choices), size=g.n_users)
    return scenario_from_positions(g, positions, freqs)


@dataclass
class ExperimentResult:
    experiment: str
    seed: int
    columns: list[str]
    rows: list[dict[str, Any]] = field(default_factory=list)
    aggregate_columns: list[str] = field(default_factory=list)
    aggregates: list[dict[str, Any]] = field(default_factory=list)
    units: dict[str, str] = field(default_factory=dict)
    meta: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ExperimentResult":
        return cls(**d)


UNITS = {
    "seed": "integer", "trial": "integer", "n_users": "users", "step": "slot index",
    "slot": "slot index", "winner": "user id (empty = initial state)",
    "cycles": "CPU cycles", "input_bits": "bits",
    "potential": "W^2", "system_cost": "overhead units (weighted s + J)",
    "mechanism_cost": "overhead units", "optimum_cost": "overhead units",
    "all_local_cost": "overhead units", "all_cloud_cost": "overhead units",
    "optimum_method": "exhaustive | branch-and-bound | none",
    "updates": "decision updates", "slots": "decision slots",
    "offloaders": "users", "messages_decentralized": "messages",
    "messages_centralized": "messages",
}


def _aggregate(rows: list[dict], key: str, value_cols: list[str]) -> tuple[list[str], list[dict]]:
    cols = [key, "trials"]
    for c in value_cols:
        cols += [f"{c}_mean", f"{c}_min", f"{c}_max"]
    out = []
    for k in sorted({r[key] for r in rows}):
        group = [r for r in rows if r[key] == k]
        rec: dict[str, Any] = {key: k, "trials": len(group)}
        for c in value_cols:
            vals = [float(r[c]) for r in group]
            rec[f"{c}_mean"] = math.fsum(vals) / len(vals)
            rec[f"{c}_min"] = min(vals)
            rec[f"{c}_max"] = max(vals)
        out.append(rec)
    return cols, out


def _run_checked(s: Scenario, seed: int, quiet_slots: int):
    trace = run_mechanism(s, MechanismConfig(quiet_slots=quiet_slots, seed=seed))
    if not (trace.converged and is_nash(s, trace.final_profile)):
        raise RuntimeError(f"mechanism did not reach an equilibrium (seed {seed})")
    return trace


def experiment_convergence(spec: GeneratorSpec, seed: int,
                           quiet_slots: int = 1) -> ExperimentResult:
    """Per-user overhead and potential after every slot of one run."""
    s = generate_scenario(replace(spec, seed=seed))
    trace = _run_checked(s, seed, quiet_slots)
    user_cols = [f"cost_user{n}" for n in range(s.n_users)]
    cols = ["step", "winner", "potential", "system_cost"] + user_cols
    rows = [dict(step=0, winner="", potential=trace.initial_potential,
                 system_cost=math.fsum(trace.initial_overheads),
                 **dict(zip(user_cols, trace.initial_overheads)))]
    for r in trace.slots:
        rows.append(dict(step=r.t + 1, winner="" if r.winner is None else r.winner,
                         potential=r.potential, system_cost=math.fsum(r.overheads),
                         **dict(zip(user_cols, r.overheads))))
    units = {**UNITS, **{c: "overhead units" for c in user_cols}}
    return ExperimentResult(
        "convergence", seed, cols, rows, units=units,
        meta={"n_users": s.n_users, "updates": trace.updates,
              "final_profile": "".join(map(str, trace.final_profile)),
              "message_convention": MESSAGE_CONVENTION},
    )


def _sweep(name: str, field_name: str, spec: GeneratorSpec, grid: Sequence[float],
           trials: int, seed: int, quiet_slots: int) -> ExperimentResult:
    rows = []
    for value in grid:
        for trial in range(trials):
            trial_seed = seed + trial
            s = generate_scenario(replace(spec, seed=trial_seed, **{field_name: float(value)}))
            trace = _run_checked(s, trial_seed, quiet_slots)
            local, cloud = baselines(s)
            rows.append({
                "seed": trial_seed, "trial": trial, "n_users": s.n_users,
                field_name: float(value),
                "mechanism_cost": system_cost(s, trace.final_profile),
                "all_local_cost": local, "all_cloud_cost": cloud,
                "offloaders": sum(trace.final_profile), "updates": trace.updates,
                "messages_decentralized": message_ledger(trace)["total"],
            })
    cols = ["seed", "trial", "n_users", field_name, "mechanism_cost", "all_local_cost",
            "all_cloud_cost", "offloaders", "updates", "messages_decentralized"]
    agg_cols, aggs = _aggregate(rows, field_name,
                                ["mechanism_cost", "all_local_cost", "all_cloud_cost",
                                 "offloaders", "updates"])
    return ExperimentResult(name, seed, cols, rows, agg_cols, aggs, units=dict(UNITS),
                            meta={"message_convention": MESSAGE_CONVENTION,
                                  "trials": trials, "grid": [float(v) for v in grid]})


def experiment_sweep_D(spec: GeneratorSpec, grid: Sequence[float], trials: int,
                       seed: int, quiet_slots: int = 1) -> ExperimentResult:
    return _sweep("sweep-d", "cycles", spec, grid, trials, seed, quiet_slots)


def experiment_sweep_B(spec: GeneratorSpec, grid: Sequence[float], trials: int,
                       seed: int, quiet_slots: int = 1) -> ExperimentResult:
    return _sweep("sweep-b", "input_bits", spec, grid, trials, seed, quiet_slots)


def experiment_scaling(spec: GeneratorSpec, grid: Sequence[int], trials: int, seed: int,
                       quiet_slots: int = 1, with_optimum: bool = True,
                       exhaustive_cap: int = EXHAUSTIVE_CAP) -> ExperimentResult:
    """Cost against the optimum, update counts and message totals per N."""
    rows = []
    for n in grid:
        for trial in range(trials):
            trial_seed = seed + trial
            s = generate_scenario(replace(spec, seed=trial_seed, n_users=int(n)))
            trace = _run_checked(s, trial_seed, quiet_slots)
            local, cloud = baselines(s)
            if with_optimum:
                method = "exhaustive" if n <= exhaustive_cap else "branch-and-bound"
                _, opt = centralized_optimum(s, cap=exhaustive_cap, method=method)
            else:
                method, opt = "none", float("nan")
            rows.append({
                "seed": trial_seed, "trial": trial, "n_users": int(n),
                "mechanism_cost": system_cost(s, trace.final_profile),
                "optimum_cost": opt, "optimum_method": method,
                "all_local_cost": local, "all_cloud_cost": cloud,
                "updates": trace.updates, "slots": len(trace.slots),
                "messages_decentralized": message_ledger(trace)["total"],
                "messages_centralized": centralized_messages(int(n)),
            })
    cols = ["seed", "trial", "n_users", "mechanism_cost", "optimum_cost", "optimum_method",
            "all_local_cost", "all_cloud_cost", "updates", "slots",
            "messages_decentralized", "messages_centralized"]
    value_cols = ["mechanism_cost", "all_local_cost", "all_cloud_cost", "updates",
                  "messages_decentralized", "messages_centralized"]
    if with_optimum:
        value_cols.insert(1, "optimum_cost")
    agg_cols, aggs = _aggregate(rows, "n_users", value_cols)
    return ExperimentResult(
        "scaling", seed, cols, rows, agg_cols, aggs, units=dict(UNITS),
        meta={"message_convention": MESSAGE_CONVENTION,
              "centralized_convention": CENTRALIZED_CONVENTION,
              "trials": trials, "grid": [int(n) for n in grid]},
    )


EXPERIMENTS = ("convergence", "sweep-d", "sweep-b", "scaling")

DEFAULT_GRIDS = {
    "sweep-d": [float(d) for d in np.arange(1, 11) * 1e8],
    "sweep-b": [float(kb) * KB_BITS for kb in range(100, 1001, 100)],
    "scaling": list(range(2, 17, 2)),
}
