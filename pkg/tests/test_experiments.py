import csv
import json
import math
import xml.etree.ElementTree as ET
from dataclasses import replace

import pytest

from offloadgame.experiments import (KB_BITS, ExperimentResult, GeneratorSpec,
                                     experiment_convergence, experiment_scaling,
                                     experiment_sweep_B, experiment_sweep_D,
                                     generate_scenario, scenario_from_positions)
from offloadgame.game import is_nash
from offloadgame.io import (csv_text, emit, load_result, load_scenario, read_csv,
                            save_result, save_scenario)
from offloadgame.mechanism import run_mechanism


SMALL = GeneratorSpec(n_users=6)


def test_defaults():
    g = GeneratorSpec()
    assert g.input_bits == 420 * KB_BITS == 3.36e6
    assert g.noise_power == 1e-13 and g.bandwidth == 5e6


def test_forced_distance_gain():
    g = GeneratorSpec(n_users=1)
    s = scenario_from_positions(g, [[35.0, 25.0]], [1e9])
    assert s.users[0].channel_gain == pytest.approx(1e-4, rel=1e-15)


def test_min_distance_floor():
    g = GeneratorSpec(n_users=2, min_distance=2.0)
    s = scenario_from_positions(g, [[25.0, 25.0], [25.5, 25.0]], [1e9, 1e9])
    assert s.users[0].channel_gain == s.users[1].channel_gain == pytest.approx(2.0 ** -4)


def test_generation_is_deterministic():
    assert generate_scenario(GeneratorSpec(seed=3)) == generate_scenario(GeneratorSpec(seed=3))
    assert generate_scenario(GeneratorSpec(seed=3)) != generate_scenario(GeneratorSpec(seed=4))


def test_generated_positions_inside_region():
    s = generate_scenario(GeneratorSpec(n_users=200, seed=1))
    for x, y in s.meta["positions"]:
        assert 0 <= x <= 50 and 0 <= y <= 50
    assert {u.local_freq for u in s.users} == {0.5e9, 0.8e9, 1e9}


def test_default_scenario_converges():
    s = generate_scenario(GeneratorSpec(seed=0))
    trace = run_mechanism(s)
    assert trace.converged and is_nash(s, trace.final_profile)


@pytest.mark.parametrize("kw", [dict(n_users=0), dict(min_distance=0.0),
                                dict(bandwidth=-1.0), dict(local_freq_choices=()),
                                dict(weight_time=2.0), dict(noise_power=math.inf)])
def test_spec_validation(kw):
    with pytest.raises(ValueError):
        GeneratorSpec(**kw)


def test_spec_from_json(tmp_path):
    p = tmp_path / "g.json"
    p.write_text(json.dumps({"n_users": 4, "local_freq_choices": [1e9]}))
    g = GeneratorSpec.from_json(p)
    assert g.n_users == 4 and g.local_freq_choices == (1e9,)
    p.write_text(json.dumps({"n_user": 4}))
    with pytest.raises(ValueError, match="unknown"):
        GeneratorSpec.from_json(p)


def test_scenario_file_round_trip(tmp_path):
    s = generate_scenario(GeneratorSpec(n_users=5, seed=9))
    save_scenario(s, tmp_path / "s.json")
    assert load_scenario(tmp_path / "s.json") == s


# --- experiments -------------------------------------------------------------------

def test_convergence_trajectory():
    r = experiment_convergence(GeneratorSpec(n_users=10), seed=2)
    rows = r.rows
    assert rows[0]["step"] == 0 and rows[0]["winner"] == ""
    for prev, cur in zip(rows, rows[1:]):
        if cur["winner"] == "":
            assert cur["potential"] == prev["potential"]
        else:
            assert cur["potential"] < prev["potential"]
    assert rows[-1]["potential"] == min(row["potential"] for row in rows)
    users = [c for c in r.columns if c.startswith("cost_user")]
    assert len(users) == 10
    for row in rows:
        assert row["system_cost"] == pytest.approx(sum(row[c] for c in users), rel=1e-12)


def test_sweep_d_against_local():
    grid = [1e8, 5e8, 1e9, 2e9]
    r = experiment_sweep_D(SMALL, grid, trials=4, seed=0)
    assert len(r.rows) == len(grid) * 4
    for row in r.rows:
        assert row["mechanism_cost"] <= row["all_local_cost"] * (1 + 1e-12)
    a = r.aggregates
    mech = [x["mechanism_cost_mean"] for x in a]
    local = [x["all_local_cost_mean"] for x in a]
    assert mech[-1] - mech[-2] < local[-1] - local[-2]


def test_sweep_d_energy_only_vanishes():
    g = replace(SMALL, weight_time=0.0, weight_energy=1.0)
    small = experiment_sweep_D(g, [1e3], trials=3, seed=0)
    for row in small.rows:
        assert row["all_local_cost"] < 1e-7
        assert 0 <= row["mechanism_cost"] <= row["all_local_cost"]


def test_sweep_b_against_cloud():
    grid = [100 * KB_BITS, 500 * KB_BITS, 1000 * KB_BITS]
    r = experiment_sweep_B(GeneratorSpec(n_users=10), grid, trials=4, seed=1)
    for row in r.rows:
        assert row["mechanism_cost"] <= row["all_cloud_cost"] * (1 + 1e-12)
        assert row["mechanism_cost"] <= row["all_local_cost"] * (1 + 1e-12)


def test_scaling_single_user_matches_optimum():
    r = experiment_scaling(GeneratorSpec(), [1], trials=5, seed=0)
    for row in r.rows:
        assert row["mechanism_cost"] == pytest.approx(row["optimum_cost"], rel=1e-12)
        assert row["messages_centralized"] == 7


def test_scaling_without_optimum():
    r = experiment_scaling(GeneratorSpec(), [3, 4], trials=2, seed=0, with_optimum=False)
    assert all(math.isnan(row["optimum_cost"]) for row in r.rows)
    assert "optimum_cost_mean" not in r.aggregate_columns


def test_aggregates_recomputable():
    r = experiment_scaling(GeneratorSpec(), [2, 5], trials=6, seed=3)
    for agg in r.aggregates:
        group = [row for row in r.rows if row["n_users"] == agg["n_users"]]
        assert agg["trials"] == len(group)
        for col in ("mechanism_cost", "optimum_cost", "updates"):
            vals = [row[col] for row in group]
            assert agg[f"{col}_mean"] == pytest.approx(sum(vals) / len(vals), rel=1e-12)
            assert agg[f"{col}_min"] == min(vals) and agg[f"{col}_max"] == max(vals)


# --- export ------------------------------------------------------------------------

def test_empty_result_gives_header_only(tmp_path):
    r = ExperimentResult("sweep-d", 0, ["seed", "cycles"])
    assert csv_text(r.columns, r.rows) == "seed,cycles\r\n"
    paths = emit(r, tmp_path, ["csv", "svg"])
    assert (tmp_path / "sweep-d_0.csv").read_bytes() == b"seed,cycles\r\n"
    ET.parse(paths[-1])


def test_csv_round_trip(tmp_path):
    r = experiment_sweep_B(SMALL, [200 * KB_BITS], trials=3, seed=5)
    emit(r, tmp_path)
    back = read_csv(tmp_path / "sweep-b_5.csv")
    assert len(back) == len(r.rows)
    for parsed, row in zip(back, r.rows):
        for c in r.columns:
            v = row[c]
            assert (float(parsed[c]) == v) if isinstance(v, float) else parsed[c] == str(v)
    agg = read_csv(tmp_path / "sweep-b_aggregate_5.csv")
    assert float(agg[0]["mechanism_cost_mean"]) == r.aggregates[0]["mechanism_cost_mean"]


def test_csv_quoting():
    text = csv_text(["a", "b"], [{"a": "x,y", "b": 'q"'}])
    assert list(csv.reader(text.splitlines())) == [["a", "b"], ["x,y", 'q"']]


def test_schema_sidecar(tmp_path):
    r = experiment_scaling(GeneratorSpec(), [2], trials=2, seed=1)
    emit(r, tmp_path)
    sch = json.loads((tmp_path / "scaling_1.schema.json").read_text())
    names = [c["name"] for c in sch["rows"]["columns"]]
    assert names == r.columns
    assert all(c["unit"] for c in sch["rows"]["columns"])
    assert sch["aggregates"]["file"] == "scaling_aggregate_1.csv"


@pytest.mark.parametrize("name", ["convergence", "scaling"])
def test_svg_is_well_formed_and_stable(tmp_path, name):
    if name == "convergence":
        r = experiment_convergence(SMALL, seed=1)
    else:
        r = experiment_scaling(GeneratorSpec(), [2, 3], trials=2, seed=1)
    (a,) = emit(r, tmp_path / "a", ["svg"])
    (b,) = emit(r, tmp_path / "b", ["svg"])
    root = ET.parse(a).getroot()
    assert root.tag.endswith("svg")
    assert a.read_bytes() == b.read_bytes()


def test_result_json_round_trip(tmp_path):
    r = experiment_convergence(SMALL, seed=4)
    save_result(r, tmp_path / "r.json")
    back = load_result(tmp_path / "r.json")
    assert back.rows == r.rows and back.columns == r.columns and back.meta == r.meta


def test_unknown_format(tmp_path):
    with pytest.raises(ValueError):
        emit(ExperimentResult("scaling", 0, ["n_users"]), tmp_path, ["xlsx"])
