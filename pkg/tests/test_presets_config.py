import math

import numpy as np
import pytest

from gatelab.config import (
    ConfigError,
    dump_plan_config,
    dump_preset_config,
    parse_pairs,
    parse_plan_config,
    parse_preset_config,
    parse_sweep_config,
)
from gatelab.graphs import Cz, Entangle, LocalComplement
from gatelab.presets import (
    get_preset,
    ion,
    seconds_from_units,
    squid,
    units_from_seconds,
)
from gatelab.recipes import catalog_plans
from gatelab.serialize import dumps_report, freeze, freeze_float, tsv_text


def test_squid_preset_pins_quoted_numbers():
    p = squid()
    assert (p.omega, p.delta1, p.delta2) == (1.05, 20.0, 21.0)
    assert p.g_physical == 1.8e8
    assert p.t_cavity == p.t_relax == 7.6e-7
    assert p.nominal_population == 0.01
    assert p.has_model


def test_ion_preset_pins_quoted_numbers():
    p = ion()
    assert p.pair_rate_physical == 1.0e4
    assert p.t_motional == 1.0e-2
    assert not p.has_model


def test_squid_gate_time_seconds():
    assert squid().gate_time_seconds() == pytest.approx(3.3224e-6, rel=1e-4)


def test_ion_gate_time_is_angular_reading():
    assert ion().gate_time_seconds() == pytest.approx(math.pi / 1e4, rel=1e-12)


def test_rate_only_preset_has_no_drive_params():
    with pytest.raises(ValueError):
        ion().drive_params(2)


def test_get_preset_rejects_unknown():
    with pytest.raises(KeyError):
        get_preset("quantum-doohickey")


def test_unit_conversion_round_trip():
    rng = np.random.default_rng(0)
    g = 1.8e8
    for t in rng.uniform(1e-9, 1e-3, size=20):
        assert units_from_seconds(seconds_from_units(t, g), g) == \
            pytest.approx(t, rel=1e-15)
        assert seconds_from_units(units_from_seconds(t, g), g) == \
            pytest.approx(t, rel=1e-15)


# ---------------------------------------------------------------------------
# config text


def test_parse_pairs_comments_and_blanks():
    pairs = parse_pairs("# header\n\nomega = 1.05  # trailing\n delta1=20\n")
    assert pairs == [("omega", "1.05"), ("delta1", "20")]


def test_parse_pairs_rejects_bare_lines():
    with pytest.raises(ConfigError):
        parse_pairs("omega 1.05")


def test_preset_config_round_trip():
    p = squid()
    again = parse_preset_config(dump_preset_config(p))
    for key in ("omega", "delta1", "delta2", "g_physical", "t_cavity",
                "t_relax", "nominal_population"):
        assert getattr(again, key) == getattr(p, key)


def test_preset_config_requires_model_or_rate():
    with pytest.raises(ConfigError):
        parse_preset_config("g_physical = 1e8")
    parse_preset_config("pair_rate_physical = 1e4")  # rate-only is fine


def test_preset_config_rejects_bad_numbers():
    with pytest.raises(ConfigError):
        parse_preset_config("omega = fast\ndelta1 = 20\ndelta2 = 21")


def test_plan_config_round_trip():
    for name, plan in catalog_plans().items():
        again = parse_plan_config(dump_plan_config(plan))
        assert again.n_qubits == plan.n_qubits, name
        assert again.steps == plan.steps, name
        assert again.target.adj == plan.target.adj, name
        assert again.reconstructed == plan.reconstructed, name


def test_plan_config_parses_all_step_kinds():
    plan = parse_plan_config(
        "n_qubits = 4\n"
        "step = entangle 0 1 2\n"
        "step = cz 2 3\n"
        "step = lc 1\n"
        "target = 0-1 2-3\n"
    )
    assert plan.steps == (Entangle((0, 1, 2)), Cz(2, 3), LocalComplement(1))


@pytest.mark.parametrize("text", [
    "step = cz 0 1\ntarget = 0-1",              # missing n_qubits
    "n_qubits = 3\nstep = warp 0\ntarget = 0-1",  # unknown step
    "n_qubits = 3\nstep = cz 0\ntarget = 0-1",    # bad arity
    "n_qubits = 3\nstep = cz 0 1",                # missing target
    "n_qubits = 3\nstep = cz 0 1\ntarget = 0+1",  # bad edge syntax
])
def test_plan_config_rejects_malformed(text):
    with pytest.raises(ConfigError):
        parse_plan_config(text)


def test_sweep_config_parses():
    out = parse_sweep_config(
        "param = delta-scale\nvalues = 1 2 4\nmetric = phase-deviation\n"
    )
    assert out["param"] == "delta-scale"
    assert out["values"] == [1.0, 2.0, 4.0]
    with pytest.raises(ConfigError):
        parse_sweep_config("param = t\nmetric = phase")


# ---------------------------------------------------------------------------
# deterministic serialization


def test_freeze_float_12_significant_digits():
    assert freeze_float(np.pi) == 3.14159265359
    assert freeze_float(1.0) == 1.0
    assert freeze_float(float("inf")) == float("inf")


def test_freeze_recurses_containers():
    frozen = freeze({"a": [np.pi, {"b": (2 / 3,)}]})
    assert frozen == {"a": [3.14159265359, {"b": [0.666666666667]}]}


def test_dumps_report_is_byte_stable():
    payload = {"z": 1 / 3, "a": [np.pi, 2.0], "name": "x"}
    assert dumps_report(payload) == dumps_report(dict(reversed(payload.items())))


def test_tsv_formatting():
    text = tsv_text(["a", "b"], [[1.0, np.pi], ["x", 2]])
    lines = text.splitlines()
    assert lines[0] == "a\tb"
    assert lines[1] == "1\t3.14159265359"
    assert lines[2] == "x\t2"
