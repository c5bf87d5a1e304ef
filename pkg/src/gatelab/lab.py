"""Operation layer behind the service endpoints.

Each ``run_*`` function performs one workbench task and returns a plain
json-ready dict (the service wraps these in response models, the CLI writes
them to disk).  All numbers in units of g unless a key says seconds.
"""

from __future__ import annotations

import math

import numpy as np

from . import graphs as graphmod
from . import recipes as recipemod
from .core import EXCITED, Dims, _atomic_digit
from .gates import (
    end_to_end_cz,
    evolve_qubit_columns,
    phase_distance,
    score_qubit_columns,
    wrap_phase,
)
from .model import derive, regime_check
from .presets import Preset, seconds_from_units

SWEEP_PARAMS = ("delta-scale", "omega", "n-max", "t")
SWEEP_METRICS = ("fidelity", "leakage", "phase", "phase-deviation")

# horizon for rate-deviation measurements when no time is given: a dozen
# bridge periods, long enough to average micromotion, short enough to stay
# cheap at scaled detunings (snapped to each scale's own period)
DEVIATION_HORIZON = 24 * math.pi


def _maybe_seconds(t_units: float, preset: Preset) -> float | None:
    if preset.g_physical is None:
        return None
    return seconds_from_units(t_units, preset.g_physical)


def run_regime(preset: Preset, threshold: float = 10.0) -> dict:
    report = regime_check(preset.drive_params(2), threshold=threshold)
    return {
        "kind": "regime",
        "preset": preset.name,
        "threshold": threshold,
        "ratios": [
            {"name": name, "value": value, "passes": value >= threshold}
            for name, value in report.ratios
        ],
        "passed": report.passed,
    }


def _population_masks(dims: Dims):
    idx = np.arange(dims.dim)
    atomic = idx // dims.photon_dim
    photons = (idx % dims.photon_dim).astype(float)
    excited = np.zeros(dims.dim)
    for j in range(dims.n_atoms):
        excited += _atomic_digit(dims, atomic, j) == EXCITED
    return excited, photons


def _cz_samples(preset: Preset, model: str, n_atoms: int, n_max: int,
                t_final: float, n_samples: int):
    params = preset.drive_params(n_atoms)
    times = [k / n_samples * t_final for k in range(1, n_samples + 1)]
    snaps = evolve_qubit_columns(params, times, model, n_atoms, n_max)
    excited_w, photon_w = _population_masks(Dims(n_atoms, n_max))
    rows = []
    for ts, u, leak, full in snaps:
        probs = np.abs(full) ** 2
        rows.append({
            "t": ts,
            "u": u,
            "leakage": leak,
            "excited": excited_w @ probs,
            "photons": photon_w @ probs,
        })
    return params, rows


def _phases_of(u: np.ndarray, n_atoms: int):
    names = [format(b, f"0{n_atoms}b") for b in range(2**n_atoms)]
    return names, [wrap_phase(float(np.angle(u[b, b]))) for b in range(len(names))]


def run_cz(preset: Preset, model: str = "full", n_atoms: int = 2,
           n_max: int = 4, t_units: float | None = None,
           n_samples: int = 16) -> dict:
    """Conditional-phase gate report plus a population/phase time series."""
    out: dict = {"kind": "cz", "preset": preset.name, "notes": []}
    if not preset.has_model:
        # rate-only preset: pure gate-time arithmetic, both rate readings
        t_angular = math.pi / preset.pair_rate_physical
        t_cyclic = 0.5 / preset.pair_rate_physical
        out.update({
            "model": None,
            "gate_time_seconds": t_angular,
            "gate_time_seconds_cyclic_rate": t_cyclic,
        })
        out["notes"].append(
            "preset carries only an effective pair rate; gate time quoted "
            "for the angular reading (pi/rate) and the cyclic reading "
            "(1/(2 rate))"
        )
        return out

    params = preset.drive_params(n_atoms)
    der = derive(params)
    gate_time = math.pi / der.pair_rate
    t_final = gate_time if t_units is None else t_units
    _, rows = _cz_samples(preset, model, n_atoms, n_max, t_final,
                          n_samples=n_samples)
    last = rows[-1]
    result = score_qubit_columns(last["u"], last["leakage"], last["t"],
                                 model, n_atoms)
    names, _ = _phases_of(result.unitary, n_atoms)
    series = []
    for row in rows:
        _, phases = _phases_of(row["u"], n_atoms)
        phi = wrap_phase(-(phases[-1] - phases[1] - phases[2] + phases[0])) \
            if n_atoms == 2 else None
        series.append({
            "t": row["t"],
            "t_seconds": _maybe_seconds(row["t"], preset),
            "phases": phases,
            "leakages": [float(x) for x in row["leakage"]],
            "excited_population": float(np.max(row["excited"])),
            "photon_population": float(np.max(row["photons"])),
            "conditional_phase": phi,
        })
    out.update({
        "model": model,
        "n_atoms": n_atoms,
        "n_max": n_max,
        "pair_rate": der.pair_rate,
        "gate_time": gate_time,
        "gate_time_seconds": _maybe_seconds(gate_time, preset),
        "t": t_final,
        "fidelity": result.fidelity,
        "max_leakage": result.max_leakage,
        "single_qubit_phase": result.phases.single_qubit_phase,
        "conditional_phase": result.phases.conditional_phase,
        "states": names,
        "phases": [result.phases.phases[n] for n in names],
        "leakages": [result.phases.leakages[n] for n in names],
        "regime_passed": regime_check(params).passed,
        "timeseries": series,
    })
    return out


def _budget_numbers(preset: Preset, p_r: float | None, p_c: float | None,
                    t_gate_seconds: float) -> dict:
    effective = []
    numbers = {
        "p_r": p_r, "p_c": p_c,
        "t_relax_eff_seconds": None,
        "t_cavity_eff_seconds": None,
        "t_gate_seconds": t_gate_seconds,
    }
    if preset.t_relax is not None and p_r:
        numbers["t_relax_eff_seconds"] = preset.t_relax / p_r
        effective.append(numbers["t_relax_eff_seconds"])
    if preset.t_cavity is not None and p_c:
        numbers["t_cavity_eff_seconds"] = preset.t_cavity / p_c
        effective.append(numbers["t_cavity_eff_seconds"])
    if preset.t_motional is not None:
        effective.append(preset.t_motional)
    numbers["headroom"] = min(effective) / t_gate_seconds if effective else None
    return numbers


def run_budget(preset: Preset, n_max: int = 4,
               include_measured: bool = True) -> dict:
    """Decoherence budget: quoted occupation estimates next to simulated ones."""
    out: dict = {"kind": "budget", "preset": preset.name, "notes": []}
    if not preset.has_model:
        t_gate = math.pi / preset.pair_rate_physical
        out["nominal"] = _budget_numbers(preset, None, None, t_gate)
        out["measured"] = None
        out["gate_time_seconds_cyclic_rate"] = 0.5 / preset.pair_rate_physical
        out["notes"].append(
            "rate-only preset: headroom uses the angular gate time pi/rate"
        )
        return out

    t_gate_seconds = preset.gate_time_seconds()
    nominal_p = preset.nominal_population
    out["nominal"] = _budget_numbers(preset, nominal_p, nominal_p,
                                     t_gate_seconds)
    if nominal_p is None:
        out["notes"].append("preset quotes no nominal occupation estimate")
    if include_measured:
        params = preset.drive_params(2)
        gate_time = math.pi / derive(params).pair_rate
        _, rows = _cz_samples(preset, "full", 2, n_max, gate_time, n_samples=32)
        p_r = max(float(np.max(r["excited"])) for r in rows)
        p_c = max(float(np.max(r["photons"])) for r in rows)
        out["measured"] = _budget_numbers(preset, p_r, p_c, t_gate_seconds)
        out["notes"].append(
            "measured occupations are maxima over the gate interval and "
            "over computational-basis inputs from the full-model run"
        )
    else:
        out["measured"] = None
    return out


def run_fuse(plan: "graphmod.FusionPlan", name: str | None = None,
             orbit_cap: int = graphmod.DEFAULT_ORBIT_CAP,
             statevector: bool | None = None) -> dict:
    outcome = graphmod.run_plan(plan, orbit_cap=orbit_cap,
                                statevector=statevector)
    return {
        "kind": "fuse",
        "recipe": name,
        "n_qubits": plan.n_qubits,
        "description": plan.description,
        "reconstructed": plan.reconstructed,
        "status": outcome.status,
        "witness": list(outcome.witness.vertices) if outcome.witness else None,
        "statevector_verified": outcome.statevector_verified,
        "orbit_explored": outcome.explored,
        "final_adjacency": graphmod.to_adjacency_text(outcome.final),
        "final_dot": graphmod.to_dot(outcome.final, name="final"),
        "target_adjacency": graphmod.to_adjacency_text(plan.target),
        "target_dot": graphmod.to_dot(plan.target, name="target"),
    }


def get_plan(recipe: str | None = None, plan_text: str | None = None):
    from .config import parse_plan_config

    if (recipe is None) == (plan_text is None):
        raise ValueError("give exactly one of recipe name or plan text")
    if recipe is not None:
        plans = recipemod.catalog_plans()
        if recipe not in plans:
            raise KeyError(
                f"unknown recipe {recipe!r}; known plans: {sorted(plans)}"
            )
        return recipe, plans[recipe]
    return None, parse_plan_config(plan_text)


def _deviation_horizon(preset: Preset, scale: float) -> float:
    der = derive(preset.drive_params(2).scaled_detunings(scale))
    period = 2 * math.pi / abs(der.delta)
    return max(1, round(DEVIATION_HORIZON / period)) * period


def _metric_at(preset: Preset, model: str, n_atoms: int, n_max: int,
               metric: str, t_units: float | None, scale: float = 1.0,
               omega: float | None = None) -> float:
    base = preset if omega is None else \
        Preset(name=preset.name, omega=omega, delta1=preset.delta1,
               delta2=preset.delta2, g=preset.g, g_physical=preset.g_physical)
    p = base.scaled_detunings(scale) if scale != 1.0 else base
    params = p.drive_params(n_atoms)
    der = derive(params)
    if metric == "fidelity":
        t = t_units if t_units is not None else math.pi / der.pair_rate
        return end_to_end_cz(params, model=model, n_atoms=n_atoms,
                             n_max=n_max, t=t).fidelity
    if metric == "leakage":
        t = t_units if t_units is not None else math.pi / der.pair_rate
        return end_to_end_cz(params, model=model, n_atoms=n_atoms,
                             n_max=n_max, t=t).max_leakage
    # phase metrics default to the micromotion-averaged horizon
    t = t_units if t_units is not None else _deviation_horizon(base, scale)
    (ts, u, leak, _), = evolve_qubit_columns(params, [t], model, n_atoms, n_max)
    _, phases = _phases_of(u, n_atoms)
    phi = wrap_phase(-(phases[-1] - phases[1] - phases[2] + phases[0]))
    if metric == "phase":
        return phi
    target = der.pair_rate * ts
    return phase_distance(phi, target) / target


def run_sweep(preset: Preset, param: str, values, metric: str,
              model: str = "full", n_atoms: int = 2, n_max: int = 4,
              t_units: float | None = None) -> dict:
    """Metric versus parameter, one row per grid point, deterministic order."""
    if param not in SWEEP_PARAMS:
        raise ValueError(f"unknown sweep parameter {param!r}; use {SWEEP_PARAMS}")
    if metric not in SWEEP_METRICS:
        raise ValueError(f"unknown sweep metric {metric!r}; use {SWEEP_METRICS}")
    values = list(values)
    if not values:
        raise ValueError("sweep grid is empty")
    if not preset.has_model:
        raise ValueError("sweeps need a preset with drive parameters")

    rows = []
    if param == "t":
        if metric in ("fidelity", "leakage"):
            for t in values:
                rows.append(_metric_at(preset, model, n_atoms, n_max, metric, t))
        else:
            params = preset.drive_params(n_atoms)
            der = derive(params)
            snaps = evolve_qubit_columns(params, sorted(set(values)), model,
                                         n_atoms, n_max)
            by_time = {}
            for ts, u, leak, _ in snaps:
                _, phases = _phases_of(u, n_atoms)
                phi = wrap_phase(-(phases[-1] - phases[1] - phases[2]
                                   + phases[0]))
                if metric == "phase":
                    by_time[ts] = phi
                else:
                    target = der.pair_rate * ts
                    by_time[ts] = phase_distance(phi, target) / target
            rows = [by_time[float(t)] for t in values]
    elif param == "delta-scale":
        for s in values:
            rows.append(_metric_at(preset, model, n_atoms, n_max, metric,
                                   t_units, scale=s))
    elif param == "omega":
        for w in values:
            rows.append(_metric_at(preset, model, n_atoms, n_max, metric,
                                   t_units, omega=w))
    else:  # n-max
        for v in values:
            rows.append(_metric_at(preset, model, n_atoms, int(v), metric,
                                   t_units))
    return {
        "kind": "sweep",
        "preset": preset.name,
        "param": param,
        "metric": metric,
        "model": model,
        "values": values,
        "rows": [{"value": v, "metric_value": m} for v, m in zip(values, rows)],
    }
