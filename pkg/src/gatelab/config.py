"""Key-value text schema for parameter sets, fusion plans, and sweep grids.

Format: one ``key = value`` pair per line, ``#`` starts a comment, blank
lines ignored.  Keys may repeat where order matters (``step``).

Parameter files (preset ``custom``)::

    omega = 1.05          # drive amplitude, units of g
    delta1 = 20           # cavity detuning, units of g
    delta2 = 21           # drive detuning, units of g
    g_physical = 1.8e8    # rad/s per unit of g (optional)
    t_cavity = 7.6e-7     # lifetimes in seconds (optional)
    t_relax = 7.6e-7
    t_motional = 1e-2
    nominal_population = 0.01

Fusion plan files::

    n_qubits = 7
    step = cz 0 1
    step = entangle 2 3 4
    step = lc 3
    target = 0-1 1-2 2-3 3-4 4-5 5-6
    description = free text
    reconstructed = false

Sweep grid files::

    param = delta-scale   # delta-scale | omega | n-max | t
    values = 1 2 4
    metric = phase-deviation
    model = full
"""

from __future__ import annotations

from .graphs import Cz, Entangle, FusionPlan, Graph, LocalComplement
from .presets import Preset


class ConfigError(ValueError):
    """Malformed configuration text."""


def parse_pairs(text: str) -> list[tuple[str, str]]:
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        pairs.append((key.strip(), value.strip()))
    return pairs


def _single(pairs, key, default=None):
    hits = [v for k, v in pairs if k == key]
    if not hits:
        return default
    if len(hits) > 1:
        raise ConfigError(f"key {key!r} given {len(hits)} times")
    return hits[0]


def _float(pairs, key, default=None):
    raw = _single(pairs, key)
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"key {key!r}: {raw!r} is not a number") from None


def parse_preset_config(text: str, name: str = "custom") -> Preset:
    pairs = parse_pairs(text)
    preset = Preset(
        name=name,
        omega=_float(pairs, "omega"),
        delta1=_float(pairs, "delta1"),
        delta2=_float(pairs, "delta2"),
        g=_float(pairs, "g", 1.0),
        g_physical=_float(pairs, "g_physical"),
        pair_rate_physical=_float(pairs, "pair_rate_physical"),
        t_cavity=_float(pairs, "t_cavity"),
        t_relax=_float(pairs, "t_relax"),
        t_motional=_float(pairs, "t_motional"),
        nominal_population=_float(pairs, "nominal_population"),
    )
    if not preset.has_model and preset.pair_rate_physical is None:
        raise ConfigError(
            "config must give omega/delta1/delta2 or pair_rate_physical"
        )
    return preset


def dump_preset_config(preset: Preset) -> str:
    lines = []
    for key in ("omega", "delta1", "delta2", "g", "g_physical",
                "pair_rate_physical", "t_cavity", "t_relax", "t_motional",
                "nominal_population"):
        value = getattr(preset, key)
        if value is not None:
            lines.append(f"{key} = {value!r}")
    return "\n".join(lines) + "\n"


def _parse_edges(raw: str, n: int) -> Graph:
    edges = []
    for tok in raw.split():
        a, sep, b = tok.partition("-")
        if not sep:
            raise ConfigError(f"target edge {tok!r} is not 'a-b'")
        edges.append((int(a), int(b)))
    return Graph.from_edges(n, edges)


def _parse_step(raw: str):
    fields = raw.split()
    if not fields:
        raise ConfigError("empty step")
    kind, args = fields[0].lower(), fields[1:]
    try:
        if kind == "cz":
            a, b = (int(x) for x in args)
            return Cz(a, b)
        if kind == "entangle":
            return Entangle(tuple(int(x) for x in args))
        if kind == "lc":
            (v,) = (int(x) for x in args)
            return LocalComplement(v)
    except ValueError:
        raise ConfigError(f"bad step arguments in {raw!r}") from None
    raise ConfigError(f"unknown step kind {kind!r} (cz | entangle | lc)")


def parse_plan_config(text: str) -> FusionPlan:
    pairs = parse_pairs(text)
    raw_n = _single(pairs, "n_qubits")
    if raw_n is None:
        raise ConfigError("plan needs n_qubits")
    n = int(raw_n)
    steps = tuple(_parse_step(v) for k, v in pairs if k == "step")
    raw_target = _single(pairs, "target")
    if raw_target is None:
        raise ConfigError("plan needs a target edge list")
    target = _parse_edges(raw_target, n)
    reconstructed = (_single(pairs, "reconstructed", "false").lower()
                     in ("1", "true", "yes"))
    return FusionPlan(
        n_qubits=n, steps=steps, target=target,
        description=_single(pairs, "description", ""),
        reconstructed=reconstructed,
    )


def dump_plan_config(plan: FusionPlan) -> str:
    lines = [f"n_qubits = {plan.n_qubits}"]
    for s in plan.steps:
        if isinstance(s, Cz):
            lines.append(f"step = cz {s.a} {s.b}")
        elif isinstance(s, Entangle):
            lines.append("step = entangle " + " ".join(map(str, s.vertices)))
        else:
            lines.append(f"step = lc {s.vertex}")
    lines.append("target = " + " ".join(f"{a}-{b}" for a, b in plan.target.edges()))
    if plan.description:
        lines.append(f"description = {plan.description}")
    if plan.reconstructed:
        lines.append("reconstructed = true")
    return "\n".join(lines) + "\n"


def parse_sweep_config(text: str) -> dict:
    pairs = parse_pairs(text)
    out = {
        "param": _single(pairs, "param"),
        "metric": _single(pairs, "metric"),
        "model": _single(pairs, "model", "full"),
    }
    raw_values = _single(pairs, "values")
    if out["param"] is None or out["metric"] is None or raw_values is None:
        raise ConfigError("sweep needs param, values and metric")
    try:
        out["values"] = [float(v) for v in raw_values.split()]
    except ValueError:
        raise ConfigError(f"bad sweep values {raw_values!r}") from None
    return out
