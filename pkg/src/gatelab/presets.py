"""Hardware presets and unit conversion.

Every number quoted for a platform lives here, never inside the physics
code: the workbench itself is unit-free (frequencies in units of g, times in
1/g) and conversion to seconds happens only through a preset's coupling
scale.  Frequencies are treated as angular throughout; where a preset is
specified only by an effective pair rate, reports also quote the cyclic
reading since the two differ by 2*pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .model import DriveParams, derive


@dataclass(frozen=True)
class Preset:
    """Uniform drive settings plus the physical scales of one platform."""

    name: str
    omega: float | None = None
    delta1: float | None = None
    delta2: float | None = None
    g: float = 1.0
    g_physical: float | None = None          # rad/s per unit of g
    pair_rate_physical: float | None = None  # rad/s, for rate-only presets
    t_cavity: float | None = None            # photon lifetime, s
    t_relax: float | None = None             # upper-level lifetime, s
    t_motional: float | None = None          # motional coherence, s
    nominal_population: float | None = None  # quoted excitation estimate

    @property
    def has_model(self) -> bool:
        return self.omega is not None and self.delta1 is not None \
            and self.delta2 is not None

    def drive_params(self, n_atoms: int = 2) -> DriveParams:
        if not self.has_model:
            raise ValueError(
                f"preset {self.name!r} carries no drive parameters, only an "
                f"effective pair rate"
            )
        return DriveParams.uniform(n_atoms, omega=self.omega,
                                   delta1=self.delta1, delta2=self.delta2,
                                   g=self.g)

    def pair_rate_units(self) -> float | None:
        """Pair rate in units of g when the drive model is available."""
        if not self.has_model:
            return None
        return derive(self.drive_params(2)).pair_rate

    def gate_time_seconds(self) -> float:
        """pi / pair rate, converted with this preset's coupling scale."""
        if self.has_model:
            if self.g_physical is None:
                raise ValueError(f"preset {self.name!r} has no physical scale")
            return seconds_from_units(math.pi / self.pair_rate_units(),
                                      self.g_physical)
        if self.pair_rate_physical is None:
            raise ValueError(f"preset {self.name!r} has no pair rate")
        return math.pi / self.pair_rate_physical

    def scaled_detunings(self, factor: float) -> "Preset":
        if not self.has_model:
            raise ValueError("cannot scale a rate-only preset")
        return replace(self, delta1=self.delta1 * factor,
                       delta2=self.delta2 * factor)


def seconds_from_units(t_units: float, g_physical: float) -> float:
    return t_units / g_physical


def units_from_seconds(t_seconds: float, g_physical: float) -> float:
    return t_seconds * g_physical


def squid() -> Preset:
    """Flux qubits in a microwave cavity."""
    return Preset(
        name="squid",
        omega=1.05, delta1=20.0, delta2=21.0,
        g_physical=1.8e8,
        t_cavity=7.6e-7, t_relax=7.6e-7,
        nominal_population=0.01,
    )


def ion() -> Preset:
    """Trapped ions sharing a collective vibrational mode; quoted only by
    the achievable effective pair rate."""
    return Preset(
        name="ion",
        pair_rate_physical=1.0e4,
        t_motional=1.0e-2,
    )


_BUILTIN = {"squid": squid, "ion": ion}


def builtin_names() -> tuple[str, ...]:
    return tuple(_BUILTIN) + ("custom",)


def get_preset(name: str) -> Preset:
    try:
        return _BUILTIN[name]()
    except KeyError:
        raise KeyError(
            f"unknown preset {name!r}; expected one of {builtin_names()} "
            f"(custom requires a config file)"
        ) from None
