"""Drive parameters, the driven-atom Hamiltonians, and regime validity checks.

Three levels of description are provided, from exact to most reduced:

* ``h_full``       -- both drives coupling level 1 to the upper level, with
                      carrier phases exp(i*delta1*t) and exp(i*delta2*t);
* ``h_eff_cavity`` -- upper level eliminated: Stark shifts on level 1 plus a
                      mode-drive bridge rotating at delta = delta2 - delta1;
* ``h_eff_diag``   -- mode eliminated as well (vacuum sector): a purely
                      diagonal qubit Hamiltonian whose pairwise part
                      accumulates conditional phase at ``pair_rate``.

Sign convention note: the diagonal model keeps the conventional printed sign
of its level shifts (+coupling^2/delta), while the actual second-order
dynamics of the bridge term accumulates those phases with the opposite sign.
Magnitudes agree in the dispersive limit and both conventions reach the
controlled-Z point at t = pi/pair_rate, so cross-model comparisons in
:mod:`gatelab.gates` are made sign-insensitively.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    EXCITED,
    Dims,
    SparseOperator,
    TimeDependentHamiltonian,
    annihilator,
    atom_projector,
    atom_transition,
    number_operator,
)


class DegenerateDetuningError(ValueError):
    """delta2 == delta1 leaves the pair rate undefined."""


class NonUniformModelError(ValueError):
    """The requested reduction is only derived for uniform couplings."""


@dataclass(frozen=True)
class DriveParams:
    """Per-atom couplings and the two drive detunings, in units of g."""

    g: tuple[complex, ...]
    omega: tuple[complex, ...]
    delta1: float
    delta2: float

    def __post_init__(self):
        if len(self.g) != len(self.omega) or not self.g:
            raise ValueError("need one g and one omega per atom")
        if self.delta1 == 0 or self.delta2 == 0:
            raise ValueError("detunings must be nonzero")

    @classmethod
    def uniform(cls, n_atoms: int, omega: float, delta1: float, delta2: float,
                g: float = 1.0) -> "DriveParams":
        """All atoms share real couplings g and omega."""
        return cls(
            g=(complex(g),) * n_atoms,
            omega=(complex(omega),) * n_atoms,
            delta1=float(delta1),
            delta2=float(delta2),
        )

    @property
    def n_atoms(self) -> int:
        return len(self.g)

    @property
    def is_uniform(self) -> bool:
        return (
            len(set(self.g)) == 1
            and len(set(self.omega)) == 1
            and self.g[0].imag == 0
            and self.omega[0].imag == 0
        )

    def scaled_detunings(self, factor: float) -> "DriveParams":
        """Same couplings with both detunings multiplied by `factor`."""
        return DriveParams(self.g, self.omega,
                           self.delta1 * factor, self.delta2 * factor)


@dataclass(frozen=True)
class DerivedParams:
    """Quantities derived from a DriveParams set.

    ``couplings[j] = conj(omega_j) g_j (1/delta1 + 1/delta2) / 2`` is the
    two-photon bridge amplitude per atom; in the uniform case ``pair_rate =
    2 coupling^2 / delta`` is the pairwise conditional-phase rate.
    """

    delta: float
    couplings: tuple[complex, ...]
    coupling: float | None
    pair_rate: float | None


def derive(params: DriveParams) -> DerivedParams:
    delta = params.delta2 - params.delta1
    if delta == 0:
        raise DegenerateDetuningError("delta2 - delta1 = 0: pair rate undefined")
    half_sum = (1.0 / params.delta1 + 1.0 / params.delta2) / 2.0
    couplings = tuple(
        complex(w).conjugate() * complex(g) * half_sum
        for g, w in zip(params.g, params.omega)
    )
    if params.is_uniform:
        lam = couplings[0].real
        return DerivedParams(delta, couplings, lam, 2.0 * lam * lam / delta)
    return DerivedParams(delta, couplings, None, None)


def _excite_sum(params: DriveParams, dims: Dims, weights) -> SparseOperator:
    """sum_j weight_j |e_j><1_j| as a sparse operator."""
    acc = None
    for j, w in enumerate(weights):
        if w == 0:
            continue
        op = atom_transition(dims, j, EXCITED, 1).scaled(w)
        acc = op if acc is None else acc + op
    if acc is None:
        acc = SparseOperator(dims, np.empty(0), np.empty(0), np.empty(0))
    return acc


def _from_csr(dims: Dims, mat, hermitian: bool = False) -> SparseOperator:
    coo = mat.tocoo()
    return SparseOperator(dims, coo.row.astype(np.int64),
                          coo.col.astype(np.int64), coo.data, hermitian=hermitian)


def h_full(params: DriveParams, dims: Dims) -> TimeDependentHamiltonian:
    """Interaction-picture Hamiltonian with both drives kept explicitly.

    H(t) = sum_j (g_j e^{i delta1 t} a |e_j><1_j|
                  + omega_j e^{i delta2 t} |e_j><1_j|) + h.c.
    """
    if params.n_atoms != dims.n_atoms:
        raise ValueError("params and dims disagree on the atom count")
    excite_g = _excite_sum(params, dims, params.g)
    a_cav = _from_csr(dims, annihilator(dims).to_csr() @ excite_g.to_csr())
    a_drv = _excite_sum(params, dims, params.omega)
    return TimeDependentHamiltonian(
        dims, static=None,
        terms=((params.delta1, a_cav), (params.delta2, a_drv)),
    )


def h_eff_cavity(params: DriveParams, dims: Dims) -> TimeDependentHamiltonian:
    """Upper level eliminated; the mode is still live.

    Static Stark terms -(|g_j|^2/delta1) a^dag a |1_j><1_j|
    - (|omega_j|^2/delta2) |1_j><1_j| plus the bridge
    -(coupling_j a e^{-i delta t} + h.c.) |1_j><1_j|.
    """
    if params.n_atoms != dims.n_atoms:
        raise ValueError("params and dims disagree on the atom count")
    der = derive(params)
    num = number_operator(dims).to_csr()
    a_csr = annihilator(dims).to_csr()
    static = None
    bridge = None
    for j in range(dims.n_atoms):
        p1 = atom_projector(dims, j, 1).to_csr()
        stark = (
            -(abs(params.g[j]) ** 2 / params.delta1) * (num @ p1)
            - (abs(params.omega[j]) ** 2 / params.delta2) * p1
        )
        static = stark if static is None else static + stark
        amp = -der.couplings[j] * (a_csr @ p1)
        bridge = amp if bridge is None else bridge + amp
    return TimeDependentHamiltonian(
        dims,
        static=_from_csr(dims, static, hermitian=True),
        terms=((-der.delta, _from_csr(dims, bridge)),),
    )


def h_eff_diag(params: DriveParams, dims: Dims,
               include_self_energy: bool = True) -> SparseOperator:
    """Vacuum-sector diagonal model: single-atom shifts plus the pair term.

    Eigenvalue on a basis state with m atoms in level 1:
    m*(-omega^2/delta2 + coupling^2/delta) when self-energies are included,
    plus pair_rate * m*(m-1)/2.  Uniform couplings only.
    """
    if params.n_atoms != dims.n_atoms:
        raise ValueError("params and dims disagree on the atom count")
    if not params.is_uniform:
        raise NonUniformModelError("the diagonal model requires uniform couplings")
    der = derive(params)
    omega = params.omega[0].real
    self_energy = -(omega**2) / params.delta2 + der.coupling**2 / der.delta

    idx = np.arange(dims.dim)
    atomic = idx // dims.photon_dim
    ones = np.zeros(dims.dim)
    for j in range(dims.n_atoms):
        ones += (atomic // 3 ** (dims.n_atoms - 1 - j)) % 3 == 1
    diag = der.pair_rate * ones * (ones - 1) / 2.0
    if include_self_energy:
        diag = diag + self_energy * ones
    keep = diag != 0
    return SparseOperator(dims, idx[keep], idx[keep], diag[keep], hermitian=True)


@dataclass(frozen=True)
class RegimeReport:
    """Named dispersive-validity ratios compared against one threshold."""

    ratios: tuple[tuple[str, float], ...]
    threshold: float
    passed: bool


def regime_check(params: DriveParams, threshold: float = 10.0) -> RegimeReport:
    """Check every dispersive-hierarchy ratio against `threshold`.

    A failing check is a report, not an error; ratios use the largest
    per-atom magnitudes so the check is conservative for non-uniform sets.
    """
    der = derive(params)
    g_max = max(abs(g) for g in params.g)
    w_max = max(abs(w) for w in params.omega)
    lam_max = max(abs(c) for c in der.couplings)
    d1, d2, dd = abs(params.delta1), abs(params.delta2), abs(der.delta)
    ratios = (
        ("delta1/g", d1 / g_max),
        ("delta2/omega", d2 / w_max),
        ("delta/(omega^2/delta2)", dd / (w_max**2 / d2)),
        ("delta/(g^2/delta1)", dd / (g_max**2 / d1)),
        ("delta/coupling", dd / lam_max),
    )
    passed = all(v >= threshold for _, v in ratios)
    return RegimeReport(ratios, threshold, passed)
