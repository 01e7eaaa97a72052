"""End-to-end experiments: speed limits, open-system bounds, Trotter checks.

The closed-system experiment reproduces the two-panel comparison of the
actual unitary deviation against the energy-constrained bound

    t * ||H1 - H2||_{op, f_t(E)},   f_t(E) = E + (exp(omega t) - 1)(E + e0),

and the uniform operator-norm bound t * ||H1 - H2||.  Stability constants
are certified for both Hamiltonians and the smaller resulting bound wins
per time point.  See-saw values appear only on the right-hand side of the
asserted inequalities, so a see-saw shortfall can only raise false alarms,
never mask a violation; such rows are reported as inconclusive when the
exact cp upper bound still covers the left-hand side.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .lindblad import (
    BoundViolation,
    LindbladGenerator,
    StabilityCertificate,
    best_certificate,
    default_e0_grid,
    evolve,
    joint_constants,
    min_omega,
    stability_curve,
)
from .models import SpinSystem, ad_norm_su2, spin_system
from .norms import CpDifference, ecd_norm_seesaw, eco_norm, trace_norm
from .opcore import (
    DensityState,
    HermitianMatrix,
    ReferenceHamiltonian,
    energy,
    haar_state,
    random_density,
    random_hermitian,
    rng_from_seed,
    spectral_function,
    vector_energy,
)

ROW_TOL = 1e-7
OPEN_TOL = 1e-6


@dataclass(frozen=True)
class SpeedLimitConfig:
    n_qubits: int = 7
    scenario: str = "left"
    time_grid: tuple = tuple(np.linspace(0.0, 0.6, 61))
    seed: int = 0
    perturbation_norms: tuple = ()
    first_order: bool = False
    h1: HermitianMatrix | None = None
    h2: HermitianMatrix | None = None

    def __post_init__(self):
        grid = tuple(float(t) for t in self.time_grid)
        if not grid or grid[0] != 0.0 or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("time grid must be ascending and start at 0")
        if self.scenario not in ("left", "right", "custom"):
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if self.scenario == "custom" and (self.h1 is None or self.h2 is None):
            raise ValueError("custom scenario needs explicit h1 and h2")
        object.__setattr__(self, "time_grid", grid)
        object.__setattr__(self, "perturbation_norms",
                           tuple(float(x) for x in self.perturbation_norms))


@dataclass(frozen=True)
class SpeedLimitRow:
    """One time point; the theorem-backed ordering is enforced on build."""

    time: float
    actual_error: float
    energy_bound: float
    uniform_bound: float

    def __post_init__(self):
        if self.actual_error > self.energy_bound + ROW_TOL:
            raise BoundViolation(
                f"actualError {self.actual_error} exceeds energyBound "
                f"{self.energy_bound} at t={self.time}"
            )
        if self.energy_bound > self.uniform_bound + ROW_TOL:
            raise BoundViolation(
                f"energyBound {self.energy_bound} exceeds uniformBound "
                f"{self.uniform_bound} at t={self.time}"
            )


def unitary_certificates(h: HermitianMatrix, g: ReferenceHamiltonian, e0_grid) -> list:
    """Symmetric pencil certificates for +-i[H, G] <= omega (G + e0)."""
    comm = HermitianMatrix(1j * (h.entries @ g.entries - g.entries @ h.entries))
    return [min_omega(comm, g, float(e0), symmetric=True) for e0 in e0_grid]


def _scenario_hamiltonians(cfg: SpeedLimitConfig, spin: SpinSystem, rng):
    if cfg.scenario == "left":
        norms = cfg.perturbation_norms or (0.5, 0.5)
        r1 = random_hermitian(spin.dim, rng, operator_norm=norms[0])
        r2 = random_hermitian(spin.dim, rng, operator_norm=norms[1])
        return spin.sx + r1, spin.sy + r2
    if cfg.scenario == "right":
        target = cfg.perturbation_norms[0] if cfg.perturbation_norms \
            else spin.sx.operator_norm()
        return spin.sx, random_hermitian(spin.dim, rng, operator_norm=target)
    return cfg.h1, cfg.h2


def speedlimit_run(cfg: SpeedLimitConfig) -> list:
    """Rows (time, actualError, energyBound, uniformBound) for one seed."""
    spin = spin_system(cfg.n_qubits)
    g = spin.reference
    rng = rng_from_seed(cfg.seed)
    h1, h2 = _scenario_hamiltonians(cfg, spin, rng)

    phi = haar_state(spin.dim, rng)
    psi = g.ground_vector() + 0.5 * phi
    psi = psi / np.linalg.norm(psi)
    e_psi = vector_energy(g, psi)

    diff = h1 - h2
    uniform_rate = diff.operator_norm()
    e0_grid = default_e0_grid(g)
    certs = unitary_certificates(h1, g, e0_grid) + unitary_certificates(h2, g, e0_grid)

    ev1, vec1 = h1.eigh()
    ev2, vec2 = h2.eigh()
    c1 = vec1.conj().T @ psi
    c2 = vec2.conj().T @ psi

    rows = []
    for t in cfg.time_grid:
        if t == 0.0:
            rows.append(SpeedLimitRow(0.0, 0.0, 0.0, 0.0))
            continue
        u1psi = vec1 @ (np.exp(-1j * ev1 * t) * c1)
        u2psi = vec2 @ (np.exp(-1j * ev2 * t) * c2)
        actual = float(np.linalg.norm(u1psi - u2psi))
        budget = e_psi if cfg.first_order \
            else best_certificate(certs, e_psi, t).budget(e_psi, t)
        value, _ = eco_norm(diff.entries, g, budget)
        rows.append(SpeedLimitRow(float(t), actual, float(t) * value,
                                  float(t) * uniform_rate))
    return rows


def qsl_integral_bound(h1: HermitianMatrix, h2: HermitianMatrix,
                       g: ReferenceHamiltonian, e_psi: float,
                       cert: StabilityCertificate, t: float, panels: int = 64):
    """Midpoint-rule value of the integrated bound and its t-form majorant.

    Uses one fixed certificate so that both quantities instantiate the same
    estimate; the integrand is nondecreasing in s, hence the integral never
    exceeds t * ||H1 - H2||_{op, f_t(E)}.
    """
    diff = h1 - h2
    mids = (np.arange(panels) + 0.5) * (t / panels)
    total = 0.0
    for s in mids:
        value, _ = eco_norm(diff.entries, g, cert.budget(e_psi, float(s)))
        total += value
    integral = total * (t / panels)
    t_form = t * eco_norm(diff.entries, g, cert.budget(e_psi, t))[0]
    return integral, t_form


# ---------------------------------------------------------------------------
# Open-system speed limit.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OpenSpeedLimitRow:
    time: float
    lhs_max: float
    rhs: float
    status: str  # ok | inconclusive | failed


@dataclass(frozen=True)
class OpenSpeedLimitReport:
    rows: tuple

    @property
    def all_ok(self) -> bool:
        return all(r.status == "ok" for r in self.rows)

    @property
    def any_failed(self) -> bool:
        return any(r.status == "failed" for r in self.rows)


def _feasible_density(rng, g: ReferenceHamiltonian, energy_budget: float) -> DensityState:
    rho = random_density(g.dim, rng)
    e = energy(g, rho)
    if e <= energy_budget:
        return rho
    theta = 1.0 - energy_budget / e
    ground = g.ground_vector()
    mixed = (1.0 - theta) * rho.entries + theta * np.outer(ground, ground.conj())
    return DensityState(HermitianMatrix(mixed))


def generator_difference(gen1: LindbladGenerator, gen2: LindbladGenerator) -> CpDifference:
    if gen1.dim != gen2.dim:
        raise ValueError("generators must share a dimension")
    s_hat = gen1.superoperator() - gen2.superoperator()
    return CpDifference.from_superoperator(s_hat, gen1.dim, gen1.dim)


def generator_commutator(gen1: LindbladGenerator, gen2: LindbladGenerator) -> CpDifference:
    if gen1.dim != gen2.dim:
        raise ValueError("generators must share a dimension")
    s1, s2 = gen1.superoperator(), gen2.superoperator()
    return CpDifference.from_superoperator(s1 @ s2 - s2 @ s1, gen1.dim, gen1.dim)


def open_speedlimit(gen1: LindbladGenerator, gen2: LindbladGenerator,
                    g: ReferenceHamiltonian, energy_budget: float, t_grid,
                    n_states: int = 20, seed: int = 0, restarts: int = 64,
                    ancilla_dim: int | None = None) -> OpenSpeedLimitReport:
    """Check ||T1(t)rho - T2(t)rho||_1 <= t ||L1 - L2||_{<>, f_t(E)}.

    The right-hand side is a see-saw lower bound of the ECD norm, so it can
    only understate the true bound; rows where it falls short but the exact
    cp upper bound still covers the left-hand side are inconclusive.
    """
    e0_grid = default_e0_grid(g)
    certs = stability_curve(gen1, g, e0_grid) + stability_curve(gen2, g, e0_grid)
    diff = generator_difference(gen1, gen2)
    rng = rng_from_seed(seed)
    states = [_feasible_density(rng, g, energy_budget) for _ in range(n_states)]

    rows = []
    for t in t_grid:
        t = float(t)
        if t <= 0:
            raise ValueError("time grid entries must be positive")
        budget = best_certificate(certs, energy_budget, t).budget(energy_budget, t)
        estimate = ecd_norm_seesaw(diff, g, budget, ancilla_dim=ancilla_dim,
                                   restarts=restarts, seed=seed)
        rhs = t * estimate.value
        lhs = 0.0
        for rho in states:
            delta = evolve(gen1, rho, t).entries - evolve(gen2, rho, t).entries
            lhs = max(lhs, trace_norm(delta))
        if lhs <= rhs + OPEN_TOL:
            status = "ok"
        elif lhs <= t * diff.exact_cp_upper_bound(g, budget) + OPEN_TOL:
            status = "inconclusive"
        else:
            status = "failed"
        rows.append(OpenSpeedLimitRow(t, lhs, rhs, status))
    return OpenSpeedLimitReport(tuple(rows))


# ---------------------------------------------------------------------------
# Trotter product formula.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrotterRow:
    steps: int
    lhs_max: float
    rhs: float
    status: str


@dataclass(frozen=True)
class TrotterReport:
    rows: tuple
    decay_exponent: float | None

    @property
    def all_ok(self) -> bool:
        return all(r.status == "ok" for r in self.rows)

    @property
    def any_failed(self) -> bool:
        return any(r.status == "failed" for r in self.rows)


def trotter_run(gen1: LindbladGenerator, gen2: LindbladGenerator,
                g: ReferenceHamiltonian, energy_budget: float, t: float,
                n_grid, n_states: int = 10, seed: int = 0,
                restarts: int = 64) -> TrotterReport:
    """Check ||(T1(t/n) T2(t/n))^n rho - e^(tL) rho||_1 <= (t^2/2n) ||[L1, L2]||_{<>, f_2t(E)}.

    Joint stability constants are the pairwise max over the e0 grid; the
    empirical 1/n decay exponent of the left-hand side is recorded.
    """
    if t <= 0:
        raise ValueError("time must be positive")
    e0_grid = default_e0_grid(g)
    joint = joint_constants([stability_curve(gen1, g, e0_grid),
                             stability_curve(gen2, g, e0_grid)])
    budget = best_certificate(joint, energy_budget, 2.0 * t).budget(energy_budget, 2.0 * t)

    comm = generator_commutator(gen1, gen2)
    estimate = ecd_norm_seesaw(comm, g, budget, restarts=restarts, seed=seed)

    s1, s2 = gen1.superoperator(), gen2.superoperator()
    full = expm(t * (s1 + s2))
    rng = rng_from_seed(seed)
    states = [_feasible_density(rng, g, energy_budget) for _ in range(n_states)]

    rows = []
    lhs_series = []
    for n in n_grid:
        n = int(n)
        step = expm((t / n) * s1) @ expm((t / n) * s2)
        trotterized = np.linalg.matrix_power(step, n)
        lhs = 0.0
        for rho in states:
            vec = rho.entries.reshape(-1)
            delta = (trotterized @ vec - full @ vec).reshape(g.dim, g.dim)
            lhs = max(lhs, trace_norm((delta + delta.conj().T) / 2.0))
        rhs = (t * t / (2.0 * n)) * estimate.value
        status = "ok" if lhs <= rhs + OPEN_TOL else (
            "inconclusive" if lhs <= (t * t / (2.0 * n))
            * comm.exact_cp_upper_bound(g, budget) + OPEN_TOL else "failed"
        )
        rows.append(TrotterRow(n, lhs, rhs, status))
        lhs_series.append(lhs)

    exponent = None
    ns = np.array([r.steps for r in rows], dtype=float)
    ls = np.array(lhs_series)
    if np.all(ls > 1e-12):
        slope = np.polyfit(np.log(ns), np.log(ls), 1)[0]
        exponent = float(-slope)
    return TrotterReport(tuple(rows), exponent)


# ---------------------------------------------------------------------------
# Lie-group speed limit.
# ---------------------------------------------------------------------------

def group_qsl(spin: SpinSystem, c_x, c_y, psi: np.ndarray):
    """Both sides of the group bound for A(X) = sum cX_j S_j.

    lhs = ||exp(-iA(X)) psi - exp(-iA(Y)) psi||,
    rhs = (e^omega - 1)/omega * |cX - cY| * ||sqrt(Delta) psi||, with
    omega = min(ad norms) and the convention (e^0 - 1)/0 = 1.
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(psi) - 1.0) > 1e-9:
        raise ValueError("psi must be a unit vector")
    c_x = np.asarray(c_x, dtype=float).reshape(3)
    c_y = np.asarray(c_y, dtype=float).reshape(3)

    def apply_exp(coeffs):
        gen = spin.generator(coeffs)
        evals, evecs = gen.eigh()
        return evecs @ (np.exp(-1j * evals) * (evecs.conj().T @ psi))

    lhs = float(np.linalg.norm(apply_exp(c_x) - apply_exp(c_y)))

    omega = min(ad_norm_su2(c_x), ad_norm_su2(c_y))
    factor = 1.0 if omega == 0.0 else (np.exp(omega) - 1.0) / omega
    sqrt_delta = spectral_function(spin.laplacian, "sqrt")
    rhs = float(factor * np.linalg.norm(c_x - c_y)
                * np.linalg.norm(sqrt_delta.entries @ psi))
    if lhs > rhs + 1e-9:
        raise BoundViolation(f"group speed limit violated: {lhs} > {rhs}")
    return lhs, rhs
