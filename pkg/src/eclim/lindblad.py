"""Lindblad generators, stability-constant certification, and simulation.

A generator is the pair (K, {L_a}) acting as L(rho) = K rho + rho K* +
sum_a L_a rho L_a*.  Its dissipation matrix M = K*G + GK + sum L_a* G L_a
is the time-zero derivative of the energy, and the least omega with
M <= omega*(G + e0) is read off a Hermitian-definite pencil.  Together
(omega, e0) certify the Gronwall bound

    energy(t) <= exp(omega*t) * (E + e0) - e0.

Simulation vectorizes rho row-major, vec(A rho B) = (A (x) B^T) vec(rho),
so the superoperator is K (x) 1 + 1 (x) conj(K) + sum L (x) conj(L).
The amplitude-damping closed form pins this convention in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse
from scipy.linalg import expm
from scipy.sparse.linalg import expm_multiply

from .opcore import DensityState, HermitianMatrix, ReferenceHamiltonian, energy

DISSIPATIVITY_RTOL = 1e-9
DENSE_EXPM_MAX_DIM = 24


class BoundViolation(RuntimeError):
    """A theorem-backed inequality failed beyond tolerance."""


@dataclass(frozen=True)
class LindbladGenerator:
    """Standard generator L(rho) = K rho + rho K* + sum L_a rho L_a*."""

    k: np.ndarray
    lindblad: tuple
    dim: int = field(init=False)
    formally_conservative: bool = field(init=False)

    def __post_init__(self):
        k = np.asarray(self.k, dtype=complex)
        if k.ndim != 2 or k.shape[0] != k.shape[1]:
            raise ValueError("K must be a square matrix")
        ops = tuple(np.asarray(l, dtype=complex) for l in self.lindblad)
        for l in ops:
            if l.shape != k.shape:
                raise ValueError("Lindblad operators must match the dimension of K")
        dissipation = sum((l.conj().T @ l for l in ops), np.zeros_like(k)) + k + k.conj().T
        dissipation = (dissipation + dissipation.conj().T) / 2.0
        evals = np.linalg.eigvalsh(dissipation)
        scale = 1.0 + float(np.max(np.abs(k))) + float(np.max(np.abs(evals)))
        if float(evals[-1]) > DISSIPATIVITY_RTOL * scale:
            raise ValueError(
                f"dissipativity violated: sum L*L + K + K* has eigenvalue {evals[-1]:.3e} > 0"
            )
        conservative = bool(np.max(np.abs(evals)) <= DISSIPATIVITY_RTOL * scale)
        k = k.copy()
        k.flags.writeable = False
        ops = tuple(l.copy() for l in ops)
        for l in ops:
            l.flags.writeable = False
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "lindblad", ops)
        object.__setattr__(self, "dim", k.shape[0])
        object.__setattr__(self, "formally_conservative", conservative)
        object.__setattr__(self, "_cache", {})

    @staticmethod
    def from_hamiltonian(h, lindblad=()) -> "LindbladGenerator":
        """Build K = -iH - (1/2) sum L*L from a Hamiltonian."""
        hm = h.entries if isinstance(h, HermitianMatrix) else np.asarray(h, dtype=complex)
        ops = tuple(np.asarray(l, dtype=complex) for l in lindblad)
        k = -1j * hm - 0.5 * sum((l.conj().T @ l for l in ops), np.zeros_like(hm))
        return LindbladGenerator(k, ops)

    def superoperator(self) -> np.ndarray:
        cache = object.__getattribute__(self, "_cache")
        if "superop" not in cache:
            eye = np.eye(self.dim)
            s = np.kron(self.k, eye) + np.kron(eye, self.k.conj())
            for l in self.lindblad:
                s = s + np.kron(l, l.conj())
            cache["superop"] = s
        return cache["superop"]

    def superoperator_sparse(self) -> "scipy.sparse.csr_matrix":
        """Sparse assembly; avoids the dense dim^2 x dim^2 intermediate."""
        cache = object.__getattribute__(self, "_cache")
        if "superop_sparse" not in cache:
            eye = scipy.sparse.identity(self.dim, dtype=complex, format="csr")
            k = scipy.sparse.csr_matrix(self.k)
            s = scipy.sparse.kron(k, eye) + scipy.sparse.kron(eye, k.conj())
            for l in self.lindblad:
                ls = scipy.sparse.csr_matrix(l)
                s = s + scipy.sparse.kron(ls, ls.conj())
            cache["superop_sparse"] = scipy.sparse.csr_matrix(s)
        return cache["superop_sparse"]

    def apply(self, rho_entries: np.ndarray) -> np.ndarray:
        out = self.k @ rho_entries + rho_entries @ self.k.conj().T
        for l in self.lindblad:
            out = out + l @ rho_entries @ l.conj().T
        return out

    def propagator(self, t: float) -> np.ndarray:
        """exp(t * superoperator); cached per time for reuse across states."""
        cache = object.__getattribute__(self, "_cache")
        key = ("prop", float(t))
        if key not in cache:
            cache[key] = expm(float(t) * self.superoperator())
        return cache[key]


def dissipation_matrix(gen: LindbladGenerator, g: ReferenceHamiltonian) -> HermitianMatrix:
    """M = K*G + GK + sum L* G L; the time-zero energy derivative."""
    if gen.dim != g.dim:
        raise ValueError(f"dimension mismatch: generator {gen.dim}, reference {g.dim}")
    ge = g.entries
    m = gen.k.conj().T @ ge + ge @ gen.k
    for l in gen.lindblad:
        m = m + l.conj().T @ ge @ l
    return HermitianMatrix(m)


@dataclass(frozen=True)
class StabilityCertificate:
    """Constants (omega, e0) in the energy growth bound exp(omega t)(E+e0)-e0."""

    omega: float
    e0: float
    residual: float = 0.0

    def __post_init__(self):
        if self.omega < 0 or self.e0 < 0:
            raise ValueError("stability constants must be nonnegative")

    def budget(self, energy_in: float, t: float) -> float:
        """f_t(E) = exp(omega |t|) (E + e0) - e0."""
        return float(np.exp(self.omega * abs(t)) * (energy_in + self.e0) - self.e0)


def _pencil_transform(g: ReferenceHamiltonian, e0: float) -> np.ndarray:
    """(G + e0)^(-1/2) through the eigendecomposition of G."""
    ge, gv = g.eigh()
    d = (np.clip(ge, 0.0, None) + e0) ** -0.5
    return gv @ (d[:, None] * gv.conj().T)


def min_omega(m: HermitianMatrix, g: ReferenceHamiltonian, e0: float,
              symmetric: bool = False) -> StabilityCertificate:
    """Least omega >= 0 with M <= omega (G + e0), via the definite pencil.

    With ``symmetric`` the bound is enforced for -M as well (both time
    directions of a unitary group).
    """
    if m.dim != g.dim:
        raise ValueError(f"dimension mismatch: {m.dim} vs {g.dim}")
    if e0 <= 0:
        raise ValueError("e0 must be positive so that G + e0 is definite")
    w = _pencil_transform(g, e0)
    a = w @ m.entries @ w
    a = (a + a.conj().T) / 2.0
    evals = np.linalg.eigvalsh(a)
    omega = max(0.0, float(evals[-1]))
    if symmetric:
        omega = max(omega, float(-evals[0]))

    shifted = omega * (g.entries + e0 * np.eye(g.dim))
    residual = float(np.linalg.eigvalsh(shifted - m.entries)[0])
    if symmetric:
        residual = min(residual, float(np.linalg.eigvalsh(shifted + m.entries)[0]))
    return StabilityCertificate(omega, e0, residual=residual)


def pencil_vector(m: HermitianMatrix, g: ReferenceHamiltonian, e0: float,
                  symmetric: bool = False) -> np.ndarray:
    """Unit vector saturating the pencil: the first-order-sharp state."""
    w = _pencil_transform(g, e0)
    a = w @ m.entries @ w
    a = (a + a.conj().T) / 2.0
    evals, evecs = np.linalg.eigh(a)
    idx = len(evals) - 1
    if symmetric and -evals[0] > evals[-1]:
        idx = 0
    v = w @ evecs[:, idx]
    return v / np.linalg.norm(v)


def default_e0_grid(g: ReferenceHamiltonian, points: int = 13) -> np.ndarray:
    """Logarithmic grid 2^-6 .. 2^6 scaled by the top energy of G."""
    scale = max(g.max_energy(), 1e-6)
    return scale * np.logspace(-6, 6, points, base=2.0)


def stability_curve(gen: LindbladGenerator, g: ReferenceHamiltonian, e0_grid) -> list:
    """min_omega along an e0 grid; omega is nonincreasing in e0."""
    m = dissipation_matrix(gen, g)
    return [min_omega(m, g, float(e0)) for e0 in e0_grid]


def best_certificate(certs, energy_in: float, t: float) -> StabilityCertificate:
    """The certificate minimizing the bound exp(omega t)(E + e0) - e0."""
    if not certs:
        raise ValueError("no certificates supplied")
    return min(certs, key=lambda c: c.budget(energy_in, t))


def joint_constants(cert_lists) -> list:
    """Pairwise-max joint certificates across several dynamics, per e0."""
    joined = []
    for group in zip(*cert_lists):
        e0s = {round(c.e0, 12) for c in group}
        if len(e0s) != 1:
            raise ValueError("joint constants need aligned e0 grids")
        joined.append(StabilityCertificate(max(c.omega for c in group), group[0].e0,
                                           residual=min(c.residual for c in group)))
    return joined


def evolve(gen: LindbladGenerator, rho: DensityState, t: float) -> DensityState:
    """rho(t) = exp(t L) rho via the vectorized superoperator.

    Dense Pade scaling-and-squaring up to dimension 24; beyond that the
    action exp(tL) vec(rho) is computed directly (Al-Mohy/Higham), which
    the large truncated models need.  Output trace may only decrease.
    """
    if t < 0:
        raise ValueError("negative evolution times are not defined for semigroups")
    if gen.dim != rho.dim:
        raise ValueError(f"dimension mismatch: generator {gen.dim}, state {rho.dim}")
    if t == 0:
        return rho
    vec = rho.entries.reshape(-1)
    if gen.dim <= DENSE_EXPM_MAX_DIM:
        out_vec = gen.propagator(t) @ vec
    else:
        out_vec = expm_multiply(float(t) * gen.superoperator_sparse(), vec)
    out = out_vec.reshape(gen.dim, gen.dim)
    out = (out + out.conj().T) / 2.0
    tr_in, tr_out = rho.trace(), float(np.real(np.trace(out)))
    if tr_out > tr_in + 1e-9:
        raise BoundViolation(f"evolution increased the trace: {tr_in} -> {tr_out}")
    return DensityState(HermitianMatrix(out))


@dataclass(frozen=True)
class EnergyBoundReport:
    initial_energy: float
    times: tuple
    energies: tuple
    bounds: tuple
    margins: tuple

    @property
    def worst_margin(self) -> float:
        return min(self.margins) if self.margins else 0.0


def verify_energy_bound(gen: LindbladGenerator, g: ReferenceHamiltonian,
                        cert: StabilityCertificate, rho: DensityState,
                        t_grid) -> EnergyBoundReport:
    """Check energy(t) <= exp(omega t)(E + e0) - e0 along a time grid.

    Raises BoundViolation if any margin drops below the tolerance, which
    signals an invalid certificate or a simulation error.
    """
    e_in = energy(g, rho)
    tol = 1e-7 * (1.0 + e_in + cert.e0)
    times, energies, bounds, margins = [], [], [], []
    for t in t_grid:
        t = float(t)
        e_t = energy(g, evolve(gen, rho, t))
        bound = cert.budget(e_in, t)
        margin = bound - e_t
        times.append(t)
        energies.append(e_t)
        bounds.append(bound)
        margins.append(margin)
        if margin < -tol:
            raise BoundViolation(
                f"energy bound violated at t={t}: energy {e_t} > bound {bound}"
            )
    return EnergyBoundReport(e_in, tuple(times), tuple(energies), tuple(bounds),
                             tuple(margins))
