"""Hermitian linear algebra, the PSD operator order, and the parametric dual scan.

Everything downstream (energy-constrained norms, output-energy functions,
stability certificates) reduces to one primitive: given Hermitian M, a
reference Hamiltonian G with ground energy 0, and an energy budget E > 0,
minimize

    g(lam) = lam * E + max(0, lambda_max(M - lam * G))        over lam >= 0.

g is convex (pointwise max of affine functions of lam), so a golden-section
search on a safe bracket finds the minimum.  The minimizer yields an affine
certificate (lam, E0) witnessing the operator inequality M <= lam*G + E0,
and by strong duality the value equals sup{tr[M rho] : tr[G rho] <= E} for
PSD M (the ground state of G is a strictly feasible point).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HERMITICITY_RTOL = 1e-10
PSD_RTOL = 1e-9
CERT_RESIDUAL_RTOL = 1e-8
GOLDEN_TOL = 1e-10
GOLDEN_MAX_ITER = 200

_INV_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def _as_complex_matrix(entries) -> np.ndarray:
    a = np.asarray(entries, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


@dataclass(frozen=True)
class HermitianMatrix:
    """Dense complex square matrix with enforced Hermiticity.

    Construction symmetrizes via (A + A*)/2 and rejects inputs whose
    anti-Hermitian part exceeds ``1e-10 * (1 + frobenius norm)``.
    """

    entries: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self):
        a = _as_complex_matrix(self.entries)
        skew = np.linalg.norm(a - a.conj().T)
        if skew > HERMITICITY_RTOL * (1.0 + np.linalg.norm(a)):
            raise ValueError(f"matrix is not Hermitian (defect {skew:.3e})")
        sym = (a + a.conj().T) / 2.0
        sym.flags.writeable = False
        object.__setattr__(self, "entries", sym)
        object.__setattr__(self, "dim", sym.shape[0])

    @staticmethod
    def from_real(entries) -> "HermitianMatrix":
        return HermitianMatrix(np.asarray(entries, dtype=float).astype(complex))

    def eigh(self):
        """Ascending eigenvalues and eigenvectors (deterministic LAPACK order)."""
        return np.linalg.eigh(self.entries)

    def eigvals(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def operator_norm(self) -> float:
        if self.dim == 0:
            return 0.0
        return float(np.max(np.abs(self.eigvals())))

    def __add__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        return HermitianMatrix(self.entries + other.entries)

    def __sub__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        return HermitianMatrix(self.entries - other.entries)

    def __mul__(self, scalar: float) -> "HermitianMatrix":
        return HermitianMatrix(self.entries * float(scalar))

    __rmul__ = __mul__


def identity(dim: int) -> HermitianMatrix:
    return HermitianMatrix(np.eye(dim, dtype=complex))


@dataclass(frozen=True)
class ReferenceHamiltonian:
    """PSD Hermitian matrix with minimum eigenvalue exactly 0.

    Fixes the system's energy scale; it need not generate any dynamics.
    ``ground_energy_removed`` records the shift applied at construction.
    """

    matrix: HermitianMatrix
    ground_energy_removed: float = 0.0

    def __post_init__(self):
        evals = self.matrix.eigvals()
        lo = float(evals[0])
        scale = 1.0 + float(np.max(np.abs(evals))) if evals.size else 1.0
        if lo < -PSD_RTOL * scale:
            raise ValueError(f"reference Hamiltonian is not PSD (min eigenvalue {lo:.3e})")
        if lo != 0.0:
            shifted = HermitianMatrix(self.matrix.entries - lo * np.eye(self.matrix.dim))
            object.__setattr__(self, "matrix", shifted)
            object.__setattr__(
                self, "ground_energy_removed", self.ground_energy_removed + lo
            )

    @property
    def dim(self) -> int:
        return self.matrix.dim

    @property
    def entries(self) -> np.ndarray:
        return self.matrix.entries

    def eigh(self):
        return self.matrix.eigh()

    def max_energy(self) -> float:
        return self.matrix.operator_norm()

    def ground_vector(self) -> np.ndarray:
        """First ascending-order eigenvector; energy exactly 0 by construction."""
        _, vecs = self.eigh()
        return vecs[:, 0]


def ground_shift(h: HermitianMatrix) -> ReferenceHamiltonian:
    """Shift a Hermitian matrix so its ground energy is exactly 0."""
    lo = float(h.eigvals()[0])
    shifted = HermitianMatrix(h.entries - lo * np.eye(h.dim))
    return ReferenceHamiltonian(shifted, ground_energy_removed=lo)


@dataclass(frozen=True)
class DensityState:
    """PSD matrix with trace in [0, 1]; subnormalized states are allowed."""

    matrix: HermitianMatrix

    def __post_init__(self):
        evals = self.matrix.eigvals()
        scale = 1.0 + float(np.max(np.abs(evals))) if evals.size else 1.0
        if evals.size and float(evals[0]) < -PSD_RTOL * scale:
            raise ValueError(f"state is not PSD (min eigenvalue {evals[0]:.3e})")
        tr = float(np.real(np.trace(self.matrix.entries)))
        if tr < -1e-10 or tr > 1.0 + 1e-10:
            raise ValueError(f"state trace {tr} outside [0, 1]")

    @property
    def dim(self) -> int:
        return self.matrix.dim

    @property
    def entries(self) -> np.ndarray:
        return self.matrix.entries

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix.entries)))

    @staticmethod
    def pure(psi: np.ndarray) -> "DensityState":
        v = np.asarray(psi, dtype=complex).reshape(-1)
        n = np.linalg.norm(v)
        if n == 0:
            raise ValueError("cannot normalize the zero vector")
        v = v / n
        return DensityState(HermitianMatrix(np.outer(v, v.conj())))


@dataclass(frozen=True)
class AffineCertificate:
    """Pair (lam, e0) witnessing M <= lam*G + e0; the shared dual currency.

    ``residual`` is the most negative eigenvalue of lam*G + e0 - M at
    verification time (>= -1e-8 * (1 + |M|) when verified).
    """

    lam: float
    e0: float
    residual: float = 0.0

    def __post_init__(self):
        if self.lam < 0 or self.e0 < 0:
            raise ValueError("certificate slope and offset must be nonnegative")

    def bound(self, energy: float) -> float:
        return self.lam * energy + self.e0

    def verify(self, m: HermitianMatrix, g: ReferenceHamiltonian) -> "AffineCertificate":
        """Recompute the residual against M <= lam*G + e0 and check it."""
        gap = self.lam * g.entries + self.e0 * np.eye(g.dim) - m.entries
        res = float(np.linalg.eigvalsh((gap + gap.conj().T) / 2.0)[0])
        if res < -CERT_RESIDUAL_RTOL * (1.0 + m.operator_norm()):
            raise ValueError(f"certificate fails verification (residual {res:.3e})")
        return AffineCertificate(self.lam, self.e0, residual=res)


def psd_order_leq(a: HermitianMatrix, b: HermitianMatrix, tol: float = PSD_RTOL) -> bool:
    """Operator order A <= B, i.e. B - A is PSD up to a relative slack."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    diff = b.entries - a.entries
    evals = np.linalg.eigvalsh((diff + diff.conj().T) / 2.0)
    scale = 1.0 + float(np.max(np.abs(evals))) if evals.size else 1.0
    return bool(evals[0] >= -tol * scale)


def energy(g: ReferenceHamiltonian, rho: DensityState) -> float:
    """Mean energy tr[G rho], clamped at 0 from below within tolerance."""
    if g.dim != rho.dim:
        raise ValueError(f"dimension mismatch: {g.dim} vs {rho.dim}")
    val = float(np.real(np.trace(g.entries @ rho.entries)))
    if val < 0:
        if val < -PSD_RTOL * (1.0 + g.max_energy()):
            raise ValueError(f"negative energy {val:.3e} beyond tolerance")
        return 0.0
    return val


def vector_energy(g: ReferenceHamiltonian, psi: np.ndarray) -> float:
    v = np.asarray(psi, dtype=complex).reshape(-1)
    return max(0.0, float(np.real(v.conj() @ (g.entries @ v))))


def golden_section(f, a: float, b: float, tol: float = GOLDEN_TOL,
                   max_iter: int = GOLDEN_MAX_ITER):
    """Minimize a convex scalar function on [a, b].

    Returns (x, f(x)) for the best point seen.  Raises RuntimeError if the
    bracket has not shrunk below ``tol`` after ``max_iter`` iterations,
    which signals a bracket failure for the convex objectives used here.
    """
    best_x, best_f = a, f(a)
    fb = f(b)
    if fb < best_f:
        best_x, best_f = b, fb

    c = b - _INV_GOLDEN * (b - a)
    d = a + _INV_GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if fc < best_f:
            best_x, best_f = c, fc
        if fd < best_f:
            best_x, best_f = d, fd
        if abs(b - a) <= tol * (1.0 + abs(a) + abs(b)):
            return best_x, best_f
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_GOLDEN * (b - a)
            fd = f(d)
    raise RuntimeError("golden-section search did not converge (bracket failure)")


def _dual_objective(m_entries: np.ndarray, g_entries: np.ndarray, energy_budget: float):
    eye = np.eye(m_entries.shape[0])

    def top(lam: float) -> float:
        return float(np.linalg.eigvalsh(m_entries - lam * g_entries)[-1])

    def g_of(lam: float) -> float:
        return lam * energy_budget + max(0.0, top(lam))

    return top, g_of, eye


def dual_scan(m: HermitianMatrix, g: ReferenceHamiltonian, energy_budget: float):
    """Minimize lam*E + max(0, lambda_max(M - lam*G)) over lam >= 0.

    Returns ``(value, cert)`` where ``cert`` is the minimizing affine
    certificate.  For PSD M the value equals the energy-constrained
    supremum sup{tr[M rho] : rho state, tr[G rho] <= E} by strong duality.
    """
    if m.dim != g.dim:
        raise ValueError(f"dimension mismatch: {m.dim} vs {g.dim}")
    if energy_budget <= 0:
        raise ValueError("energy budget must be positive")

    top, g_of, _ = _dual_objective(m.entries, g.entries, energy_budget)

    # The minimizer obeys lam*E <= g(lam*) <= g(0), so this bracket is safe.
    lam_hi = 2.0 * max(1.0, max(0.0, top(0.0)) / energy_budget)
    lam_star, value = golden_section(g_of, 0.0, lam_hi)

    e0_star = max(0.0, top(lam_star))
    value = lam_star * energy_budget + e0_star
    cert = AffineCertificate(lam_star, e0_star).verify(m, g)
    return value, cert


def dual_scan_witness(m: HermitianMatrix, g: ReferenceHamiltonian, energy_budget: float,
                      gap_tol: float = 1e-8):
    """Reconstruct a primal-optimal pure state from the dual scan.

    At the optimal slope the witness lives in the top eigenspace of
    M - lam*G; mixing the two eigenvectors of the compressed G that
    straddle the budget pins the energy to exactly E.  The returned vector
    is always feasible, so tr[M psi psi*] is a certified lower bound.

    Returns ``(value, cert, psi)``.
    """
    value, cert = dual_scan(m, g, energy_budget)
    evals, evecs = np.linalg.eigh(m.entries - cert.lam * g.entries)
    scale = 1.0 + float(np.max(np.abs(evals)))
    pick = evals >= evals[-1] - gap_tol * scale
    basis = evecs[:, pick]

    # Compress G to the top eigenspace and aim for energy exactly E.
    g_small = basis.conj().T @ g.entries @ basis
    g_small = (g_small + g_small.conj().T) / 2.0
    ge, gv = np.linalg.eigh(g_small)
    vecs = basis @ gv

    if energy_budget >= ge[-1]:
        psi = vecs[:, -1]
    elif energy_budget >= ge[0]:
        j = int(np.searchsorted(ge, energy_budget))
        lo_v, hi_v = vecs[:, j - 1], vecs[:, j]
        s = (energy_budget - ge[j - 1]) / (ge[j] - ge[j - 1])
        psi = np.sqrt(1.0 - s) * lo_v + np.sqrt(s) * hi_v
    else:
        # Numerically empty intersection with the budget: cool the lowest
        # eigenspace member toward the ground space instead.
        psi = vecs[:, 0]
    # The retraction is the identity on feasible vectors and guards the
    # float edge cases of the branch above.
    psi = project_to_energy_shell(psi / np.linalg.norm(psi), g, energy_budget)
    return value, cert, psi


def project_to_energy_shell(psi: np.ndarray, g: ReferenceHamiltonian,
                            energy_budget: float) -> np.ndarray:
    """Exact feasibility retraction: scale excited amplitudes by sqrt(E/e).

    Works in the eigenbasis of G; the freed weight moves into the ground
    modes (eigenvalues at numerical zero, which every reference Hamiltonian
    has), so the result is a unit vector with energy min(e, E) up to the
    ground modes' 1e-12-relative eigenvalue noise.
    """
    v = np.asarray(psi, dtype=complex).reshape(-1)
    v = v / np.linalg.norm(v)
    ge, gv = g.eigh()
    ge = np.clip(ge, 0.0, None)
    c = gv.conj().T @ v
    e = float(ge @ np.abs(c) ** 2)
    if e <= energy_budget:
        return v
    excited = ge > 1e-12 * (1.0 + ge[-1])
    ground = ~excited
    if not np.any(ground):
        raise ValueError("reference Hamiltonian has no numerically zero ground mode")
    c[excited] *= np.sqrt(energy_budget / e)
    w = max(0.0, 1.0 - float(np.sum(np.abs(c[excited]) ** 2)))
    gw = float(np.sum(np.abs(c[ground]) ** 2))
    if gw > 1e-30:
        c[ground] *= np.sqrt(w / gw)
    else:
        c[int(np.flatnonzero(ground)[0])] = np.sqrt(w)
    out = gv @ c
    return out / np.linalg.norm(out)


def spectral_function(m: HermitianMatrix, f: str, p: float | None = None) -> HermitianMatrix:
    """Apply sqrt, power(p in (0,1]), or log1p through the eigendecomposition."""
    evals, evecs = m.eigh()
    scale = 1.0 + float(np.max(np.abs(evals))) if evals.size else 1.0
    if f in ("sqrt", "power"):
        if float(evals[0]) < -PSD_RTOL * scale:
            raise ValueError(f"{f} undefined on spectrum (min eigenvalue {evals[0]:.3e})")
        d = np.clip(evals, 0.0, None)
        if f == "sqrt":
            fd = np.sqrt(d)
        else:
            if p is None or not (0.0 < p <= 1.0):
                raise ValueError("power requires an exponent p in (0, 1]")
            fd = d ** p
    elif f == "log1p":
        if float(evals[0]) <= -1.0:
            raise ValueError("log1p undefined on spectrum (eigenvalue <= -1)")
        fd = np.log1p(evals)
    else:
        raise ValueError(f"unknown spectral function {f!r}")
    return HermitianMatrix(evecs @ (fd[:, None] * evecs.conj().T))


@dataclass(frozen=True)
class EnergyCurve:
    """Values of a concave nondecreasing energy function on an E-grid."""

    grid: tuple
    values: tuple
    certificates: tuple

    def __post_init__(self):
        grid = tuple(float(e) for e in self.grid)
        values = tuple(float(v) for v in self.values)
        if len(grid) != len(values) or len(grid) != len(self.certificates):
            raise ValueError("grid, values, and certificates must have equal length")
        if any(e <= 0 for e in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("energy grid must be positive and strictly ascending")
        scale = 1.0 + max((abs(v) for v in values), default=0.0)
        for (e1, v1), (e2, v2) in zip(zip(grid, values), zip(grid[1:], values[1:])):
            if v2 < v1 - 1e-9 * scale:
                raise ValueError("curve values must be nondecreasing in E")
            if v2 > (e2 / e1) * v1 + 1e-9 * scale:
                raise ValueError("curve violates the concavity ratio bound")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "certificates", tuple(self.certificates))


# ---------------------------------------------------------------------------
# Seeded sampling helpers shared by tests, the see-saw, and the experiments.
# ---------------------------------------------------------------------------

def rng_from_seed(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


def haar_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_hermitian(dim: int, rng: np.random.Generator,
                     operator_norm: float | None = None) -> HermitianMatrix:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = HermitianMatrix((a + a.conj().T) / 2.0)
    if operator_norm is not None:
        cur = h.operator_norm()
        if cur == 0.0:
            raise ValueError("cannot rescale the zero matrix to a target norm")
        h = HermitianMatrix(h.entries * (operator_norm / cur))
    return h


def random_psd(dim: int, rng: np.random.Generator) -> HermitianMatrix:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return HermitianMatrix(a @ a.conj().T / dim)


def random_reference(dim: int, rng: np.random.Generator) -> ReferenceHamiltonian:
    return ground_shift(random_psd(dim, rng))


def random_density(dim: int, rng: np.random.Generator) -> DensityState:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = a @ a.conj().T
    return DensityState(HermitianMatrix(m / np.trace(m).real))
